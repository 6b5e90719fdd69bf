//! Triorthogonal matrices from twisted, punctured one-point AG codes.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::agcode::{dual_residue_vector, CodeError};
use crate::curves::{Curve, CurveError};
use crate::gf2e::{Fe, Field, FieldError};
use crate::linalg::Matrix;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("a >= 3g+2 violated (a={a}, 3g+2={need})")]
    DegreeTooSmall { a: usize, need: usize },
    #[error("k > 0 violated")]
    ZeroK,
    #[error("k <= a-3g-1 violated (k={k}, a-3g-1={max})")]
    KTooLarge { k: usize, max: i64 },
    #[error("e = n''-2+g-7a >= 0 violated (e={e})")]
    NegativeE { e: i64 },
    #[error("N >= n''-g violated (N={n_big}, n''-g={bound})")]
    TooManyZeros { n_big: usize, bound: i64 },
    #[error("twisted generator has rank {got} on its first {k} pivots")]
    RankDeficient { got: usize, k: usize },
    #[error("zero weight in sigma or tau at column {0}")]
    ZeroWeight(usize),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Where a matrix came from. `place_perm[c]` is the index into
/// `Curve::pipeline_places` of the place behind twisted column c (length N).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub curve: String,
    pub a: usize,
    pub genus: usize,
    pub seed: u64,
    pub place_perm: Vec<usize>,
    pub column_permuted: bool,
}

#[derive(Clone, Debug)]
pub struct TriorthogonalMatrix {
    pub field: Arc<Field>,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// m x n; top k rows are G_1, the rest G_0.
    pub rows: Matrix,
    pub sigma: Vec<Fe>,
    pub tau: Vec<Fe>,
    /// Length N = n + k.
    pub w: Vec<Fe>,
    pub provenance: Provenance,
}

impl TriorthogonalMatrix {
    pub fn from_parts(
        field: Arc<Field>,
        k: usize,
        rows: Matrix,
        sigma: Vec<Fe>,
        tau: Vec<Fe>,
        w: Vec<Fe>,
        provenance: Provenance,
    ) -> Result<Self, ConstructError> {
        let (m, n) = (rows.rows(), rows.cols());
        if k > m || sigma.len() != n || tau.len() != k || w.len() != n + k {
            return Err(ConstructError::Shape(format!(
                "m={m} n={n} k={k} |sigma|={} |tau|={} |w|={}",
                sigma.len(),
                tau.len(),
                w.len()
            )));
        }
        if let Some(i) = sigma.iter().position(|x| x.is_zero()) {
            return Err(ConstructError::ZeroWeight(k + i));
        }
        if let Some(i) = tau.iter().position(|x| x.is_zero()) {
            return Err(ConstructError::ZeroWeight(i));
        }
        Ok(TriorthogonalMatrix { field, n, k, m, rows, sigma, tau, w, provenance })
    }

    pub fn g1(&self) -> Matrix {
        self.rows.select_rows(&(0..self.k).collect::<Vec<_>>())
    }

    pub fn g0(&self) -> Matrix {
        self.rows.select_rows(&(self.k..self.m).collect::<Vec<_>>())
    }

    /// N = n + k.
    pub fn big_n(&self) -> usize {
        self.n + self.k
    }
}

/// Default (a, k) for a curve: (4, 1) in genus 0, else a = floor(9g/2) and
/// k = floor(5g/4) clamped to a-3g-1.
pub fn preset_parameters(curve: &Curve) -> (usize, usize) {
    let g = curve.genus();
    if g == 0 {
        return (4, 1);
    }
    let a = 9 * g / 2;
    (a, (5 * g / 4).min(a - 3 * g - 1))
}

/// The full pipeline: residue vector, seventh roots, twisted code, reduction.
pub fn construct(
    curve: &Curve,
    a: usize,
    k: usize,
    seed: u64,
) -> Result<TriorthogonalMatrix, ConstructError> {
    let f = curve.field().clone();
    f.root7_exponent()?;
    let g = curve.genus();
    let places = curve.pipeline_places();
    let npp = places.len();
    if a < 3 * g + 2 {
        return Err(ConstructError::DegreeTooSmall { a, need: 3 * g + 2 });
    }
    if k == 0 {
        return Err(ConstructError::ZeroK);
    }
    let kmax = a as i64 - 3 * g as i64 - 1;
    if k as i64 > kmax {
        return Err(ConstructError::KTooLarge { k, max: kmax });
    }
    let e = npp as i64 - 2 + g as i64 - 7 * a as i64;
    if e < 0 {
        return Err(ConstructError::NegativeE { e });
    }

    let rv = dual_residue_vector(curve, npp - 2 + g, &places, seed)?;
    let mut keep: Vec<usize> = (0..npp).filter(|&i| !rv.values[i].is_zero()).collect();
    let n_big = keep.len();
    if (n_big as i64) < npp as i64 - g as i64 {
        return Err(ConstructError::TooManyZeros { n_big, bound: npp as i64 - g as i64 });
    }
    let kept: Vec<_> = keep.iter().map(|&i| places[i]).collect();
    let mut w: Vec<Fe> = keep.iter().map(|&i| f.root7(rv.values[i])).collect::<Result<_, _>>()?;

    let mut gt = curve.evaluation_matrix(a, &kept)?;
    let m = gt.rows();
    debug_assert_eq!(m, a + 1 - g);
    for r in 0..m {
        for (x, &wc) in gt.row_mut(r).iter_mut().zip(&w) {
            *x = f.mul(*x, wc);
        }
    }

    let mut reduced = gt.clone();
    let mut pivots = reduced.rref_limited(&f, k);
    let mut column_permuted = false;
    if pivots.len() < k || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        // Bring the first k independent columns to the front and redo.
        let all = gt.clone().rref(&f);
        if all.len() < k {
            return Err(ConstructError::RankDeficient { got: all.len(), k });
        }
        let front: Vec<usize> = all[..k].to_vec();
        let mut order = front.clone();
        order.extend((0..n_big).filter(|c| !front.contains(c)));
        reduced = gt.select_cols(&order);
        keep = order.iter().map(|&c| keep[c]).collect();
        w = order.iter().map(|&c| w[c]).collect();
        pivots = reduced.rref_limited(&f, k);
        column_permuted = true;
    }
    if pivots.len() < k {
        return Err(ConstructError::RankDeficient { got: pivots.len(), k });
    }
    drop(gt);

    let rows = reduced.select_cols(&(k..n_big).collect::<Vec<_>>());
    drop(reduced);
    let fifth = |x: Fe| f.pow(x, 5);
    let sigma = w[k..].iter().map(|&x| fifth(x)).collect();
    let tau = w[..k].iter().map(|&x| fifth(x)).collect();
    let provenance = Provenance {
        curve: curve.descriptor(),
        a,
        genus: g,
        seed,
        place_perm: keep,
        column_permuted,
    };
    TriorthogonalMatrix::from_parts(f, k, rows, sigma, tau, w, provenance)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sampled { trials: usize, seed: u64 },
}

impl VerifyMode {
    /// Exhaustive up to m = 50, sampled above.
    pub fn auto(m: usize, trials: usize, seed: u64) -> Self {
        if m <= 50 {
            VerifyMode::Exhaustive
        } else {
            VerifyMode::Sampled { trials, seed }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Cubic,
    Bilinear,
}

/// A failed condition; row indices are 1-based, `c` is 0 for bilinear pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub got: u16,
    pub expected: u16,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub triples_checked: usize,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

struct Powers {
    p4: Matrix,
    p2: Matrix,
}

fn powers(t: &TriorthogonalMatrix) -> Powers {
    let f = &t.field;
    let map = |e: u64| {
        Matrix::from_data(t.m, t.n, t.rows.data().iter().map(|&x| f.pow(x, e)).collect())
    };
    Powers { p4: map(4), p2: map(2) }
}

fn cubic(t: &TriorthogonalMatrix, pw: &Powers, a: usize, b: usize, c: usize) -> Option<Violation> {
    let got = t.field.triple_dot(pw.p4.row(a), pw.p2.row(b), t.rows.row(c));
    let expected = if a == b && b == c && a < t.k { Fe::ONE } else { Fe::ZERO };
    (got != expected).then_some(Violation {
        condition: Condition::Cubic,
        a: a + 1,
        b: b + 1,
        c: c + 1,
        got: got.0,
        expected: expected.0,
    })
}

fn bilinear(t: &TriorthogonalMatrix, a: usize, b: usize) -> Option<Violation> {
    let got = t.field.triple_dot(&t.sigma, t.rows.row(a), t.rows.row(b));
    let expected = if a == b && a < t.k { t.tau[a] } else { Fe::ZERO };
    (got != expected).then_some(Violation {
        condition: Condition::Bilinear,
        a: a + 1,
        b: b + 1,
        c: 0,
        got: got.0,
        expected: expected.0,
    })
}

/// Checks both defining conditions, exhaustively or on random samples plus
/// every diagonal case with index <= k.
pub fn is_triorthogonal(t: &TriorthogonalMatrix, mode: VerifyMode) -> VerificationReport {
    let pw = powers(t);
    let m = t.m;
    let (triples, pairs): (Vec<(usize, usize, usize)>, Vec<(usize, usize)>) = match mode {
        VerifyMode::Exhaustive => (
            (0..m * m * m).map(|x| (x / (m * m), x / m % m, x % m)).collect(),
            (0..m * m).map(|x| (x / m, x % m)).collect(),
        ),
        VerifyMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut tr: Vec<_> = (0..t.k).map(|a| (a, a, a)).collect();
            let mut pr: Vec<_> = (0..t.k).map(|a| (a, a)).collect();
            if m > 0 {
                for _ in 0..trials {
                    tr.push((rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m)));
                }
                for _ in 0..trials {
                    pr.push((rng.gen_range(0..m), rng.gen_range(0..m)));
                }
            }
            (tr, pr)
        }
    };
    let mut violations: Vec<Violation> =
        triples.par_iter().filter_map(|&(a, b, c)| cubic(t, &pw, a, b, c)).collect();
    let pair_violations: Vec<Violation> =
        pairs.par_iter().filter_map(|&(a, b)| bilinear(t, a, b)).collect();
    violations.extend(pair_violations);
    VerificationReport {
        pass: violations.is_empty(),
        triples_checked: triples.len(),
        pairs_checked: pairs.len(),
        violations,
    }
}

/// sum_i f_i^7 = sum_{a<=k} u_a^7 for random u, f = u G.
pub fn transversality_check(t: &TriorthogonalMatrix, trials: usize, seed: u64) -> bool {
    transversality_failures(t, trials, seed).is_empty()
}

/// Indices of failing trials.
pub fn transversality_failures(t: &TriorthogonalMatrix, trials: usize, seed: u64) -> Vec<usize> {
    let f = &t.field;
    let q = f.q() as u16;
    (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let u: Vec<Fe> = (0..t.m).map(|_| Fe(rng.gen_range(0..q))).collect();
            !transversal_identity(t, &u)
        })
        .collect()
}

pub fn transversal_identity(t: &TriorthogonalMatrix, u: &[Fe]) -> bool {
    let f = &t.field;
    let word = t.rows.vec_mul(f, u);
    let lhs = word.iter().fold(Fe::ZERO, |acc, &x| acc + f.pow(x, 7));
    let rhs = u[..t.k].iter().fold(Fe::ZERO, |acc, &x| acc + f.pow(x, 7));
    lhs == rhs
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub g1_rank: usize,
    pub g0_rank: usize,
    pub full_rank: usize,
    /// rank(G_1) = k.
    pub g1_independent: bool,
    /// rank(G) = k + rank(G_0).
    pub spans_disjoint: bool,
    /// sigma-scaled G_1 rows are orthogonal to G_0 and together with G^perp
    /// span a space of dimension n - rank(G_0).
    pub g0_dual_identity: bool,
}

/// Rank identities of the split G = (G_1; G_0).
pub fn structure_checks(t: &TriorthogonalMatrix) -> StructureReport {
    let f = &t.field;
    let (g1, g0) = (t.g1(), t.g0());
    let g1_rank = g1.rank(f);
    let g0_rank = g0.rank(f);
    let full_rank = t.rows.rank(f);
    let mut sg1 = g1.clone();
    for r in 0..t.k {
        for (x, &s) in sg1.row_mut(r).iter_mut().zip(&t.sigma) {
            *x = f.mul(*x, s);
        }
    }
    let orth = (0..t.k).all(|a| g0.row_iter().all(|row| f.dot(sg1.row(a), row).is_zero()));
    let null = t.rows.kernel(f);
    let stacked = sg1.vstack(&Matrix::from_rows(&null, t.n));
    let g0_dual_identity = orth && stacked.rank(f) == t.n - g0_rank;
    StructureReport {
        g1_rank,
        g0_rank,
        full_rank,
        g1_independent: g1_rank == t.k,
        spans_disjoint: full_rank == t.k + g0_rank,
        g0_dual_identity,
    }
}
