//! Syndrome-domain decoding of G_0^perp with an error locator in L(A_1),
//! plus a brute-force oracle.

use std::sync::Arc;

use thiserror::Error;

use crate::csscode::{binomial, quantum_params_with_t, CssError};
use crate::curves::{Curve, CurveError};
use crate::gf2e::{Fe, Field};
use crate::linalg::Matrix;
use crate::triortho::TriorthogonalMatrix;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("no degree d with l(d P_inf) > {t} and d < {bound}")]
    NoFeasibleDegA1 { t: usize, bound: i64 },
    #[error("deg A1 = {d} violates l(A1) > t or deg A1 < (a-k)-(2g-2)-t")]
    InfeasibleDegA1 { d: usize },
    #[error("artifact curve {0:?} does not match the matrix field")]
    CurveMismatch(String),
    #[error("syndrome lift check failed for product {0}")]
    LiftMismatch(usize),
    #[error("oracle budget {need} exceeds cap {cap}")]
    Budget { need: u128, cap: u128 },
    #[error(transparent)]
    Css(#[from] CssError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegA1Choice {
    /// Smallest feasible degree.
    Scan,
    Fixed(usize),
}

#[derive(Clone, Debug)]
pub struct DecoderConfig {
    pub field: Arc<Field>,
    pub t: usize,
    pub deg_a1: usize,
    /// l(A_1) x n evaluations on the tail places.
    pub locator: Matrix,
    /// Basis of L(A' - A_1) evaluated on the tail places.
    pub cofactor: Matrix,
    /// Row (j * l1 + l) maps the raw syndrome to <ev(f_l g_j), w_tail o e>.
    pub lift: Matrix,
    pub w_tail: Vec<Fe>,
    g0: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub e_hat: Vec<Fe>,
    pub matched: bool,
}

/// Smallest d with l(d) > t and d < (a-k)-(2g-2)-t.
pub fn scan_deg_a1(curve: &Curve, a: usize, k: usize, t: usize) -> Result<usize, DecodeError> {
    let g = curve.genus() as i64;
    let bound = a as i64 - k as i64 - (2 * g - 2) - t as i64;
    let d = (0..).find(|&d| curve.rr_dimension(d) > t).expect("l grows without bound");
    if (d as i64) < bound {
        Ok(d)
    } else {
        Err(DecodeError::NoFeasibleDegA1 { t, bound })
    }
}

pub fn build_decoder(
    t: &TriorthogonalMatrix,
    radius: usize,
    choice: DegA1Choice,
) -> Result<DecoderConfig, DecodeError> {
    let params = quantum_params_with_t(t, radius)?;
    let curve = Curve::parse(&t.provenance.curve)?;
    let f = t.field.clone();
    if curve.field().spec() != f.spec() {
        return Err(DecodeError::CurveMismatch(t.provenance.curve.clone()));
    }
    let (a, k, g) = (params.a, t.k, curve.genus());
    let deg_a1 = match choice {
        DegA1Choice::Scan => scan_deg_a1(&curve, a, k, radius)?,
        DegA1Choice::Fixed(d) => {
            let bound = a as i64 - k as i64 - (2 * g as i64 - 2) - radius as i64;
            if curve.rr_dimension(d) <= radius || d as i64 >= bound {
                return Err(DecodeError::InfeasibleDegA1 { d });
            }
            d
        }
    };

    let places = curve.pipeline_places();
    let perm = &t.provenance.place_perm;
    let head: Vec<_> = perm[..k].iter().map(|&i| places[i]).collect();
    let tail: Vec<_> = perm[k..].iter().map(|&i| places[i]).collect();
    let locator = curve.evaluation_matrix(deg_a1, &tail)?;

    let cof_basis = curve.rr_basis(a - deg_a1);
    let at_head = curve.evaluation_matrix_for(&cof_basis, &head)?;
    let at_tail = curve.evaluation_matrix_for(&cof_basis, &tail)?;
    let combos = at_head.left_kernel(&f);
    let cofactor =
        Matrix::from_rows(&combos.iter().map(|c| at_tail.vec_mul(&f, c)).collect::<Vec<_>>(), t.n);

    let g0 = t.g0();
    let r = g0.rows();
    let pivots = g0.clone().rref(&f);
    assert_eq!(pivots.len(), r, "G_0 has full row rank");
    let binv = g0.select_cols(&pivots).inverse(&f).expect("pivot block is invertible");
    let w_tail = t.w[k..].to_vec();

    let (l1, l2) = (locator.rows(), cofactor.rows());
    let mut lift = Matrix::zeros(l1 * l2, r);
    let mut z = vec![Fe::ZERO; t.n];
    let mut zj = vec![Fe::ZERO; r];
    let checks: Vec<usize> = (0..l1 * l2).step_by((l1 * l2 / 16).max(1)).collect();
    for j in 0..l2 {
        for l in 0..l1 {
            let row = j * l1 + l;
            for i in 0..t.n {
                z[i] = f.mul(f.mul(cofactor.get(j, i), locator.get(l, i)), w_tail[i]);
            }
            for (x, &p) in zj.iter_mut().zip(&pivots) {
                *x = z[p];
            }
            // lambda^T = z_J^T B^{-1}
            let lambda = binv.vec_mul(&f, &zj);
            if checks.binary_search(&row).is_ok() && g0.vec_mul(&f, &lambda) != z {
                return Err(DecodeError::LiftMismatch(row));
            }
            lift.row_mut(row).copy_from_slice(&lambda);
        }
    }
    Ok(DecoderConfig { field: f, t: radius, deg_a1, locator, cofactor, lift, w_tail, g0 })
}

impl DecoderConfig {
    pub fn n(&self) -> usize {
        self.g0.cols()
    }

    fn fail(&self) -> DecodeResult {
        DecodeResult { e_hat: vec![Fe::ZERO; self.n()], matched: false }
    }

    pub fn decode(&self, s: &[Fe]) -> DecodeResult {
        let f = &self.field;
        let n = self.n();
        if s.iter().all(|x| x.is_zero()) {
            return DecodeResult { e_hat: vec![Fe::ZERO; n], matched: true };
        }
        let (l1, l2) = (self.locator.rows(), self.cofactor.rows());
        let m = Matrix::from_data(l2, l1, self.lift.mul_vec(f, s));
        let Some(theta) = m.kernel(f).into_iter().next() else {
            return self.fail();
        };
        let vals = self.locator.vec_mul(f, &theta);
        let zeros: Vec<usize> = (0..n).filter(|&i| vals[i].is_zero()).collect();
        if zeros.is_empty() {
            return self.fail();
        }
        let Some(x) = self.g0.select_cols(&zeros).solve(f, s) else {
            return self.fail();
        };
        let mut e_hat = vec![Fe::ZERO; n];
        for (&i, &v) in zeros.iter().zip(&x) {
            e_hat[i] = v;
        }
        let matched = self.g0.mul_sparse_vec(f, &e_hat) == s;
        DecodeResult { e_hat, matched }
    }
}

/// Default budget for [`oracle_decode`].
pub const DEFAULT_ORACLE_CAP: u128 = 100_000_000;

/// Minimal-weight error with syndrome `s` and weight <= radius, by enumeration
/// of supports and nonzero values.
pub fn oracle_decode(
    t: &TriorthogonalMatrix,
    s: &[Fe],
    radius: usize,
    cap: u128,
) -> Result<DecodeResult, DecodeError> {
    let f = &t.field;
    let n = t.n;
    let q1 = f.q() as u128 - 1;
    let need: u128 = (0..=radius)
        .map(|w| binomial(n, w).saturating_mul(q1.saturating_pow(w as u32)))
        .fold(0u128, |a, b| a.saturating_add(b));
    if need > cap {
        return Err(DecodeError::Budget { need, cap });
    }
    let g0 = t.g0();
    let r = g0.rows();
    let cols: Vec<Vec<Fe>> = (0..n).map(|c| g0.col(c)).collect();
    for w in 0..=radius.min(n) {
        let mut supp: Vec<usize> = (0..w).collect();
        loop {
            let mut vals = vec![1u16; w];
            loop {
                let mut acc = vec![Fe::ZERO; r];
                for (&c, &v) in supp.iter().zip(&vals) {
                    f.axpy(Fe(v), &cols[c], &mut acc);
                }
                if acc == s {
                    let mut e_hat = vec![Fe::ZERO; n];
                    for (&c, &v) in supp.iter().zip(&vals) {
                        e_hat[c] = Fe(v);
                    }
                    return Ok(DecodeResult { e_hat, matched: true });
                }
                if !odometer(&mut vals, q1 as u16) {
                    break;
                }
            }
            if !next_subset(&mut supp, n) {
                break;
            }
        }
    }
    Ok(DecodeResult { e_hat: vec![Fe::ZERO; n], matched: false })
}

fn odometer(vals: &mut [u16], max: u16) -> bool {
    for v in vals.iter_mut().rev() {
        if *v < max {
            *v += 1;
            return true;
        }
        *v = 1;
    }
    false
}

fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let w = idx.len();
    for p in (0..w).rev() {
        if idx[p] < n - (w - p) {
            idx[p] += 1;
            for q in p + 1..w {
                idx[q] = idx[q - 1] + 1;
            }
            return true;
        }
    }
    false
}
