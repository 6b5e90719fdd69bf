//! One-point evaluation codes, residue vectors of their duals, and distance bounds.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::curves::{Curve, CurveError, Place};
use crate::gf2e::{Fe, Field};
use crate::linalg::Matrix;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("need 2g-1 <= a and g <= a < n, got a={a}, g={g}, n={n}")]
    BadDegree { a: usize, g: usize, n: usize },
    #[error("residue kernel is trivial for degree {0}")]
    TrivialKernel(usize),
    #[error("{k} punctured coordinates is not below the dual distance bound {bound}")]
    TooManyPunctured { k: usize, bound: i64 },
    #[error("vanishing subcode has dimension {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Clone, Debug)]
pub struct EvaluationCode {
    pub curve: Curve,
    pub a: usize,
    pub places: Vec<Place>,
    pub gen: Matrix,
    pub rank: usize,
}

/// Evaluation code C_L(D, a P_inf) on `places`.
pub fn build_code(curve: &Curve, a: usize, places: &[Place]) -> Result<EvaluationCode, CodeError> {
    let g = curve.genus();
    let n = places.len();
    if a < g || a >= n || a + 1 < 2 * g {
        return Err(CodeError::BadDegree { a, g, n });
    }
    let gen = curve.evaluation_matrix(a, places)?;
    let rank = gen.rank(curve.field());
    Ok(EvaluationCode { curve: curve.clone(), a, places: places.to_vec(), gen, rank })
}

/// d^perp >= a - (2g - 2).
pub fn dual_distance_bound(a: usize, g: usize) -> i64 {
    a as i64 - (2 * g as i64 - 2)
}

/// Basis of the subcode vanishing on the coordinates `punct`.
pub fn vanishing_subbasis(code: &EvaluationCode, punct: &[usize]) -> Result<Matrix, CodeError> {
    let g = code.curve.genus();
    let bound = dual_distance_bound(code.a, g);
    if punct.len() as i64 >= bound {
        return Err(CodeError::TooManyPunctured { k: punct.len(), bound });
    }
    let f = code.curve.field();
    let combos = code.gen.select_cols(punct).left_kernel(f);
    let rows: Vec<Vec<Fe>> = combos.iter().map(|c| code.gen.vec_mul(f, c)).collect();
    let out = Matrix::from_rows(&rows, code.gen.cols());
    let expected = code.rank - punct.len();
    let got = out.rank(f);
    if got != expected || out.rows() != expected {
        return Err(CodeError::DimensionMismatch { got, expected });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueVector {
    pub values: Vec<Fe>,
    pub zero_support: Vec<usize>,
    /// Dimension of the kernel the vector was drawn from.
    pub kernel_dim: usize,
}

/// Nonzero v with sum_P v_P f(P) = 0 for every f in L(deg P_inf).
///
/// Seed 0 takes the first kernel basis vector; other seeds take a random
/// nonzero combination. The result is scaled so its first nonzero entry is 1.
pub fn dual_residue_vector(
    curve: &Curve,
    deg: usize,
    places: &[Place],
    seed: u64,
) -> Result<ResidueVector, CodeError> {
    let f = curve.field();
    let basis = residue_kernel_basis(curve, deg, places)?;
    if basis.is_empty() {
        return Err(CodeError::TrivialKernel(deg));
    }
    let mut v = if seed == 0 {
        basis[0].clone()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut v = vec![Fe::ZERO; places.len()];
            for b in &basis {
                f.axpy(Fe(rng.gen_range(0..f.q() as u16)), b, &mut v);
            }
            if v.iter().any(|x| !x.is_zero()) {
                break v;
            }
        }
    };
    let lead = *v.iter().find(|x| !x.is_zero()).expect("nonzero kernel vector");
    f.scale(f.inv(lead).expect("nonzero"), &mut v);
    let zero_support = v.iter().enumerate().filter(|(_, x)| x.is_zero()).map(|(i, _)| i).collect();
    Ok(ResidueVector { values: v, zero_support, kernel_dim: basis.len() })
}

/// Kernel basis of the evaluation map of L(deg P_inf) on `places`.
///
/// Uses the fibred solver when the places are a union of complete x-fibres,
/// otherwise dense elimination.
pub fn residue_kernel_basis(
    curve: &Curve,
    deg: usize,
    places: &[Place],
) -> Result<Vec<Vec<Fe>>, CodeError> {
    match fibres(curve, places) {
        Some(fib) => Ok(fibred_kernel(curve, deg, places, &fib)),
        None => residue_kernel_basis_dense(curve, deg, places),
    }
}

/// Dense elimination on the full evaluation matrix.
pub fn residue_kernel_basis_dense(
    curve: &Curve,
    deg: usize,
    places: &[Place],
) -> Result<Vec<Vec<Fe>>, CodeError> {
    Ok(curve.evaluation_matrix(deg, places)?.kernel(curve.field()))
}

/// x-values in first-appearance order, with the place indices over each.
fn fibres(curve: &Curve, places: &[Place]) -> Option<Vec<(Fe, Vec<usize>)>> {
    let mut pos: HashMap<Fe, usize> = HashMap::new();
    let mut out: Vec<(Fe, Vec<usize>)> = Vec::new();
    for (i, p) in places.iter().enumerate() {
        let k = *pos.entry(p.x).or_insert_with(|| {
            out.push((p.x, Vec::new()));
            out.len() - 1
        });
        out[k].1.push(i);
    }
    let size = curve.fibre_size();
    out.iter().all(|(_, v)| v.len() == size).then_some(out)
}

/// The monomials x^i y^j of L(M P_inf) split by j. For fixed j the conditions
/// on h_j(x) = sum_y v_(x,y) y^j are a Vandermonde system in x; a kernel vector
/// of the whole system is a choice of h_j in that kernel, lifted back through
/// the invertible y-Vandermonde matrix on every fibre.
fn fibred_kernel(
    curve: &Curve,
    deg: usize,
    places: &[Place],
    fib: &[(Fe, Vec<usize>)],
) -> Vec<Vec<Fe>> {
    let f = curve.field();
    let nx = fib.len();
    let q0 = curve.fibre_size();
    let wj = |j: usize| curve.weight(crate::curves::RRBasisElement { i: 0, j });
    let step = curve.weight(crate::curves::RRBasisElement { i: 1, j: 0 });

    let mut vx = Matrix::zeros(nx, nx);
    for (c, (x, _)) in fib.iter().enumerate() {
        let mut p = Fe::ONE;
        for i in 0..nx {
            vx.set(i, c, p);
            p = f.mul(p, *x);
        }
    }
    let vx_inv = vx.inverse(f).expect("distinct x values");

    // Columns of the inverse y-Vandermonde matrix on each fibre.
    let wy_inv: Vec<Matrix> = fib
        .iter()
        .map(|(_, idx)| {
            let mut w = Matrix::zeros(q0, q0);
            for (t, &pi) in idx.iter().enumerate() {
                let mut p = Fe::ONE;
                for j in 0..q0 {
                    w.set(j, t, p);
                    p = f.mul(p, places[pi].y);
                }
            }
            w.inverse(f).expect("distinct y values in a fibre")
        })
        .collect();

    let mut basis = Vec::new();
    for j in 0..q0 {
        // Number of constrained x-powers for this j, capped at nx.
        let rows = if wj(j) > deg { 0 } else { ((deg - wj(j)) / step + 1).min(nx) };
        for r in rows..nx {
            let mut v = vec![Fe::ZERO; places.len()];
            for (c, (_, idx)) in fib.iter().enumerate() {
                let h = vx_inv.get(c, r);
                if h.is_zero() {
                    continue;
                }
                for (t, &pi) in idx.iter().enumerate() {
                    v[pi] = f.mul(h, wy_inv[c].get(t, j));
                }
            }
            basis.push(v);
        }
    }
    basis
}

/// Direct check that v is orthogonal to the evaluations of all of L(deg P_inf).
pub fn verify_residue_vector(curve: &Curve, deg: usize, places: &[Place], v: &[Fe]) -> bool {
    let f = curve.field();
    let basis = curve.rr_basis(deg);
    let q0 = curve.fibre_size();
    // acc[j][i] = sum_P v_P y^j x^i
    let max_i: Vec<Option<usize>> =
        (0..q0).map(|j| basis.iter().filter(|e| e.j == j).map(|e| e.i).max()).collect();
    let mut acc: Vec<Vec<Fe>> = max_i.iter().map(|m| vec![Fe::ZERO; m.map_or(0, |m| m + 1)]).collect();
    let top = max_i.iter().flatten().copied().max().unwrap_or(0);
    let mut xp = vec![Fe::ONE; top + 1];
    for (p, &vp) in places.iter().zip(v) {
        if vp.is_zero() {
            continue;
        }
        for i in 1..=top {
            xp[i] = f.mul(xp[i - 1], p.x);
        }
        let mut t = vp;
        for a in acc.iter_mut() {
            let len = a.len();
            f.axpy(t, &xp[..len], a);
            t = f.mul(t, p.y);
        }
    }
    acc.iter().all(|a| a.iter().all(|x| x.is_zero()))
}

/// GRS dual multipliers u_c = 1 / prod_{d != c} (x_c - x_d).
pub fn grs_dual_multipliers(f: &Field, xs: &[Fe]) -> Vec<Fe> {
    xs.iter()
        .enumerate()
        .map(|(c, &xc)| {
            let p = xs
                .iter()
                .enumerate()
                .filter(|&(d, _)| d != c)
                .fold(Fe::ONE, |acc, (_, &xd)| f.mul(acc, xc + xd));
            f.inv(p).expect("distinct points")
        })
        .collect()
}
