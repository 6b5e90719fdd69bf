//! Parameters, logical operators and syndromes of CSS(X, G_0; Z, G^perp).

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gf2e::{Fe, Field};
use crate::linalg::Matrix;
use crate::triortho::TriorthogonalMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CssError {
    #[error("distance bound a-k-(2g-2) = {0} is not positive")]
    NonPositiveDistance(i64),
    #[error("decoding radius bound (d-g-1)/2 is not positive (d={d}, g={g})")]
    NoDecodingRadius { d: i64, g: usize },
    #[error("t={t} is outside 1..={max}")]
    BadRadius { t: usize, max: usize },
    #[error("vector has length {got}, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("{subsets} column subsets exceed the cap {cap}")]
    CostCap { subsets: u128, cap: u128 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuantumCodeParams {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub a: usize,
    pub genus: usize,
    pub d_lower: i64,
    pub t: usize,
    pub t_max: usize,
    pub qubits_n: usize,
    pub qubits_k: usize,
}

/// Parameters with the largest admissible decoding radius.
pub fn quantum_params(t: &TriorthogonalMatrix) -> Result<QuantumCodeParams, CssError> {
    params_unchecked(t)
}

/// Parameters with radius lowered to `radius`.
pub fn quantum_params_with_t(
    t: &TriorthogonalMatrix,
    radius: usize,
) -> Result<QuantumCodeParams, CssError> {
    let mut p = params_unchecked(t)?;
    if radius == 0 || radius > p.t_max {
        return Err(CssError::BadRadius { t: radius, max: p.t_max });
    }
    p.t = radius;
    Ok(p)
}

fn params_unchecked(t: &TriorthogonalMatrix) -> Result<QuantumCodeParams, CssError> {
    let (a, g) = (t.provenance.a, t.provenance.genus);
    let d = a as i64 - t.k as i64 - (2 * g as i64 - 2);
    if d <= 0 {
        return Err(CssError::NonPositiveDistance(d));
    }
    let half = (d - g as i64 - 1).div_euclid(2);
    if half <= 0 {
        return Err(CssError::NoDecodingRadius { d, g });
    }
    let s = t.field.s() as usize;
    Ok(QuantumCodeParams {
        n: t.n,
        k: t.k,
        m: t.m,
        a,
        genus: g,
        d_lower: d,
        t: half as usize,
        t_max: half as usize,
        qubits_n: t.n * s,
        qubits_k: t.k * s,
    })
}

/// Rows g-hat^a_i = tau_a^{-1} sigma_i g^a_i, a = 1..k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalZOps {
    pub rows: Matrix,
}

pub fn logical_z_ops(t: &TriorthogonalMatrix) -> LogicalZOps {
    let f = &t.field;
    let mut rows = t.g1();
    for a in 0..t.k {
        let ti = f.inv(t.tau[a]).expect("tau is nonzero");
        for (x, &s) in rows.row_mut(a).iter_mut().zip(&t.sigma) {
            *x = f.mul(f.mul(ti, s), *x);
        }
    }
    LogicalZOps { rows }
}

/// G_0 e.
pub fn syndrome(t: &TriorthogonalMatrix, e: &[Fe]) -> Result<Vec<Fe>, CssError> {
    if e.len() != t.n {
        return Err(CssError::Length { got: e.len(), expected: t.n });
    }
    let f = &t.field;
    let nz: Vec<(usize, Fe)> =
        e.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, &x)| (i, x)).collect();
    Ok((t.k..t.m)
        .map(|r| {
            let row = t.rows.row(r);
            nz.iter().fold(Fe::ZERO, |acc, &(i, x)| acc + f.mul(row[i], x))
        })
        .collect())
}

/// r lies in G^perp, i.e. acts trivially on the code space.
pub fn is_stabilizer_equiv(t: &TriorthogonalMatrix, r: &[Fe]) -> bool {
    r.len() == t.n && t.rows.mul_sparse_vec(&t.field, r).iter().all(|x| x.is_zero())
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Default cap on the number of column subsets examined.
pub const DEFAULT_SUBSET_CAP: u128 = 50_000_000;

/// Every (delta-1)-subset of columns of `g0` is independent, which certifies
/// that the code G_0^perp has minimum distance at least delta.
pub fn certify_dual_distance(
    f: &Field,
    g0: &Matrix,
    delta: usize,
    cap: u128,
) -> Result<bool, CssError> {
    if delta <= 1 {
        return Ok(true);
    }
    let size = delta - 1;
    let n = g0.cols();
    if size > n {
        return Ok(false);
    }
    let subsets = binomial(n, size);
    if subsets > cap {
        return Err(CssError::CostCap { subsets, cap });
    }
    if size > g0.rows() {
        return Ok(false);
    }
    let ok = (0..n).into_par_iter().all(|first| {
        let mut idx: Vec<usize> = (first..first + size).collect();
        if idx[size - 1] >= n {
            return true;
        }
        loop {
            if g0.select_cols(&idx).rank(f) < size {
                return false;
            }
            // Advance positions 1..size, keeping idx[0] = first.
            let mut p = size;
            loop {
                if p == 1 {
                    return true;
                }
                p -= 1;
                if idx[p] < n - (size - p) {
                    idx[p] += 1;
                    for q in p + 1..size {
                        idx[q] = idx[q - 1] + 1;
                    }
                    break;
                }
            }
        }
    });
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Curve;
    use crate::triortho::construct;

    fn small() -> TriorthogonalMatrix {
        construct(&Curve::parse("rational:s=5").unwrap(), 4, 1, 0).unwrap()
    }

    #[test]
    fn small_params() {
        let t = small();
        let p = quantum_params(&t).unwrap();
        assert_eq!((p.n, p.k, p.d_lower, p.t), (30, 1, 5, 2));
        assert_eq!((p.qubits_n, p.qubits_k), (150, 5));
        assert_eq!(quantum_params_with_t(&t, 1).unwrap().t, 1);
        assert!(quantum_params_with_t(&t, 3).is_err());
        assert!(quantum_params_with_t(&t, 0).is_err());
    }

    #[test]
    fn logical_duality() {
        let t = small();
        let f = &t.field;
        let l = logical_z_ops(&t);
        for c in 0..t.m {
            for a in 0..t.k {
                let want = if a == c { Fe::ONE } else { Fe::ZERO };
                assert_eq!(f.dot(t.rows.row(c), l.rows.row(a)), want);
            }
        }
        assert!(!is_stabilizer_equiv(&t, l.rows.row(0)));
        assert!(syndrome(&t, l.rows.row(0)).unwrap().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn syndrome_linear_and_null() {
        let t = small();
        let f = &t.field;
        assert!(syndrome(&t, &[Fe::ZERO; 30]).unwrap().iter().all(|x| x.is_zero()));
        assert!(syndrome(&t, &[Fe::ONE]).is_err());
        let e1: Vec<Fe> = (0..30).map(|i| Fe((i * 7 % 32) as u16)).collect();
        let e2: Vec<Fe> = (0..30).map(|i| Fe((i * 13 % 31) as u16)).collect();
        let sum: Vec<Fe> = e1.iter().zip(&e2).map(|(&a, &b)| a + b).collect();
        let (s1, s2) = (syndrome(&t, &e1).unwrap(), syndrome(&t, &e2).unwrap());
        let s12: Vec<Fe> = s1.iter().zip(&s2).map(|(&a, &b)| a + b).collect();
        assert_eq!(syndrome(&t, &sum).unwrap(), s12);
        for r in t.rows.kernel(f) {
            assert!(is_stabilizer_equiv(&t, &r));
            assert!(syndrome(&t, &r).unwrap().iter().all(|x| x.is_zero()));
        }
        for r in t.g0().kernel(f) {
            assert!(syndrome(&t, &r).unwrap().iter().all(|x| x.is_zero()));
        }
        assert!(is_stabilizer_equiv(&t, &[Fe::ZERO; 30]));
    }

    #[test]
    fn rank_identities() {
        let t = small();
        let f = &t.field;
        let r0 = t.g0().rank(f);
        assert_eq!(r0, t.m - t.k);
        assert_eq!(t.n - r0 - (t.n - t.m), t.k);
    }

    #[test]
    fn dual_distance_certificates() {
        let t = small();
        let f = &t.field;
        let g0 = t.g0();
        assert!(certify_dual_distance(f, &g0, 1, 10).unwrap());
        assert!(certify_dual_distance(f, &g0, 5, DEFAULT_SUBSET_CAP).unwrap());
        assert!(!certify_dual_distance(f, &g0, 6, DEFAULT_SUBSET_CAP).unwrap());
        assert!(!certify_dual_distance(f, &g0, 31, DEFAULT_SUBSET_CAP).unwrap());
        assert!(certify_dual_distance(f, &g0, 5, 1000).is_err());
        assert_eq!(binomial(30, 4), 27405);
    }
}
