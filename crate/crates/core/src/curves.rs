//! Rational and Hermitian function-field backends with one-point Riemann-Roch bases.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::gf2e::{Fe, Field, FieldError};
use crate::linalg::Matrix;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("bad curve descriptor {0:?} (expected rational:s=<s> or hermitian:q0=<q0>)")]
    BadDescriptor(String),
    #[error("hermitian curve needs q0 a power of two >= 2, got {0}")]
    BadQ0(usize),
    #[error("evaluation at the place at infinity (pole)")]
    Pole,
    #[error("duplicate place ({0}, {1}) in evaluation set")]
    DuplicatePlace(Fe, Fe),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    Rational,
    /// y^q0 + y = x^(q0+1) over GF(q0^2).
    Hermitian { q0: usize },
}

#[derive(Clone, Debug)]
pub struct Curve {
    kind: CurveKind,
    field: Arc<Field>,
}

/// A rational place. Rational-curve places carry y = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Place {
    pub id: usize,
    pub x: Fe,
    pub y: Fe,
    pub is_infinity: bool,
}

impl Place {
    pub fn infinity() -> Self {
        Place { id: usize::MAX, x: Fe::ZERO, y: Fe::ZERO, is_infinity: true }
    }
}

/// The monomial x^i y^j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RRBasisElement {
    pub i: usize,
    pub j: usize,
}

impl Curve {
    pub fn rational(field: Arc<Field>) -> Self {
        Curve { kind: CurveKind::Rational, field }
    }

    /// Hermitian curve over GF(q0^2) with the default modulus for s = 2 log2(q0).
    pub fn hermitian(q0: usize) -> Result<Self, CurveError> {
        if q0 < 2 || !q0.is_power_of_two() {
            return Err(CurveError::BadQ0(q0));
        }
        let s = 2 * q0.trailing_zeros();
        Ok(Curve { kind: CurveKind::Hermitian { q0 }, field: Arc::new(Field::with_default(s)?) })
    }

    pub fn hermitian_over(field: Arc<Field>) -> Result<Self, CurveError> {
        let s = field.s();
        if !s.is_multiple_of(2) {
            return Err(CurveError::BadQ0(0));
        }
        Ok(Curve { kind: CurveKind::Hermitian { q0: 1 << (s / 2) }, field })
    }

    pub fn parse(desc: &str) -> Result<Self, CurveError> {
        let bad = || CurveError::BadDescriptor(desc.to_string());
        let (kind, arg) = desc.split_once(':').ok_or_else(bad)?;
        let (key, val) = arg.split_once('=').ok_or_else(bad)?;
        let val: usize = val.parse().map_err(|_| bad())?;
        match (kind, key) {
            ("rational", "s") => {
                Ok(Curve::rational(Arc::new(Field::with_default(val as u32).map_err(|_| bad())?)))
            }
            ("hermitian", "q0") => Curve::hermitian(val),
            _ => Err(bad()),
        }
    }

    pub fn descriptor(&self) -> String {
        match self.kind {
            CurveKind::Rational => format!("rational:s={}", self.field.s()),
            CurveKind::Hermitian { q0 } => format!("hermitian:q0={q0}"),
        }
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn genus(&self) -> usize {
        match self.kind {
            CurveKind::Rational => 0,
            CurveKind::Hermitian { q0 } => q0 * (q0 - 1) / 2,
        }
    }

    /// Number of distinct y per x-fibre (1 for the rational curve).
    pub fn fibre_size(&self) -> usize {
        match self.kind {
            CurveKind::Rational => 1,
            CurveKind::Hermitian { q0 } => q0,
        }
    }

    /// Pole order of x^i y^j at infinity.
    pub fn weight(&self, e: RRBasisElement) -> usize {
        match self.kind {
            CurveKind::Rational => e.i,
            CurveKind::Hermitian { q0 } => e.i * q0 + e.j * (q0 + 1),
        }
    }

    /// All affine rational places in canonical (mask-ascending) order.
    pub fn affine_places(&self) -> Vec<Place> {
        let f = &self.field;
        let coords: Vec<(Fe, Fe)> = match self.kind {
            CurveKind::Rational => f.elements().map(|x| (x, Fe::ZERO)).collect(),
            CurveKind::Hermitian { q0 } => {
                // Group y by T(y) = y^q0 + y, then read off the fibre over each x.
                let mut by_t: Vec<Vec<Fe>> = vec![Vec::new(); f.q()];
                for y in f.elements() {
                    by_t[(f.pow(y, q0 as u64) + y).0 as usize].push(y);
                }
                f.elements()
                    .flat_map(|x| {
                        let rhs = f.pow(x, q0 as u64 + 1);
                        by_t[rhs.0 as usize].iter().map(move |&y| (x, y)).collect::<Vec<_>>()
                    })
                    .collect()
            }
        };
        coords
            .into_iter()
            .enumerate()
            .map(|(id, (x, y))| Place { id, x, y, is_infinity: false })
            .collect()
    }

    /// Evaluation places used by the distillation pipeline. The rational curve
    /// drops x = 0, which then plays the role of a second reserved place.
    pub fn pipeline_places(&self) -> Vec<Place> {
        let all = self.affine_places();
        match self.kind {
            CurveKind::Rational => all.into_iter().filter(|p| !p.x.is_zero()).collect(),
            CurveKind::Hermitian { .. } => all,
        }
    }

    /// Monomial basis of L(m P_inf), ordered by pole order.
    pub fn rr_basis(&self, m: usize) -> Vec<RRBasisElement> {
        match self.kind {
            CurveKind::Rational => (0..=m).map(|i| RRBasisElement { i, j: 0 }).collect(),
            CurveKind::Hermitian { q0 } => {
                let mut v: Vec<RRBasisElement> = (0..q0)
                    .filter(|&j| j * (q0 + 1) <= m)
                    .flat_map(|j| {
                        (0..=(m - j * (q0 + 1)) / q0).map(move |i| RRBasisElement { i, j })
                    })
                    .collect();
                v.sort_by_key(|&e| self.weight(e));
                v
            }
        }
    }

    /// l(m P_inf).
    pub fn rr_dimension(&self, m: usize) -> usize {
        match self.kind {
            CurveKind::Rational => m + 1,
            CurveKind::Hermitian { q0 } => {
                (0..q0).filter(|&j| j * (q0 + 1) <= m).map(|j| (m - j * (q0 + 1)) / q0 + 1).sum()
            }
        }
    }

    pub fn evaluate(&self, e: RRBasisElement, p: &Place) -> Result<Fe, CurveError> {
        if p.is_infinity {
            return Err(CurveError::Pole);
        }
        let f = &self.field;
        Ok(f.mul(f.pow(p.x, e.i as u64), f.pow(p.y, e.j as u64)))
    }

    /// Rows indexed by `rr_basis(m)`, columns by `places`.
    pub fn evaluation_matrix(&self, m: usize, places: &[Place]) -> Result<Matrix, CurveError> {
        self.evaluation_matrix_for(&self.rr_basis(m), places)
    }

    pub fn evaluation_matrix_for(
        &self,
        basis: &[RRBasisElement],
        places: &[Place],
    ) -> Result<Matrix, CurveError> {
        let mut seen = HashSet::with_capacity(places.len());
        for p in places {
            if p.is_infinity {
                return Err(CurveError::Pole);
            }
            if !seen.insert((p.x, p.y)) {
                return Err(CurveError::DuplicatePlace(p.x, p.y));
            }
        }
        let f = &self.field;
        let max_i = basis.iter().map(|e| e.i).max().unwrap_or(0);
        let max_j = basis.iter().map(|e| e.j).max().unwrap_or(0);
        let n = places.len();
        let mut out = Matrix::zeros(basis.len(), n);
        let mut xp = vec![Fe::ONE; max_i + 1];
        let mut yp = vec![Fe::ONE; max_j + 1];
        for (c, p) in places.iter().enumerate() {
            for i in 1..=max_i {
                xp[i] = f.mul(xp[i - 1], p.x);
            }
            for j in 1..=max_j {
                yp[j] = f.mul(yp[j - 1], p.y);
            }
            for (r, e) in basis.iter().enumerate() {
                out.set(r, c, f.mul(xp[e.i], yp[e.j]));
            }
        }
        Ok(out)
    }
}
