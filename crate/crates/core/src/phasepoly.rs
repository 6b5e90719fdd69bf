//! Boolean phase polynomials of b -> tr(gamma(b)^e) and their Z/CZ/CCZ gate content.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2e::{Field, FieldSpec};
use crate::selfdual::{find_self_dual_basis, paper_basis_s10, SelfDualBasis, DEFAULT_ATTEMPTS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhaseError {
    #[error("phase polynomial has a monomial of degree {0} > 3")]
    DegreeTooHigh(usize),
    #[error("table length {0} is not a power of two")]
    BadTable(usize),
    #[error("triple {0:?} is not in the CCZ set")]
    NotInCcz([usize; 3]),
    #[error("s={0} is not supported (need 3 <= s <= 16)")]
    UnsupportedS(usize),
}

/// ANF with 0-based qubit indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BooleanPhasePoly {
    pub s: usize,
    pub constant: bool,
    pub linear: Vec<usize>,
    pub quadratic: Vec<[usize; 2]>,
    pub cubic: Vec<[usize; 3]>,
}

/// Gate sets with 1-based qubit indices, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateDecomposition {
    pub z: Vec<usize>,
    pub cz: Vec<[usize; 2]>,
    pub ccz: Vec<[usize; 3]>,
}

impl GateDecomposition {
    /// Number of CCZ gates.
    pub fn c(&self) -> usize {
        self.ccz.len()
    }

    /// Monomial masks (0-based bits) of all gates.
    pub fn masks(&self) -> Vec<u32> {
        let bit = |i: usize| 1u32 << (i - 1);
        let mut v: Vec<u32> = self.z.iter().map(|&i| bit(i)).collect();
        v.extend(self.cz.iter().map(|p| bit(p[0]) | bit(p[1])));
        v.extend(self.ccz.iter().map(|p| bit(p[0]) | bit(p[1]) | bit(p[2])));
        v
    }
}

/// f(b) = tr(from_bits(b)^e) for all b in {0,1}^s.
pub fn phase_table(field: &Field, basis: &SelfDualBasis, exponent: u64) -> Vec<u8> {
    (0..1u32 << basis.s())
        .map(|b| field.trace(field.pow(basis.from_bits(b), exponent)))
        .collect()
}

/// Moebius transform: masks of monomials with coefficient 1, ascending.
pub fn anf_masks(table: &[u8]) -> Result<Vec<u32>, PhaseError> {
    if !table.len().is_power_of_two() {
        return Err(PhaseError::BadTable(table.len()));
    }
    let mut t = table.to_vec();
    let s = table.len().trailing_zeros();
    for i in 0..s {
        for b in 0..t.len() {
            if b >> i & 1 == 1 {
                t[b] ^= t[b ^ (1 << i)];
            }
        }
    }
    Ok((0..t.len() as u32).filter(|&b| t[b as usize] & 1 == 1).collect())
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// ANF of a table; fails on any monomial of degree 4 or more.
pub fn anf(table: &[u8]) -> Result<BooleanPhasePoly, PhaseError> {
    let masks = anf_masks(table)?;
    let mut p = BooleanPhasePoly { s: table.len().trailing_zeros() as usize, ..Default::default() };
    for m in masks {
        let b = bits(m);
        match b.len() {
            0 => p.constant = true,
            1 => p.linear.push(b[0]),
            2 => p.quadratic.push([b[0], b[1]]),
            3 => p.cubic.push([b[0], b[1], b[2]]),
            d => return Err(PhaseError::DegreeTooHigh(d)),
        }
    }
    p.linear.sort_unstable();
    p.quadratic.sort_unstable();
    p.cubic.sort_unstable();
    Ok(p)
}

impl BooleanPhasePoly {
    pub fn degree(&self) -> usize {
        if !self.cubic.is_empty() {
            3
        } else if !self.quadratic.is_empty() {
            2
        } else if !self.linear.is_empty() {
            1
        } else {
            0
        }
    }

    pub fn evaluate(&self, b: u32) -> u8 {
        let on = |i: usize| (b >> i & 1) as u8;
        let mut acc = self.constant as u8;
        acc ^= self.linear.iter().map(|&i| on(i)).fold(0, |a, x| a ^ x);
        acc ^= self.quadratic.iter().map(|p| on(p[0]) & on(p[1])).fold(0, |a, x| a ^ x);
        acc ^= self.cubic.iter().map(|p| on(p[0]) & on(p[1]) & on(p[2])).fold(0, |a, x| a ^ x);
        acc
    }

    pub fn to_table(&self) -> Vec<u8> {
        (0..1u32 << self.s).map(|b| self.evaluate(b)).collect()
    }

    pub fn gates(&self) -> GateDecomposition {
        GateDecomposition {
            z: self.linear.iter().map(|&i| i + 1).collect(),
            cz: self.quadratic.iter().map(|p| [p[0] + 1, p[1] + 1]).collect(),
            ccz: self.cubic.iter().map(|p| [p[0] + 1, p[1] + 1, p[2] + 1]).collect(),
        }
    }
}

/// Gate content of tr(gamma^7) in the given basis.
pub fn decomposition(field: &Field, basis: &SelfDualBasis) -> Result<GateDecomposition, PhaseError> {
    let s = basis.s();
    if !(3..=16).contains(&s) {
        return Err(PhaseError::UnsupportedS(s));
    }
    Ok(anf(&phase_table(field, basis, 7))?.gates())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HierarchyLevel {
    Pauli,
    Clifford,
    ThirdLevel,
    Higher,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HierarchyCertificate {
    pub exponent: u64,
    pub degree: usize,
    pub level: HierarchyLevel,
    /// Every derivative f(b+c)+f(b), c != 0, has degree <= degree-1.
    pub derivatives_ok: bool,
}

pub fn hierarchy_certificate(
    field: &Field,
    basis: &SelfDualBasis,
    exponent: u64,
) -> Result<HierarchyCertificate, PhaseError> {
    let table = phase_table(field, basis, exponent);
    let degree = anf_masks(&table)?.iter().map(|m| m.count_ones() as usize).max().unwrap_or(0);
    let level = match degree {
        0 | 1 => HierarchyLevel::Pauli,
        2 => HierarchyLevel::Clifford,
        3 => HierarchyLevel::ThirdLevel,
        _ => HierarchyLevel::Higher,
    };
    let derivatives_ok = (1..table.len()).all(|c| {
        let d: Vec<u8> = (0..table.len()).map(|b| table[b] ^ table[b ^ c]).collect();
        let dd = anf_masks(&d).expect("power of two").iter().map(|m| m.count_ones() as usize).max();
        dd.is_none_or(|x| x < degree.max(1))
    });
    Ok(HierarchyCertificate { exponent, degree, level, derivatives_ok })
}

/// Symbolic check of the measurement-based extraction of one CCZ gate: for each
/// outcome on the other qubits, the restricted polynomial plus the Clifford
/// corrections must leave exactly the CCZ on `triple` (1-based), up to phase.
pub fn ccz_extraction_check(
    decomp: &GateDecomposition,
    triple: [usize; 3],
) -> Result<bool, PhaseError> {
    let mut sorted = triple;
    sorted.sort_unstable();
    if !decomp.ccz.contains(&sorted) {
        return Err(PhaseError::NotInCcz(triple));
    }
    let bit = |i: usize| 1u32 << (i - 1);
    let tmask = bit(sorted[0]) | bit(sorted[1]) | bit(sorted[2]);
    let masks = decomp.masks();
    let all = masks.iter().fold(0u32, |a, &m| a | m) | tmask;
    let outside: Vec<usize> = bits(all & !tmask);

    let ok = (0..1u64 << outside.len()).all(|o| {
        let x = outside
            .iter()
            .enumerate()
            .fold(0u32, |m, (i, &q)| m | ((o >> i & 1) as u32) << q);
        let mut residual: Vec<u32> = Vec::new();
        let mut toggle = |m: u32| {
            if m == 0 {
                return;
            }
            if let Some(p) = residual.iter().position(|&r| r == m) {
                residual.swap_remove(p);
            } else {
                residual.push(m);
            }
        };
        for &m in &masks {
            let (inside, out) = (m & tmask, m & !tmask);
            // Restriction by the measured bits.
            if out & x == out {
                toggle(inside);
            }
            // Corrections.
            let measured_ones = (out & x).count_ones();
            match (inside.count_ones(), out.count_ones()) {
                (1, 0) | (2, 0) => toggle(inside),
                (1, 1) if measured_ones == 1 => toggle(inside),
                (2, 1) if measured_ones == 1 => toggle(inside),
                (1, 2) if measured_ones == 2 => toggle(inside),
                _ => {}
            }
        }
        residual == [tmask]
    });
    Ok(ok)
}

/// Lowest CCZ count among `budget` self-dual bases. At s = 10 with the default
/// modulus the listed 70-gate basis is the first candidate.
pub fn search_min_ccz(
    spec: FieldSpec,
    budget: usize,
    seed: u64,
) -> Result<Option<(SelfDualBasis, usize)>, PhaseError> {
    let field = Field::new(spec).map_err(|_| PhaseError::UnsupportedS(spec.s() as usize))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(SelfDualBasis, usize)> = None;
    for i in 0..budget {
        let basis = match (i, paper_basis_s10(&field)) {
            (0, Ok(b)) => b,
            _ => match find_self_dual_basis(&field, rng.gen(), DEFAULT_ATTEMPTS) {
                Ok(b) => b,
                Err(_) => continue,
            },
        };
        let c = decomposition(&field, &basis)?.c();
        if best.as_ref().is_none_or(|(_, bc)| c < *bc) {
            best = Some((basis, c));
        }
    }
    Ok(best)
}
