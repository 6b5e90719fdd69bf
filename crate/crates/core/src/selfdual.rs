//! Self-dual bases of GF(2^s) over GF(2) and the qudit/qubit coordinate maps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf2e::{Fe, Field, FieldError, FieldSpec};

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("no self-dual basis found after {0} attempts")]
    SearchExhausted(usize),
    #[error("the listed s=10 basis needs the default modulus x^10+x^3+1, got {0:?}")]
    WrongSpec(FieldSpec),
    #[error("expected {expected} basis elements, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Ordered basis alpha_0..alpha_{s-1}; bit i of a qubit vector pairs with alpha_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfDualBasis {
    pub spec: FieldSpec,
    pub alphas: Vec<Fe>,
}

/// Default retry budget for [`find_self_dual_basis`].
pub const DEFAULT_ATTEMPTS: usize = 10_000;

const PAPER_S10: [&[u32]; 10] = [
    &[0, 2, 4, 5, 7, 8],
    &[3, 6, 7, 8, 9],
    &[1, 2, 5, 7, 8, 9],
    &[0, 1, 2, 3, 4, 6, 7, 8, 9],
    &[0, 1, 4, 5, 7, 9],
    &[1, 2, 3, 7],
    &[2, 6, 7],
    &[2, 5, 7],
    &[0, 3, 7],
    &[0, 4, 6, 7],
];

/// The fixed self-dual basis of GF(1024) under x^10+x^3+1 whose CCZ count is 70.
pub fn paper_basis_s10(field: &Field) -> Result<SelfDualBasis, BasisError> {
    if field.spec() != FieldSpec::default_for(10)? {
        return Err(BasisError::WrongSpec(field.spec()));
    }
    let alphas = PAPER_S10
        .iter()
        .map(|bits| Fe(bits.iter().fold(0u16, |m, &b| m | 1 << b)))
        .collect();
    Ok(SelfDualBasis { spec: field.spec(), alphas })
}

/// Rank over GF(2) of a list of masks.
fn gf2_rank(v: &[Fe]) -> usize {
    let mut rows: Vec<u16> = v.iter().map(|x| x.0).collect();
    let mut rank = 0;
    for bit in 0..16 {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && *r >> bit & 1 == 1 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

pub fn gram(field: &Field, alphas: &[Fe]) -> Vec<Vec<u8>> {
    alphas
        .iter()
        .map(|&a| alphas.iter().map(|&b| field.trace(field.mul(a, b))).collect())
        .collect()
}

pub fn is_self_dual(field: &Field, basis: &SelfDualBasis) -> bool {
    let s = field.s() as usize;
    if basis.spec != field.spec() || basis.alphas.len() != s || gf2_rank(&basis.alphas) != s {
        return false;
    }
    gram(field, &basis.alphas)
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, &t)| t == (i == j) as u8))
}

/// Random basis followed by symmetric congruence reduction of its trace Gram matrix.
pub fn find_self_dual_basis(
    field: &Field,
    seed: u64,
    max_attempts: usize,
) -> Result<SelfDualBasis, BasisError> {
    let s = field.s() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_attempts {
        let mut cur = random_basis(field, &mut rng);
        if orthonormalize(field, &mut cur, &mut rng) {
            let basis = SelfDualBasis { spec: field.spec(), alphas: cur };
            debug_assert!(is_self_dual(field, &basis));
            debug_assert_eq!(basis.alphas.len(), s);
            return Ok(basis);
        }
    }
    Err(BasisError::SearchExhausted(max_attempts))
}

fn random_basis(field: &Field, rng: &mut ChaCha8Rng) -> Vec<Fe> {
    let s = field.s() as usize;
    loop {
        let v: Vec<Fe> = (0..s).map(|_| Fe(rng.gen_range(1..field.q() as u16))).collect();
        if gf2_rank(&v) == s {
            return v;
        }
    }
}

/// Pivot on a random odd-diagonal element and clear its row/column; fails when
/// the remaining block is alternating.
fn orthonormalize(field: &Field, cur: &mut [Fe], rng: &mut ChaCha8Rng) -> bool {
    let tr = |a: Fe, b: Fe| field.trace(field.mul(a, b));
    for i in 0..cur.len() {
        let odd: Vec<usize> = (i..cur.len()).filter(|&j| tr(cur[j], cur[j]) == 1).collect();
        let Some(&p) = odd.choose(rng) else {
            return false;
        };
        cur.swap(i, p);
        let pivot = cur[i];
        for j in i + 1..cur.len() {
            if tr(pivot, cur[j]) == 1 {
                cur[j] += pivot;
            }
        }
    }
    true
}

impl SelfDualBasis {
    pub fn s(&self) -> usize {
        self.alphas.len()
    }

    /// Coordinates b_i = tr(alpha_i beta), packed with b_i at bit i.
    pub fn to_bits(&self, field: &Field, beta: Fe) -> u32 {
        self.alphas
            .iter()
            .enumerate()
            .fold(0, |m, (i, &a)| m | (field.trace(field.mul(a, beta)) as u32) << i)
    }

    pub fn from_bits(&self, bits: u32) -> Fe {
        self.alphas
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .fold(Fe::ZERO, |acc, (_, &a)| acc + a)
    }

    /// A single syndrome entry expanded into s stabilizer measurement bits.
    pub fn syndrome_to_bits(&self, field: &Field, v: Fe) -> u32 {
        self.to_bits(field, v)
    }

    pub fn to_hex(&self, field: &Field) -> Vec<String> {
        self.alphas.iter().map(|&a| field.to_hex(a)).collect()
    }

    pub fn from_hex(field: &Field, v: &[String]) -> Result<Self, BasisError> {
        let s = field.s() as usize;
        if v.len() != s {
            return Err(BasisError::WrongLength { expected: s, got: v.len() });
        }
        let alphas = v.iter().map(|h| field.from_hex(h)).collect::<Result<_, _>>()?;
        Ok(SelfDualBasis { spec: field.spec(), alphas })
    }
}
