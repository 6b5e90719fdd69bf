//! Dense state-vector checks of gate teleportation and twirling at tiny dimension.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gf2e::{Fe, Field};

pub const TELEPORT_TOL: f64 = 1e-10;
pub const TWIRL_TOL: f64 = 1e-12;
/// Random input states per teleportation check.
pub const STATES_PER_CHECK: usize = 100;

type C = Complex64;

/// Normalized complex amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    pub amps: Vec<C>,
}

impl DenseState {
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut amps = vec![C::new(0.0, 0.0); dim];
        amps[i] = C::new(1.0, 0.0);
        DenseState { amps }
    }

    pub fn uniform(dim: usize) -> Self {
        DenseState { amps: vec![C::new(1.0 / (dim as f64).sqrt(), 0.0); dim] }
    }

    pub fn random(dim: usize, rng: &mut impl Rng) -> Self {
        let amps = (0..dim).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        DenseState::normalized(amps)
    }

    fn normalized(mut amps: Vec<C>) -> Self {
        let n = norm(&amps);
        amps.iter_mut().for_each(|a| *a /= n);
        DenseState { amps }
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }
}

fn norm(v: &[C]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// min over phases phi of |out - e^{i phi} want|.
pub fn phase_aligned_distance(out: &[C], want: &[C]) -> f64 {
    let ip = inner(want, out);
    let ph = if ip.norm() > 0.0 { ip / ip.norm() } else { C::new(1.0, 0.0) };
    out.iter().zip(want).map(|(o, w)| (o - ph * w).norm_sqr()).sum::<f64>().sqrt()
}

/// Gate teleportation for a diagonal +-1 gate `u` on a register of dimension `u.len()`
/// whose addition is XOR of labels (true for F_2^3 and for F_{2^s} in any basis).
/// Returns the normalized first-register state for each outcome beta with nonzero weight.
fn teleport_branches(u: &[f64], psi: &DenseState) -> Vec<(usize, Vec<C>)> {
    let d = u.len();
    let magic: Vec<C> = u.iter().map(|&x| C::new(x / (d as f64).sqrt(), 0.0)).collect();
    // |M> (x) |psi>, index gamma*d + eta.
    let mut joint = vec![C::new(0.0, 0.0); d * d];
    for g in 0..d {
        for e in 0..d {
            joint[g * d + e] = magic[g] * psi.amps[e];
        }
    }
    // SUM / CNOT^{(x)3}: |g>|e> -> |g>|e+g>.
    let mut summed = vec![C::new(0.0, 0.0); d * d];
    for g in 0..d {
        for e in 0..d {
            summed[g * d + (e ^ g)] = joint[g * d + e];
        }
    }
    (0..d)
        .filter_map(|beta| {
            let branch: Vec<C> = (0..d).map(|g| summed[g * d + beta]).collect();
            if norm(&branch) < 1e-9 {
                return None;
            }
            // U X^beta U.
            let mut out = vec![C::new(0.0, 0.0); d];
            for g in 0..d {
                out[g ^ beta] = branch[g] * u[g] * u[g ^ beta];
            }
            Some((beta, DenseState::normalized(out).amps))
        })
        .collect()
}

fn apply_diag(u: &[f64], psi: &DenseState) -> Vec<C> {
    psi.amps.iter().zip(u).map(|(a, &x)| a * x).collect()
}

fn max_teleport_deviation(u: &[f64], psi: &DenseState) -> f64 {
    let want = apply_diag(u, psi);
    teleport_branches(u, psi)
        .into_iter()
        .map(|(_, out)| phase_aligned_distance(&out, &want))
        .fold(0.0, f64::max)
}

/// Signs (-1)^{tr(gamma^7)} over F_32, indexed by the field element's bits.
pub fn u7_signs(field: &Field) -> Vec<f64> {
    (0..field.q() as u16)
        .map(|g| if field.trace(field.pow(Fe(g), 7)) == 1 { -1.0 } else { 1.0 })
        .collect()
}

pub fn ccz_signs() -> Vec<f64> {
    (0..8).map(|b| if b == 7 { -1.0 } else { 1.0 }).collect()
}

fn check_states(u: &[f64], seed: u64) -> f64 {
    let d = u.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = vec![DenseState::basis(d, 0), DenseState::uniform(d)];
    states.extend((0..STATES_PER_CHECK).map(|_| DenseState::random(d, &mut rng)));
    states.iter().map(|psi| max_teleport_deviation(u, psi)).fold(0.0, f64::max)
}

/// Teleports U = sum (-1)^{tr(gamma^7)} |gamma><gamma| over F_32 through every outcome.
pub fn teleport_u_check(seed: u64) -> f64 {
    let field = Field::with_default(5).expect("F_32");
    check_states(&u7_signs(&field), seed)
}

/// Teleports CCZ on 3+3 qubits through every outcome.
pub fn teleport_ccz_check(seed: u64) -> f64 {
    check_states(&ccz_signs(), seed)
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    pub dim: usize,
    pub data: Vec<C>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat { dim, data: vec![C::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        (0..dim).for_each(|i| m.data[i * dim + i] = C::new(1.0, 0.0));
        m
    }

    pub fn outer(v: &[C]) -> Self {
        let dim = v.len();
        let data = (0..dim * dim).map(|i| v[i / dim] * v[i % dim].conj()).collect();
        CMat { dim, data }
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.data[r * self.dim + c]
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                for c in 0..n {
                    m.data[r * n + c] += a * o.get(k, c);
                }
            }
        }
        m
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.dim;
        let data = (0..n * n).map(|i| self.get(i % n, i / n).conj()).collect();
        CMat { dim: n, data }
    }

    pub fn trace(&self) -> C {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, o: &CMat) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn random_density(dim: usize, rng: &mut impl Rng) -> CMat {
        let a = CMat {
            dim,
            data: (0..dim * dim)
                .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        };
        let mut rho = a.mul(&a.adjoint());
        let t = rho.trace();
        rho.data.iter_mut().for_each(|x| *x /= t);
        rho
    }
}

fn ccz_state() -> Vec<C> {
    apply_diag(&ccz_signs(), &DenseState::uniform(8))
}

/// |M_b> = Z^b |CCZ>, b in F_2^3 as a 3-bit label.
pub fn m_basis() -> Vec<Vec<C>> {
    let ccz = ccz_state();
    (0..8usize)
        .map(|b| {
            (0..8usize)
                .map(|x| if (b & x).count_ones() % 2 == 1 { -ccz[x] } else { ccz[x] })
                .collect()
        })
        .collect()
}

/// S^(d) = CCZ X^d CCZ.
pub fn stabilizer(d: usize) -> CMat {
    let u = ccz_signs();
    let mut m = CMat::zeros(8);
    for x in 0..8 {
        m.data[(x ^ d) * 8 + x] = C::new(u[x] * u[x ^ d], 0.0);
    }
    m
}

pub fn twirl(rho: &CMat) -> CMat {
    let mut out = CMat::zeros(8);
    for d in 0..8 {
        let s = stabilizer(d);
        let t = s.mul(rho).mul(&s.adjoint());
        out.data.iter_mut().zip(&t.data).for_each(|(o, x)| *o += x / 8.0);
    }
    out
}

/// rho in the {|M_b>} basis.
pub fn in_m_basis(rho: &CMat) -> CMat {
    let basis = m_basis();
    let mut w = CMat::zeros(8);
    for (b, v) in basis.iter().enumerate() {
        for x in 0..8 {
            w.data[x * 8 + b] = v[x];
        }
    }
    w.adjoint().mul(rho).mul(&w)
}

pub fn max_off_diagonal(m: &CMat) -> f64 {
    (0..m.dim * m.dim)
        .filter(|i| i / m.dim != i % m.dim)
        .map(|i| m.data[i].norm())
        .fold(0.0, f64::max)
}

/// Twirls a random 3-qubit density matrix; returns the largest off-diagonal magnitude
/// in the |M_b> basis.
pub fn twirl_check(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = CMat::random_density(8, &mut rng);
    max_off_diagonal(&in_m_basis(&twirl(&rho)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateCheckReport {
    pub teleport_u: f64,
    pub teleport_ccz: f64,
    pub twirl: f64,
    pub pass: bool,
}

pub fn run_state_checks(seed: u64) -> StateCheckReport {
    let teleport_u = teleport_u_check(seed);
    let teleport_ccz = teleport_ccz_check(seed);
    let twirl = twirl_check(seed);
    StateCheckReport {
        teleport_u,
        teleport_ccz,
        twirl,
        pass: teleport_u < TELEPORT_TOL && teleport_ccz < TELEPORT_TOL && twirl < TWIRL_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teleport_u_all_outcomes() {
        let field = Field::with_default(5).unwrap();
        let u = u7_signs(&field);
        let psi = DenseState::basis(32, 0);
        assert!(max_teleport_deviation(&u, &psi) < TELEPORT_TOL);
        let plus = DenseState::uniform(32);
        let branches = teleport_branches(&u, &plus);
        assert_eq!(branches.len(), 32);
        let magic = apply_diag(&u, &plus);
        for (_, out) in branches {
            assert!(phase_aligned_distance(&out, &magic) < TELEPORT_TOL);
        }
        for seed in 0..3 {
            assert!(teleport_u_check(seed) < TELEPORT_TOL);
        }
    }

    #[test]
    fn u7_is_not_trivial() {
        let u = u7_signs(&Field::with_default(5).unwrap());
        assert!(u.iter().any(|&x| x < 0.0) && u.iter().any(|&x| x > 0.0));
    }

    #[test]
    fn teleport_ccz_cases() {
        let u = ccz_signs();
        let zero = DenseState::basis(8, 0);
        for (_, out) in teleport_branches(&u, &zero) {
            assert!(phase_aligned_distance(&out, &zero.amps) < TELEPORT_TOL);
        }
        // (|000> + |111>)/sqrt2 -> (|000> - |111>)/sqrt2, relative sign visible.
        let mut amps = vec![C::new(0.0, 0.0); 8];
        amps[0] = C::new(1.0, 0.0);
        amps[7] = C::new(1.0, 0.0);
        let psi = DenseState::normalized(amps);
        let branches = teleport_branches(&u, &psi);
        assert_eq!(branches.len(), 8);
        for (_, out) in branches {
            let ratio = out[7] / out[0];
            assert!((ratio + C::new(1.0, 0.0)).norm() < TELEPORT_TOL);
        }
        assert!(teleport_ccz_check(11) < TELEPORT_TOL);
    }

    #[test]
    fn teleport_output_is_not_input() {
        let u = ccz_signs();
        let psi = DenseState::random(8, &mut ChaCha8Rng::seed_from_u64(3));
        let want = psi.amps.clone();
        let worst = teleport_branches(&u, &psi)
            .into_iter()
            .map(|(_, o)| phase_aligned_distance(&o, &want))
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }

    #[test]
    fn m_basis_orthonormal() {
        let b = m_basis();
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((inner(&b[i], &b[j]) - C::new(want, 0.0)).norm() < TWIRL_TOL);
            }
        }
        for d in 0..8 {
            let s = stabilizer(d);
            for v in &b {
                let sv: Vec<C> = (0..8).map(|r| (0..8).map(|c| s.get(r, c) * v[c]).sum()).collect();
                let ev = inner(v, &sv);
                assert!((ev.norm() - 1.0).abs() < TWIRL_TOL && ev.im.abs() < TWIRL_TOL);
            }
        }
    }

    #[test]
    fn twirl_properties() {
        let ccz = CMat::outer(&ccz_state());
        assert!(twirl(&ccz).max_abs_diff(&ccz) < TWIRL_TOL);
        let mut mixed = CMat::identity(8);
        mixed.data.iter_mut().for_each(|x| *x /= 8.0);
        assert!(twirl(&mixed).max_abs_diff(&mixed) < TWIRL_TOL);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let rho = CMat::random_density(8, &mut rng);
            let t = twirl(&rho);
            assert!(t.max_abs_diff(&twirl(&t)) < TWIRL_TOL);
            assert!((t.trace() - C::new(1.0, 0.0)).norm() < TWIRL_TOL);
            let m = in_m_basis(&t);
            assert!(max_off_diagonal(&m) < TWIRL_TOL);
            let diag: f64 = (0..8).map(|i| m.get(i, i).re).sum();
            assert!((diag - 1.0).abs() < TWIRL_TOL);
            assert!((0..8).all(|i| m.get(i, i).re > -TWIRL_TOL));
        }
        // An untwirled random state is far from diagonal in this basis.
        let rho = CMat::random_density(8, &mut rng);
        assert!(max_off_diagonal(&in_m_basis(&rho)) > 1e-3);
    }

    #[test]
    fn combined_report() {
        let r = run_state_checks(0);
        assert!(r.pass, "{r:?}");
    }
}
