//! Monte-Carlo block-failure rates of the Z-error correction step, the union bound, and overhead.

use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::csscode::{is_stabilizer_equiv, syndrome};
use crate::decoder::DecoderConfig;
use crate::gf2e::Fe;
use crate::triortho::TriorthogonalMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum DistillError {
    #[error("flip probability {0} is outside [0, 1)")]
    BadProbability(f64),
    #[error("error weight {weight} exceeds block length {n}")]
    BadWeight { weight: usize, n: usize },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("k = 0: no outputs")]
    ZeroK,
    #[error("decoder length {got} does not match artifact length {expected}")]
    DecoderMismatch { got: usize, expected: usize },
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorModel {
    Iid { p: f64 },
    FixedWeight { weight: usize },
}

impl ErrorModel {
    pub fn validate(&self, n: usize) -> Result<(), DistillError> {
        match *self {
            ErrorModel::Iid { p } if !(0.0..1.0).contains(&p) => Err(DistillError::BadProbability(p)),
            ErrorModel::FixedWeight { weight } if weight > n => Err(DistillError::BadWeight { weight, n }),
            _ => Ok(()),
        }
    }
}

/// Z-error over F_q with uniform nonzero values.
pub fn sample_error(model: ErrorModel, n: usize, q: usize, rng: &mut impl Rng) -> Vec<Fe> {
    let mut e = vec![Fe::ZERO; n];
    match model {
        ErrorModel::Iid { p } => {
            for x in e.iter_mut() {
                if rng.gen_bool(p) {
                    *x = Fe(rng.gen_range(1..q) as u16);
                }
            }
        }
        ErrorModel::FixedWeight { weight } => {
            for i in index::sample(rng, n, weight) {
                e[i] = Fe(rng.gen_range(1..q) as u16);
            }
        }
    }
    e
}

/// Success iff the residual e + e_hat lies in G^perp.
pub fn correct(t: &TriorthogonalMatrix, dec: &DecoderConfig, e: &[Fe]) -> bool {
    let s = syndrome(t, e).expect("length checked");
    let r = dec.decode(&s);
    if !r.matched {
        return false;
    }
    let residual: Vec<Fe> = e.iter().zip(&r.e_hat).map(|(&a, &b)| a + b).collect();
    is_stabilizer_equiv(t, &residual)
}

pub fn run_trial(
    t: &TriorthogonalMatrix,
    dec: &DecoderConfig,
    model: ErrorModel,
    rng: &mut impl Rng,
) -> bool {
    let e = sample_error(model, t.n, t.field.q(), rng);
    correct(t, dec, &e)
}

/// Independent stream for trial `i`.
pub fn trial_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// Two-sided 95% Wilson score interval.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    const Z: f64 = 1.959963984540054;
    let n = trials as f64;
    let ph = failures as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let centre = (ph + z2 / (2.0 * n)) / denom;
    let half = Z * (ph * (1.0 - ph) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// min(1, C(n, t+1) (c p)^{t+1}).
pub fn analytic_bound(n: usize, t: usize, p: f64, c_conv: usize) -> f64 {
    if p == 0.0 || t + 1 > n {
        return 0.0;
    }
    let (nf, r) = (n as f64, (t + 1) as f64);
    let ln_binom = ln_gamma(nf + 1.0) - ln_gamma(r + 1.0) - ln_gamma(nf - r + 1.0);
    (ln_binom + r * (c_conv as f64 * p).ln()).exp().min(1.0)
}

fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

/// 1 / (c 2^{(n/(t+1)) h((t+1)/n)}).
pub fn threshold_proxy(n: usize, t: usize, c_conv: usize) -> f64 {
    let r = (t + 1) as f64;
    let n = n as f64;
    1.0 / (c_conv as f64 * 2f64.powf(n / r * binary_entropy(r / n)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub model: ErrorModel,
    pub trials: u64,
    pub block_failures: u64,
    pub epsilon: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Union bound at the model's p; absent for fixed-weight runs.
    pub analytic_bound: Option<f64>,
    pub threshold_proxy: f64,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub c_conv: usize,
    pub seed: u64,
    /// Not serialized so that reports are byte-identical across worker counts.
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Runs `trials` independent trials on `workers` threads (0 = rayon default).
pub fn simulate(
    t: &TriorthogonalMatrix,
    dec: &DecoderConfig,
    model: ErrorModel,
    trials: u64,
    seed: u64,
    workers: usize,
    c_conv: usize,
) -> Result<SimulationReport, DistillError> {
    if trials == 0 {
        return Err(DistillError::NoTrials);
    }
    model.validate(t.n)?;
    if dec.n() != t.n {
        return Err(DistillError::DecoderMismatch { got: dec.n(), expected: t.n });
    }
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| DistillError::Pool(e.to_string()))?;
    let block_failures = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .filter(|&i| !run_trial(t, dec, model, &mut trial_rng(seed, i)))
            .count() as u64
    });
    let (ci_low, ci_high) = wilson_interval(block_failures, trials);
    Ok(SimulationReport {
        model,
        trials,
        block_failures,
        epsilon: block_failures as f64 / trials as f64,
        ci_low,
        ci_high,
        analytic_bound: match model {
            ErrorModel::Iid { p } => Some(analytic_bound(t.n, dec.t, p, c_conv)),
            ErrorModel::FixedWeight { .. } => None,
        },
        threshold_proxy: threshold_proxy(t.n, dec.t, c_conv),
        n: t.n,
        k: t.k,
        t: dec.t,
        c_conv,
        seed,
        wall_time: start.elapsed(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverheadReport {
    pub c_conv: usize,
    /// Input CCZ states, c_conv * n.
    pub zeta: usize,
    /// Output CCZ states, k.
    pub xi: usize,
    pub ratio: f64,
}

pub fn overhead_report(n: usize, k: usize, c_conv: usize) -> Result<OverheadReport, DistillError> {
    if k == 0 {
        return Err(DistillError::ZeroK);
    }
    let zeta = c_conv * n;
    Ok(OverheadReport { c_conv, zeta, xi: k, ratio: zeta as f64 / k as f64 })
}
