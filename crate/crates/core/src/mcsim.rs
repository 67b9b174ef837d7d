//! Monte Carlo checks of the closed forms that describe simulable strategies.
//!
//! Sampling uses ChaCha8 with a documented splitting rule: samples are cut
//! into batches of [`BATCH`], batch `b` draws from the generator seeded with
//! the master seed and switched to stream `b`, and batch sums are combined in
//! batch order. Results therefore depend only on `(seed, samples)`, never on
//! the number of threads. Gaussian variates come from `rand_distr`'s
//! ziggurat `StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::test_channel_distortion;
use crate::problem::{BinaryProblem, GaussianProblem};

pub const BATCH: u64 = 65_536;

/// Pass threshold in standard errors.
pub const ACCEPT_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub samples: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::invalid("samples", "need at least one sample", samples));
        }
        Ok(SimConfig { samples, seed })
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Whether `target` lies within `ACCEPT_SIGMAS` standard errors.
    pub fn agrees_with(&self, target: f64) -> bool {
        (self.mean - target).abs() <= ACCEPT_SIGMAS * self.std_error.max(f64::EPSILON)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(mut self, other: Moments) -> Moments {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    fn estimate(&self) -> Estimate {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = if self.n > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            mean,
            std_error: (var / n).sqrt(),
        }
    }
}

/// Runs `draw` once per sample, recording `K` values per draw.
fn run<const K: usize, F>(cfg: SimConfig, draw: F) -> [Estimate; K]
where
    F: Fn(&mut ChaCha8Rng) -> [f64; K] + Sync,
{
    let batches = cfg.samples.div_ceil(BATCH);
    let per_batch: Vec<[Moments; K]> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let len = BATCH.min(cfg.samples - b * BATCH);
            let mut m = [Moments::default(); K];
            for _ in 0..len {
                for (slot, x) in m.iter_mut().zip(draw(&mut rng)) {
                    slot.push(x);
                }
            }
            m
        })
        .collect();
    let total = per_batch
        .into_iter()
        .fold([Moments::default(); K], |acc, m| std::array::from_fn(|k| acc[k].merge(m[k])));
    total.map(|m| m.estimate())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Uncoded transmission of `√P·X` with per-receiver linear MMSE estimation
/// from the channel output and the side information. Returns squared-error
/// estimates per receiver.
pub fn simulate_uncoded_gaussian(problem: &GaussianProblem, cfg: SimConfig) -> Result<[Estimate; 2]> {
    problem.require_pair()?;
    if !problem.kappa.is_one() {
        return Err(Error::KappaNotOne("uncoded"));
    }
    let amp = problem.power.sqrt();
    // coefficients of the estimate from (channel output, side information)
    let coef = |k: usize| {
        let (w, rho) = (problem.noise_vars[k], problem.rho(k));
        let (vr, cry, vy) = (problem.power + w, amp * rho, 1.0);
        let (cxr, cxy) = (amp, rho);
        let det = vr * vy - cry * cry;
        ((cxr * vy - cxy * cry) / det, (cxy * vr - cxr * cry) / det)
    };
    let c = [coef(0), coef(1)];
    let w_sd = [problem.noise_vars[0].sqrt(), problem.noise_vars[1].sqrt()];
    let n_sd = [problem.sideinfo_vars[0].sqrt(), problem.sideinfo_vars[1].sqrt()];
    let rho = [problem.rho(0), problem.rho(1)];
    Ok(run(cfg, |rng| {
        let x = normal(rng);
        std::array::from_fn(|k| {
            let received = amp * x + w_sd[k] * normal(rng);
            let side = rho[k] * x + n_sd[k] * normal(rng);
            let e = x - (c[k].0 * received + c[k].1 * side);
            e * e
        })
    }))
}

/// Uncoded binary transmission: each receiver outputs its channel symbol
/// when `p_k ≤ β_k` and its side information otherwise.
pub fn simulate_uncoded_binary(problem: &BinaryProblem, cfg: SimConfig) -> Result<[Estimate; 2]> {
    problem.require_pair()?;
    if !problem.kappa.is_one() {
        return Err(Error::KappaNotOne("uncoded"));
    }
    let p = [problem.crossovers[0], problem.crossovers[1]];
    let beta = [problem.sideinfo_crossovers[0], problem.sideinfo_crossovers[1]];
    Ok(run(cfg, |rng| {
        let x: bool = rng.random();
        std::array::from_fn(|k| {
            let received = x ^ rng.random_bool(p[k]);
            let side = x ^ rng.random_bool(beta[k]);
            let guess = if p[k] <= beta[k] { received } else { side };
            f64::from(u8::from(guess != x))
        })
    }))
}

/// Backward Wyner-Ziv test channel `X = Z + S` with `Var(S) = s_var`, side
/// information `Y = ρX + √N·noise`, and the linear combiner of `Z` and `Y`.
/// Returns the MSE estimate; the closed form is `N / (1 − N + N/s_var)`.
pub fn simulate_gaussian_wz_estimator(sideinfo_var: f64, s_var: f64, cfg: SimConfig) -> Result<Estimate> {
    if !(sideinfo_var > 0.0 && sideinfo_var <= 1.0) {
        return Err(Error::invalid("N", "side-information MMSE must lie in (0, 1]", sideinfo_var));
    }
    if !(s_var > 0.0 && s_var <= 1.0) {
        return Err(Error::invalid("S_var", "test-channel variance must lie in (0, 1]", s_var));
    }
    let z_var = 1.0 - s_var;
    let rho = (1.0 - sideinfo_var).sqrt();
    let denom = 1.0 - rho * rho * z_var;
    let a = sideinfo_var / denom;
    let b = rho * (1.0 - z_var) / denom;
    let (z_sd, s_sd, n_sd) = (z_var.sqrt(), s_var.sqrt(), sideinfo_var.sqrt());
    let [e] = run(cfg, |rng| {
        let z = z_sd * normal(rng);
        let x = z + s_sd * normal(rng);
        let y = rho * x + n_sd * normal(rng);
        let err = x - (a * z + b * y);
        [err * err]
    });
    Ok(e)
}

/// Closed form matched by [`simulate_gaussian_wz_estimator`].
pub fn wz_estimator_target(sideinfo_var: f64, s_var: f64) -> f64 {
    test_channel_distortion(sideinfo_var, s_var)
}
