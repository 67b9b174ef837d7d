//! Cross-checks between evaluators, packaged as named suites.
//!
//! Each suite returns one [`Check`] per property with the worst deviation
//! seen and the tolerance it was held to. The building blocks are public so
//! that tests can drive them with their own instances.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binary::{
    binary_cds_points, binary_lds_channel_rates_raw, binary_lds_points, binary_lds_region, binary_trivial_converse,
    binary_uncoded, binary_wz_distortion, BinaryChannelParams, LdsSubgrid, TChoice,
};
use crate::dmc::{binary_superposition, lds_rate_triple, scheme1_rate_triple};
use crate::error::{Error, Result};
use crate::gaussian::{
    bad_good, choose_refinement_receiver, gaussian_cds, gaussian_lds_closed_form, gaussian_lds_domain,
    gaussian_lds_sweep, gaussian_scheme3_closed_form, gaussian_separate_closed_form, gaussian_trivial_converse,
};
use crate::infotheory::rate_kernel;
use crate::mcsim::{simulate_uncoded_binary, simulate_uncoded_gaussian, SimConfig, ACCEPT_SIGMAS};
use crate::optimize::{envelope_indices, interpolate, linspace};
use crate::problem::{BinaryProblem, GaussianProblem, Kappa, RoleAssignment, RANGE_GUARD};

/// Grid used by the Gaussian oracle comparison.
pub const ORACLE_NU_COUNT: usize = 400;
pub const ORACLE_GAMMA_COUNT: usize = 400;
pub const ORACLE_GAMMA_RANGE: (f64, f64) = (-1.0, 2.0);
/// Number of `D_c` values at which curves are compared.
pub const COMPARE_SAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn within(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: deviation <= tolerance,
            deviation,
            tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: worst deviation {:.3e} (tolerance {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.deviation,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    GaussianOracle,
    GaussianOrdering,
    BinaryOracle,
    DmcConsistency,
    McUncoded,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::GaussianOracle,
        Suite::GaussianOrdering,
        Suite::BinaryOracle,
        Suite::DmcConsistency,
        Suite::McUncoded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::GaussianOracle => "gaussian-oracle",
            Suite::GaussianOrdering => "gaussian-ordering",
            Suite::BinaryOracle => "binary-oracle",
            Suite::DmcConsistency => "dmc-consistency",
            Suite::McUncoded => "mc-uncoded",
        }
    }

    /// Tolerance used when none is given.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::GaussianOracle => 1e-4,
            Suite::GaussianOrdering => 1e-10,
            Suite::BinaryOracle => 1e-6,
            Suite::DmcConsistency => 1e-9,
            Suite::McUncoded => ACCEPT_SIGMAS,
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs a suite. `tolerance` overrides the suite default; `seed` drives
/// random instances and Monte Carlo sampling.
pub fn run_suite(suite: Suite, tolerance: Option<f64>, seed: u64) -> Result<SuiteReport> {
    let tol = tolerance.unwrap_or(suite.default_tolerance());
    let checks = match suite {
        Suite::GaussianOracle => gaussian_oracle_suite(tol, seed)?,
        Suite::GaussianOrdering => gaussian_ordering_suite(tol, seed)?,
        Suite::BinaryOracle => binary_oracle_suite(tol)?,
        Suite::DmcConsistency => dmc_suite(tol, seed)?,
        Suite::McUncoded => mc_suite(tol, seed)?,
    };
    Ok(SuiteReport { suite, checks })
}

/// Random bandwidth-matched problems with `P ∈ [0.5,4]`, `W_k ∈ [0.25,4]`,
/// `N_k ∈ [0.1,1]`.
pub fn random_gaussian_problems(seed: u64, count: usize) -> Vec<GaussianProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let p = rng.random_range(0.5..=4.0);
            let w = [rng.random_range(0.25..=4.0), rng.random_range(0.25..=4.0)];
            let n = [rng.random_range(0.1..=1.0), rng.random_range(0.1..=1.0)];
            GaussianProblem::pair(p, w, n).expect("sampled within valid ranges")
        })
        .collect()
}

/// The two bandwidth-matched reference instances used throughout.
pub fn reference_gaussian_problems() -> Vec<GaussianProblem> {
    vec![
        GaussianProblem::pair(1.0, [1.0, 0.5], [0.8, 0.4]).expect("valid"),
        GaussianProblem::pair(1.0, [2.0, 0.5], [0.3, 0.9]).expect("valid"),
    ]
}

fn to_roles(d: [f64; 2], assign: RoleAssignment) -> (f64, f64) {
    (d[assign.common], d[assign.refinement])
}

fn envelope_xy(xy: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if xy.is_empty() {
        return Vec::new();
    }
    envelope_indices(xy)
        .expect("finite points")
        .into_iter()
        .map(|i| xy[i])
        .collect()
}

/// Layered grid sweep seen in the `(D_c, D_r)` plane: the overall envelope
/// and one envelope per Costa parameter value.
#[derive(Debug, Clone)]
pub struct LdsGridStudy {
    pub envelope: Vec<(f64, f64)>,
    pub columns: Vec<(f64, Vec<(f64, f64)>)>,
}

impl LdsGridStudy {
    pub fn new(
        problem: &GaussianProblem,
        assign: RoleAssignment,
        nu_count: usize,
        gamma_count: usize,
        gamma_range: (f64, f64),
    ) -> Result<Self> {
        let pts = gaussian_lds_sweep(problem, assign, nu_count, gamma_range, gamma_count)?;
        let gammas = linspace(gamma_range.0, gamma_range.1, gamma_count);
        let mut by_gamma: Vec<Vec<(f64, f64)>> = vec![Vec::new(); gamma_count];
        let mut all = Vec::with_capacity(pts.len());
        for p in &pts {
            let g = p.params.get("gamma").expect("sweep records gamma");
            let j = gammas.iter().position(|&x| x == g).expect("gamma from the grid");
            let xy = to_roles(p.d, assign);
            by_gamma[j].push(xy);
            all.push(xy);
        }
        if all.is_empty() {
            return Err(Error::Empty("layered sweep produced no points"));
        }
        Ok(LdsGridStudy {
            envelope: envelope_xy(&all),
            columns: gammas.into_iter().zip(by_gamma.iter().map(|c| envelope_xy(c))).collect(),
        })
    }

    pub fn eval(&self, d_c: f64) -> Option<f64> {
        interpolate(&self.envelope, d_c)
    }

    /// Costa parameters whose own envelope comes within `tol` of the best
    /// value at `d_c`.
    pub fn best_gammas(&self, d_c: f64, tol: f64) -> Vec<f64> {
        let vals: Vec<(f64, f64)> = self
            .columns
            .iter()
            .filter_map(|(g, c)| interpolate(c, d_c).map(|v| (*g, v)))
            .collect();
        let best = vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        vals.into_iter().filter(|v| v.1 <= best + tol).map(|v| v.0).collect()
    }
}

/// Lower convex envelope of the closed-form layered curve sampled densely
/// on its domain.
pub fn closed_form_envelope(problem: &GaussianProblem, assign: RoleAssignment, samples: usize) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = gaussian_lds_domain(problem, assign)?;
    let xy = linspace(lo, hi, samples)
        .into_iter()
        .map(|d| gaussian_lds_closed_form(problem, assign, d, false).map(|r| (d, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(envelope_xy(&xy))
}

/// Worst gap between the grid envelope and the closed-form envelope at
/// evenly spaced `D_c` on the closed-form domain.
pub fn lds_oracle_gap(study: &LdsGridStudy, problem: &GaussianProblem, assign: RoleAssignment) -> Result<f64> {
    let (lo, hi) = gaussian_lds_domain(problem, assign)?;
    let reference = closed_form_envelope(problem, assign, 4001)?;
    let mut worst: f64 = 0.0;
    for d in linspace(lo, hi, COMPARE_SAMPLES) {
        let grid = study.eval(d).unwrap_or(f64::INFINITY);
        let closed = interpolate(&reference, d).expect("inside domain");
        worst = worst.max((grid - closed).abs());
    }
    Ok(worst)
}

/// Worst distance from the expected Costa parameter (0 when `W_c > W_r`,
/// 1 otherwise) to the nearest near-optimal grid column.
///
/// `D_c` is sampled strictly inside the domain. At the lower end every
/// column reaches the same point, and at the upper end the per-column
/// envelopes are limited by the ν spacing rather than by γ.
pub fn costa_dichotomy_gap(study: &LdsGridStudy, problem: &GaussianProblem, assign: RoleAssignment) -> Result<f64> {
    let (lo, hi) = gaussian_lds_domain(problem, assign)?;
    let target = if problem.noise_vars[assign.common] > problem.noise_vars[assign.refinement] {
        0.0
    } else {
        1.0
    };
    let samples = linspace(lo, hi, COMPARE_SAMPLES + 2);
    let mut worst: f64 = 0.0;
    for &d in &samples[1..=COMPARE_SAMPLES] {
        let near = study
            .best_gammas(d, 1e-12)
            .into_iter()
            .map(|g| (g - target).abs())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(near);
    }
    Ok(worst)
}

/// Ordering gaps on the closed-form domain, all signed so that positive
/// means the layered scheme lost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingGaps {
    /// `max (D_LDS − D_SEP)` over matched points.
    pub lds_minus_separate: f64,
    /// `max (D_LDS − D_S3)`.
    pub lds_minus_scheme3: f64,
    /// `max |D_LDS − D_SEP|`, meaningful when equality is expected.
    pub lds_separate_abs: f64,
}

/// Compares the layered, separate and Scheme 3 closed forms.
///
/// When the bad receiver is the common one the curves share the `D_c`
/// axis. Otherwise each separate point `(D_b, D_g)` is checked against the
/// layered curve at `D_c = D_g`, with the flat continuation past the
/// layered domain.
pub fn ordering_gaps(problem: &GaussianProblem, assign: RoleAssignment) -> Result<OrderingGaps> {
    let (lo, hi) = gaussian_lds_domain(problem, assign)?;
    let (b, _) = bad_good(problem);
    let mut gaps = OrderingGaps {
        lds_minus_separate: f64::NEG_INFINITY,
        lds_minus_scheme3: f64::NEG_INFINITY,
        lds_separate_abs: 0.0,
    };
    for d_c in linspace(lo, hi, COMPARE_SAMPLES) {
        let lds = gaussian_lds_closed_form(problem, assign, d_c, false)?;
        let s3 = gaussian_scheme3_closed_form(problem, assign, d_c)?;
        gaps.lds_minus_scheme3 = gaps.lds_minus_scheme3.max(lds - s3);
    }
    let p = problem.power;
    let (wb, nb) = (problem.noise_vars[b], problem.sideinfo_vars[b]);
    for d_b in linspace(nb * wb / (p + wb), nb, COMPARE_SAMPLES) {
        let d_g = gaussian_separate_closed_form(problem, d_b)?;
        let diff = if b == assign.common {
            if d_b > hi + RANGE_GUARD {
                continue;
            }
            gaussian_lds_closed_form(problem, assign, d_b, false)? - d_g
        } else {
            // separate point is (D_c, D_r) = (d_g, d_b)
            if d_g > problem.sideinfo_vars[assign.common] + RANGE_GUARD {
                continue;
            }
            gaussian_lds_closed_form(problem, assign, d_g.max(lo), true)? - d_b
        };
        gaps.lds_minus_separate = gaps.lds_minus_separate.max(diff);
        gaps.lds_separate_abs = gaps.lds_separate_abs.max(diff.abs());
    }
    Ok(gaps)
}

fn gaussian_oracle_suite(tol: f64, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut problems = reference_gaussian_problems();
    problems.extend(random_gaussian_problems(seed, 3));
    let step = (ORACLE_GAMMA_RANGE.1 - ORACLE_GAMMA_RANGE.0) / (ORACLE_GAMMA_COUNT - 1) as f64;
    for (i, p) in problems.iter().enumerate() {
        let assign = choose_refinement_receiver(p)?;
        let study = LdsGridStudy::new(p, assign, ORACLE_NU_COUNT, ORACLE_GAMMA_COUNT, ORACLE_GAMMA_RANGE)?;
        checks.push(Check::within(
            format!("instance {i}: grid envelope vs closed form"),
            lds_oracle_gap(&study, p, assign)?,
            tol,
        ));
        checks.push(Check::within(
            format!("instance {i}: optimal Costa parameter"),
            costa_dichotomy_gap(&study, p, assign)?,
            step + 1e-12,
        ));
    }
    Ok(checks)
}

fn gaussian_ordering_suite(tol: f64, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut problems = reference_gaussian_problems();
    problems.extend(random_gaussian_problems(seed, 10));
    for (i, p) in problems.iter().enumerate() {
        let assign = choose_refinement_receiver(p)?;
        let gaps = ordering_gaps(p, assign)?;
        checks.push(Check::within(format!("instance {i}: LDS <= separate"), gaps.lds_minus_separate.max(0.0), tol));
        checks.push(Check::within(format!("instance {i}: LDS <= Scheme 3"), gaps.lds_minus_scheme3.max(0.0), tol));
        let (c, r) = (assign.common, assign.refinement);
        if p.noise_vars[c] >= p.noise_vars[r] && p.sideinfo_vars[c] >= p.sideinfo_vars[r] {
            checks.push(Check::within(format!("instance {i}: LDS = separate"), gaps.lds_separate_abs, tol));
        }
        let conv = gaussian_trivial_converse(p);
        let cds = gaussian_cds(p)?.d;
        let below = (0..2).map(|k| conv[k] - cds[k]).fold(0.0, f64::max);
        checks.push(Check::within(format!("instance {i}: CDS above converse"), below, 1e-12));
    }
    Ok(checks)
}

fn brute_force_wz(beta: f64, rate: f64) -> f64 {
    (0..2000)
        .map(|i| {
            let a = beta * i as f64 / 1999.0;
            let r = rate_kernel(a, beta);
            let q = if r > 0.0 { (rate / r).min(1.0) } else { 0.0 };
            q * a + (1.0 - q) * beta
        })
        .fold(f64::INFINITY, f64::min)
}

fn binary_oracle_suite(tol: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    for &(beta, rate) in &[(0.25, 0.4), (0.1, 0.2), (0.4, 0.05), (0.3, 0.6)] {
        let got = binary_wz_distortion(beta, rate, 41)?;
        worst = worst.max((got - brute_force_wz(beta, rate)).abs());
    }
    checks.push(Check::within("Wyner-Ziv distortion vs 2000-point search", worst, tol));

    let problems = [
        BinaryProblem::pair([0.05, 0.1], [0.2, 0.1])?,
        BinaryProblem::pair([0.2, 0.02], [0.05, 0.3])?,
    ];
    for (i, p) in problems.iter().enumerate() {
        let mut lds: Vec<(u64, u64)> = binary_lds_points(p, 21, LdsSubgrid::CdsPinned)?
            .iter()
            .map(|x| (x.d[0].to_bits(), x.d[1].to_bits()))
            .collect();
        let mut cds: Vec<(u64, u64)> = binary_cds_points(p, 21)?
            .iter()
            .map(|x| (x.d[0].to_bits(), x.d[1].to_bits()))
            .collect();
        lds.sort_unstable();
        lds.dedup();
        cds.sort_unstable();
        cds.dedup();
        let mismatch = if lds == cds { 0.0 } else { 1.0 };
        checks.push(Check::within(format!("instance {i}: pinned layered grid = CDS"), mismatch, 0.0));

        let conv = binary_trivial_converse(p, 401)?;
        let region = binary_lds_region(p, 21)?;
        let below = region
            .points
            .iter()
            .flat_map(|x| [conv[0] - x.d[0], conv[1] - x.d[1]])
            .fold(0.0, f64::max);
        checks.push(Check::within(format!("instance {i}: layered region above converse"), below, tol));

        let unc = binary_uncoded(p)?.d;
        let dev = (0..2)
            .map(|k| (unc[k] - p.crossovers[k].min(p.sideinfo_crossovers[k])).abs())
            .fold(0.0, f64::max);
        checks.push(Check::within(format!("instance {i}: uncoded"), dev, 0.0));
    }
    Ok(checks)
}

fn dmc_suite(tol: f64, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_common, mut worst_xor, mut worst_s1): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let (pc, pr) = (rng.random_range(0.0..=0.5), rng.random_range(0.0..=0.5));
        let (gc, gr) = (rng.random_range(0.0..=0.5), rng.random_range(0.0..=0.5));
        for t in [TChoice::Common, TChoice::Xor] {
            let inputs = binary_superposition(gc, gr, t, pc, pr, Kappa::ONE)?;
            let engine = lds_rate_triple(&inputs)?;
            let closed = binary_lds_channel_rates_raw(pc, pr, BinaryChannelParams::new(gc, gr, t)?, Kappa::ONE);
            let dev = engine.max_abs_diff(&closed);
            match t {
                TChoice::Common => {
                    worst_common = worst_common.max(dev);
                    worst_s1 = worst_s1.max(scheme1_rate_triple(&inputs)?.max_abs_diff(&engine));
                }
                TChoice::Xor => worst_xor = worst_xor.max(dev),
            }
        }
    }
    Ok(vec![
        Check::within("engine vs closed form, T = U_c", worst_common, tol),
        Check::within("engine vs closed form, T = U_c xor U_r", worst_xor, tol),
        Check::within("Scheme 1 = layered with T = U_c", worst_s1, 1e-12),
    ])
}

fn mc_suite(sigmas: f64, seed: u64) -> Result<Vec<Check>> {
    let cfg = SimConfig::new(1_000_000, seed)?;
    let g = GaussianProblem::pair(1.0, [1.0, 0.5], [0.8, 0.4])?;
    let b = BinaryProblem::pair([0.05, 0.1], [0.2, 0.1])?;
    let ge = simulate_uncoded_gaussian(&g, cfg)?;
    let be = simulate_uncoded_binary(&b, cfg)?;
    let g_target = [0.8 / 1.8, 0.2 / 0.9];
    let b_target = [0.05, 0.1];
    let mut checks = Vec::new();
    for k in 0..2 {
        let z = (ge[k].mean - g_target[k]).abs() / ge[k].std_error;
        checks.push(Check::within(format!("gaussian receiver {} (std errors)", k + 1), z, sigmas));
    }
    for k in 0..2 {
        let z = (be[k].mean - b_target[k]).abs() / be[k].std_error.max(f64::MIN_POSITIVE);
        checks.push(Check::within(format!("binary receiver {} (std errors)", k + 1), z, sigmas));
    }
    Ok(checks)
}
