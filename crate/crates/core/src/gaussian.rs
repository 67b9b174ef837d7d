//! Quadratic Gaussian evaluators.
//!
//! Distortions are mean squared errors under the unit-variance convention.
//! Channel rates from the layered scheme are in bits per channel use; the
//! distortion maps raise them by `κ` themselves.

use crate::error::{Error, Result};
use crate::optimize::{sweep, Axis, GridSpec};
use crate::problem::{
    ClampedRates, DistortionPoint, GaussianProblem, Params, RateTriple, RoleAssignment, Scheme, RANGE_GUARD,
};

/// `½ log₂(1 + P/W)`, bits per channel use.
pub fn gaussian_capacity(power: f64, noise_var: f64) -> Result<f64> {
    if !(power > 0.0) {
        return Err(Error::invalid("P", "power must be positive", power));
    }
    if !(noise_var > 0.0) {
        return Err(Error::invalid("W", "noise variance must be positive", noise_var));
    }
    Ok(0.5 * (1.0 + power / noise_var).log2())
}

/// Wyner-Ziv distortion-rate function `N·2^{−2R}`.
pub fn gaussian_wz_distortion(sideinfo_var: f64, rate: f64) -> Result<f64> {
    if !(sideinfo_var > 0.0 && sideinfo_var <= 1.0) {
        return Err(Error::invalid("N", "side-information MMSE must lie in (0, 1]", sideinfo_var));
    }
    if !(rate >= 0.0) {
        return Err(Error::invalid("R", "rate must be nonnegative", rate));
    }
    Ok(sideinfo_var * (-2.0 * rate).exp2())
}

/// Distortion of the Wyner-Ziv test channel `X = Z + S` with
/// `Var(S) = s_var`.
pub fn test_channel_distortion(sideinfo_var: f64, s_var: f64) -> f64 {
    sideinfo_var / (1.0 - sideinfo_var + sideinfo_var / s_var)
}

/// `(1 + P/W_k)^κ − 1` divided by `N_k`: the combined channel and
/// side-information quality that decides which receiver gets the refinement.
pub fn combined_quality(problem: &GaussianProblem, k: usize) -> f64 {
    let snr = (1.0 + problem.power / problem.noise_vars[k]).powf(problem.kappa.as_f64());
    (snr - 1.0) / problem.sideinfo_vars[k]
}

/// Per-receiver lower bounds `N_k / (1 + P/W_k)^κ`.
pub fn gaussian_trivial_converse(problem: &GaussianProblem) -> Vec<f64> {
    let kappa = problem.kappa.as_f64();
    problem
        .noise_vars
        .iter()
        .zip(&problem.sideinfo_vars)
        .map(|(&w, &n)| n / (1.0 + problem.power / w).powf(kappa))
        .collect()
}

/// Converse corner as a point (two receivers).
pub fn gaussian_converse_point(problem: &GaussianProblem) -> Result<DistortionPoint> {
    problem.require_pair()?;
    let b = gaussian_trivial_converse(problem);
    Ok(DistortionPoint::new([b[0], b[1]], Scheme::Converse, Params::new()))
}

/// Uncoded transmission distortions `N_k W_k / (W_k + N_k P)`, any `K`.
pub fn gaussian_uncoded_distortions(problem: &GaussianProblem) -> Result<Vec<f64>> {
    if !problem.kappa.is_one() {
        return Err(Error::KappaNotOne("uncoded"));
    }
    Ok(problem
        .noise_vars
        .iter()
        .zip(&problem.sideinfo_vars)
        .map(|(&w, &n)| n * w / (w + n * problem.power))
        .collect())
}

pub fn gaussian_uncoded(problem: &GaussianProblem) -> Result<DistortionPoint> {
    problem.require_pair()?;
    let d = gaussian_uncoded_distortions(problem)?;
    Ok(bounded(problem, [d[0], d[1]], Scheme::Uncoded, Params::new()))
}

/// Common description scheme distortions for any number of receivers:
/// `1/D_k = 1/N_k + min_k' [(1+P/W_k')^κ − 1]/N_k'`.
pub fn gaussian_cds_distortions(problem: &GaussianProblem) -> Vec<f64> {
    let k = problem.receivers();
    let phi = if problem.kappa.is_one() {
        let worst = (0..k)
            .map(|i| problem.noise_vars[i] * problem.sideinfo_vars[i])
            .fold(f64::MIN, f64::max);
        problem.power / worst
    } else {
        (0..k).map(|i| combined_quality(problem, i)).fold(f64::INFINITY, f64::min)
    };
    problem.sideinfo_vars.iter().map(|&n| n / (1.0 + n * phi)).collect()
}

pub fn gaussian_cds(problem: &GaussianProblem) -> Result<DistortionPoint> {
    problem.require_pair()?;
    let d = gaussian_cds_distortions(problem);
    Ok(bounded(problem, [d[0], d[1]], Scheme::Cds, Params::new()))
}

/// Picks the refinement receiver so that the common receiver has the lower
/// combined quality. For `κ = 1` this compares `W_k N_k` exactly; ties make
/// receiver 1 the common receiver.
pub fn choose_refinement_receiver(problem: &GaussianProblem) -> Result<RoleAssignment> {
    problem.require_pair()?;
    let c1 = if problem.kappa.is_one() {
        problem.noise_vars[0] * problem.sideinfo_vars[0] >= problem.noise_vars[1] * problem.sideinfo_vars[1]
    } else {
        combined_quality(problem, 0) <= combined_quality(problem, 1)
    };
    Ok(if c1 { RoleAssignment::C1_R2 } else { RoleAssignment::C2_R1 })
}

/// Power split `ν` (fraction on the common layer) and Costa parameter `γ`
/// of the auxiliary `T = γ U_r + U_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianLdsParams {
    pub nu: f64,
    pub gamma: f64,
}

impl GaussianLdsParams {
    pub fn new(nu: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::OutOfRange {
                what: "nu",
                value: nu,
                lower: 0.0,
                upper: 1.0,
            });
        }
        if !gamma.is_finite() {
            return Err(Error::invalid("gamma", "Costa parameter must be finite", gamma));
        }
        if nu == 0.0 && gamma != 0.0 {
            return Err(Error::invalid("gamma", "nu = 0 requires gamma = 0", gamma));
        }
        Ok(GaussianLdsParams { nu, gamma })
    }
}

/// `ν̄P (γ²/(νP) + (1−γ)²/W)`, with the `ν = 0, γ = 0` limit taken as `P/W`.
fn residual_load(power: f64, params: GaussianLdsParams, w: f64) -> f64 {
    let common = params.nu * power;
    let dpc = if params.gamma == 0.0 {
        0.0
    } else {
        params.gamma * params.gamma / common
    };
    (1.0 - params.nu) * power * (dpc + (1.0 - params.gamma).powi(2) / w)
}

/// Effective channel rates of the layered scheme (bits per channel use).
/// Negative common-layer rates are clamped to zero and flagged.
pub fn gaussian_lds_channel_rates(
    problem: &GaussianProblem,
    assign: RoleAssignment,
    params: GaussianLdsParams,
) -> Result<ClampedRates> {
    problem.require_pair()?;
    let params = GaussianLdsParams::new(params.nu, params.gamma)?;
    let p = problem.power;
    let (wc, wr) = (problem.noise_vars[assign.common], problem.noise_vars[assign.refinement]);
    let lc = residual_load(p, params, wc);
    let lr = residual_load(p, params, wr);
    let raw = RateTriple::new(
        0.5 * ((1.0 + p / wc) / (1.0 + lc)).log2(),
        0.5 * ((1.0 + p / wr) / (1.0 + lr)).log2(),
        0.5 * (1.0 + lr).log2(),
    );
    Ok(raw.clamp())
}

/// Best `(D_c, D_r)` supported by a channel rate triple, returned in
/// receiver order.
pub fn gaussian_lds_distortions(
    problem: &GaussianProblem,
    assign: RoleAssignment,
    rates: RateTriple,
) -> Result<DistortionPoint> {
    problem.require_pair()?;
    if rates.cc < 0.0 || rates.cr < 0.0 || rates.rr < 0.0 {
        return Err(Error::invalid("rates", "rates must be nonnegative", format!("{rates:?}")));
    }
    let (d_c, d_r) = lds_distortion_pair(problem, assign, rates);
    Ok(bounded(
        problem,
        assign.to_receivers(d_c, d_r),
        Scheme::Lds,
        Params::new().with("R_cc", rates.cc).with("R_cr", rates.cr).with("R_rr", rates.rr),
    ))
}

fn lds_distortion_pair(problem: &GaussianProblem, assign: RoleAssignment, rates: RateTriple) -> (f64, f64) {
    let kappa = problem.kappa.as_f64();
    let (nc, nr) = (problem.sideinfo_vars[assign.common], problem.sideinfo_vars[assign.refinement]);
    let gain = |r: f64| (2.0 * kappa * r).exp2() - 1.0;
    let phi = (gain(rates.cc) / nc).min(gain(rates.cr) / nr);
    let d_c = nc / (1.0 + nc * phi);
    let d_r = nr / (1.0 + nr * phi) * (-2.0 * kappa * rates.rr).exp2();
    (d_c, d_r)
}

/// Layered point for explicit `(ν, γ)`, or `None` when a common-layer rate
/// had to be clamped.
pub fn gaussian_lds_point(
    problem: &GaussianProblem,
    assign: RoleAssignment,
    params: GaussianLdsParams,
) -> Result<Option<DistortionPoint>> {
    let rates = gaussian_lds_channel_rates(problem, assign, params)?;
    if rates.clamped {
        return Ok(None);
    }
    let (d_c, d_r) = lds_distortion_pair(problem, assign, rates.rates);
    Ok(Some(bounded(
        problem,
        assign.to_receivers(d_c, d_r),
        Scheme::Lds,
        Params::new().with("nu", params.nu).with("gamma", params.gamma),
    )))
}

/// Sweeps `(ν, γ)` over a grid and returns the unclamped layered points
/// in grid order (ν outer, γ inner). Works for any `κ`.
pub fn gaussian_lds_sweep(
    problem: &GaussianProblem,
    assign: RoleAssignment,
    nu_count: usize,
    gamma_range: (f64, f64),
    gamma_count: usize,
) -> Result<Vec<DistortionPoint>> {
    problem.require_pair()?;
    let grid = GridSpec::new(vec![
        Axis::new("nu", 0.0, 1.0, nu_count),
        Axis::new("gamma", gamma_range.0, gamma_range.1, gamma_count),
    ]);
    sweep(&grid, |t| {
        let params = GaussianLdsParams::new(t[0], t[1]).ok()?;
        gaussian_lds_point(problem, assign, params).ok().flatten()
    })
}

fn require_kappa_one(problem: &GaussianProblem, what: &'static str) -> Result<()> {
    if problem.kappa.is_one() {
        Ok(())
    } else {
        Err(Error::KappaNotOne(what))
    }
}

fn in_range(what: &'static str, value: f64, lower: f64, upper: f64) -> Result<f64> {
    if value >= lower - RANGE_GUARD && value <= upper + RANGE_GUARD {
        Ok(value.clamp(lower, upper))
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            lower,
            upper,
        })
    }
}

fn require_role_rule(problem: &GaussianProblem, assign: RoleAssignment) -> Result<()> {
    let (c, r) = (assign.common, assign.refinement);
    if problem.noise_vars[c] * problem.sideinfo_vars[c] >= problem.noise_vars[r] * problem.sideinfo_vars[r] {
        Ok(())
    } else {
        Err(Error::RoleRule { c: c + 1, r: r + 1 })
    }
}

/// Domain `[D_c^min, D_c^max]` of the closed-form layered tradeoff (`κ = 1`).
pub fn gaussian_lds_domain(problem: &GaussianProblem, assign: RoleAssignment) -> Result<(f64, f64)> {
    problem.require_pair()?;
    require_kappa_one(problem, "closed-form LDS")?;
    require_role_rule(problem, assign)?;
    let p = problem.power;
    let (wc, wr) = (problem.noise_vars[assign.common], problem.noise_vars[assign.refinement]);
    let (nc, nr) = (problem.sideinfo_vars[assign.common], problem.sideinfo_vars[assign.refinement]);
    let lower = nc * wc / (p + wc);
    let factor = if nc < nr && wc > wr {
        (nr * (wc - wr) / ((p + wc) * (nr - nc))).min(1.0)
    } else if nc >= nr && wc >= wr {
        1.0
    } else {
        // nc > nr, wc < wr: the only case the role rule leaves.
        wc / (p + wc) + p * (wc * nc - wr * nr) / ((p + wc) * (nc - nr) * wr)
    };
    Ok((lower, nc * factor))
}

/// Closed-form best `D_r` of the layered scheme at a given `D_c` (`κ = 1`).
///
/// With `extend_flat`, `D_c ∈ (D_c^max, N_c]` maps to `D_r^WZ(C_r)`.
pub fn gaussian_lds_closed_form(
    problem: &GaussianProblem,
    assign: RoleAssignment,
    d_c: f64,
    extend_flat: bool,
) -> Result<f64> {
    let (lower, upper) = gaussian_lds_domain(problem, assign)?;
    let p = problem.power;
    let (wc, wr) = (problem.noise_vars[assign.common], problem.noise_vars[assign.refinement]);
    let (nc, nr) = (problem.sideinfo_vars[assign.common], problem.sideinfo_vars[assign.refinement]);
    if extend_flat && d_c > upper + RANGE_GUARD && d_c <= nc + RANGE_GUARD {
        return Ok(nr * wr / (p + wr));
    }
    let d_c = in_range("D_c", d_c, lower, upper)?;
    let lead = nr * nc * nc / (d_c * nc + nr * (nc - d_c));
    let factor = if wc > wr {
        wr * d_c / ((wr - wc) * nc + (p + wc) * d_c)
    } else {
        wc / (p + wc)
    };
    Ok(lead * factor)
}

/// Bad (larger `W`) and good receivers for separate coding. Equal `W` is
/// treated as `X − Y_g − Y_b` with `g` the receiver of smaller `N`.
pub fn bad_good(problem: &GaussianProblem) -> (usize, usize) {
    let (w, n) = (&problem.noise_vars, &problem.sideinfo_vars);
    if w[0] > w[1] || (w[0] == w[1] && n[0] >= n[1]) {
        (0, 1)
    } else {
        (1, 0)
    }
}

/// Closed-form separate source-channel coding tradeoff `D_g(D_b)` (`κ = 1`).
pub fn gaussian_separate_closed_form(problem: &GaussianProblem, d_b: f64) -> Result<f64> {
    problem.require_pair()?;
    require_kappa_one(problem, "closed-form separate coding")?;
    let (b, g) = bad_good(problem);
    let p = problem.power;
    let (wb, wg) = (problem.noise_vars[b], problem.noise_vars[g]);
    let (nb, ng) = (problem.sideinfo_vars[b], problem.sideinfo_vars[g]);
    let d_b = in_range("D_b", d_b, nb * wb / (p + wb), nb)?;
    let shared = (wg - wb) * nb + (p + wb) * d_b;
    if ng <= nb {
        Ok(ng * nb * nb * wg * d_b / ((d_b * nb + ng * (nb - d_b)) * shared))
    } else {
        let first = wg * d_b;
        let second = nb * (ng * wg - (p + wb) * d_b - nb * (wg - wb)) / (ng - nb);
        Ok(ng / shared * first.max(second))
    }
}

fn separate_rhs(problem: &GaussianProblem, nu: f64) -> (f64, f64) {
    let (b, g) = bad_good(problem);
    let p = problem.power;
    let kappa = problem.kappa.as_f64();
    let nubar = 1.0 - nu;
    let bad = (1.0 + nu * p / (nubar * p + problem.noise_vars[b])).powf(kappa);
    let good = bad * (1.0 + nubar * p / problem.noise_vars[g]).powf(kappa);
    (bad, good)
}

/// Whether `(D_b, D_g)` is achievable by separate coding with power split
/// `ν` on the bad receiver's message. Any `κ`.
pub fn gaussian_separate_feasible(problem: &GaussianProblem, nu: f64, d_b: f64, d_g: f64) -> bool {
    if problem.require_pair().is_err() || !(0.0..=1.0).contains(&nu) || !(d_b > 0.0 && d_g > 0.0) {
        return false;
    }
    let (b, g) = bad_good(problem);
    let (nb, ng) = (problem.sideinfo_vars[b], problem.sideinfo_vars[g]);
    let (bad, good) = separate_rhs(problem, nu);
    let slack = 1.0 + 1e-9;
    if nb / d_b > bad * slack {
        return false;
    }
    let lhs = if ng <= nb {
        nb * nb * ng / (d_g * (ng * nb + d_b * (nb - ng)))
    } else {
        ng / d_g.min(d_b + d_b * d_g * (ng - nb) / (nb * ng))
    };
    lhs <= good * slack
}

/// Smallest `D_g` compatible with a given `D_b` and split `ν` (any `κ`),
/// capped at `N_g`. Returns `None` when `D_b` itself is infeasible.
pub fn gaussian_separate_min_good(problem: &GaussianProblem, nu: f64, d_b: f64) -> Option<f64> {
    let (b, g) = bad_good(problem);
    let (nb, ng) = (problem.sideinfo_vars[b], problem.sideinfo_vars[g]);
    let (bad, good) = separate_rhs(problem, nu);
    if nb / d_b > bad * (1.0 + 1e-9) {
        return None;
    }
    let d_g = if ng <= nb {
        nb * nb * ng / (good * (ng * nb + d_b * (nb - ng)))
    } else {
        let direct = ng / good;
        let via_bad = (ng / good - d_b) * nb * ng / (d_b * (ng - nb));
        direct.max(via_bad)
    };
    Some(d_g.min(ng))
}

/// Separate-coding curve traced by the power split, with the bad-channel
/// condition tight. Points are in receiver order.
pub fn gaussian_separate_sweep(problem: &GaussianProblem, count: usize) -> Result<Vec<DistortionPoint>> {
    problem.require_pair()?;
    let grid = GridSpec::new(vec![Axis::new("nu", 0.0, 1.0, count)]);
    sweep(&grid, |t| gaussian_separate_point(problem, t[0]).ok())
}

/// Separate-coding point for one power split, with the bad-channel
/// condition tight.
pub fn gaussian_separate_point(problem: &GaussianProblem, nu: f64) -> Result<DistortionPoint> {
    problem.require_pair()?;
    let nu = in_range("nu", nu, 0.0, 1.0)?;
    let (b, g) = bad_good(problem);
    let (bad, _) = separate_rhs(problem, nu);
    let d_b = problem.sideinfo_vars[b] / bad;
    let d_g = gaussian_separate_min_good(problem, nu, d_b).ok_or(Error::Empty("separate coding point"))?;
    let mut d = [0.0; 2];
    d[b] = d_b;
    d[g] = d_g;
    Ok(bounded(problem, d, Scheme::Separate, Params::new().with("nu", nu)))
}

/// Closed-form tradeoff of Scheme 3 (reversed decoding order, `κ = 1`).
pub fn gaussian_scheme3_closed_form(problem: &GaussianProblem, assign: RoleAssignment, d_c: f64) -> Result<f64> {
    problem.require_pair()?;
    require_kappa_one(problem, "closed-form Scheme 3")?;
    require_role_rule(problem, assign)?;
    let p = problem.power;
    let (wc, wr) = (problem.noise_vars[assign.common], problem.noise_vars[assign.refinement]);
    let (nc, nr) = (problem.sideinfo_vars[assign.common], problem.sideinfo_vars[assign.refinement]);
    let d_c = in_range("D_c", d_c, nc * wc / (p + wc), nc)?;
    Ok(nr * wr / (p + wr) * (d_c * nc + nc * wc / wr * (nc - d_c)) / (d_c * nc + nr * (nc - d_c)))
}

/// Scheme 3 point for a power split `ν`, using the Costa-optimal `γ`.
/// Valid for either role assignment; under the role rule it traces the
/// closed form.
pub fn gaussian_scheme3_point(problem: &GaussianProblem, assign: RoleAssignment, nu: f64) -> Result<DistortionPoint> {
    problem.require_pair()?;
    require_kappa_one(problem, "Scheme 3")?;
    let nu = in_range("nu", nu, 0.0, 1.0)?;
    let p = problem.power;
    let (wc, wr) = (problem.noise_vars[assign.common], problem.noise_vars[assign.refinement]);
    let rates = RateTriple::new(
        0.5 * (1.0 + nu * p / wc).log2(),
        0.5 * (1.0 + nu * p / wr).log2(),
        0.5 * ((p + wr) / (nu * p + wr)).log2(),
    );
    let (d_c, d_r) = lds_distortion_pair(problem, assign, rates);
    Ok(bounded(
        problem,
        assign.to_receivers(d_c, d_r),
        Scheme::Scheme3,
        Params::new().with("nu", nu).with("gamma", nu * p / (nu * p + wc)),
    ))
}

fn bounded(problem: &GaussianProblem, d: [f64; 2], scheme: Scheme, params: Params) -> DistortionPoint {
    DistortionPoint::bounded(d, [problem.sideinfo_vars[0], problem.sideinfo_vars[1]], scheme, params)
}
