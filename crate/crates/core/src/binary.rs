//! Binary Hamming evaluators.
//!
//! The source test channels are the erasure-style channels of point-to-point
//! Wyner-Ziv coding: with probability `q` the encoder describes `X` through a
//! BSC(α), otherwise it sends nothing. A layer with parameters `(q, α)` costs
//! `q·r(α, β)` bits at a receiver whose side information has crossover `β`,
//! and yields distortion `(1−q)β + q·min{α, β}` there.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::infotheory::{conv, h2, rate_kernel};
use crate::optimize::{envelope_indices, linspace, lower_convex_envelope, pareto_merge};
use crate::problem::{
    BinaryProblem, ClampedRates, DistortionPoint, Kappa, Params, RateTriple, RoleAssignment, Scheme, TradeoffCurve,
};

/// Default points per probability axis.
pub const DEFAULT_RESOLUTION: usize = 41;

/// Slack allowed when comparing a source rate against a channel rate.
const RATE_SLACK: f64 = 1e-12;

const GOLDEN_STEPS: usize = 80;

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 3 {
        Err(Error::GridTooCoarse(resolution))
    } else {
        Ok(())
    }
}

fn check_half(what: &'static str, x: f64) -> Result<()> {
    if (0.0..=0.5).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value: x,
            lower: 0.0,
            upper: 0.5,
        })
    }
}

fn check_unit(what: &'static str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value: x,
            lower: 0.0,
            upper: 1.0,
        })
    }
}

/// Distortion at side-information crossover `β` of a layer `(q, α)`.
#[inline]
pub fn layer_distortion(q: f64, alpha: f64, beta: f64) -> f64 {
    (1.0 - q) * beta + q * alpha.min(beta)
}

/// Binary Wyner-Ziv distortion-rate function.
///
/// Scans `α` over `grid_resolution` points of `[0, β]` with the best `q` for
/// each `α` taken analytically, then refines around the best grid point by
/// golden-section search.
pub fn binary_wz_distortion(beta: f64, rate: f64, grid_resolution: usize) -> Result<f64> {
    check_half("beta", beta)?;
    if !(rate >= 0.0) {
        return Err(Error::invalid("R", "rate must be nonnegative", rate));
    }
    if grid_resolution == 0 {
        return Err(Error::GridTooCoarse(0));
    }
    if rate == 0.0 || beta == 0.0 {
        return Ok(beta);
    }
    if rate >= h2(beta) {
        return Ok(0.0);
    }
    let at = |alpha: f64| {
        let r = rate_kernel(alpha, beta);
        if r <= 0.0 {
            return beta;
        }
        let q = (rate / r).min(1.0);
        layer_distortion(q, alpha, beta)
    };
    let grid = linspace(0.0, beta, grid_resolution.max(2));
    let (best_i, best) = grid
        .iter()
        .map(|&a| at(a))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, d)| if d < acc.1 { (i, d) } else { acc });
    let mut lo = grid[best_i.saturating_sub(1)];
    let mut hi = grid[(best_i + 1).min(grid.len() - 1)];
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (at(x1), at(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = at(x2);
        }
    }
    Ok(best.min(f1).min(f2))
}

/// Per-receiver lower bounds `D^WZ(β_k, κ(1 − H₂(p_k)))`.
pub fn binary_trivial_converse(problem: &BinaryProblem, grid_resolution: usize) -> Result<Vec<f64>> {
    let kappa = problem.kappa.as_f64();
    problem
        .crossovers
        .iter()
        .zip(&problem.sideinfo_crossovers)
        .map(|(&p, &b)| binary_wz_distortion(b, kappa * (1.0 - h2(p)), grid_resolution))
        .collect()
}

pub fn binary_converse_point(problem: &BinaryProblem, grid_resolution: usize) -> Result<DistortionPoint> {
    problem.require_pair()?;
    let b = binary_trivial_converse(problem, grid_resolution)?;
    Ok(DistortionPoint::new([b[0], b[1]], Scheme::Converse, Params::new()))
}

/// Uncoded transmission: each receiver keeps the better of its channel
/// output and its side information, `D_k = min{p_k, β_k}`.
pub fn binary_uncoded(problem: &BinaryProblem) -> Result<DistortionPoint> {
    problem.require_pair()?;
    if !problem.kappa.is_one() {
        return Err(Error::KappaNotOne("uncoded"));
    }
    let d = [0, 1].map(|k| problem.crossovers[k].min(problem.sideinfo_crossovers[k]));
    Ok(bounded(problem, d, Scheme::Uncoded, Params::new()))
}

/// Common-description distortions for one test channel `(q, α)`, or `None`
/// when some receiver cannot decode it. Any number of receivers.
pub fn binary_cds_distortions(problem: &BinaryProblem, q: f64, alpha: f64) -> Option<Vec<f64>> {
    let kappa = problem.kappa.as_f64();
    let ok = problem
        .crossovers
        .iter()
        .zip(&problem.sideinfo_crossovers)
        .all(|(&p, &b)| q * rate_kernel(alpha, b) <= kappa * (1.0 - h2(p)) + RATE_SLACK);
    ok.then(|| {
        problem
            .sideinfo_crossovers
            .iter()
            .map(|&b| layer_distortion(q, alpha, b))
            .collect()
    })
}

/// Every feasible common-description point over `(q, α) ∈ [0,1]×[0,½]`,
/// in grid order (q outer).
pub fn binary_cds_points(problem: &BinaryProblem, resolution: usize) -> Result<Vec<DistortionPoint>> {
    problem.require_pair()?;
    check_resolution(resolution)?;
    let qs = linspace(0.0, 1.0, resolution);
    let alphas = linspace(0.0, 0.5, resolution);
    let mut out = Vec::new();
    for &q in &qs {
        for &alpha in &alphas {
            if let Some(d) = binary_cds_distortions(problem, q, alpha) {
                out.push(bounded(
                    problem,
                    [d[0], d[1]],
                    Scheme::Cds,
                    Params::new().with("q", q).with("alpha", alpha),
                ));
            }
        }
    }
    Ok(out)
}

pub fn binary_cds_region(problem: &BinaryProblem, resolution: usize) -> Result<TradeoffCurve> {
    lower_convex_envelope(binary_cds_points(problem, resolution)?)
}

/// Source test channels of the two layers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinarySourceParams {
    pub q_c: f64,
    pub q_r: f64,
    pub alpha_c: f64,
    pub alpha_r: f64,
}

impl BinarySourceParams {
    /// Checks ranges and the nesting `q_c ≤ q_r`, `α_c ≥ α_r`.
    pub fn new(q_c: f64, q_r: f64, alpha_c: f64, alpha_r: f64) -> Result<Self> {
        check_unit("q_c", q_c)?;
        check_unit("q_r", q_r)?;
        check_half("alpha_c", alpha_c)?;
        check_half("alpha_r", alpha_r)?;
        if q_c > q_r {
            return Err(Error::invalid("q", "need q_c <= q_r", format!("{q_c} > {q_r}")));
        }
        if alpha_c < alpha_r {
            return Err(Error::invalid("alpha", "need alpha_c >= alpha_r", format!("{alpha_c} < {alpha_r}")));
        }
        Ok(BinarySourceParams {
            q_c,
            q_r,
            alpha_c,
            alpha_r,
        })
    }
}

/// Auxiliary used for the dirty-paper layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TChoice {
    /// `T = U_c`
    Common,
    /// `T = U_c ⊕ U_r`
    Xor,
}

/// `U_c ~ Ber(γ_c)`, `U_r ~ Ber(γ_r)`, channel input `U = U_c ⊕ U_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryChannelParams {
    pub gamma_c: f64,
    pub gamma_r: f64,
    pub t_choice: TChoice,
}

impl BinaryChannelParams {
    pub fn new(gamma_c: f64, gamma_r: f64, t_choice: TChoice) -> Result<Self> {
        check_half("gamma_c", gamma_c)?;
        check_half("gamma_r", gamma_r)?;
        Ok(BinaryChannelParams {
            gamma_c,
            gamma_r,
            t_choice,
        })
    }
}

/// Source rates `(R_cc, R_cr, R_rr)` of the layered test channels.
pub fn binary_lds_source_rates(src: BinarySourceParams, beta_c: f64, beta_r: f64) -> ClampedRates {
    let cr = src.q_c * rate_kernel(src.alpha_c, beta_r);
    RateTriple::new(
        src.q_c * rate_kernel(src.alpha_c, beta_c),
        cr,
        src.q_r * rate_kernel(src.alpha_r, beta_r) - cr,
    )
    .clamp()
}

/// Unclamped channel rates of the layered scheme.
///
/// With `T = U_c` the triple is
/// `κ(r(γ_r⋆p_c, γ_c), r(γ_r⋆p_r, γ_c), r(p_r, γ_r))`, which reduces to
/// `κ(1−H₂(γ_r⋆p_c), 1−H₂(γ_r⋆p_r), r(p_r, γ_r))` at `γ_c = ½`.
pub fn binary_lds_channel_rates_raw(p_c: f64, p_r: f64, ch: BinaryChannelParams, kappa: Kappa) -> RateTriple {
    let (gc, gr) = (ch.gamma_c, ch.gamma_r);
    let raw = match ch.t_choice {
        TChoice::Common => RateTriple::new(
            rate_kernel(conv(gr, p_c), gc),
            rate_kernel(conv(gr, p_r), gc),
            rate_kernel(p_r, gr),
        ),
        TChoice::Xor => {
            let u = conv(gc, gr);
            let known = rate_kernel(gc, gr);
            RateTriple::new(rate_kernel(p_c, u) - known, rate_kernel(p_r, u) - known, known)
        }
    };
    raw.scaled(kappa.as_f64())
}

/// Channel rates with negative components clamped and flagged.
pub fn binary_lds_channel_rates(p_c: f64, p_r: f64, ch: BinaryChannelParams, kappa: Kappa) -> ClampedRates {
    binary_lds_channel_rates_raw(p_c, p_r, ch, kappa).clamp()
}

/// Layered point for one explicit parameter tuple, or `None` when the
/// source rates do not fit through the channel (or a channel rate clamps).
pub fn binary_lds_point(
    problem: &BinaryProblem,
    assign: RoleAssignment,
    src: BinarySourceParams,
    channel: BinaryChannelParams,
) -> Result<Option<DistortionPoint>> {
    problem.require_pair()?;
    let (c, r) = (assign.common, assign.refinement);
    let (beta_c, beta_r) = (problem.sideinfo_crossovers[c], problem.sideinfo_crossovers[r]);
    let ch = binary_lds_channel_rates(problem.crossovers[c], problem.crossovers[r], channel, problem.kappa);
    let needed = binary_lds_source_rates(src, beta_c, beta_r);
    if ch.clamped || !needed.rates.fits_within(&ch.rates, RATE_SLACK) {
        return Ok(None);
    }
    let d_c = layer_distortion(src.q_c, src.alpha_c, beta_c);
    let d_r = layer_distortion(src.q_r, src.alpha_r, beta_r);
    Ok(Some(
        LdsCandidate {
            d: assign.to_receivers(d_c, d_r),
            src,
            channel,
            assign,
        }
        .into_point(problem),
    ))
}

/// Which part of the layered parameter space to sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdsSubgrid {
    /// All `(q_c, q_r, α_c, α_r, γ_c, γ_r)` and both choices of `T`.
    Full,
    /// `q_c = q_r`, `α_c = α_r`, `γ_r = 0`, `T = U_c`: the single-layer
    /// special case, which coincides with common description.
    CdsPinned,
}

#[derive(Debug, Clone, Copy)]
struct ChannelOption {
    rates: RateTriple,
    params: BinaryChannelParams,
}

/// Unclamped channel triples for one role assignment, reduced to those not
/// componentwise dominated by another.
fn channel_frontier(
    problem: &BinaryProblem,
    assign: RoleAssignment,
    resolution: usize,
    subgrid: LdsSubgrid,
) -> Vec<ChannelOption> {
    let (p_c, p_r) = (problem.crossovers[assign.common], problem.crossovers[assign.refinement]);
    let mut options = Vec::new();
    let mut push = |params: BinaryChannelParams| {
        let c = binary_lds_channel_rates(p_c, p_r, params, problem.kappa);
        if !c.clamped {
            options.push(ChannelOption { rates: c.rates, params });
        }
    };
    match subgrid {
        LdsSubgrid::CdsPinned => push(BinaryChannelParams {
            gamma_c: 0.5,
            gamma_r: 0.0,
            t_choice: TChoice::Common,
        }),
        LdsSubgrid::Full => {
            let gammas = linspace(0.0, 0.5, resolution);
            for t_choice in [TChoice::Common, TChoice::Xor] {
                for &gamma_c in &gammas {
                    for &gamma_r in &gammas {
                        push(BinaryChannelParams {
                            gamma_c,
                            gamma_r,
                            t_choice,
                        });
                    }
                }
            }
        }
    }
    let dominated = |i: usize| {
        let a = &options[i].rates;
        options.iter().enumerate().any(|(j, o)| {
            let b = &o.rates;
            j != i && a.fits_within(b, 0.0) && (a != b || j < i)
        })
    };
    let keep: Vec<bool> = (0..options.len()).map(|i| !dominated(i)).collect();
    options
        .iter()
        .zip(keep)
        .filter_map(|(o, k)| k.then_some(*o))
        .collect()
}

struct LdsCandidate {
    d: [f64; 2],
    src: BinarySourceParams,
    channel: BinaryChannelParams,
    assign: RoleAssignment,
}

impl LdsCandidate {
    fn into_point(self, problem: &BinaryProblem) -> DistortionPoint {
        let t = match self.channel.t_choice {
            TChoice::Common => 0.0,
            TChoice::Xor => 1.0,
        };
        let params = Params::new()
            .with("c", (self.assign.common + 1) as f64)
            .with("q_c", self.src.q_c)
            .with("q_r", self.src.q_r)
            .with("alpha_c", self.src.alpha_c)
            .with("alpha_r", self.src.alpha_r)
            .with("gamma_c", self.channel.gamma_c)
            .with("gamma_r", self.channel.gamma_r)
            .with("t_xor", t);
        bounded(problem, self.d, Scheme::Lds, params)
    }
}

/// Feasible layered points for one role assignment and one common-layer
/// `q_c` index.
fn lds_chunk(
    problem: &BinaryProblem,
    assign: RoleAssignment,
    frontier: &[ChannelOption],
    qs: &[f64],
    alphas: &[f64],
    i: usize,
    subgrid: LdsSubgrid,
) -> Vec<LdsCandidate> {
    let (beta_c, beta_r) = (
        problem.sideinfo_crossovers[assign.common],
        problem.sideinfo_crossovers[assign.refinement],
    );
    let pinned = subgrid == LdsSubgrid::CdsPinned;
    let q_c = qs[i];
    let mut out = Vec::new();
    for (a, &alpha_c) in alphas.iter().enumerate() {
        let cc = q_c * rate_kernel(alpha_c, beta_c);
        let cr = q_c * rate_kernel(alpha_c, beta_r);
        // Best refinement rate among channel options carrying the common layer.
        let Some(best) = frontier
            .iter()
            .filter(|o| cc <= o.rates.cc + RATE_SLACK && cr <= o.rates.cr + RATE_SLACK)
            .max_by(|x, y| x.rates.rr.total_cmp(&y.rates.rr))
        else {
            continue;
        };
        let d_c = layer_distortion(q_c, alpha_c, beta_c);
        let js = if pinned { i..=i } else { i..=qs.len() - 1 };
        for j in js {
            let bs = if pinned { a..=a } else { 0..=a };
            for b in bs {
                let (q_r, alpha_r) = (qs[j], alphas[b]);
                let rr = q_r * rate_kernel(alpha_r, beta_r) - cr;
                if rr > best.rates.rr + RATE_SLACK {
                    continue;
                }
                out.push(LdsCandidate {
                    d: assign.to_receivers(d_c, layer_distortion(q_r, alpha_r, beta_r)),
                    src: BinarySourceParams {
                        q_c,
                        q_r,
                        alpha_c,
                        alpha_r,
                    },
                    channel: best.params,
                    assign,
                });
            }
        }
    }
    out
}

fn lds_sweep(
    problem: &BinaryProblem,
    resolution: usize,
    subgrid: LdsSubgrid,
    reduce: bool,
) -> Result<Vec<DistortionPoint>> {
    problem.require_pair()?;
    check_resolution(resolution)?;
    let qs = linspace(0.0, 1.0, resolution);
    let alphas = linspace(0.0, 0.5, resolution);
    let roles = [RoleAssignment::C1_R2, RoleAssignment::C2_R1];
    let frontiers: Vec<Vec<ChannelOption>> = roles
        .iter()
        .map(|&a| channel_frontier(problem, a, resolution, subgrid))
        .collect();
    let chunks: Vec<(usize, usize)> = (0..roles.len()).flat_map(|r| (0..resolution).map(move |i| (r, i))).collect();
    let per_chunk: Vec<Vec<DistortionPoint>> = chunks
        .into_par_iter()
        .map(|(r, i)| {
            let found = lds_chunk(problem, roles[r], &frontiers[r], &qs, &alphas, i, subgrid);
            if !reduce || found.is_empty() {
                return found.into_iter().map(|c| c.into_point(problem)).collect();
            }
            let xy: Vec<(f64, f64)> = found.iter().map(|c| (c.d[0], c.d[1])).collect();
            let keep = envelope_indices(&xy).expect("finite nonempty chunk");
            let mut slots: Vec<Option<LdsCandidate>> = found.into_iter().map(Some).collect();
            keep.into_iter()
                .map(|k| slots[k].take().expect("index used once").into_point(problem))
                .collect()
        })
        .collect();
    Ok(per_chunk.into_iter().flatten().collect())
}

/// Every feasible layered point over the chosen subgrid, both role
/// assignments, in deterministic order. The full grid at the default
/// resolution has about a million feasible tuples; prefer
/// [`binary_lds_region`] unless the raw points are needed.
pub fn binary_lds_points(problem: &BinaryProblem, resolution: usize, subgrid: LdsSubgrid) -> Result<Vec<DistortionPoint>> {
    lds_sweep(problem, resolution, subgrid, false)
}

/// Layered region over both role assignments and both choices of `T`.
///
/// Channel triples that needed clamping are skipped.
pub fn binary_lds_region(problem: &BinaryProblem, resolution: usize) -> Result<TradeoffCurve> {
    lower_convex_envelope(lds_sweep(problem, resolution, LdsSubgrid::Full, true)?)
}

/// Layered region for a single role assignment.
pub fn binary_lds_region_for(
    problem: &BinaryProblem,
    assign: RoleAssignment,
    resolution: usize,
) -> Result<TradeoffCurve> {
    let pts: Vec<DistortionPoint> = lds_sweep(problem, resolution, LdsSubgrid::Full, true)?
        .into_iter()
        .filter(|p| p.params.get("c") == Some((assign.common + 1) as f64))
        .collect();
    lower_convex_envelope(pts)
}

/// Bad receiver (larger `p`) and good receiver. Equal `p` makes the
/// receiver with smaller `β` the good one.
pub fn binary_bad_good(problem: &BinaryProblem) -> (usize, usize) {
    let (p, b) = (&problem.crossovers, &problem.sideinfo_crossovers);
    if p[0] > p[1] || (p[0] == p[1] && b[0] >= b[1]) {
        (0, 1)
    } else {
        (1, 0)
    }
}

/// Superposition bounds for separate coding at split `θ`:
/// `(κ[1 − H₂(θ⋆p_b)], κ[H₂(θ⋆p_g) − H₂(p_g)])`. The first limits the bad
/// receiver's message; the second is the extra rate the good receiver gets.
pub fn binary_separate_bounds(problem: &BinaryProblem, theta: f64) -> (f64, f64) {
    let (b, g) = binary_bad_good(problem);
    let kappa = problem.kappa.as_f64();
    let (pb, pg) = (problem.crossovers[b], problem.crossovers[g]);
    (kappa * (1.0 - h2(conv(theta, pb))), kappa * (h2(conv(theta, pg)) - h2(pg)))
}

/// Source rate the good receiver needs in total, given both layers.
fn good_total_rate(beta_b: f64, beta_g: f64, b: (f64, f64), g: (f64, f64)) -> f64 {
    let s_b = b.0 * rate_kernel(b.1, beta_b);
    let s_g = g.0 * rate_kernel(g.1, beta_g);
    if beta_g <= beta_b {
        s_b + (s_g - b.0 * rate_kernel(b.1, beta_g)).max(0.0)
    } else {
        s_g + (s_b - g.0 * rate_kernel(g.1, beta_b)).max(0.0)
    }
}

/// Whether test channels `(q_b, α_b)`, `(q_g, α_g)` fit through the
/// superposition code with split `θ`. The good receiver decodes both
/// messages, so its total source rate is compared with the sum of bounds.
pub fn binary_separate_feasible(problem: &BinaryProblem, theta: f64, bad: (f64, f64), good: (f64, f64)) -> bool {
    let (b, g) = binary_bad_good(problem);
    let (beta_b, beta_g) = (problem.sideinfo_crossovers[b], problem.sideinfo_crossovers[g]);
    let (bound_b, bound_g) = binary_separate_bounds(problem, theta);
    bad.0 * rate_kernel(bad.1, beta_b) <= bound_b + RATE_SLACK
        && good_total_rate(beta_b, beta_g, bad, good) <= bound_b + bound_g + RATE_SLACK
}

/// For each `(θ, q_b, α_b)` that the bad receiver can decode, the point with
/// the smallest achievable `D_g`.
pub fn binary_separate_points(problem: &BinaryProblem, resolution: usize) -> Result<Vec<DistortionPoint>> {
    problem.require_pair()?;
    check_resolution(resolution)?;
    let (b, g) = binary_bad_good(problem);
    let (beta_b, beta_g) = (problem.sideinfo_crossovers[b], problem.sideinfo_crossovers[g]);
    let thetas = linspace(0.0, 0.5, resolution);
    let qs = linspace(0.0, 1.0, resolution);
    let alphas = linspace(0.0, 0.5, resolution);
    let tests: Vec<(f64, f64)> = qs.iter().flat_map(|&q| alphas.iter().map(move |&a| (q, a))).collect();
    let per_theta: Vec<Vec<DistortionPoint>> = thetas
        .par_iter()
        .map(|&theta| {
            let (bound_b, bound_g) = binary_separate_bounds(problem, theta);
            let mut out = Vec::new();
            for &bad in &tests {
                if bad.0 * rate_kernel(bad.1, beta_b) > bound_b + RATE_SLACK {
                    continue;
                }
                let best = tests
                    .iter()
                    .filter(|&&good| good_total_rate(beta_b, beta_g, bad, good) <= bound_b + bound_g + RATE_SLACK)
                    .map(|&good| (layer_distortion(good.0, good.1, beta_g), good))
                    .min_by(|x, y| x.0.total_cmp(&y.0));
                // q_g = 0 is always feasible once the bad layer is
                let Some((d_g, good)) = best else { continue };
                let mut d = [0.0; 2];
                d[b] = layer_distortion(bad.0, bad.1, beta_b);
                d[g] = d_g;
                out.push(bounded(
                    problem,
                    d,
                    Scheme::Separate,
                    Params::new()
                        .with("theta", theta)
                        .with("q_b", bad.0)
                        .with("alpha_b", bad.1)
                        .with("q_g", good.0)
                        .with("alpha_g", good.1),
                ));
            }
            out
        })
        .collect();
    Ok(per_theta.into_iter().flatten().collect())
}

pub fn binary_separate_region(problem: &BinaryProblem, resolution: usize) -> Result<TradeoffCurve> {
    lower_convex_envelope(binary_separate_points(problem, resolution)?)
}

/// Envelope of the layered region and the separate region together.
pub fn binary_best_digital(problem: &BinaryProblem, resolution: usize) -> Result<TradeoffCurve> {
    pareto_merge(vec![
        binary_lds_region(problem, resolution)?,
        binary_separate_region(problem, resolution)?,
    ])
}

fn bounded(problem: &BinaryProblem, d: [f64; 2], scheme: Scheme, params: Params) -> DistortionPoint {
    DistortionPoint::bounded(
        d,
        [problem.sideinfo_crossovers[0], problem.sideinfo_crossovers[1]],
        scheme,
        params,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn ref_bin() -> BinaryProblem {
        BinaryProblem::pair([0.05, 0.1], [0.2, 0.1]).unwrap()
    }

    // Independent entropy for oracles.
    fn ent(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    fn kernel(a: f64, b: f64) -> f64 {
        ent(a * (1.0 - b) + b * (1.0 - a)) - ent(a)
    }

    #[test]
    fn wz_endpoints() {
        assert_eq!(binary_wz_distortion(0.3, 0.0, 41).unwrap(), 0.3);
        assert_eq!(binary_wz_distortion(0.3, ent(0.3), 41).unwrap(), 0.0);
        assert_eq!(binary_wz_distortion(0.3, 2.0, 41).unwrap(), 0.0);
        assert_eq!(binary_wz_distortion(0.0, 0.3, 41).unwrap(), 0.0);
        assert!(binary_wz_distortion(0.6, 0.3, 41).is_err());
        assert!(binary_wz_distortion(0.3, -0.1, 41).is_err());
    }

    #[test]
    fn wz_matches_brute_force() {
        let (beta, rate) = (0.25, 0.4);
        let oracle = (0..2000)
            .map(|i| {
                let a = beta * i as f64 / 1999.0;
                let r = kernel(a, beta);
                let q = if r > 0.0 { (rate / r).min(1.0) } else { 0.0 };
                q * a + (1.0 - q) * beta
            })
            .fold(f64::INFINITY, f64::min);
        let got = binary_wz_distortion(beta, rate, 41).unwrap();
        assert!(got <= oracle + 1e-12, "{got} > {oracle}");
        assert!(got >= oracle - 1e-6, "{got} << {oracle}");
    }

    proptest! {
        #[test]
        fn wz_nonincreasing(beta in 0.01f64..0.5, r1 in 0.0f64..1.0, r2 in 0.0f64..1.0) {
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let d_lo = binary_wz_distortion(beta, lo, 41).unwrap();
            let d_hi = binary_wz_distortion(beta, hi, 41).unwrap();
            prop_assert!(d_hi <= d_lo + 1e-9);
            prop_assert!(d_lo <= beta);
        }

        #[test]
        fn refinement_total_within_capacity(p_c in 0.0f64..0.5, p_r in 0.0f64..0.5,
                                            gc in 0.0f64..0.5, gr in 0.0f64..0.5, xor in any::<bool>()) {
            let t = if xor { TChoice::Xor } else { TChoice::Common };
            let ch = BinaryChannelParams::new(gc, gr, t).unwrap();
            let raw = binary_lds_channel_rates_raw(p_c, p_r, ch, Kappa::ONE);
            prop_assert!(raw.cr + raw.rr <= 1.0 - ent(p_r) + 1e-12);
            prop_assert!(raw.rr >= -1e-12);
        }
    }

    #[test]
    fn uncoded() {
        let d = binary_uncoded(&ref_bin()).unwrap().d;
        assert_eq!(d, [0.05, 0.1]);
        assert_eq!(binary_uncoded(&BinaryProblem::pair([0.1, 0.2], [0.0, 0.3]).unwrap()).unwrap().d[0], 0.0);
        assert_eq!(binary_uncoded(&BinaryProblem::pair([0.0, 0.2], [0.1, 0.3]).unwrap()).unwrap().d[0], 0.0);
        let mut k2 = ref_bin();
        k2.kappa = Kappa::new(2, 1).unwrap();
        assert!(matches!(binary_uncoded(&k2), Err(Error::KappaNotOne(_))));
    }

    #[test]
    fn cds_zero_rate_corner_and_dead_channel() {
        let pts = binary_cds_points(&ref_bin(), 11).unwrap();
        assert!(pts.iter().any(|p| p.d == [0.2, 0.1]));
        let curve = binary_cds_region(&ref_bin(), 11).unwrap();
        assert!(curve.eval(0.2).unwrap() <= 0.1);

        let dead = BinaryProblem::pair([0.5, 0.1], [0.2, 0.1]).unwrap();
        for p in binary_cds_points(&dead, 11).unwrap() {
            assert_abs_diff_eq!(p.d[0], 0.2, epsilon = 1e-15);
            assert_abs_diff_eq!(p.d[1], 0.1, epsilon = 1e-15);
        }
        assert!(matches!(binary_cds_points(&dead, 2), Err(Error::GridTooCoarse(2))));
    }

    #[test]
    fn cds_touches_both_converse_corners_when_tight() {
        // Identical receivers: q = 1 with α at the WZ optimum meets both bounds.
        let p = BinaryProblem::pair([0.1, 0.1], [0.25, 0.25]).unwrap();
        let conv = binary_trivial_converse(&p, 401).unwrap();
        let curve = binary_cds_region(&p, 201).unwrap();
        let best = curve.points.iter().map(|pt| pt.d[0].max(pt.d[1])).fold(f64::INFINITY, f64::min);
        assert!(best - conv[0] < 5e-3, "{best} vs {}", conv[0]);
    }

    #[test]
    fn source_rate_examples() {
        let same = BinarySourceParams::new(0.6, 0.6, 0.1, 0.1).unwrap();
        let r = binary_lds_source_rates(same, 0.2, 0.1);
        assert_eq!(r.rates.rr, 0.0);
        let no_common = BinarySourceParams::new(0.0, 0.7, 0.3, 0.1).unwrap();
        let r = binary_lds_source_rates(no_common, 0.2, 0.1).rates;
        assert_eq!((r.cc, r.cr), (0.0, 0.0));
        assert_abs_diff_eq!(r.rr, 0.7 * kernel(0.1, 0.1), epsilon = 1e-14);
        let flat = BinarySourceParams::new(0.4, 0.9, 0.5, 0.2).unwrap();
        let r = binary_lds_source_rates(flat, 0.2, 0.1).rates;
        assert_eq!((r.cc, r.cr), (0.0, 0.0));
        assert!(BinarySourceParams::new(0.5, 0.4, 0.2, 0.1).is_err());
        assert!(BinarySourceParams::new(0.3, 0.4, 0.1, 0.2).is_err());
    }

    #[test]
    fn channel_rate_examples() {
        let k = Kappa::new(3, 2).unwrap();
        let (pc, pr) = (0.05, 0.1);
        let cds = RateTriple::new(1.5 * (1.0 - ent(pc)), 1.5 * (1.0 - ent(pr)), 0.0);
        let a = binary_lds_channel_rates_raw(pc, pr, BinaryChannelParams::new(0.5, 0.0, TChoice::Common).unwrap(), k);
        assert!(a.max_abs_diff(&cds) < 1e-14);
        let b = binary_lds_channel_rates_raw(pc, pr, BinaryChannelParams::new(0.5, 0.3, TChoice::Xor).unwrap(), k);
        assert!(b.max_abs_diff(&cds) < 1e-14);

        // XOR with γ_r = ½: the DPC layer carries H₂(γ_c) − H₂(p).
        let gc = 0.2;
        let x = binary_lds_channel_rates(pc, pr, BinaryChannelParams::new(gc, 0.5, TChoice::Xor).unwrap(), k);
        assert!(!x.clamped);
        assert_abs_diff_eq!(x.rates.cc, 1.5 * (ent(gc) - ent(pc)), epsilon = 1e-14);
        assert_abs_diff_eq!(x.rates.cr, 1.5 * (ent(gc) - ent(pr)), epsilon = 1e-14);
        assert_abs_diff_eq!(x.rates.rr, 1.5 * (1.0 - ent(gc)), epsilon = 1e-14);
        let y = binary_lds_channel_rates(0.3, 0.4, BinaryChannelParams::new(0.1, 0.5, TChoice::Xor).unwrap(), k);
        assert!(y.clamped);
        assert_eq!((y.rates.cc, y.rates.cr), (0.0, 0.0));
    }

    fn coords(pts: &[DistortionPoint]) -> BTreeSet<(u64, u64)> {
        pts.iter().map(|p| (p.d[0].to_bits(), p.d[1].to_bits())).collect()
    }

    #[test]
    fn pinned_subgrid_equals_cds() {
        for problem in [ref_bin(), BinaryProblem::pair([0.2, 0.02], [0.05, 0.3]).unwrap()] {
            let lds = binary_lds_points(&problem, 15, LdsSubgrid::CdsPinned).unwrap();
            let cds = binary_cds_points(&problem, 15).unwrap();
            assert_eq!(coords(&lds), coords(&cds));
        }
    }

    #[test]
    fn lds_region_basics() {
        let p = ref_bin();
        let pts = binary_lds_points(&p, 7, LdsSubgrid::Full).unwrap();
        assert!(pts.iter().any(|x| x.d == [0.2, 0.1]));
        let conv = binary_trivial_converse(&p, 401).unwrap();
        for x in &pts {
            assert!(x.d[0] >= conv[0] - 1e-9 && x.d[1] >= conv[1] - 1e-9, "{:?} {}", x.d, x.params);
        }
        let region = binary_lds_region(&p, 7).unwrap();
        let envelope = lower_convex_envelope(pts).unwrap();
        assert_eq!(region.xy(), envelope.xy());
        let cds = binary_cds_region(&p, 7).unwrap();
        for pt in &cds.points {
            assert!(region.eval(pt.d[0]).unwrap() <= pt.d[1] + 1e-12);
        }
        assert!(matches!(binary_lds_region(&p, 2), Err(Error::GridTooCoarse(2))));
    }

    #[test]
    fn separate_bounds_at_extremes() {
        let p = ref_bin();
        assert_eq!(binary_bad_good(&p), (1, 0));
        let (b0, g0) = binary_separate_bounds(&p, 0.0);
        assert_abs_diff_eq!(b0, 1.0 - ent(0.1), epsilon = 1e-15);
        assert_eq!(g0, 0.0);
        let (b1, g1) = binary_separate_bounds(&p, 0.5);
        assert_eq!(b1, 0.0);
        assert_abs_diff_eq!(g1, 1.0 - ent(0.05), epsilon = 1e-15);
    }

    #[test]
    fn separate_region_basics() {
        let p = ref_bin();
        let pts = binary_separate_points(&p, 9).unwrap();
        // zero-rate bad layer is always decodable
        assert!(pts.iter().any(|x| x.d[1] == 0.1 && x.d[0] <= 0.2));
        let conv = binary_trivial_converse(&p, 401).unwrap();
        for x in &pts {
            assert!(x.d[0] >= conv[0] - 1e-9 && x.d[1] >= conv[1] - 1e-9);
            let theta = x.params.get("theta").unwrap();
            let bad = (x.params.get("q_b").unwrap(), x.params.get("alpha_b").unwrap());
            let good = (x.params.get("q_g").unwrap(), x.params.get("alpha_g").unwrap());
            assert!(binary_separate_feasible(&p, theta, bad, good));
        }
    }

    #[test]
    fn tie_in_crossover_picks_good_by_side_information() {
        let p = BinaryProblem::pair([0.1, 0.1], [0.1, 0.3]).unwrap();
        assert_eq!(binary_bad_good(&p), (1, 0));
    }
}
