//! Problem definitions, role assignments, distortion points and tradeoff curves.
//!
//! Gaussian problems use the unit-variance convention: the source and every
//! side-information variable have unit variance, so a receiver's side
//! information is summarised by `N_k`, the MMSE of estimating the source from
//! it. Receivers are indexed from 0 in code and printed from 1.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Range checks on closed intervals allow this much floating-point slack.
pub const RANGE_GUARD: f64 = 1e-12;

/// Channel uses per source symbol, kept exact so that `κ = 1` can be gated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Kappa(Ratio<u32>);

impl Kappa {
    pub const ONE: Kappa = Kappa(Ratio::new_raw(1, 1));

    pub fn new(numer: u32, denom: u32) -> Result<Self> {
        if denom == 0 {
            return Err(Error::invalid("kappa", "denominator must be nonzero", format!("{numer}/{denom}")));
        }
        if numer == 0 {
            return Err(Error::invalid("kappa", "kappa must be positive", format!("{numer}/{denom}")));
        }
        Ok(Kappa(Ratio::new(numer, denom)))
    }

    pub fn is_one(self) -> bool {
        self.0 == Ratio::from_integer(1)
    }

    pub fn as_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    pub fn numer(self) -> u32 {
        *self.0.numer()
    }

    pub fn denom(self) -> u32 {
        *self.0.denom()
    }
}

impl Default for Kappa {
    fn default() -> Self {
        Kappa::ONE
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Kappa {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("kappa", "expected an integer or `num/den`", s);
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = n.trim().parse().map_err(|_| bad())?;
                let d = d.trim().parse().map_err(|_| bad())?;
                Kappa::new(n, d)
            }
            None => Kappa::new(s.parse().map_err(|_| bad())?, 1),
        }
    }
}

impl Serialize for Kappa {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Kappa {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(n) => Kappa::new(n, 1),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Quadratic Gaussian instance: AWGN broadcast channel with input power `P`,
/// noise variances `W_k`, and side-information MMSEs `N_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianProblem {
    #[serde(rename = "P")]
    pub power: f64,
    #[serde(rename = "W")]
    pub noise_vars: Vec<f64>,
    #[serde(rename = "N")]
    pub sideinfo_vars: Vec<f64>,
    #[serde(default)]
    pub kappa: Kappa,
}

impl GaussianProblem {
    /// Builds and validates a problem.
    pub fn new(power: f64, noise_vars: Vec<f64>, sideinfo_vars: Vec<f64>, kappa: Kappa) -> Result<Self> {
        GaussianProblem {
            power,
            noise_vars,
            sideinfo_vars,
            kappa,
        }
        .validate()
    }

    /// Two-receiver, bandwidth-matched shorthand used throughout the tests.
    pub fn pair(power: f64, w: [f64; 2], n: [f64; 2]) -> Result<Self> {
        Self::new(power, w.to_vec(), n.to_vec(), Kappa::ONE)
    }

    pub fn validate(self) -> Result<Self> {
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(Error::invalid("P", "power must be positive", self.power));
        }
        if self.noise_vars.len() != self.sideinfo_vars.len() {
            return Err(Error::invalid(
                "W/N",
                "noise and side-information arrays differ in length",
                format!("{} vs {}", self.noise_vars.len(), self.sideinfo_vars.len()),
            ));
        }
        if self.noise_vars.len() < 2 {
            return Err(Error::invalid("W", "need at least two receivers", self.noise_vars.len()));
        }
        for &w in &self.noise_vars {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid("W", "noise variance must be positive", w));
            }
        }
        for &n in &self.sideinfo_vars {
            if !(n > 0.0 && n <= 1.0) {
                return Err(Error::invalid("N", "side-information MMSE must lie in (0, 1]", n));
            }
        }
        Ok(self)
    }

    pub fn receivers(&self) -> usize {
        self.noise_vars.len()
    }

    /// Correlation between source and side information at receiver `k`.
    pub fn rho(&self, k: usize) -> f64 {
        (1.0 - self.sideinfo_vars[k]).sqrt()
    }

    pub(crate) fn require_pair(&self) -> Result<()> {
        match self.receivers() {
            2 => Ok(()),
            k => Err(Error::ReceiverCount(k)),
        }
    }
}

/// Binary Hamming instance: BSC broadcast channel with crossovers `p_k` and
/// side information through virtual BSCs with crossovers `β_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryProblem {
    #[serde(rename = "p")]
    pub crossovers: Vec<f64>,
    #[serde(rename = "beta")]
    pub sideinfo_crossovers: Vec<f64>,
    #[serde(default)]
    pub kappa: Kappa,
}

impl BinaryProblem {
    pub fn new(crossovers: Vec<f64>, sideinfo_crossovers: Vec<f64>, kappa: Kappa) -> Result<Self> {
        BinaryProblem {
            crossovers,
            sideinfo_crossovers,
            kappa,
        }
        .validate()
    }

    pub fn pair(p: [f64; 2], beta: [f64; 2]) -> Result<Self> {
        Self::new(p.to_vec(), beta.to_vec(), Kappa::ONE)
    }

    pub fn validate(self) -> Result<Self> {
        if self.crossovers.len() != self.sideinfo_crossovers.len() {
            return Err(Error::invalid(
                "p/beta",
                "crossover arrays differ in length",
                format!("{} vs {}", self.crossovers.len(), self.sideinfo_crossovers.len()),
            ));
        }
        if self.crossovers.len() < 2 {
            return Err(Error::invalid("p", "need at least two receivers", self.crossovers.len()));
        }
        for &p in &self.crossovers {
            check_half("p", p)?;
        }
        for &b in &self.sideinfo_crossovers {
            check_half("beta", b)?;
        }
        Ok(self)
    }

    pub fn receivers(&self) -> usize {
        self.crossovers.len()
    }

    pub(crate) fn require_pair(&self) -> Result<()> {
        match self.receivers() {
            2 => Ok(()),
            k => Err(Error::ReceiverCount(k)),
        }
    }
}

fn check_half(field: &'static str, v: f64) -> Result<()> {
    if v.is_nan() || v < 0.0 {
        Err(Error::invalid(field, "crossover must be nonnegative", v))
    } else if v > 0.5 {
        Err(Error::invalid(field, "crossover exceeds 1/2", v))
    } else {
        Ok(())
    }
}

/// A problem as read from a JSON problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Problem {
    Gaussian(GaussianProblem),
    Binary(BinaryProblem),
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Problem = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.validate()
    }

    pub fn validate(self) -> Result<Self> {
        Ok(match self {
            Problem::Gaussian(g) => Problem::Gaussian(g.validate()?),
            Problem::Binary(b) => Problem::Binary(b.validate()?),
        })
    }

    pub fn kappa(&self) -> Kappa {
        match self {
            Problem::Gaussian(g) => g.kappa,
            Problem::Binary(b) => b.kappa,
        }
    }

    pub fn set_kappa(&mut self, kappa: Kappa) {
        match self {
            Problem::Gaussian(g) => g.kappa = kappa,
            Problem::Binary(b) => b.kappa = kappa,
        }
    }

    /// Zero-rate distortion of receiver `k` (`N_k` or `β_k`).
    pub fn zero_rate_distortion(&self, k: usize) -> f64 {
        match self {
            Problem::Gaussian(g) => g.sideinfo_vars[k],
            Problem::Binary(b) => b.sideinfo_crossovers[k],
        }
    }
}

/// Which receiver decodes only the common layer (`c`) and which also decodes
/// the refinement layer (`r`). Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RoleAssignment {
    pub common: usize,
    pub refinement: usize,
}

impl RoleAssignment {
    pub const C1_R2: RoleAssignment = RoleAssignment { common: 0, refinement: 1 };
    pub const C2_R1: RoleAssignment = RoleAssignment { common: 1, refinement: 0 };

    pub fn new(common: usize, refinement: usize, receivers: usize) -> Result<Self> {
        if receivers != 2 {
            return Err(Error::ReceiverCount(receivers));
        }
        if common == refinement || common >= receivers || refinement >= receivers {
            return Err(Error::invalid(
                "roles",
                "common and refinement receivers must be distinct valid indices",
                format!("c={common}, r={refinement}"),
            ));
        }
        Ok(RoleAssignment { common, refinement })
    }

    pub fn swapped(self) -> Self {
        RoleAssignment {
            common: self.refinement,
            refinement: self.common,
        }
    }

    /// Places `(D_c, D_r)` at their receiver positions.
    pub fn to_receivers(self, d_common: f64, d_refinement: f64) -> [f64; 2] {
        let mut d = [0.0; 2];
        d[self.common] = d_common;
        d[self.refinement] = d_refinement;
        d
    }
}

/// Tag naming the scheme that produced a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Converse,
    Uncoded,
    Cds,
    Lds,
    Separate,
    Scheme3,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::Converse,
        Scheme::Uncoded,
        Scheme::Cds,
        Scheme::Lds,
        Scheme::Separate,
        Scheme::Scheme3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Converse => "converse",
            Scheme::Uncoded => "uncoded",
            Scheme::Cds => "cds",
            Scheme::Lds => "lds",
            Scheme::Separate => "separate",
            Scheme::Scheme3 => "scheme3",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scheme `{s}`"))
    }
}

/// Named parameter values that generated a point, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Params(pub Vec<(&'static str, f64)>);

impl Params {
    pub fn new() -> Self {
        Params(Vec::new())
    }

    pub fn with(mut self, name: &'static str, value: f64) -> Self {
        self.0.push((name, value));
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}

/// An achievable (or bounding) distortion pair with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionPoint {
    pub d: [f64; 2],
    pub scheme: Scheme,
    pub params: Params,
}

impl DistortionPoint {
    pub fn new(d: [f64; 2], scheme: Scheme, params: Params) -> Self {
        debug_assert!(
            d.iter().all(|&x| x >= -RANGE_GUARD),
            "negative distortion {d:?} from {scheme}"
        );
        DistortionPoint { d, scheme, params }
    }

    /// Builds a point and checks it against the zero-rate distortions.
    pub(crate) fn bounded(d: [f64; 2], upper: [f64; 2], scheme: Scheme, params: Params) -> Self {
        debug_assert!(
            d[0] <= upper[0] + 1e-9 && d[1] <= upper[1] + 1e-9,
            "distortion {d:?} above zero-rate bound {upper:?} from {scheme}"
        );
        Self::new(d, scheme, params)
    }
}

/// Three-component rate vector `(R_cc, R_cr, R_rr)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RateTriple {
    pub cc: f64,
    pub cr: f64,
    pub rr: f64,
}

impl RateTriple {
    pub fn new(cc: f64, cr: f64, rr: f64) -> Self {
        RateTriple { cc, cr, rr }
    }

    pub fn scaled(self, k: f64) -> Self {
        RateTriple::new(self.cc * k, self.cr * k, self.rr * k)
    }

    /// Componentwise `self ≤ other + tol`.
    pub fn fits_within(&self, other: &RateTriple, tol: f64) -> bool {
        self.cc <= other.cc + tol && self.cr <= other.cr + tol && self.rr <= other.rr + tol
    }

    pub fn max_abs_diff(&self, other: &RateTriple) -> f64 {
        (self.cc - other.cc)
            .abs()
            .max((self.cr - other.cr).abs())
            .max((self.rr - other.rr).abs())
    }

    /// Clamps negative components to zero. Components in `[-1e-12, 0)` are
    /// rounding noise and are zeroed without raising the flag.
    pub fn clamp(self) -> ClampedRates {
        let mut clamped = false;
        let mut fix = |x: f64| {
            if x >= 0.0 {
                x
            } else {
                if x < -RANGE_GUARD {
                    clamped = true;
                }
                0.0
            }
        };
        let rates = RateTriple::new(fix(self.cc), fix(self.cr), fix(self.rr));
        ClampedRates { rates, clamped }
    }
}

/// A rate triple after clamping, with a flag recording whether any component
/// was genuinely negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClampedRates {
    pub rates: RateTriple,
    pub clamped: bool,
}

/// Ordered `(D₁, D₂)` points for one scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffCurve {
    pub points: Vec<DistortionPoint>,
    pub envelope_applied: bool,
}

impl TradeoffCurve {
    pub fn xy(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.d[0], p.d[1])).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Piecewise-linear value of the curve at `x`. Left of the first point
    /// the curve is undefined; right of the last it stays flat.
    pub fn eval(&self, x: f64) -> Option<f64> {
        crate::optimize::interpolate(&self.xy(), x)
    }
}
