//! Scheme names understood by the CLI and the curves they produce.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Result};
use wzbc::binary::{
    binary_cds_region, binary_lds_region, binary_separate_region, binary_trivial_converse, binary_uncoded,
};
use wzbc::gaussian::{
    bad_good, gaussian_cds, gaussian_lds_closed_form, gaussian_lds_domain, gaussian_lds_sweep,
    gaussian_scheme3_closed_form, gaussian_scheme3_point, gaussian_separate_closed_form, gaussian_separate_sweep,
    gaussian_trivial_converse, gaussian_uncoded,
};
use wzbc::optimize::linspace;
use wzbc::validation::ORACLE_GAMMA_RANGE;
use wzbc::{
    lower_convex_envelope, DistortionPoint, GaussianProblem, Params, Problem, RoleAssignment, Scheme,
};

pub const GAUSSIAN_RESOLUTION: usize = 201;

const ROLES: [RoleAssignment; 2] = [RoleAssignment::C1_R2, RoleAssignment::C2_R1];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliScheme {
    Converse,
    Uncoded,
    Cds,
    Lds,
    LdsClosedForm,
    Separate,
    SeparateClosedForm,
    Scheme3,
    Scheme3ClosedForm,
}

impl CliScheme {
    pub const ALL: [CliScheme; 9] = [
        CliScheme::Converse,
        CliScheme::Uncoded,
        CliScheme::Cds,
        CliScheme::Lds,
        CliScheme::LdsClosedForm,
        CliScheme::Separate,
        CliScheme::SeparateClosedForm,
        CliScheme::Scheme3,
        CliScheme::Scheme3ClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CliScheme::Converse => "converse",
            CliScheme::Uncoded => "uncoded",
            CliScheme::Cds => "cds",
            CliScheme::Lds => "lds",
            CliScheme::LdsClosedForm => "lds-closed-form",
            CliScheme::Separate => "separate",
            CliScheme::SeparateClosedForm => "separate-closed-form",
            CliScheme::Scheme3 => "scheme3",
            CliScheme::Scheme3ClosedForm => "scheme3-closed-form",
        }
    }

    pub fn gaussian_only(self) -> bool {
        matches!(
            self,
            CliScheme::LdsClosedForm | CliScheme::SeparateClosedForm | CliScheme::Scheme3 | CliScheme::Scheme3ClosedForm
        )
    }
}

impl fmt::Display for CliScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CliScheme {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match CliScheme::ALL.into_iter().find(|c| c.name() == s) {
            Some(c) => Ok(c),
            None => {
                let known: Vec<&str> = CliScheme::ALL.iter().map(|c| c.name()).collect();
                bail!("unknown scheme `{s}` (known: {})", known.join(", "))
            }
        }
    }
}

pub fn require_gaussian(problem: &Problem) -> Result<&GaussianProblem> {
    match problem {
        Problem::Gaussian(g) => Ok(g),
        Problem::Binary(_) => bail!("gaussian-only scheme"),
    }
}

/// Rows of one scheme's CSV, as `(D1, D2)` in output order.
pub fn curve_rows(scheme: CliScheme, problem: &Problem, resolution: usize, extend_flat: bool) -> Result<Vec<[f64; 2]>> {
    if scheme.gaussian_only() {
        require_gaussian(problem)?;
    }
    let points = match (scheme, problem) {
        (CliScheme::Converse, _) => return converse_rows(problem, resolution),
        (CliScheme::Uncoded, Problem::Gaussian(g)) => vec![gaussian_uncoded(g)?],
        (CliScheme::Uncoded, Problem::Binary(b)) => vec![binary_uncoded(b)?],
        (CliScheme::Cds, Problem::Gaussian(g)) => vec![gaussian_cds(g)?],
        (CliScheme::Cds, Problem::Binary(b)) => binary_cds_region(b, resolution)?.points,
        (CliScheme::Lds, Problem::Gaussian(g)) => {
            let mut all = Vec::new();
            for assign in ROLES {
                all.extend(gaussian_lds_sweep(g, assign, resolution, ORACLE_GAMMA_RANGE, resolution)?);
            }
            envelope(all)?
        }
        (CliScheme::Lds, Problem::Binary(b)) => binary_lds_region(b, resolution)?.points,
        (CliScheme::Separate, Problem::Gaussian(g)) => envelope(gaussian_separate_sweep(g, resolution)?)?,
        (CliScheme::Separate, Problem::Binary(b)) => binary_separate_region(b, resolution)?.points,
        (CliScheme::LdsClosedForm, Problem::Gaussian(g)) => envelope(lds_closed_form_points(g, resolution, extend_flat)?)?,
        (CliScheme::SeparateClosedForm, Problem::Gaussian(g)) => separate_closed_form_points(g, resolution)?,
        (CliScheme::Scheme3, Problem::Gaussian(g)) => {
            let mut all = Vec::new();
            for assign in ROLES {
                for nu in linspace(0.0, 1.0, resolution) {
                    all.push(gaussian_scheme3_point(g, assign, nu)?);
                }
            }
            envelope(all)?
        }
        (CliScheme::Scheme3ClosedForm, Problem::Gaussian(g)) => envelope(scheme3_closed_form_points(g, resolution)?)?,
        (_, Problem::Binary(_)) => unreachable!("gaussian-only schemes rejected above"),
    };
    Ok(points.iter().map(|p| p.d).collect())
}

fn envelope(points: Vec<DistortionPoint>) -> Result<Vec<DistortionPoint>> {
    Ok(lower_convex_envelope(points)?.points)
}

/// The trivial converse drawn as an L: the two single-receiver bounds and
/// their corner.
fn converse_rows(problem: &Problem, resolution: usize) -> Result<Vec<[f64; 2]>> {
    let min = match problem {
        Problem::Gaussian(g) => gaussian_trivial_converse(g),
        Problem::Binary(b) => binary_trivial_converse(b, resolution)?,
    };
    let zero = [problem.zero_rate_distortion(0), problem.zero_rate_distortion(1)];
    Ok(vec![[min[0], zero[1]], [min[0], min[1]], [zero[0], min[1]]])
}

/// Samples a closed form `D_r(D_c)` over `[lower, upper]` for every role
/// assignment that the role rule admits (one, or both on ties).
fn role_rule_curves(
    resolution: usize,
    scheme: Scheme,
    domain: impl Fn(RoleAssignment) -> wzbc::Result<(f64, f64)>,
    eval: impl Fn(RoleAssignment, f64) -> wzbc::Result<f64>,
) -> Result<Vec<DistortionPoint>> {
    let mut out = Vec::new();
    let mut last_err = None;
    for assign in ROLES {
        let (lower, upper) = match domain(assign) {
            Ok(d) => d,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        for d_c in linspace(lower, upper, resolution) {
            let d_r = eval(assign, d_c)?;
            let params = Params::new().with("c", (assign.common + 1) as f64).with("D_c", d_c);
            out.push(DistortionPoint::new(assign.to_receivers(d_c, d_r), scheme, params));
        }
    }
    match (out.is_empty(), last_err) {
        (true, Some(e)) => Err(e.into()),
        _ => Ok(out),
    }
}

fn lds_closed_form_points(g: &GaussianProblem, resolution: usize, extend_flat: bool) -> Result<Vec<DistortionPoint>> {
    role_rule_curves(
        resolution,
        Scheme::Lds,
        |assign| {
            let (lower, upper) = gaussian_lds_domain(g, assign)?;
            Ok((lower, if extend_flat { g.sideinfo_vars[assign.common] } else { upper }))
        },
        |assign, d_c| gaussian_lds_closed_form(g, assign, d_c, extend_flat),
    )
}

fn separate_closed_form_points(g: &GaussianProblem, resolution: usize) -> Result<Vec<DistortionPoint>> {
    let (b, gi) = bad_good(g);
    let (wb, nb) = (g.noise_vars[b], g.sideinfo_vars[b]);
    let lower = nb * wb / (g.power + wb);
    linspace(lower, nb, resolution)
        .into_iter()
        .map(|d_b| {
            let d_g = gaussian_separate_closed_form(g, d_b)?;
            let mut d = [0.0; 2];
            d[b] = d_b;
            d[gi] = d_g;
            Ok(DistortionPoint::new(d, Scheme::Separate, Params::new().with("D_b", d_b)))
        })
        .collect()
}

fn scheme3_closed_form_points(g: &GaussianProblem, resolution: usize) -> Result<Vec<DistortionPoint>> {
    role_rule_curves(
        resolution,
        Scheme::Scheme3,
        |assign| {
            // the domain check also enforces the role rule and κ = 1
            gaussian_lds_domain(g, assign)?;
            let (wc, nc) = (g.noise_vars[assign.common], g.sideinfo_vars[assign.common]);
            Ok((nc * wc / (g.power + wc), nc))
        },
        |assign, d_c| gaussian_scheme3_closed_form(g, assign, d_c),
    )
}
