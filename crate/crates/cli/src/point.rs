//! `wzbc point`: one scheme at explicit parameters, printed as JSON.

use std::collections::BTreeMap;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;
use wzbc::binary::{
    binary_cds_distortions, binary_converse_point, binary_lds_point, binary_separate_feasible, layer_distortion,
    BinaryChannelParams, BinarySourceParams, TChoice, binary_bad_good, binary_uncoded, DEFAULT_RESOLUTION,
};
use wzbc::gaussian::{
    choose_refinement_receiver, gaussian_cds, gaussian_converse_point, gaussian_lds_channel_rates,
    gaussian_lds_closed_form, gaussian_lds_distortions, gaussian_scheme3_closed_form, gaussian_scheme3_point,
    gaussian_separate_closed_form, gaussian_separate_point, gaussian_uncoded, bad_good, GaussianLdsParams,
};
use wzbc::{DistortionPoint, Params, Problem, RoleAssignment, Scheme};

use crate::schemes::{require_gaussian, CliScheme};
use crate::PointArgs;

/// Parsed `--set name=value` pairs; each must be consumed exactly once.
struct Settings {
    values: BTreeMap<String, f64>,
}

impl Settings {
    fn parse(raw: &[String]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for item in raw {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("parameter `{item}` is not of the form name=value"))?;
            let v: f64 = value
                .trim()
                .parse()
                .with_context(|| format!("parameter `{name}`: `{value}` is not a number"))?;
            if values.insert(name.trim().to_string(), v).is_some() {
                bail!("parameter `{name}` given twice");
            }
        }
        Ok(Settings { values })
    }

    fn take(&mut self, name: &str) -> Option<f64> {
        self.values.remove(name)
    }

    fn required(&mut self, scheme: CliScheme, name: &str) -> Result<f64> {
        self.take(name)
            .ok_or_else(|| anyhow!("{scheme}: missing parameter `{name}`"))
    }

    fn or(&mut self, name: &str, default: f64) -> f64 {
        self.take(name).unwrap_or(default)
    }

    /// `c` names the common receiver, 1-based.
    fn roles(&mut self, default: RoleAssignment) -> Result<RoleAssignment> {
        match self.take("c") {
            None => Ok(default),
            Some(c) if c == 1.0 => Ok(RoleAssignment::C1_R2),
            Some(c) if c == 2.0 => Ok(RoleAssignment::C2_R1),
            Some(c) => bail!("parameter `c` must be 1 or 2, got {c}"),
        }
    }

    fn finish(self, scheme: CliScheme) -> Result<()> {
        if let Some(name) = self.values.keys().next() {
            bail!("{scheme}: unknown parameter `{name}`");
        }
        Ok(())
    }
}

struct Evaluated {
    point: DistortionPoint,
    flags: Vec<&'static str>,
}

impl From<DistortionPoint> for Evaluated {
    fn from(point: DistortionPoint) -> Self {
        Evaluated { point, flags: Vec::new() }
    }
}

pub fn run(args: &PointArgs) -> Result<ExitCode> {
    let scheme: CliScheme = args.scheme.parse()?;
    let problem = args.problem.load()?;
    let mut settings = Settings::parse(&args.params)?;
    let eval = evaluate(scheme, &problem, &mut settings, args.extend_flat)?;
    settings.finish(scheme)?;
    let params: serde_json::Map<String, serde_json::Value> =
        eval.point.params.0.iter().map(|&(n, v)| (n.to_string(), json!(v))).collect();
    let out = json!({
        "scheme": scheme.name(),
        "D1": eval.point.d[0],
        "D2": eval.point.d[1],
        "params": params,
        "flags": eval.flags,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}

fn evaluate(scheme: CliScheme, problem: &Problem, s: &mut Settings, extend_flat: bool) -> Result<Evaluated> {
    if scheme.gaussian_only() {
        require_gaussian(problem).with_context(|| scheme.to_string())?;
    }
    match problem {
        Problem::Gaussian(g) => {
            let point = match scheme {
                CliScheme::Converse => gaussian_converse_point(g)?,
                CliScheme::Uncoded => gaussian_uncoded(g)?,
                CliScheme::Cds => gaussian_cds(g)?,
                CliScheme::Lds => {
                    let assign = s.roles(choose_refinement_receiver(g)?)?;
                    let nu = s.required(scheme, "nu")?;
                    let params = GaussianLdsParams::new(nu, s.or("gamma", 0.0))?;
                    let rates = gaussian_lds_channel_rates(g, assign, params)?;
                    let mut point = gaussian_lds_distortions(g, assign, rates.rates)?;
                    point.params = Params::new()
                        .with("c", (assign.common + 1) as f64)
                        .with("nu", params.nu)
                        .with("gamma", params.gamma)
                        .with("R_cc", rates.rates.cc)
                        .with("R_cr", rates.rates.cr)
                        .with("R_rr", rates.rates.rr);
                    let flags = if rates.clamped { vec!["rate-clamped"] } else { Vec::new() };
                    return Ok(Evaluated { point, flags });
                }
                CliScheme::LdsClosedForm => {
                    let assign = s.roles(choose_refinement_receiver(g)?)?;
                    let d_c = s.required(scheme, "D_c")?;
                    let d_r = gaussian_lds_closed_form(g, assign, d_c, extend_flat)?;
                    roles_point(assign, d_c, d_r, Scheme::Lds)
                }
                CliScheme::Separate => gaussian_separate_point(g, s.required(scheme, "nu")?)?,
                CliScheme::SeparateClosedForm => {
                    let (b, gi) = bad_good(g);
                    let d_b = s.required(scheme, "D_b")?;
                    let mut d = [0.0; 2];
                    d[b] = d_b;
                    d[gi] = gaussian_separate_closed_form(g, d_b)?;
                    DistortionPoint::new(d, Scheme::Separate, Params::new().with("D_b", d_b))
                }
                CliScheme::Scheme3 => {
                    let assign = s.roles(choose_refinement_receiver(g)?)?;
                    gaussian_scheme3_point(g, assign, s.required(scheme, "nu")?)?
                }
                CliScheme::Scheme3ClosedForm => {
                    let assign = s.roles(choose_refinement_receiver(g)?)?;
                    let d_c = s.required(scheme, "D_c")?;
                    let d_r = gaussian_scheme3_closed_form(g, assign, d_c)?;
                    roles_point(assign, d_c, d_r, Scheme::Scheme3)
                }
            };
            Ok(point.into())
        }
        Problem::Binary(b) => {
            let point = match scheme {
                CliScheme::Converse => {
                    let res = s.or("resolution", DEFAULT_RESOLUTION as f64);
                    binary_converse_point(b, whole(res, "resolution")?)?
                }
                CliScheme::Uncoded => binary_uncoded(b)?,
                CliScheme::Cds => {
                    let (q, alpha) = (s.required(scheme, "q")?, s.required(scheme, "alpha")?);
                    let d = binary_cds_distortions(b, q, alpha)
                        .ok_or_else(|| anyhow!("cds: (q, alpha) = ({q}, {alpha}) is not decodable by every receiver"))?;
                    DistortionPoint::new([d[0], d[1]], Scheme::Cds, Params::new().with("q", q).with("alpha", alpha))
                }
                CliScheme::Lds => {
                    let assign = s.roles(RoleAssignment::C1_R2)?;
                    let src = BinarySourceParams::new(
                        s.required(scheme, "q_c")?,
                        s.required(scheme, "q_r")?,
                        s.required(scheme, "alpha_c")?,
                        s.required(scheme, "alpha_r")?,
                    )?;
                    let t = match s.or("t_xor", 0.0) {
                        t if t == 0.0 => TChoice::Common,
                        t if t == 1.0 => TChoice::Xor,
                        t => bail!("parameter `t_xor` must be 0 (T = U_c) or 1 (T = U_c xor U_r), got {t}"),
                    };
                    let channel = BinaryChannelParams::new(s.required(scheme, "gamma_c")?, s.required(scheme, "gamma_r")?, t)?;
                    binary_lds_point(b, assign, src, channel)?
                        .ok_or_else(|| anyhow!("lds: source rates do not fit through the channel rates"))?
                }
                CliScheme::Separate => {
                    let theta = s.required(scheme, "theta")?;
                    let bad = (s.required(scheme, "q_b")?, s.required(scheme, "alpha_b")?);
                    let good = (s.required(scheme, "q_g")?, s.required(scheme, "alpha_g")?);
                    if !(0.0..=0.5).contains(&theta) {
                        bail!("parameter `theta` must lie in [0, 1/2], got {theta}");
                    }
                    if !binary_separate_feasible(b, theta, bad, good) {
                        bail!("separate: test channels do not fit through the superposition code");
                    }
                    let (bi, gi) = binary_bad_good(b);
                    let mut d = [0.0; 2];
                    d[bi] = layer_distortion(bad.0, bad.1, b.sideinfo_crossovers[bi]);
                    d[gi] = layer_distortion(good.0, good.1, b.sideinfo_crossovers[gi]);
                    let params = Params::new()
                        .with("theta", theta)
                        .with("q_b", bad.0)
                        .with("alpha_b", bad.1)
                        .with("q_g", good.0)
                        .with("alpha_g", good.1);
                    DistortionPoint::new(d, Scheme::Separate, params)
                }
                _ => unreachable!("gaussian-only schemes rejected above"),
            };
            Ok(point.into())
        }
    }
}

fn roles_point(assign: RoleAssignment, d_c: f64, d_r: f64, scheme: Scheme) -> DistortionPoint {
    let params = Params::new().with("c", (assign.common + 1) as f64).with("D_c", d_c);
    DistortionPoint::new(assign.to_receivers(d_c, d_r), scheme, params)
}

fn whole(v: f64, name: &str) -> Result<usize> {
    if v >= 2.0 && v.fract() == 0.0 && v <= 1e6 {
        Ok(v as usize)
    } else {
        bail!("parameter `{name}` must be an integer of at least 2, got {v}")
    }
}
