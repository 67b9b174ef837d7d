//! `wzbc compare`: one CSV per scheme and a gnuplot script over them.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde_json::json;
use wzbc::binary::DEFAULT_RESOLUTION;
use wzbc::Problem;

use crate::schemes::{curve_rows, CliScheme, GAUSSIAN_RESOLUTION};
use crate::{CompareArgs, EXIT_USAGE};

const PLOT_SCRIPT: &str = "plot.gp";

pub fn run(args: &CompareArgs) -> Result<ExitCode> {
    let requested: Vec<&str> = args.schemes.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if requested.is_empty() {
        bail!("empty scheme list");
    }
    let problem = args.problem.load()?;
    let resolution = args.resolution.unwrap_or(match problem {
        Problem::Gaussian(_) => GAUSSIAN_RESOLUTION,
        Problem::Binary(_) => DEFAULT_RESOLUTION,
    });
    if resolution < 2 {
        bail!("resolution must be at least 2, got {resolution}");
    }
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    // The converse is always emitted, and first.
    let mut names = vec!["converse"];
    names.extend(requested.iter().copied().filter(|&s| s != "converse"));

    let mut failed = false;
    let mut written: Vec<(CliScheme, usize)> = Vec::new();
    for name in names {
        let outcome = name
            .parse::<CliScheme>()
            .and_then(|scheme| Ok((scheme, curve_rows(scheme, &problem, resolution, args.extend_flat)?)));
        match outcome {
            Ok((scheme, rows)) => {
                let path = args.out.join(format!("{scheme}.csv"));
                fs::write(&path, render_csv(scheme, &rows, &problem, resolution, args.extend_flat))
                    .with_context(|| format!("writing {}", path.display()))?;
                log::info!("{scheme}: {} rows", rows.len());
                written.push((scheme, rows.len()));
            }
            Err(e) => {
                eprintln!("error: {name}: {e:#}");
                failed = true;
            }
        }
    }

    let script = args.out.join(PLOT_SCRIPT);
    fs::write(&script, render_plot(&written)).with_context(|| format!("writing {}", script.display()))?;
    let manifest = json!({
        "command": "compare",
        "problem": args.problem.problem.display().to_string(),
        "schemes": requested,
        "resolution": resolution,
        "out": args.out.display().to_string(),
        "seed": args.seed,
        "extend_flat": args.extend_flat,
        "kappa": problem.kappa().to_string(),
    });
    write_json(&args.out.join("manifest.json"), &manifest)?;
    Ok(if failed { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS })
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn render_csv(scheme: CliScheme, rows: &[[f64; 2]], problem: &Problem, resolution: usize, extend_flat: bool) -> String {
    let kind = match problem {
        Problem::Gaussian(_) => "gaussian",
        Problem::Binary(_) => "binary",
    };
    let mut out = format!(
        "# scheme={scheme}, params=kind:{kind} kappa:{} resolution:{resolution} extend_flat:{extend_flat}\n",
        problem.kappa()
    );
    for [d1, d2] in rows {
        writeln!(out, "{d1},{d2}").expect("writing to a String");
    }
    out
}

fn render_plot(written: &[(CliScheme, usize)]) -> String {
    let mut out = String::from(
        "set datafile separator ','\n\
         set xlabel 'D1'\n\
         set ylabel 'D2'\n\
         set key top right\n\
         set terminal pngcairo size 900,700\n\
         set output 'tradeoff.png'\n",
    );
    let series: Vec<String> = written
        .iter()
        .map(|&(scheme, rows)| {
            let style = if rows == 1 { "points pt 7" } else { "linespoints pt 1" };
            format!("'{scheme}.csv' using 1:2 with {style} title '{scheme}'")
        })
        .collect();
    writeln!(out, "plot {}", series.join(", \\\n     ")).expect("writing to a String");
    out
}
