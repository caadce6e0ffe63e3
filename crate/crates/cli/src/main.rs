//! `circle-npd`: natural pseudo-distance between periodic functions from the
//! command line.
//!
//! Exit codes: 0 success, 1 malformed input or arguments, 2 non-Morse input,
//! 3 internal consistency failure, 4 uncertified or mismatched claim.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use circle_npd::npd::{profile, signed_mismatch};
use circle_npd::spec::FunctionSpec;
use circle_npd::{
    certify, critical_points, grid_oracle, is_morse, pseudo_distance, Angle, Error, NpdOptions,
    PeriodicFunction, MORSE_TOL,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use output::{fmt_angle, Table};

#[derive(Parser)]
#[command(
    name = "circle-npd",
    version,
    about = "Natural pseudo-distance under circle rotations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance, optimal rotations and certificates.
    Compute(PairArgs),
    /// Rigorous bracket from the grid evaluation.
    Oracle(PairArgs),
    /// Certify a claimed optimal rotation.
    Verify(VerifyArgs),
    /// Plot data: g over the rotation grid and the best alignment.
    Profile(PairArgs),
    /// Critical points of one function and the Morse verdict.
    Critical(SingleArgs),
    /// Rewrite a function spec in normal form.
    Normalize(SingleArgs),
}

#[derive(Args)]
struct Common {
    /// θ grid size (power of two, at least 64).
    #[arg(long = "ntheta", default_value_t = 4096)]
    n_theta: usize,
    /// α grid size (power of two, at least 64).
    #[arg(long = "nalpha", default_value_t = 4096)]
    n_alpha: usize,
    /// Numerical tolerance, in (0, 1e-2). Defaults depend on the command.
    #[arg(long)]
    tol: Option<f64>,
    /// Skip the Morse check.
    #[arg(long)]
    force: bool,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct PairArgs {
    /// JSON spec of φ.
    phi: PathBuf,
    /// JSON spec of ψ.
    psi: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Claimed optimal rotation, in radians.
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Claimed distance.
    #[arg(long)]
    distance: f64,
}

#[derive(Args)]
struct SingleArgs {
    /// JSON spec of the function.
    function: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidFunction(_) | Error::InvalidArgument(_) => 1,
            Error::NotMorse { .. } | Error::DegenerateRoot { .. } => 2,
            Error::ValueMismatch { .. } => 4,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type Outcome = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("circle-npd: {}", f.message);
        return ExitCode::from(f.code);
    }
    let (out, result) = match &cli.command {
        Command::Compute(a) => (&a.common.out, cmd_compute(a)),
        Command::Oracle(a) => (&a.common.out, cmd_oracle(a)),
        Command::Verify(a) => (&a.pair.common.out, cmd_verify(a)),
        Command::Profile(a) => (&a.common.out, cmd_profile(a)),
        Command::Critical(a) => (&a.common.out, cmd_critical(a)),
        Command::Normalize(a) => (&a.common.out, cmd_normalize(a)),
    };
    match result.and_then(|(text, code)| emit(out.as_deref(), &text).map(|_| code)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("circle-npd: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CIRCLE_NPD_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        usage(format!(
            "CIRCLE_NPD_THREADS must be a non-negative integer, got {raw:?}"
        ))
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        // a closed pipe (`| head`) is not an error
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                Err(usage(format!("cannot write to standard output: {e}")))
            }
            _ => Ok(()),
        },
    }
}

fn load(path: &Path) -> Result<PeriodicFunction, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    FunctionSpec::from_json(&text)
        .and_then(|s| s.build())
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

impl Common {
    fn validate(&self) -> Result<(), Failure> {
        for (name, n) in [("--ntheta", self.n_theta), ("--nalpha", self.n_alpha)] {
            if n < 64 || !n.is_power_of_two() {
                return Err(usage(format!(
                    "{name} must be a power of two at least 64, got {n}"
                )));
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1e-2) {
                return Err(usage(format!("--tol must lie in (0, 1e-2), got {t}")));
            }
        }
        Ok(())
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn options(&self) -> NpdOptions {
        let mut opts = NpdOptions {
            n_theta: self.n_theta,
            n_alpha: self.n_alpha,
            force: self.force,
            ..NpdOptions::default()
        };
        if let Some(t) = self.tol {
            opts.tol = t;
        }
        opts
    }
}

fn load_pair(a: &PairArgs) -> Result<(PeriodicFunction, PeriodicFunction), Failure> {
    a.common.validate()?;
    Ok((load(&a.phi)?, load(&a.psi)?))
}

fn cmd_compute(a: &PairArgs) -> Outcome {
    let (phi, psi) = load_pair(a)?;
    let r = pseudo_distance(&phi, &psi, &a.common.options())?;
    let text = match a.common.format(Format::Json) {
        Format::Json => output::json(&r),
        Format::Csv => {
            let mut t = Table::new(&["alpha", "g", "condition", "hessian_det"]);
            t.comment(format!("distance = {}", r.distance));
            t.comment(format!(
                "bracket = [{}, {}]",
                r.bracket.lower, r.bracket.upper
            ));
            for c in &r.certificates {
                let kind = output::condition_kind(&c.condition);
                let det = c.hessian_det.map(|d| d.to_string()).unwrap_or_default();
                t.row([fmt_angle(c.alpha), r.distance.to_string(), kind.into(), det]);
            }
            t.finish()
        }
    };
    Ok((text, 0))
}

fn cmd_oracle(a: &PairArgs) -> Outcome {
    let (phi, psi) = load_pair(a)?;
    let o = grid_oracle(&phi, &psi, a.common.n_alpha, a.common.n_theta)?;
    let text = match a.common.format(Format::Json) {
        Format::Json => output::json(&json!({
            "lower": o.bracket.lower,
            "upper": o.bracket.upper,
            "width": o.bracket.width(),
            "argmin_cells": o.argmin_cells,
            "n_alpha": o.n_alpha,
            "n_theta": o.n_theta,
        })),
        Format::Csv => {
            let mut t = Table::new(&["alpha", "grid_max", "g"]);
            t.comment(format!(
                "bracket = [{}, {}]",
                o.bracket.lower, o.bracket.upper
            ));
            for ((cell, j), g) in o.argmin_cells.iter().zip(&o.cell_indices).zip(&o.refined) {
                t.row([fmt_angle(*cell), o.grid_max[*j].to_string(), g.to_string()]);
            }
            t.finish()
        }
    };
    Ok((text, 0))
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let (phi, psi) = load_pair(&a.pair)?;
    let tol = a.pair.common.tol.unwrap_or(1e-6);
    let alpha = Angle::new(a.alpha);
    let c = certify(&phi, &psi, alpha, a.distance, tol)?;
    let code = if c.is_certified() { 0 } else { 4 };
    let text = match a.pair.common.format(Format::Json) {
        Format::Json => output::json(&c),
        Format::Csv => {
            let mut t = Table::new(&["theta", "value", "d_theta", "d_alpha"]);
            t.comment(format!("alpha = {}", fmt_angle(c.alpha)));
            t.comment(format!(
                "condition = {}",
                output::condition_kind(&c.condition)
            ));
            for r in &c.residuals {
                let (dt, da) = r
                    .gradient
                    .map(|g| (g.d_theta.to_string(), g.d_alpha.to_string()))
                    .unwrap_or_default();
                t.row([fmt_angle(r.theta), r.value.to_string(), dt, da]);
            }
            t.finish()
        }
    };
    Ok((text, code))
}

fn cmd_profile(a: &PairArgs) -> Outcome {
    let (phi, psi) = load_pair(a)?;
    let opts = a.common.options();
    let r = pseudo_distance(&phi, &psi, &opts)?;
    let best = r.optimal_alphas[0];
    let rows = profile(&phi, &psi, opts.n_alpha, opts.n_theta)?;
    let section: Vec<(Angle, f64, f64, f64)> = (0..opts.n_theta)
        .map(|i| {
            let theta = Angle::grid(i, opts.n_theta);
            let p = phi.eval(theta);
            let q = psi.eval(theta + best);
            (theta, p, q, signed_mismatch(&phi, &psi, theta, best).abs())
        })
        .collect();
    let text = match a.common.format(Format::Csv) {
        Format::Csv => {
            let mut t = Table::new(&["alpha", "g"]);
            t.comment("alpha,g: g(alpha) = max over theta of |phi(theta) - psi(theta + alpha)|");
            t.comment(format!(
                "theta,phi,psi_shifted,absdiff: the alignment at the optimal alpha = {}",
                fmt_angle(best)
            ));
            t.comment(format!("distance = {}", r.distance));
            for (alpha, g) in &rows {
                t.row([fmt_angle(*alpha), g.to_string()]);
            }
            t.header(&["theta", "phi", "psi_shifted", "absdiff"]);
            for (theta, p, q, d) in &section {
                t.row([
                    fmt_angle(*theta),
                    p.to_string(),
                    q.to_string(),
                    d.to_string(),
                ]);
            }
            t.finish()
        }
        Format::Json => output::json(&json!({
            "distance": r.distance,
            "alpha_star": best,
            "profile": rows.iter().map(|(a, g)| json!({"alpha": a, "g": g})).collect::<Vec<_>>(),
            "section": section.iter().map(|(t, p, q, d)| json!({
                "theta": t, "phi": p, "psi_shifted": q, "absdiff": d,
            })).collect::<Vec<_>>(),
        })),
    };
    Ok((text, 0))
}

fn cmd_critical(a: &SingleArgs) -> Outcome {
    a.common.validate()?;
    let f = load(&a.function)?;
    let tol = a.common.tol.unwrap_or(MORSE_TOL);
    let format = a.common.format(Format::Json);
    let (points, morse, failure) = match critical_points(&f, tol) {
        Ok(points) => (points, true, None),
        Err(e @ Error::DegenerateRoot { .. }) => (is_morse(&f, tol).witnesses, false, Some(e)),
        Err(e) => return Err(e.into()),
    };
    let text = match format {
        Format::Json => output::json(&json!({ "morse": morse, "critical_points": points })),
        Format::Csv => {
            let mut t = Table::new(&["theta", "value", "second_derivative", "kind"]);
            t.comment(format!("morse = {morse}"));
            for p in &points {
                let kind = serde_json::to_value(p.kind).expect("kind serializes");
                t.row([
                    fmt_angle(p.theta),
                    p.value.to_string(),
                    p.second_derivative.to_string(),
                    kind.as_str().unwrap_or_default().to_string(),
                ]);
            }
            t.finish()
        }
    };
    match failure {
        // the table still goes out so the witnesses can be inspected
        Some(e) => {
            emit(a.common.out.as_deref(), &text)?;
            Err(e.into())
        }
        None => Ok((text, 0)),
    }
}

fn cmd_normalize(a: &SingleArgs) -> Outcome {
    a.common.validate()?;
    let f = load(&a.function)?;
    Ok((format!("{}\n", FunctionSpec::from(&f).to_json()), 0))
}
