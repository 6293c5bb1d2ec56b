//! `heiscurv`: curvature exponents of sub-Finsler Heisenberg groups.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use heiscurv_core::curvature::{
    curvature_exponent, curvature_exponent_both, hfamily_table, mcp_ratio_check, prescribe_exponent, rigidity_probe,
};
use heiscurv_core::geometry::{geodesic_trace, inverse_exp, reduced_jacobian, reduced_jacobian_domega, GeodesicParams, HeisPoint};
use heiscurv_core::{build_norm, Error, NormSpec, TrigTable};
use serde::Serialize;

use config::{parse_grid, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "heiscurv", version, about = "Curvature exponents of sub-Finsler Heisenberg groups")]
struct Cli {
    /// TOML file with solver defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file, written atomically. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Trigonometric table resolution.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct NormArg {
    /// Norm spec: path to a JSON file, or inline JSON.
    #[arg(long)]
    norm: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generalized trigonometric functions and the correspondence map.
    Trig {
        #[command(flatten)]
        norm: NormArg,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Points of one geodesic from the origin.
    Geodesic {
        #[command(flatten)]
        norm: NormArg,
        #[arg(long)]
        r: f64,
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Reduced Jacobian and its ω-derivative on a (φ, ω) grid.
    Jacobian {
        #[command(flatten)]
        norm: NormArg,
        /// Grid size PHIxOMEGA.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
    },
    /// Curvature exponent as the supremum of the exponent field.
    Ncurv {
        #[command(flatten)]
        norm: NormArg,
        /// Sweep grid SxR.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
        #[arg(long)]
        band: Option<f64>,
        /// Also bisect the least N passing the ratio check.
        #[arg(long)]
        both: bool,
    },
    /// Ratio check of MCP(0, N).
    Mcp {
        #[command(flatten)]
        norm: NormArg,
        #[arg(long = "N")]
        n: f64,
    },
    /// Witness of the failure of MCP(0, 5).
    Rigidity {
        #[command(flatten)]
        norm: NormArg,
        /// Largest step of the second-difference search, in units of π°.
        #[arg(long, default_value_t = 0.1)]
        h: f64,
    },
    /// Interpolation parameter with a prescribed curvature exponent.
    Prescribe {
        #[arg(long)]
        target: f64,
        #[arg(long, default_value_t = 4.0)]
        q: f64,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
    },
    /// Closed-form exponent ratios along the h-family arc.
    Hfamily {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Distance from the origin and the geodesic parameters reaching a point.
    Distance {
        #[command(flatten)]
        norm: NormArg,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// Failure of a requested check, exit code 2.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

struct Outcome {
    body: String,
    summary: String,
    /// Written output is kept even when the check fails.
    failed: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<CheckFailed>().is_some() {
        return 2;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::AffineNorm | Error::NoWitness(_) | Error::RouteDisagreement { .. }) => 2,
        _ => 1,
    }
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("HEISCURV_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("HEISCURV_THREADS must be a positive integer, got {v:?}"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the worker pool")?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads()?;
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(r) = cli.resolution {
        cfg.resolution = r;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if cli.format.is_some() {
        cfg.format = cli.format;
    }
    if cli.sequential {
        cfg.execution = heiscurv_core::Execution::Sequential;
    }
    apply_overrides(&mut cfg, &cli.command);
    cfg.validate()?;

    let outcome = dispatch(&cli.command, &cfg)?;
    match &cfg.out {
        Some(path) => {
            output::write_atomic(path, &outcome.body)?;
            println!("{} -> {}", outcome.summary, path.display());
        }
        None => {
            print!("{}", outcome.body);
            eprintln!("{}", outcome.summary);
        }
    }
    match outcome.failed {
        Some(msg) => Err(CheckFailed(msg).into()),
        None => Ok(()),
    }
}

fn apply_overrides(cfg: &mut RunConfig, cmd: &Command) {
    match cmd {
        Command::Ncurv { grid, band, .. } => {
            if let Some((s, r)) = grid {
                cfg.grid_s = *s;
                cfg.grid_r = *r;
            }
            if let Some(b) = band {
                cfg.band = *b;
            }
        }
        Command::Prescribe { grid: Some((s, r)), .. } => {
            cfg.grid_s = *s;
            cfg.grid_r = *r;
        }
        Command::Trig { samples: Some(n), .. }
        | Command::Geodesic { samples: Some(n), .. }
        | Command::Hfamily { samples: Some(n), .. } => cfg.samples = *n,
        Command::Distance { tol: Some(t), .. } => cfg.inverse_tol = *t,
        _ => {}
    }
}

fn load_spec(arg: &str) -> anyhow::Result<NormSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg)).with_context(|| format!("reading norm spec {arg}"))?
    };
    Ok(NormSpec::from_json(&text)?)
}

fn load_table(arg: &NormArg, cfg: &RunConfig) -> anyhow::Result<TrigTable> {
    let spec = load_spec(&arg.norm)?;
    let norm = build_norm(&spec)?;
    Ok(TrigTable::new(&norm, cfg.resolution)?)
}

fn tabular(cfg: &RunConfig, header: &[&str], rows: Vec<Vec<f64>>) -> anyhow::Result<String> {
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(output::csv(header, rows)),
        Format::Json => output::json_rows(header, rows),
    }
}

fn report<T: Serialize>(cfg: &RunConfig, value: &T) -> anyhow::Result<String> {
    if cfg.format == Some(Format::Csv) {
        return Err(anyhow!("this subcommand emits JSON only"));
    }
    output::json(value)
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let ok = |body: String, summary: String| Ok(Outcome { body, summary, failed: None });
    match cmd {
        Command::Trig { norm, .. } => {
            let table = load_table(norm, cfg)?;
            let n = cfg.samples;
            let mut rows = Vec::with_capacity(n);
            for k in 0..n {
                let theta = 2.0 * table.pi_omega() * k as f64 / n as f64;
                let phi = 2.0 * table.pi_polar() * k as f64 / n as f64;
                let p = table.cos_sin(theta);
                let q = table.cos_sin_polar(phi);
                let c = table.correspondence(phi)?;
                rows.push(vec![theta, p.x, p.y, phi, q.x, q.y, c, table.correspondence_derivative(phi)]);
            }
            let header = ["theta", "cosOmega", "sinOmega", "phi", "cosPolar", "sinPolar", "Ccirc", "CcircPrime"];
            ok(
                tabular(cfg, &header, rows)?,
                format!("trig: pi_omega={:.12} pi_polar={:.12} rows={n}", table.pi_omega(), table.pi_polar()),
            )
        }
        Command::Geodesic { norm, r, phi, omega, .. } => {
            let table = load_table(norm, cfg)?;
            let params = GeodesicParams::new(*r, *phi, *omega);
            let pts = geodesic_trace(&table, params, cfg.samples)?;
            let k = pts.len();
            let rows = pts
                .iter()
                .enumerate()
                .map(|(i, p)| vec![i as f64 / (k - 1) as f64, p.x, p.y, p.z])
                .collect();
            let end = pts[k - 1];
            ok(
                tabular(cfg, &["t", "x", "y", "z"], rows)?,
                format!("geodesic: endpoint=({:.9}, {:.9}, {:.9})", end.x, end.y, end.z),
            )
        }
        Command::Jacobian { norm, grid } => {
            let table = load_table(norm, cfg)?;
            let (np, nw) = grid.unwrap_or((64, 128));
            if np < 1 || nw < 2 {
                return Err(anyhow!("jacobian grid must be at least 1x2"));
            }
            let period = 2.0 * table.pi_polar();
            let rows: Vec<Vec<f64>> = cfg.execution.map(np, |i| {
                let phi = period * i as f64 / np as f64;
                (0..nw)
                    .map(|j| {
                        let omega = period * (2.0 * (j as f64 + 0.5) / nw as f64 - 1.0);
                        vec![phi, omega, reduced_jacobian(&table, phi, omega), reduced_jacobian_domega(&table, phi, omega)]
                    })
                    .collect::<Vec<_>>()
            })
            .into_iter()
            .flatten()
            .collect();
            let min_j = rows.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min);
            ok(
                tabular(cfg, &["phi", "omega", "JR", "dJR"], rows)?,
                format!("jacobian: {np}x{nw} grid, min JR={min_j:.6e}"),
            )
        }
        Command::Ncurv { norm, both, .. } => {
            let table = load_table(norm, cfg)?;
            let rep = if *both {
                curvature_exponent_both(&table, &cfg.sweep(), &cfg.mcp())?.0
            } else {
                curvature_exponent(&table, &cfg.sweep())?
            };
            let summary = format!(
                "ncurv: n_curv={:.9} argmax=(phi={:.6}, omega={:.6}) grid={}x{}",
                rep.n_curv, rep.argmax.phi, rep.argmax.omega, rep.grid.grid_s, rep.grid.grid_r
            );
            let failed = (rep.band_violations > 0)
                .then(|| format!("{} band points do not satisfy the exclusion sign condition", rep.band_violations));
            Ok(Outcome { body: report(cfg, &rep)?, summary, failed })
        }
        Command::Mcp { norm, n } => {
            let table = load_table(norm, cfg)?;
            let rep = mcp_ratio_check(&table, *n, &cfg.mcp())?;
            let summary = format!(
                "mcp: N={} {} min_slack={:.3e} at (phi={:.6}, omega={:.6}, t={:.6})",
                rep.n,
                if rep.pass { "pass" } else { "fail" },
                rep.min_slack,
                rep.worst.phi,
                rep.worst.omega,
                rep.worst.t
            );
            let failed = (!rep.pass).then(|| format!("MCP(0, {}) fails the ratio check", rep.n));
            Ok(Outcome { body: report(cfg, &rep)?, summary, failed })
        }
        Command::Rigidity { norm, h } => {
            let table = load_table(norm, cfg)?;
            let w = rigidity_probe(&table, h * table.pi_polar(), &cfg.probe())?;
            let summary = format!(
                "rigidity: ratio={:.6e} < r^4={:.6e} at r={:.6} (phi={:.6}, omega={:.6}), reverified={}",
                w.ratio, w.r4, w.r_violation, w.phi, w.omega, w.reverified
            );
            let failed = (!w.reverified).then(|| "witness did not survive re-evaluation".to_string());
            Ok(Outcome { body: report(cfg, &w)?, summary, failed })
        }
        Command::Prescribe { target, q, tol, .. } => {
            let p = prescribe_exponent(*target, *q, *tol, &cfg.prescribe())?;
            #[derive(Serialize)]
            struct Body<'a> {
                t_star: f64,
                report: &'a heiscurv_core::curvature::CurvatureReport,
                profile: &'a [(f64, f64)],
            }
            let body = Body { t_star: p.t_star, report: &p.report, profile: &p.profile };
            ok(
                report(cfg, &body)?,
                format!("prescribe: t_star={:.9} n_curv={:.9} target={target}", p.t_star, p.report.n_curv),
            )
        }
        Command::Hfamily { h, .. } => {
            let rows: Vec<Vec<f64>> =
                hfamily_table(*h, cfg.samples)?.iter().map(|s| vec![s.y, s.jr, s.w_djr, s.ratio]).collect();
            let last = rows.last().map(|r| r[3]).unwrap_or(f64::NAN);
            ok(tabular(cfg, &["y", "JR", "wdJR", "ratio"], rows)?, format!("hfamily: h={h} ratio(1/h)={last:.9}"))
        }
        Command::Distance { norm, x, y, z, .. } => {
            let table = load_table(norm, cfg)?;
            let rep = inverse_exp(&table, HeisPoint::new(*x, *y, *z), cfg.inverse_tol)?;
            ok(
                report(cfg, &rep)?,
                format!(
                    "distance: d={:.12} (r={:.9}, phi={:.9}, omega={:.9}) residual={:.2e}",
                    rep.distance, rep.params.r, rep.params.phi, rep.params.omega, rep.residual
                ),
            )
        }
    }
}
