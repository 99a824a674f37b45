//! `annulus`: index, fixed-point and Nielsen class experiments on annulus maps.

mod config;
mod specs;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use annulus_core::fixed_points::isolate;
use annulus_core::index::{lefschetz_index, lemma_suite};
use annulus_core::maps::zoo_entries;
use annulus_core::nielsen::{completeness_sweep, growth_rate, modulus, reports_csv, residue_of_lift, CSV_HEADER};
use annulus_core::Error;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use config::Settings;

const WORKERS_VAR: &str = "ANNULUS_WORKERS";

#[derive(Parser)]
#[command(name = "annulus", version, about = "Index and Nielsen class experiments on lifts of annulus maps")]
struct Cli {
    /// TOML file with tolerance settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the machine-readable result to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write per-box rows to this path.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in maps.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
    /// Lefschetz index of the induced plane map along a curve.
    Index {
        #[command(flatten)]
        map: MapArgs,
        /// `circle:r=<r>[,n=<samples>]`, `rect:<x0,x1,y0,y1>` or a JSON file of `[x, y]` points.
        #[arg(long)]
        curve: String,
        #[arg(long)]
        min_disp: Option<f64>,
    },
    /// Certified fixed-point boxes of the lift `F + (k, 0)`.
    FixedPoints {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        lift_k: i64,
        /// `x0,x1,y0,y1` in cover coordinates.
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Nielsen class coverage for periods 1..=nmax.
    Completeness {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        nmax: u32,
        #[arg(long, allow_hyphen_values = true)]
        region: Option<String>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Certified periodic point counts and their growth rate.
    Growth {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        nmax: u32,
        #[arg(long, allow_hyphen_values = true)]
        region: Option<String>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Index property suite on model configurations.
    Lemmas,
}

#[derive(Subcommand)]
enum ZooAction {
    List,
}

#[derive(Args)]
struct MapArgs {
    /// Zoo id, or `grid:<header.json>`.
    #[arg(long)]
    map: String,
    /// JSON object of map parameters.
    #[arg(long)]
    params: Option<String>,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    min_disp: Option<f64>,
    #[arg(long)]
    max_boxes: Option<usize>,
    #[arg(long)]
    periodic_tolerance: Option<f64>,
    #[arg(long)]
    integer_tolerance: Option<f64>,
}

impl TolArgs {
    fn settings(&self) -> Settings {
        Settings {
            resolution: self.resolution,
            min_disp: self.min_disp,
            max_boxes: self.max_boxes,
            periodic_tolerance: self.periodic_tolerance,
            integer_tolerance: self.integer_tolerance,
            ..Default::default()
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    code: u8,
    kind: &'static str,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            kind: "usage",
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            kind: "failure",
            message: message.into(),
        }
    }

    pub fn from_core(e: Error) -> Self {
        match e {
            Error::InvalidInput(_)
            | Error::UnknownZooEntry(_)
            | Error::ParamOutOfRange { .. }
            | Error::InvalidCurve(_)
            | Error::NotSimple { .. }
            | Error::Io(_) => CliError::usage(e.to_string()),
            _ => CliError::failure(e.to_string()),
        }
    }
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::failure(e.to_string()))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    if let Some(path) = path {
        std::fs::write(path, text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn settings(cli_config: Option<&Path>, flags: Settings) -> Result<Settings, CliError> {
    Ok(Settings::load(cli_config)?.overridden_by(flags))
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(text) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("{WORKERS_VAR} must be a positive integer, got '{text}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::failure(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_workers()?;
    let json_path = cli.json.as_deref();
    let csv_path = cli.csv.as_deref();
    let config_path = cli.config.as_deref();
    match cli.command {
        Command::Zoo { action: ZooAction::List } => {
            let entries = zoo_entries();
            for e in &entries {
                println!("{}  {}", e.id, e.formula);
                for p in &e.params {
                    println!("    {}: {} (default {}, {})", p.name, p.kind, p.default, p.range);
                }
            }
            write_json(json_path, &entries)
        }
        Command::Index { map, curve, min_disp } => {
            let s = settings(
                config_path,
                Settings {
                    index_min_disp: min_disp,
                    ..Default::default()
                },
            )?;
            let lift = specs::load_map(&map.map, &specs::parse_params(map.params.as_deref())?)?;
            let c = specs::parse_curve(&curve)?;
            let index = lefschetz_index(&lift.plane_map(), &c, s.index_min_disp()).map_err(CliError::from_core)?;
            println!("{index}");
            write_json(
                json_path,
                &json!({ "map": lift.name(), "degree": lift.degree(), "curve": curve, "index": index }),
            )
        }
        Command::FixedPoints { map, lift_k, region, tol } => {
            let s = settings(config_path, tol.settings())?;
            let lift = specs::load_map(&map.map, &specs::parse_params(map.params.as_deref())?)?;
            let region = specs::parse_region(&region)?;
            let iso = isolate(&lift, lift_k, region, &s.isolation()).map_err(CliError::from_core)?;
            let residue = modulus(lift.degree(), 1).ok().map(|m| residue_of_lift(lift_k, m));
            println!(
                "{}: lift k = {lift_k}, {} certified boxes, {} unresolved, {} boxes examined",
                lift.name(),
                iso.certified.len(),
                iso.unresolved.len(),
                iso.boxes_examined
            );
            let mut csv = format!("{CSV_HEADER}\n");
            for b in &iso.certified {
                let r = b.rect;
                println!("  {r}  degree {}", b.boundary_degree);
                csv.push_str(&format!(
                    "1,{lift_k},{:?},{:?},{:?},{:?},{},{}\n",
                    r.x_lo,
                    r.x_hi,
                    r.y_lo,
                    r.y_hi,
                    b.boundary_degree,
                    residue.map(|m| m.to_string()).unwrap_or_default()
                ));
            }
            write_json(json_path, &iso)?;
            write_text(csv_path, &csv)
        }
        Command::Completeness { map, nmax, region, tol } => {
            let s = settings(config_path, tol.settings())?;
            let lift = specs::load_map(&map.map, &specs::parse_params(map.params.as_deref())?)?;
            let region = region.as_deref().map(specs::parse_region).transpose()?;
            let reports = completeness_sweep(&lift, nmax, region, &s.sweep()).map_err(CliError::from_core)?;
            println!("{}  degree {}", lift.name(), lift.degree());
            println!("{:>3} {:>8} {:>8} {:>7}  {:<22} {:<11} errors", "n", "classes", "realized", "count", "verdict", "exploratory");
            for r in &reports {
                println!(
                    "{:>3} {:>8} {:>8} {:>7}  {:<22} {:<11} {}",
                    r.period,
                    r.modulus,
                    r.realized_residues.len(),
                    r.count_lower_bound,
                    r.verdict.to_string(),
                    if r.exploratory { "EXPLORATORY" } else { "-" },
                    r.errors.len()
                );
            }
            for r in reports.iter().filter(|r| !r.errors.is_empty()) {
                for e in &r.errors {
                    eprintln!("n={} k={}: {}", r.period, e.lift_offset, e.message);
                }
            }
            write_json(json_path, &reports)?;
            write_text(csv_path, &reports_csv(&reports))?;
            let failed = reports.iter().filter(|r| !r.errors.is_empty()).count();
            if failed > 0 {
                return Err(CliError::failure(format!("{failed} periods recorded certification errors")));
            }
            Ok(())
        }
        Command::Growth { map, nmax, region, tol } => {
            let s = settings(config_path, tol.settings())?;
            let lift = specs::load_map(&map.map, &specs::parse_params(map.params.as_deref())?)?;
            let region = region.as_deref().map(specs::parse_region).transpose()?;
            let reports = completeness_sweep(&lift, nmax, region, &s.sweep()).map_err(CliError::from_core)?;
            let rate = growth_rate(&reports).map_err(CliError::from_core)?;
            let ln_d = (lift.degree().unsigned_abs() as f64).ln();
            println!("{}  degree {}", lift.name(), lift.degree());
            println!("{:>3} {:>7} {:>10}", "n", "count", "ln(c)/n");
            let mut rows = Vec::new();
            for r in &reports {
                let c = r.count_lower_bound;
                let per = if c > 0 { (c as f64).ln() / r.period as f64 } else { f64::NEG_INFINITY };
                println!("{:>3} {:>7} {:>10.6}", r.period, c, per);
                rows.push(json!({ "n": r.period, "count": c }));
            }
            println!("rate {rate:.6}  ln|d| {ln_d:.6}");
            write_json(
                json_path,
                &json!({
                    "map": lift.name(),
                    "degree": lift.degree(),
                    "counts": rows,
                    "rate": if rate.is_finite() { json!(rate) } else { json!(null) },
                    "ln_abs_degree": ln_d,
                }),
            )?;
            write_text(csv_path, &reports_csv(&reports))
        }
        Command::Lemmas => {
            let outcomes = lemma_suite();
            for o in &outcomes {
                println!(
                    "{} {}: {} (expected {})",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.name,
                    o.observed,
                    o.claim
                );
            }
            write_json(json_path, &outcomes)?;
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(CliError::failure(format!("{failed} index properties failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind, "message": e.message }));
            ExitCode::from(e.code)
        }
    }
}
