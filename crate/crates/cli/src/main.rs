use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cpa_cli::experiments::{self, Check, Sweep};
use cpa_cli::svg::loglog_plot;
use cpa_core::bounds::{check_bounds, fit_exponent};
use cpa_core::constructions::{lift, sawtooth, thm8_family, Certificate, FamilyKind};
use cpa_core::exact::parse_rational;
use cpa_core::pieces::summary;
use cpa_core::{decompose, AffineMap, CpaExpr, Error, Rational};
use serde_json::json;

#[derive(Parser)]
#[command(name = "cpa", version, about = "Exact piece counting for continuous piecewise affine functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose an expression into pieces and check the counting bounds.
    Count {
        file: PathBuf,
        /// Print the full decomposition and bound report as JSON.
        #[arg(long)]
        json: bool,
        /// Also write the JSON report to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a construction and write it with its certificate.
    Construct {
        kind: ConstructKind,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        zmin: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        zmax: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "slope-graded")]
        family: FamilyKind,
        /// One-dimensional input for `lift` (defaults to |x|).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Expression output; the certificate goes to `<file>.cert.json`.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a family of constructions and tabulate their counts.
    Sweep {
        kind: SweepKind,
        /// Inclusive range `a..b` of m (lift) or line counts (paths).
        #[arg(long)]
        range: String,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Line family; slope-graded for lift and random-generic for paths
        /// when omitted.
        #[arg(long)]
        family: Option<FamilyKind>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Fill the ms column with wall-clock times.
        #[arg(long)]
        timing: bool,
    },
    /// Run a cross-check suite.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructKind {
    Sawtooth,
    Lift,
    Thm8Family,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Lift,
    Paths,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Fig1,
    Lemma6,
    Oracles,
    Bounds,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Count { file, json, output } => count(&file, json, output.as_deref()),
        Command::Construct { kind, m, d, n, zmin, zmax, seed, family, input, output } => {
            construct(kind, m, d, n, &zmin, &zmax, seed, family, input.as_deref(), &output)
        }
        Command::Sweep { kind, range, d, seed, family, output, svg, timing } => {
            sweep(kind, &range, d, seed, family, &output, svg.as_deref(), timing)
        }
        Command::Verify { suite, seed } => verify(suite, seed),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> std::result::Result<CpaExpr, Failure> {
    CpaExpr::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn count(file: &Path, as_json: bool, output: Option<&Path>) -> Outcome {
    let e = load(file)?;
    let dec = decompose(&e)?;
    let report = check_bounds(&dec)?;
    let doc = json!({
        "decomposition": dec.to_json(),
        "bounds": {
            "n": report.n,
            "d": report.d,
            "pieces": report.pieces,
            "cells": report.cells,
            "lemma1": report.lemma1.to_string(),
            "thm2": report.thm2.to_string(),
            "lemma1_ok": report.lemma1_ok,
            "thm2_ok": report.thm2_ok,
        },
    });
    let text = serde_json::to_string_pretty(&doc).expect("report serializes");
    if as_json {
        println!("{text}");
    } else {
        println!("{} bounds {}", summary(&dec), if report.ok() { "ok" } else { "VIOLATED" });
    }
    if let Some(path) = output {
        write(path, &text)?;
    }
    if !report.ok() {
        return Err(Failure::Internal(format!("bound check failed: {}", report.csv_row())));
    }
    Ok(())
}

fn rational_arg(name: &str, s: &str) -> std::result::Result<Rational, Failure> {
    parse_rational(s).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
}

fn abs_x() -> CpaExpr {
    let leaf = |g| CpaExpr::Leaf(AffineMap::from_ints(&[g], 0).expect("1-D map"));
    CpaExpr::max(vec![leaf(1), leaf(-1)]).expect("two children")
}

#[allow(clippy::too_many_arguments)]
fn construct(
    kind: ConstructKind,
    m: usize,
    d: usize,
    n: usize,
    zmin: &str,
    zmax: &str,
    seed: u64,
    family: FamilyKind,
    input: Option<&Path>,
    output: &Path,
) -> Outcome {
    let (expr, cert) = match kind {
        ConstructKind::Sawtooth => {
            let s = sawtooth(m, &rational_arg("zmin", zmin)?, &rational_arg("zmax", zmax)?)?;
            let cert = Certificate { certified_pieces_lower_bound: 2 * m as u64, component_budget: 2 * m };
            (s, cert)
        }
        ConstructKind::Lift => {
            let f = match input {
                Some(path) => load(path)?,
                None => abs_x(),
            };
            let l = lift(&f, m)?;
            (l.expr, l.certificate)
        }
        ConstructKind::Thm8Family => {
            let inst = thm8_family(d, n, family, seed)?;
            (inst.lifted.expr, inst.certificate)
        }
    };
    write(output, &expr.to_json())?;
    let mut cert_path = output.as_os_str().to_owned();
    cert_path.push(".cert.json");
    write(Path::new(&cert_path), &(cert.to_json() + "\n"))?;
    println!(
        "wrote {} (d={}, {} leaf components, certified pieces >= {})",
        output.display(),
        expr.dim(),
        expr.leaf_components().len(),
        cert.certified_pieces_lower_bound
    );
    Ok(())
}

fn parse_range(s: &str) -> std::result::Result<std::ops::RangeInclusive<usize>, Failure> {
    let bad = || Failure::Usage(format!("--range: expected a..b, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    Ok(a.trim().parse().map_err(|_| bad())?..=b.trim().parse().map_err(|_| bad())?)
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    kind: SweepKind,
    range: &str,
    d: usize,
    seed: u64,
    family: Option<FamilyKind>,
    output: &Path,
    svg: Option<&Path>,
    timing: bool,
) -> Outcome {
    let range = parse_range(range)?;
    let result: Sweep = match kind {
        SweepKind::Lift => {
            if d < 2 {
                return Err(Failure::Usage("lift sweeps need --d >= 2".into()));
            }
            experiments::lift_sweep(d, range, family.unwrap_or(FamilyKind::SlopeGraded), seed, timing)?
        }
        SweepKind::Paths => experiments::path_sweep(range, family.unwrap_or(FamilyKind::RandomGeneric), seed, timing)?,
    };
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    write(output, &result.to_csv())?;
    for row in &result.rows {
        println!("{}", row.report.csv_row());
    }
    let samples = result.samples();
    let fit = fit_exponent(&samples).ok();
    if let Some(fit) = &fit {
        let pairwise: Vec<String> = fit.pairwise.iter().map(|s| format!("{s:.3}")).collect();
        println!("slope {:.3} pairwise [{}]", fit.slope, pairwise.join(", "));
    }
    if let Some(path) = svg {
        let title = match kind {
            SweepKind::Lift => format!("pieces vs components, d={d}"),
            SweepKind::Paths => "pieces vs components, d=1".to_string(),
        };
        write(path, &loglog_plot(&samples, fit.map(|f| f.slope), &title))?;
    }
    Ok(())
}

fn verify(suite: Suite, seed: u64) -> Outcome {
    let checks: Vec<Check> = match suite {
        Suite::Fig1 => experiments::fig1_checks()?,
        Suite::Lemma6 => {
            let mut checks = experiments::sawtooth_checks()?;
            checks.extend(experiments::lift_checks(seed)?);
            checks
        }
        Suite::Oracles => experiments::oracle_checks(seed)?,
        Suite::Bounds => experiments::bound_checks(seed)?,
    };
    let failed = checks.iter().filter(|c| !c.ok).count();
    for c in &checks {
        println!("{} {}: {}", if c.ok { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    println!("{} checks, {failed} failed", checks.len());
    if failed > 0 {
        return Err(Failure::Internal(format!("{failed} checks failed")));
    }
    Ok(())
}
