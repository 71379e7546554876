//! Command-line front end: `verify` and `scan`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::evaluator::scan_min_modulus;
use crate::report;
use crate::search::{verify, SearchConfig, SearchReport, VerdictKind};
use crate::TARGET_N;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_POSSIBLE_ZERO: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "partial-zeta", version, about = "Certify zero-free regions of partial zeta sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the interval branch-and-prune search for one or more N.
    Verify(VerifyArgs),
    /// Locate the smallest |ζ_N(s)| on a grid (floating point, not rigorous).
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Both,
}

/// Parsed `--n` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NSelection {
    pub values: Vec<u64>,
    /// Values expected NOT to certify.
    pub negative_controls: Vec<u64>,
}

impl FromStr for NSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all-known" {
            let mut values: Vec<u64> = (1..=9).collect();
            values.extend(TARGET_N);
            values.push(19);
            values.sort_unstable();
            return Ok(Self { values, negative_controls: vec![19] });
        }
        let values = s
            .split(',')
            .map(|part| match part.trim().parse::<u64>() {
                Ok(0) => Err("N must be at least 1".to_string()),
                Ok(v) => Ok(v),
                Err(e) => Err(format!("bad N {part:?}: {e}")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { values, negative_controls: vec![] })
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated N values, or `all-known`.
    #[arg(long = "n", default_value = "10,11,12,13,14,15,16,17,18,20,21,28")]
    n: NSelection,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    max_depth: u32,
    /// Box budget per σ slice.
    #[arg(long = "max-boxes", default_value_t = 100_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_boxes: u64,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Initial θ subdivision counts, one per core prime.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..))]
    subdiv: Option<Vec<u32>>,
    #[arg(long, default_value_t = crate::interval::DEFAULT_ULP_SLOP)]
    ulp_slop: u32,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    /// Report path; the extension is replaced by .json / .csv.
    #[arg(long, default_value = "partial_zeta_report")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy)]
struct Range(f64, f64);

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let lo: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
        let hi: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(format!("invalid range {s:?}"));
        }
        Ok(Self(lo, hi))
    }
}

#[derive(Debug, Clone, Copy)]
struct Grid(usize, usize);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once('x').ok_or_else(|| format!("expected AxB, got {s:?}"))?;
        let a: usize = a.parse().map_err(|e| format!("{a:?}: {e}"))?;
        let b: usize = b.parse().map_err(|e| format!("{b:?}: {e}"))?;
        if a < 2 || b < 2 {
            return Err("grid must be at least 2x2".into());
        }
        Ok(Self(a, b))
    }
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long = "n", value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// σ range as lo:hi.
    #[arg(long, default_value = "1:1.73")]
    sigma: Range,
    /// t range as lo:hi.
    #[arg(long, default_value = "0:100")]
    t: Range,
    /// Grid points as SIGMAxT.
    #[arg(long, default_value = "200x2000")]
    grid: Grid,
}

/// Everything that determines a verify run; echoed into the report header.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub n_values: Vec<u64>,
    pub negative_controls: Vec<u64>,
    pub subdivisions: Option<Vec<u32>>,
    pub max_depth: u32,
    pub max_total_boxes: u64,
    pub workers: usize,
    pub ulp_slop: u32,
    pub report_format: ReportFormat,
    pub output_path: PathBuf,
}

impl RunConfig {
    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            subdivisions: self.subdivisions.clone(),
            max_depth: self.max_depth,
            max_total_boxes: self.max_total_boxes,
            workers: self.workers,
            ulp_slop: self.ulp_slop,
        }
    }

    fn outputs(&self) -> Vec<(ReportFormat, PathBuf)> {
        let json = (ReportFormat::Json, self.output_path.with_extension("json"));
        let csv = (ReportFormat::Csv, self.output_path.with_extension("csv"));
        match self.report_format {
            ReportFormat::Json => vec![json],
            ReportFormat::Csv => vec![csv],
            ReportFormat::Both => vec![json, csv],
        }
    }
}

impl From<VerifyArgs> for RunConfig {
    fn from(a: VerifyArgs) -> Self {
        Self {
            n_values: a.n.values,
            negative_controls: a.n.negative_controls,
            subdivisions: a.subdiv,
            max_depth: a.max_depth,
            max_total_boxes: a.max_boxes,
            workers: a.workers as usize,
            ulp_slop: a.ulp_slop,
            report_format: a.format,
            output_path: a.out,
        }
    }
}

/// Exit code for a set of verdicts. A negative control that certifies is
/// treated like a possible zero.
pub fn exit_code(results: &[(u64, VerdictKind)], negative_controls: &[u64]) -> i32 {
    let mut worst = VerdictKind::NoZeros;
    for &(n, v) in results {
        let effective = if negative_controls.contains(&n) {
            match v {
                VerdictKind::NoZeros => VerdictKind::PossibleZero,
                _ => VerdictKind::NoZeros,
            }
        } else {
            v
        };
        worst = worst.combine(effective);
    }
    match worst {
        VerdictKind::NoZeros => EXIT_OK,
        VerdictKind::PossibleZero => EXIT_POSSIBLE_ZERO,
        VerdictKind::BudgetExhausted => EXIT_BUDGET,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, String> {
    File::create(path).map(BufWriter::new).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn run_verify(config: &RunConfig) -> i32 {
    let search = config.search();
    // Open outputs first so a bad path fails before the search runs.
    let mut sinks = Vec::new();
    for (format, path) in config.outputs() {
        match create(&path) {
            Ok(w) => sinks.push((format, path, w)),
            Err(msg) => {
                eprintln!("error: {msg}");
                return EXIT_USAGE;
            }
        }
    }

    let mut reports: Vec<SearchReport<f64>> = Vec::new();
    for &n in &config.n_values {
        let report = match verify::<f64>(n, &search) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: N={n}: {e}");
                return EXIT_USAGE;
            }
        };
        let label = if config.negative_controls.contains(&n) { "  (negative control)" } else { "" };
        println!(
            "N={:<4} {:<16} {:>9.2}s  max_depth={}{label}",
            n,
            format!("{:?}", report.verdict),
            report.seconds,
            report.max_depth_reached()
        );
        reports.push(report);
    }

    for (format, path, mut w) in sinks {
        let written = match format {
            ReportFormat::Json => report::to_json(config, &reports)
                .map_err(|e| e.to_string())
                .and_then(|s| w.write_all(s.as_bytes()).map_err(|e| e.to_string())),
            _ => report::write_csv(&mut w, &reports).map_err(|e| e.to_string()),
        };
        if let Err(e) = written.and_then(|_| w.flush().map_err(|e| e.to_string())) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }

    let verdicts: Vec<_> = reports.iter().map(|r| (r.n, r.verdict)).collect();
    exit_code(&verdicts, &config.negative_controls)
}

fn run_scan(args: &ScanArgs) -> i32 {
    match scan_min_modulus(args.n, (args.sigma.0, args.sigma.1), (args.t.0, args.t.1), (args.grid.0, args.grid.1)) {
        Ok(r) => {
            println!("N={} sigma={:?} t={:?} modulus={:e}", args.n, r.sigma, r.t, r.modulus);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Verify(args) => run_verify(&RunConfig::from(args)),
        Command::Scan(args) => run_scan(&args),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_selection_parsing() {
        let s: NSelection = "10, 28".parse().unwrap();
        assert_eq!(s.values, vec![10, 28]);
        assert!("0".parse::<NSelection>().is_err());
        assert!("x".parse::<NSelection>().is_err());
        let all: NSelection = "all-known".parse().unwrap();
        assert_eq!(all.values.len(), 22);
        assert!(all.values.contains(&19));
        assert_eq!(all.negative_controls, vec![19]);
    }

    #[test]
    fn exit_codes() {
        use VerdictKind::*;
        assert_eq!(exit_code(&[(10, NoZeros), (28, NoZeros)], &[]), EXIT_OK);
        assert_eq!(exit_code(&[(10, BudgetExhausted), (19, PossibleZero)], &[]), EXIT_POSSIBLE_ZERO);
        assert_eq!(exit_code(&[(10, BudgetExhausted)], &[]), EXIT_BUDGET);
        assert_eq!(exit_code(&[(10, NoZeros), (19, PossibleZero)], &[19]), EXIT_OK);
        assert_eq!(exit_code(&[(19, NoZeros)], &[19]), EXIT_POSSIBLE_ZERO);
    }

    #[test]
    fn range_and_grid_parsing() {
        assert!("1:1.2".parse::<Range>().is_ok());
        assert!("2:1".parse::<Range>().is_err());
        assert!("1".parse::<Range>().is_err());
        assert!("2000x2000".parse::<Grid>().is_ok());
        assert!("1x5".parse::<Grid>().is_err());
    }

    #[test]
    fn flags_reach_config() {
        let cli = Cli::try_parse_from([
            "partial-zeta",
            "verify",
            "--n",
            "12",
            "--max-depth",
            "9",
            "--max-boxes",
            "77",
            "--workers",
            "3",
            "--subdiv",
            "4,2",
            "--ulp-slop",
            "6",
            "--format",
            "both",
            "--out",
            "/tmp/x",
        ])
        .unwrap();
        let Command::Verify(args) = cli.command else { panic!("expected verify") };
        let cfg = RunConfig::from(args);
        assert_eq!(cfg.n_values, vec![12]);
        assert_eq!(cfg.subdivisions, Some(vec![4, 2]));
        assert_eq!((cfg.max_depth, cfg.max_total_boxes, cfg.workers, cfg.ulp_slop), (9, 77, 3, 6));
        assert_eq!(cfg.report_format, ReportFormat::Both);
        assert_eq!(cfg.outputs()[1].1, PathBuf::from("/tmp/x.csv"));
    }

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(run(["partial-zeta", "verify", "--workers", "0"]), EXIT_USAGE);
        assert_eq!(run(["partial-zeta", "scan", "--n", "3", "--t", "5:1"]), EXIT_USAGE);
        assert_eq!(run(["partial-zeta", "frobnicate"]), EXIT_USAGE);
    }
}
