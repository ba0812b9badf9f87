//! Command-line frontend for the `georot` binary.
//!
//! Exit codes: 0 success, 1 detection did not converge, 2 input error,
//! 3 internal error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationError;
use crate::detector::{detect, DetectError, DetectionConfig, DetectionReport};
use crate::experiments::{run_trials, TrialStats};
use crate::fields::VectorField;
use crate::verify::run_checks;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "georot", version, about = "Detect outer rotations between 3D vector fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectFormat {
    Json,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover the rotation taking the reference field onto the pattern field.
    Detect {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long = "max-iter", default_value_t = 1000)]
        max_iter: usize,
        #[arg(long, value_enum, default_value_t = DetectFormat::Human)]
        format: DetectFormat,
        /// Include the per-round angle trace.
        #[arg(long)]
        trace: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the randomized linear-field benchmark, one row per epsilon.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = BenchFormat::Csv)]
        format: BenchFormat,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the built-in golden checks.
    Verify,
}

/// Plane as bivector components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneOutput {
    pub e12: f64,
    pub e13: f64,
    pub e23: f64,
}

/// Machine-readable detection result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectOutput {
    pub alpha: f64,
    pub plane: PlaneOutput,
    /// Unit normal of the plane; the rotation is right-handed about it.
    pub normal: [f64; 3],
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_trace: Option<Vec<f64>>,
}

impl DetectOutput {
    pub fn from_report(report: &DetectionReport, trace: bool) -> Self {
        // `+ 0.0` clears negative zeros from the printed output.
        let [e12, e13, e23] = report.plane.components().map(|c| c + 0.0);
        Self {
            alpha: report.alpha,
            plane: PlaneOutput { e12, e13, e23 },
            normal: report.plane.normal().map(|c| c + 0.0),
            iterations: report.iterations,
            converged: report.converged,
            phi_trace: trace.then(|| report.phi_trace.clone()),
        }
    }

    pub fn human(&self) -> String {
        let mut s = format!(
            "alpha       {:.10} rad ({:.6} deg)\n\
             plane       e12 {:+.10}  e13 {:+.10}  e23 {:+.10}\n\
             normal      [{:+.10}, {:+.10}, {:+.10}]\n\
             iterations  {}\n\
             converged   {}\n",
            self.alpha,
            self.alpha.to_degrees(),
            self.plane.e12,
            self.plane.e13,
            self.plane.e23,
            self.normal[0],
            self.normal[1],
            self.normal[2],
            self.iterations,
            if self.converged { "yes" } else { "no" },
        );
        if let Some(trace) = &self.phi_trace {
            s.push_str("phi trace\n");
            for (i, phi) in trace.iter().enumerate() {
                s.push_str(&format!("  {:>4}  {phi:.6e}\n", i + 1));
            }
        }
        s
    }
}

pub fn bench_csv(rows: &[TrialStats]) -> String {
    let mut s = String::from(TrialStats::CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<DetectError> for Failure {
    fn from(e: DetectError) -> Self {
        let code = match e {
            DetectError::InvalidConfig(_)
            | DetectError::ZeroField
            | DetectError::Correlation(CorrelationError::IncompatibleGrids) => EXIT_INPUT,
            _ => EXIT_INTERNAL,
        };
        Self { code, message: e.to_string() }
    }
}

fn load(path: &PathBuf) -> Result<VectorField, Failure> {
    VectorField::from_path(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: &Option<PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    let res = match output {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(text.as_bytes())),
        None => out.write_all(text.as_bytes()),
    };
    res.map_err(|e| Failure { code: EXIT_INPUT, message: format!("cannot write output: {e}") })
}

fn run_command(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Detect { reference, pattern, epsilon, max_iter, format, trace, output } => {
            let reference = load(&reference)?;
            let pattern = load(&pattern)?;
            let cfg = DetectionConfig::with_epsilon(epsilon).max_iterations(max_iter);
            let report = detect(&reference, &pattern, &cfg)?;
            let result = DetectOutput::from_report(&report, trace);
            let text = match format {
                DetectFormat::Json => {
                    let mut t = serde_json::to_string_pretty(&result).map_err(|e| Failure {
                        code: EXIT_INTERNAL,
                        message: e.to_string(),
                    })?;
                    t.push('\n');
                    t
                }
                DetectFormat::Human => result.human(),
            };
            emit(&text, &output, out)?;
            Ok(if report.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
        }
        Command::Bench { epsilons, trials, seed, format, output } => {
            if trials == 0 {
                return Err(Failure::input("--trials must be at least 1"));
            }
            if let Some(bad) = epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
                return Err(Failure::input(format!("epsilon must be positive, got {bad}")));
            }
            let rows: Vec<TrialStats> = epsilons.iter().map(|&eps| run_trials(trials, eps, seed)).collect();
            let text = match format {
                BenchFormat::Csv => bench_csv(&rows),
                BenchFormat::Json => {
                    let mut t = serde_json::to_string_pretty(&rows).map_err(|e| Failure {
                        code: EXIT_INTERNAL,
                        message: e.to_string(),
                    })?;
                    t.push('\n');
                    t
                }
            };
            emit(&text, &output, out)?;
            Ok(EXIT_OK)
        }
        Command::Verify => {
            let checks = run_checks();
            let mut text = String::new();
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("[{tag}] {}: {}\n", c.name, c.detail));
            }
            let all = checks.iter().all(|c| c.passed);
            text.push_str(if all { "all checks passed\n" } else { "some checks failed\n" });
            emit(&text, &None, out)?;
            Ok(if all { EXIT_OK } else { EXIT_INTERNAL })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match run_command(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn main_with_std() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
