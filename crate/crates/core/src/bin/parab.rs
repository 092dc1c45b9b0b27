use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use parab_core::functions::{catalog, Domain};
use parab_core::harness::{self, Command, ExperimentConfig};
use parab_core::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "parab",
    version,
    about = "Orthogonal series on the parabolic domain and paraboloids"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Gram matrix against the diagonal of closed-form norms.
    OrthoCheck(Opts),
    /// Gram diagonal against closed-form norms, per degree.
    NormCheck(Opts),
    /// Kernel routes (boundary, transfer) against direct sums on random pairs.
    KernelCheck(Opts),
    /// Closed integral kernels at the corner, rim or top against partial sums.
    ClosedformCheck(Opts),
    /// Residuals of the differential equations (V0 and V).
    OdeCheck(Opts),
    /// Sup-grid errors of Cesàro means and their trend in n.
    CesaroTable(Opts),
    /// Minimum of Cesàro kernels on fixed grids.
    PositivityScan(Opts),
    /// Fourier coefficients of a test function.
    Expand(Opts),
    /// Print the test-function catalog.
    ListFunctions,
    /// Write the nodes and weights of a product rule.
    RuleDump(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    #[arg(long, default_value = "U")]
    domain: String,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Largest degree.
    #[arg(long = "N")]
    n_max: Option<usize>,
    /// Comma-separated degrees.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated Cesàro orders.
    #[arg(long)]
    delta: Option<String>,
    /// Test-function id (see `list-functions`).
    #[arg(long)]
    f: Option<String>,
    /// Polynomial exactness of the quadrature rules.
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// File of key=value lines applied after the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Opts {
    fn to_config(&self, command: Command) -> Result<ExperimentConfig, Error> {
        let mut c = ExperimentConfig::new(command, self.domain.parse::<Domain>()?);
        let flags: [(&str, Option<String>); 13] = [
            ("a", self.a.map(|v| v.to_string())),
            ("b", self.b.map(|v| v.to_string())),
            ("d", self.d.map(|v| v.to_string())),
            ("beta", self.beta.map(|v| v.to_string())),
            ("gamma", self.gamma.map(|v| v.to_string())),
            ("mu", self.mu.map(|v| v.to_string())),
            ("N", self.n_max.map(|v| v.to_string())),
            ("n", self.n.clone()),
            ("delta", self.delta.clone()),
            ("f", self.f.clone()),
            ("level", self.level.map(|v| v.to_string())),
            ("pairs", self.pairs.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                c.set(k, &v)?;
            }
        }
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
            c.apply_config_text(&text)?;
        }
        Ok(c)
    }

    fn output(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("PARAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("PARAB_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("parab: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn is_usage_error(e: &Error) -> bool {
    !matches!(e, Error::NoConvergence { .. })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        return usage(e);
    }
    let (command, opts) = match &cli.command {
        Cmd::ListFunctions => {
            println!("id,domains,description");
            for (id, domains, desc) in catalog() {
                println!("{id},\"{domains}\",\"{desc}\"");
            }
            return ExitCode::SUCCESS;
        }
        Cmd::RuleDump(o) => {
            let result = o
                .to_config(Command::Expand)
                .and_then(|c| {
                    o.output()
                        .map_err(|e| Error::InvalidConfig(e.to_string()))
                        .map(|w| (c, w))
                })
                .and_then(|(c, w)| harness::dump_rule(&c, w));
            return match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => usage(e),
            };
        }
        Cmd::OrthoCheck(o) => (Command::OrthoCheck, o),
        Cmd::NormCheck(o) => (Command::NormCheck, o),
        Cmd::KernelCheck(o) => (Command::KernelCheck, o),
        Cmd::ClosedformCheck(o) => (Command::ClosedformCheck, o),
        Cmd::OdeCheck(o) => (Command::OdeCheck, o),
        Cmd::CesaroTable(o) => (Command::CesaroTable, o),
        Cmd::PositivityScan(o) => (Command::PositivityScan, o),
        Cmd::Expand(o) => (Command::Expand, o),
    };
    let config = match opts.to_config(command) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let report = match harness::run(&config) {
        Ok(r) => r,
        Err(e) if is_usage_error(&e) => return usage(e),
        Err(e) => {
            eprintln!("parab: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    };
    let written = opts.output().and_then(|w| report.write_csv(w));
    if let Err(e) = written {
        eprintln!("parab: cannot write CSV: {e}");
        return ExitCode::from(EXIT_FAIL);
    }
    for row in report.failures() {
        eprintln!(
            "FAIL {} measured={:e} tolerance={:e}",
            row.check_id, row.measured, row.tolerance
        );
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
