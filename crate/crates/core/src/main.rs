use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use noma_lab::sim::config::ScenarioConfig;
use noma_lab::sim::figures::{run_figures, DEFAULT_TRIALS};
use noma_lab::sim::oracle::{run_oracle, OracleConfig};
use noma_lab::sim::sweep::{run_sweep, summary_path, write_rows, write_summary};
use noma_lab::sim::{run_bench, write_bench};
use noma_lab::Error;

const OK: u8 = 0;
const CONFIG_ERROR: u8 = 1;
const ORACLE_DEVIATION: u8 = 2;
const RUNTIME_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "noma-lab",
    version,
    about = "Downlink MIMO-NOMA clustering and power allocation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep and write per-trial rows as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; aggregates go next to it as `<stem>.summary.csv`.
        /// Rows go to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Config overrides as `--key value` pairs.
        #[arg(
            trailing_var_arg = true,
            allow_hyphen_values = true,
            value_name = "--KEY VALUE"
        )]
        overrides: Vec<String>,
    },
    /// Check the closed-form minimum power against fixed-point iteration.
    Oracle {
        #[arg(long, default_value_t = OracleConfig::default().instances)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time every algorithm at every sweep point.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(
            trailing_var_arg = true,
            allow_hyphen_values = true,
            value_name = "--KEY VALUE"
        )]
        overrides: Vec<String>,
    },
    /// Regenerate the preset figures (CSV, text tables, SVG).
    Figures {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
}

/// Splits `--key value` and `--key=value` pairs. Dashes in keys map to
/// underscores.
fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, Error> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(body) = arg.strip_prefix("--") else {
            return Err(config_error(arg, "expected `--key value`"));
        };
        let (key, value) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| config_error(body, "missing value"))?;
                (body.to_string(), v.clone())
            }
        };
        out.push((key.replace('-', "_"), value));
    }
    Ok(out)
}

fn config_error(key: &str, reason: &str) -> Error {
    Error::Config {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

/// Defaults, then the file, then command-line overrides.
fn load(path: &Path, overrides: &[String]) -> Result<ScenarioConfig, Error> {
    let mut config = ScenarioConfig::from_file(path)?;
    for (key, value) in parse_overrides(overrides)? {
        config.set(&key, &value)?;
    }
    config.validate()?;
    Ok(config)
}

fn create(path: &Path) -> Result<std::fs::File, Error> {
    std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn fail(code: u8, e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(code)
}

fn run(config: PathBuf, out: Option<PathBuf>, overrides: Vec<String>) -> ExitCode {
    let config = match load(&config, &overrides) {
        Ok(c) => c,
        Err(e) => return fail(CONFIG_ERROR, &e),
    };
    let result = match run_sweep(&config) {
        Ok(r) => r,
        Err(e) => return fail(RUNTIME_FAILURE, &e),
    };
    for s in &result.skipped {
        eprintln!("skipped: {s}");
    }
    let written = match &out {
        Some(path) => create(path)
            .and_then(|f| write_rows(f, &result.rows))
            .and_then(|_| {
                let sp = summary_path(path);
                create(&sp).and_then(|f| write_summary(f, &result.summary))
            }),
        None => write_rows(std::io::stdout().lock(), &result.rows),
    };
    match written {
        Ok(()) => ExitCode::from(OK),
        Err(e) => fail(RUNTIME_FAILURE, &e),
    }
}

fn oracle(instances: usize, seed: u64) -> ExitCode {
    let config = OracleConfig {
        instances,
        seed,
        ..Default::default()
    };
    let report = match run_oracle(&config) {
        Ok(r) => r,
        Err(e) => return fail(CONFIG_ERROR, &e),
    };
    println!(
        "instances {}  feasible {}  infeasible (agreed) {}  disagreements {}",
        report.instances, report.feasible, report.infeasible_agreed, report.disagreements
    );
    println!("max relative deviation        {:.3e}", report.max_rel_deviation);
    println!(
        "max threshold-path deviation  {:.3e}",
        report.max_threshold_path_deviation
    );
    if report.passed(config.tolerance) {
        println!("PASS (tolerance {:.0e})", config.tolerance);
        ExitCode::from(OK)
    } else {
        println!("FAIL (tolerance {:.0e})", config.tolerance);
        ExitCode::from(ORACLE_DEVIATION)
    }
}

fn bench(config: PathBuf, out: Option<PathBuf>, overrides: Vec<String>) -> ExitCode {
    let config = match load(&config, &overrides) {
        Ok(c) => c,
        Err(e) => return fail(CONFIG_ERROR, &e),
    };
    let rows = match run_bench(&config) {
        Ok(r) => r,
        Err(e) => return fail(RUNTIME_FAILURE, &e),
    };
    let written = match &out {
        Some(path) => create(path).and_then(|f| write_bench(f, &rows)),
        None => write_bench(std::io::stdout().lock(), &rows),
    };
    match written {
        Ok(()) => ExitCode::from(OK),
        Err(e) => fail(RUNTIME_FAILURE, &e),
    }
}

fn figures(out_dir: PathBuf, trials: usize) -> ExitCode {
    if trials == 0 {
        return fail(CONFIG_ERROR, &config_error("trials", "must be positive"));
    }
    match run_figures(&out_dir, trials) {
        Ok(files) => {
            let mut stdout = std::io::stdout().lock();
            for f in files {
                let _ = writeln!(stdout, "{f}");
            }
            ExitCode::from(OK)
        }
        Err(e) => fail(RUNTIME_FAILURE, &e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { CONFIG_ERROR } else { OK });
        }
    };
    match cli.command {
        Command::Run {
            config,
            out,
            overrides,
        } => run(config, out, overrides),
        Command::Oracle { instances, seed } => oracle(instances, seed),
        Command::Bench {
            config,
            out,
            overrides,
        } => bench(config, out, overrides),
        Command::Figures { out_dir, trials } => figures(out_dir, trials),
    }
}
