//! Command-line surface: load a chain description, run simulations, scans,
//! sweeps, and fits, and emit machine-readable results.
//!
//! Diagnostic verbosity is controlled by the `SQZSIM_LOG` environment
//! variable (standard log filter syntax). Every error path exits nonzero
//! after writing a single-line JSON error record to stderr.

use clap::{Args, Parser, Subcommand, ValueEnum};
use sqzsim::config::{parse_config, ExperimentConfig, Mode, OutputFormat};
use sqzsim::pipeline::{
    self, fmt_e9, noise_trace, noise_trace_json, render, run, RunOutput,
};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sqzsim",
    about = "Simulate a fiber-based bright-squeezed-light chain and fit its parameters",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the config's mode and emit its report document
    Simulate(RunArgs),
    /// Generate a time-domain trace: a homodyne noise scan or a gain scan
    Scan(RunArgs),
    /// Sweep one numeric parameter and tabulate a report per grid point
    Sweep(RunArgs),
    /// Fit the chain parameters to the config's measurement record
    Fit(RunArgs),
    /// Parse a config and audit its invariants without running anything
    Check(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file path
    config: PathBuf,
    /// Override the config's rng_seed
    #[arg(long)]
    seed: Option<u64>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn emit_error(kind: &str, message: &str) {
    let record = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{record}");
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, (String, String)> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| ("io".to_string(), format!("{}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text).map_err(|e| ("config".to_string(), e.to_string()))?;
    if let Some(seed) = args.seed {
        cfg.rng_seed = seed;
    }
    if let Some(format) = args.format {
        cfg.output.format = match format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.display().to_string());
    }
    Ok(cfg)
}

fn write_output(path: Option<&str>, content: &str) -> Result<(), (String, String)> {
    match path {
        Some(path) => std::fs::write(Path::new(path), content)
            .map_err(|e| ("io".to_string(), format!("{path}: {e}"))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn check_audit(cfg: &ExperimentConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "check.mode = \"{}\"", cfg.mode.as_str());
    let eta = cfg.chain.total_efficiency();
    let _ = writeln!(s, "check.total_efficiency = {}", fmt_e9(eta));
    let _ = writeln!(
        s,
        "check.total_efficiency_in_budget = \"{}\"",
        (0.528..=0.538).contains(&eta)
    );
    let unpumped = cfg.chain.opa.eta_inject * cfg.chain.opa.eta_wg;
    let _ = writeln!(s, "check.unpumped_transmission = {}", fmt_e9(unpumped));
    let signal = cfg.chain.seed_power_w * unpumped;
    let ratio = if signal > 0.0 {
        cfg.bhd.lo_power_w / signal
    } else {
        f64::INFINITY
    };
    let _ = writeln!(s, "check.lo_to_signal_ratio = {}", fmt_e9(ratio));
    let _ = writeln!(s, "check.lo_dominant = \"{}\"", ratio >= 100.0);
    let nyquist_ok = cfg.scan.sample_rate_hz >= 2.0 * cfg.waveform.frequency_hz;
    let _ = writeln!(s, "check.scan_rate_sufficient = \"{nyquist_ok}\"");
    let _ = writeln!(s, "check.ok = \"true\"");
    s
}

fn execute(command: &Command) -> Result<(), (String, String)> {
    match command {
        Command::Simulate(args) => {
            let cfg = load_config(args)?;
            let output = run(&cfg).map_err(|e| ("run".to_string(), e.to_string()))?;
            let content = render(&output, cfg.output.format);
            write_output(cfg.output.path.as_deref(), &content)
        }
        Command::Scan(args) => {
            let cfg = load_config(args)?;
            let content = match cfg.mode {
                Mode::GainScan => {
                    let trace = pipeline::gain_trace(&cfg)
                        .map_err(|e| ("run".to_string(), e.to_string()))?;
                    match cfg.output.format {
                        OutputFormat::Csv => pipeline::gain_trace_csv(&trace),
                        OutputFormat::Json => pipeline::gain_trace_json(&trace),
                    }
                }
                Mode::VacuumSqueeze | Mode::BrightSqueeze => {
                    let trace =
                        noise_trace(&cfg).map_err(|e| ("run".to_string(), e.to_string()))?;
                    match cfg.output.format {
                        OutputFormat::Csv => trace.to_csv(),
                        OutputFormat::Json => noise_trace_json(&trace),
                    }
                }
                Mode::Fit => {
                    return Err((
                        "run".to_string(),
                        "fit mode has no trace output; use the fit subcommand".to_string(),
                    ))
                }
            };
            write_output(cfg.output.path.as_deref(), &content)
        }
        Command::Sweep(args) => {
            let cfg = load_config(args)?;
            let table = pipeline::sweep(&cfg).map_err(|e| ("run".to_string(), e.to_string()))?;
            let content = match cfg.output.format {
                OutputFormat::Csv => table.to_csv(),
                OutputFormat::Json => table.to_json(),
            };
            write_output(cfg.output.path.as_deref(), &content)
        }
        Command::Fit(args) => {
            let cfg = load_config(args)?;
            let (result, record) =
                pipeline::run_fit(&cfg).map_err(|e| ("fit".to_string(), e.to_string()))?;
            let content = render(
                &RunOutput::Fit(Box::new((result, record))),
                cfg.output.format,
            );
            write_output(cfg.output.path.as_deref(), &content)
        }
        Command::Check(args) => {
            let cfg = load_config(args)?;
            let content = check_audit(&cfg);
            write_output(cfg.output.path.as_deref(), &content)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("SQZSIM_LOG")).init();
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err((kind, message)) => {
            emit_error(&kind, &message);
            ExitCode::FAILURE
        }
    }
}
