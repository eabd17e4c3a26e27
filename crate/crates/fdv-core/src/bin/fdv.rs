//! Command-line front end for the fire/plume tracking pipeline.
//!
//! Human-readable reports go to stdout; machine outputs go to files only.
//! Exit codes: 0 success, 2 validation, 3 i/o, 4 numeric/convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fdv_core::config::PipelineConfig;
use fdv_core::error::Error;
use fdv_core::pipeline;
use fdv_core::stats::{self, Family, McmcConfig, SampleSet};
use fdv_core::synth::{self, Scenario};

#[derive(Parser)]
#[command(name = "fdv", version, about = "Fire front and plume tracking for frame sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Configuration helpers.
    Config {
        #[command(subcommand)]
        action: ConfigAction,
    },
    /// Generate a synthetic scenario with ground truth.
    Synth {
        /// Built-in scenario name: expanding_disk, translating_front,
        /// ring_fire, two_flanks, advected_plume.
        #[arg(long, conflicts_with = "scenario")]
        preset: Option<String>,
        /// Scenario JSON file.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a threshold-tuning overlay PNG for one sampled frame.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Sample ordinal within the subsampled sequence.
        #[arg(long, default_value_t = 0)]
        frame: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full pipeline and export a dataset bundle.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Nyquist sampling-rate advisor: tracking pass per candidate rate.
    Advise {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated candidate rates in Hz, e.g. 1,2,5.
        #[arg(long, value_delimiter = ',', required = true)]
        rates: Vec<f64>,
        /// Optional JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Fit a distribution to a sample file (one value per line).
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Mcmc)]
        method: MethodArg,
        #[arg(long, default_value = "cm/s")]
        unit: String,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional JSON output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional histogram + fitted-curve plot path (PNG).
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Plot densities on a log10 axis.
        #[arg(long)]
        semi_log: bool,
    },
    /// Fill occlusions across a sequence; writes filled frames.
    Inpaint {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Subcommand)]
enum ConfigAction {
    /// Print (or write) the default configuration.
    Init {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FamilyArg {
    Exponential,
    Erlang,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MethodArg {
    Moment,
    Mcmc,
}

fn load_config(path: &PathBuf) -> Result<PipelineConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    PipelineConfig::from_json(&text)
}

fn read_samples(path: &PathBuf, unit: &str) -> Result<SampleSet, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cell = line.split(',').next().unwrap_or("").trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) => values.push(v),
            // A header line is fine; anything later must parse.
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(Error::Load {
                    file: path.clone(),
                    reason: format!("line {}: bad value {cell:?}: {e}", i + 1),
                })
            }
        }
    }
    SampleSet::new(values, unit)
}

fn write_or_print(path: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io { path: p.clone(), source: e }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Config { action: ConfigAction::Init { out } } => {
            let cfg = PipelineConfig::default();
            write_or_print(&out, &cfg.to_json_pretty())?;
            if let Some(p) = out {
                println!("wrote default config to {}", p.display());
            }
            Ok(())
        }
        Command::Synth { preset, scenario, out, seed } => {
            let mut sc: Scenario = match (preset, scenario) {
                (Some(name), None) => Scenario::preset(&name)
                    .ok_or_else(|| Error::Scenario(format!("unknown preset {name:?}")))?,
                (None, Some(path)) => {
                    let text =
                        std::fs::read_to_string(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
                    serde_json::from_str(&text)
                        .map_err(|e| Error::Scenario(format!("scenario parse error: {e}")))?
                }
                _ => return Err(Error::Scenario("exactly one of --preset or --scenario is required".into())),
            };
            if let Some(seed) = seed {
                sc.seed = seed;
            }
            let path = synth::write_scenario(&sc, &out)?;
            println!("wrote {} frames and ground truth under {}", sc.frames, out.display());
            println!("scenario echo: {}", path.display());
            Ok(())
        }
        Command::Calibrate { config, input, frame, out } => {
            let cfg = load_config(&config)?;
            pipeline::calibrate(&cfg, &input, frame, &out)?;
            println!("wrote overlay preview to {}", out.display());
            Ok(())
        }
        Command::Run { config, input, out, seed, threads } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let report = pipeline::run_pipeline(&cfg, &input, &out, threads)?;
            print!("{report}");
            println!("bundle written to {}", out.display());
            Ok(())
        }
        Command::Advise { config, input, rates, out, threads } => {
            let cfg = load_config(&config)?;
            let report = pipeline::advise(&cfg, &input, &rates, threads)?;
            println!("{:>8} {:>12} {:>12} {:>8} {:>10}", "f (Hz)", "u_max", "u_obs", "ratio", "saturated");
            for row in &report.rows {
                println!(
                    "{:>8} {:>12.2} {:>12.2} {:>7.1}% {:>10}",
                    row.f_hz,
                    row.u_max,
                    row.u_obs,
                    row.ratio * 100.0,
                    if row.degenerate { "-" } else if row.saturated { "yes" } else { "no" }
                );
            }
            match report.recommended_f_hz {
                Some(f) => println!("recommended sampling rate: {f} Hz"),
                None => println!("no plateau detected; no recommendation"),
            }
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::Load { file: path.clone(), reason: e.to_string() })?;
                std::fs::write(&path, json).map_err(|e| Error::Io { path: path.clone(), source: e })?;
                println!("report written to {}", path.display());
            }
            Ok(())
        }
        Command::Fit { input, family, method, unit, bins, seed, out, plot, semi_log } => {
            let samples = read_samples(&input, &unit)?;
            let family = match family {
                FamilyArg::Exponential => Family::Exponential,
                FamilyArg::Erlang => Family::Erlang,
            };
            let result = match method {
                MethodArg::Moment => stats::moment_match(&samples, family, bins)?,
                MethodArg::Mcmc => {
                    let cfg = McmcConfig { seed, ..McmcConfig::default() };
                    stats::mcmc_fit(&samples, family, &cfg, bins)?
                }
            };
            println!("family: {:?}", result.family);
            println!("method: {:?}", result.method);
            println!("lambda: {:.6}", result.lambda);
            if let Some(k) = result.k {
                println!("k: {k}");
            }
            if let Some((lo, hi)) = result.credible_lambda {
                println!("lambda 95% interval: [{lo:.6}, {hi:.6}]");
            }
            match result.nrmse {
                Some(v) => println!("nrmse: {v:.6}"),
                None => println!("nrmse: n/a (degenerate histogram)"),
            }
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&result)
                    .map_err(|e| Error::Load { file: path.clone(), reason: e.to_string() })?;
                std::fs::write(&path, json).map_err(|e| Error::Io { path: path.clone(), source: e })?;
                println!("fit written to {}", path.display());
            }
            if let Some(path) = plot {
                stats::plot_fit(&samples, &result.params(), bins, semi_log, &path)?;
                println!("plot written to {}", path.display());
            }
            Ok(())
        }
        Command::Inpaint { config, input, out, threads } => {
            let cfg = load_config(&config)?;
            let count = pipeline::inpaint_sequence(&cfg, &input, &out, threads)?;
            println!("inpainted {count} frames into {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
