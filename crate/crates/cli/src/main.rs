use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use seqent_cli::config::ExperimentConfig;
use seqent_cli::runner::write_outputs;
use seqent_cli::{presets, run_experiment, CliError, OutputFormat};

#[derive(Parser)]
#[command(name = "seqent", version, about = "Sequence entropy and weak-limit experiments on exact systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Source {
    /// Experiment config (TOML).
    #[arg(long, value_name = "PATH", conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in config by name (see `list-presets`).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Overrides the config seed.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its outputs.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (default: config `output.dir`, else `out`).
        #[arg(long, value_name = "PATH")]
        out_dir: Option<PathBuf>,
        /// Worker threads; results do not depend on it.
        #[arg(long, value_name = "N")]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "both")]
        format: OutputFormat,
    },
    /// Check a config and print predicted work, without running it.
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// List built-in configs.
    ListPresets {
        /// Print the TOML of one preset.
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
}

fn load(source: &Source) -> Result<(ExperimentConfig, String), CliError> {
    let (text, stem) = match (&source.config, &source.preset) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
            let stem = p.file_stem().map_or("result".into(), |s| s.to_string_lossy().into_owned());
            (text, stem)
        }
        (None, Some(name)) => {
            let p = presets::find(name).ok_or_else(|| CliError::Validation(format!("unknown preset '{name}'")))?;
            (p.config.to_string(), p.name.to_string())
        }
        (None, None) => unreachable!("clap requires one"),
    };
    let mut cfg = ExperimentConfig::parse(&text)?;
    if source.seed.is_some() {
        cfg.seed = source.seed;
    }
    let stem = cfg.output.stem.clone().unwrap_or(stem);
    Ok((cfg, stem))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::ListPresets { show: Some(name) } => {
            let p = presets::find(&name).ok_or_else(|| CliError::Validation(format!("unknown preset '{name}'")))?;
            print!("{}", p.config.trim_start());
        }
        Command::ListPresets { show: None } => {
            for p in presets::PRESETS {
                println!("{:<24} {}", p.name, p.description);
                println!("{:<24} probes: {}", "", p.probes);
            }
        }
        Command::Validate { source } => {
            let (cfg, _) = load(&source)?;
            let plan = cfg.plan()?;
            println!("ok: {} on {}", cfg.experiment.name(), plan.system.name());
            for n in &plan.notes {
                println!("  {n}");
            }
            for w in &plan.warnings {
                println!("  warning: {w}");
            }
        }
        Command::Run {
            source,
            out_dir,
            jobs,
            format,
        } => {
            if let Some(n) = jobs {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build_global()
                    .map_err(|e| CliError::Internal(e.to_string()))?;
            }
            let (cfg, stem) = load(&source)?;
            let dir = out_dir
                .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| Path::new("out").to_path_buf());
            let out = run_experiment(&cfg)?;
            for w in &out.envelope.warnings {
                eprintln!("warning: {w}");
            }
            for p in write_outputs(&out, &dir, &stem, format)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("seqent: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
