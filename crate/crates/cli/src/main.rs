mod config;
mod error;
mod output;
mod tasks;
mod validate;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use serde_json::json;

use config::{ExperimentConfig, Format, Task};
use error::CliError;
use output::{render, sha256_hex, Writer};

/// Probe spectroscopy experiments driven by a TOML config.
#[derive(Debug, Parser)]
#[command(name = "qprobe", version)]
struct Cli {
    #[arg(value_enum)]
    task: Task,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment config (TOML). `validate` and `bloch` run without one.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long, env = "QPROBE_OUT")]
    out: Option<PathBuf>,
    /// Seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the numerical kernels.
    #[arg(long)]
    threads: Option<usize>,
    /// Output formats; overrides the config. Repeatable.
    #[arg(long, value_enum)]
    format: Vec<Format>,
}

struct Loaded {
    config: ExperimentConfig,
    hash: Option<String>,
    path: Option<PathBuf>,
}

fn load(task: Task, common: &Common) -> Result<Loaded, CliError> {
    let (mut config, hash) = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let config = ExperimentConfig::parse(&text).map_err(|m| CliError::config(m).context(path.display().to_string()))?;
            (config, Some(sha256_hex(text.as_bytes())))
        }
        None => match task {
            Task::Validate | Task::Bloch | Task::Lindblad => (ExperimentConfig::parse("").map_err(CliError::config)?, None),
            _ => return Err(CliError::config(format!("task {task} needs --config"))),
        },
    };
    match config.task {
        Some(t) if t != task => {
            return Err(CliError::config(format!("config is for task {t}, not {task}")));
        }
        _ => config.task = Some(task),
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(dir) = &common.out {
        config.output.directory = dir.clone();
    }
    if !common.format.is_empty() {
        let mut f = common.format.clone();
        f.sort();
        f.dedup();
        config.output.formats = f;
    }
    Ok(Loaded { config, hash, path: common.config.clone() })
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::internal(format!("thread pool: {e}")))?;
    }
    let Loaded { mut config, hash, path } = load(cli.task, &cli.common)?;
    let mut outcome = tasks::run(cli.task, &mut config)?;

    let mut writer = Writer::new(&config.output.directory)?;
    let formats = &config.output.formats;
    if formats.contains(&Format::Csv) {
        for t in &outcome.tables {
            writer.table(t)?;
        }
    }
    if formats.contains(&Format::Json) {
        writer.json(&format!("{}.json", cli.task), &json!({ "summary": outcome.summary, "data": outcome.data }))?;
    }
    if formats.contains(&Format::Svg) {
        match &outcome.plot {
            Some(plot) => {
                let (name, svg) = render(plot, &outcome.tables)?;
                writer.write(&name, svg.as_bytes(), None)?;
            }
            None => outcome.warnings.push("svg requested but this run has nothing to plot".into()),
        }
    }
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "task": cli.task,
        "seed": config.seed,
        "config_path": path.map(|p| p.display().to_string()),
        "config_sha256": hash,
        "resolved_config": config,
        "files": writer.files,
        "summary": outcome.summary,
        "warnings": outcome.warnings,
        "notes": outcome.notes,
        "status": if outcome.failed { "failed" } else { "ok" },
    });
    writer.json("manifest.json", &manifest)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    Ok(!outcome.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
