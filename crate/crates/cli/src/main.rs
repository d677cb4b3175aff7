use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use msm_cli::config::{validate_config, Command, FieldError};
use msm_cli::run::{run, RunError};
use serde_json::{json, Value};

/// Simulate and analyse Itô multifractional stable motion.
#[derive(Debug, Parser)]
#[command(name = "msmlab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

fn fail(err: RunError) -> ExitCode {
    eprintln!("{}", err.to_json());
    ExitCode::from(err.exit_code() as u8)
}

fn with_overrides(text: &str, cli: &Cli) -> Result<String, RunError> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| {
        RunError::Config(vec![FieldError {
            field: "$".into(),
            constraint: "valid JSON".into(),
            got: Value::String(e.to_string()),
            kind: msm_cli::config::ErrorKind::Config,
        }])
    })?;
    if let Some(obj) = v.as_object_mut() {
        obj.insert("command".into(), serde_json::to_value(cli.command).expect("command"));
        if let Some(seed) = cli.seed {
            obj.insert("seed".into(), json!(seed));
        }
        if let Some(out) = &cli.out {
            obj.insert("output_dir".into(), json!(out.to_string_lossy()));
        }
        if let Some(n) = cli.threads {
            obj.insert("threads".into(), json!(n));
        }
    }
    Ok(v.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!(
                "{}",
                json!({ "error": "io", "message": format!("cannot read {}: {e}", cli.config.display()) })
            );
            return ExitCode::from(2);
        }
    };
    let text = match with_overrides(&text, &cli) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let cfg = match validate_config(&text) {
        Ok(c) => c,
        Err(errs) => return fail(RunError::Config(errs)),
    };
    if let Some(n) = cfg.raw.threads {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cfg) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
