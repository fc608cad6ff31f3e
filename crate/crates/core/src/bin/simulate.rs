use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hybrid_dg::io::{read_config, run};
use log::error;

/// Environment variable that replaces `output_dir`.
const OUTPUT_DIR_VAR: &str = "HYBRID_DG_OUTPUT_DIR";

/// Runs one of the built-in scenarios from a `key = value` configuration file.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// Configuration file.
    config: PathBuf,
    /// Extra `key=value` settings applied after the file.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();

    let cfg = read_config(&args.config).and_then(|mut cfg| {
        for o in &args.overrides {
            cfg.apply_override(o)?;
        }
        if let Ok(dir) = std::env::var(OUTPUT_DIR_VAR) {
            cfg.output_dir = PathBuf::from(dir);
        }
        cfg.scenario_spec::<f64>()?;
        Ok(cfg)
    });
    let cfg = match cfg {
        Ok(cfg) => cfg,
        Err(e) => {
            error!("configuration error: {e}");
            return ExitCode::from(1);
        }
    };

    match run(&cfg) {
        Ok(summary) => {
            println!(
                "finished {} steps at t = {}; {} snapshots in {}",
                summary.steps,
                summary.final_time,
                summary.snapshots.len(),
                cfg.output_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) if e.is_config() => {
            error!("configuration error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            error!("solver failure: {e}");
            ExitCode::from(2)
        }
    }
}
