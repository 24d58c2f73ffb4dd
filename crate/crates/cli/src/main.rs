use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use semmatch::{emit_report, run, CliError, OutputFormat, RunConfig};
use semmatch_core::matchmaker::{
    DEFAULT_FALLBACK_THRESHOLD, DEFAULT_R_THRESHOLD, DEFAULT_WUP_THRESHOLD,
};
use semmatch_core::Thresholds;

/// Rank vendor profiles against customer queries by semantic instance matching.
#[derive(Debug, Parser)]
#[command(name = "semmatch", version)]
struct Args {
    /// Directory of vendor profiles, one plain-text file per vendor
    #[arg(long)]
    vendors_dir: PathBuf,
    /// Directory of customer queries, one plain-text file per query
    #[arg(long)]
    queries_dir: PathBuf,
    /// Marking file (`phrase<TAB>frequency` per line)
    #[arg(long)]
    marking: PathBuf,
    /// Taxonomy edge list (`child<TAB>parent` per line)
    #[arg(long)]
    taxonomy: PathBuf,
    /// Stopword list, one word per line (default: bundled English list)
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_R_THRESHOLD)]
    r_threshold: f64,
    #[arg(long, default_value_t = DEFAULT_FALLBACK_THRESHOLD)]
    fallback_threshold: f64,
    #[arg(long, default_value_t = DEFAULT_WUP_THRESHOLD)]
    wup_threshold: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
    /// Do not write newly discovered instances back to the marking file
    #[arg(long)]
    no_update_marking: bool,
}

fn config(args: Args) -> Result<RunConfig, CliError> {
    let thresholds = Thresholds::new(
        args.r_threshold,
        args.fallback_threshold,
        args.wup_threshold,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(RunConfig {
        thresholds,
        output_format: args.output,
        update_marking: !args.no_update_marking,
        stopwords_path: args.stopwords,
        ..RunConfig::new(
            args.vendors_dir,
            args.queries_dir,
            args.marking,
            args.taxonomy,
        )
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let result = config(args).and_then(|cfg| {
        let outcome = run(&cfg)?;
        Ok(emit_report(&outcome.report, cfg.output_format))
    });
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
