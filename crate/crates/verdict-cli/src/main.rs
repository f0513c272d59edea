use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use verdict_cli::commands::{cmd_bench, cmd_evaluate, cmd_explain, cmd_ingest, cmd_train};
use verdict_cli::config::{OutPaths, RunConfig};
use verdict_core::bench::TimingMode;

#[derive(Parser)]
#[command(
    name = "verdict",
    version,
    about = "Explainable desk-scale fake-news classification pipeline"
)]
struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed, overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for all artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or load the corpus, clean, stratify, and write dataset files.
    Ingest,
    /// Run the two-phase curriculum (or the TF-IDF baseline) on the splits.
    Train {
        /// Train the TF-IDF + logistic-regression baseline instead.
        #[arg(long)]
        baseline: bool,
    },
    /// Score the test split and write the metrics report.
    Evaluate {
        /// Evaluate the stored baseline model instead of the transformer.
        #[arg(long)]
        baseline: bool,
        /// Decision threshold override.
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Attribute one prediction and render the comparison report.
    Explain {
        /// Text to explain.
        #[arg(long)]
        text: String,
        /// Comma-separated list: lime, shap.
        #[arg(long, default_value = "lime,shap")]
        methods: String,
        /// Also compute the exact Shapley oracle (token count <= 12).
        #[arg(long)]
        exact: bool,
    },
    /// Measure parameters, training time per epoch, latency and throughput.
    Bench {
        /// Time the forward pass only (tokenization excluded).
        #[arg(long, conflicts_with = "end_to_end")]
        inference_only: bool,
        /// Time cleaning + tokenization + forward together.
        #[arg(long)]
        end_to_end: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::load(cli.config.as_deref(), cli.seed) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code as u8);
        }
    };
    let paths = OutPaths::new(cli.out);

    let result = match &cli.command {
        Command::Ingest => cmd_ingest(&cfg, &paths),
        Command::Train { baseline } => cmd_train(&cfg, &paths, *baseline),
        Command::Evaluate { baseline, tau } => cmd_evaluate(&cfg, &paths, *baseline, *tau),
        Command::Explain {
            text,
            methods,
            exact,
        } => cmd_explain(&cfg, &paths, text, methods, *exact),
        Command::Bench {
            inference_only,
            end_to_end,
        } => {
            let modes: Vec<TimingMode> = match (inference_only, end_to_end) {
                (true, false) => vec![TimingMode::InferenceOnly],
                (false, true) => vec![TimingMode::EndToEnd],
                _ => vec![TimingMode::InferenceOnly, TimingMode::EndToEnd],
            };
            cmd_bench(&cfg, &paths, &modes)
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
