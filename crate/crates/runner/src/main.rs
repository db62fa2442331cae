use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use kt_core::{ModelKind, TruncationPolicy};
use kt_runner::output::write_report;
use kt_runner::{exit, run_sweep, ExperimentConfig, OutputFormat, Pipeline, RunError};

/// Cluster-expansion sweeps for XZ/XXZ chains with exact-diagonalization checks.
#[derive(Parser, Debug)]
#[command(name = "kt-runner", version)]
struct Cli {
    /// JSON config file; flags given alongside it override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// xz-af, xxz-af or xxz-ferro.
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long = "n")]
    n: Vec<usize>,
    #[arg(long = "epsilon", allow_negative_numbers = true)]
    epsilon: Vec<f64>,
    #[arg(long)]
    w_max: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    norm_m: Option<f64>,
    /// ground, interface, ed, crossval or extrapolate.
    #[arg(long = "pipeline")]
    pipeline: Vec<Pipeline>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json, csv or both.
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    workers: Option<usize>,
}

impl Cli {
    fn into_config(self) -> Result<ExperimentConfig, RunError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig {
                model: self.model.ok_or_else(|| RunError::Config("--model is required".into()))?,
                n: Vec::new(),
                epsilon: Vec::new(),
                policy: TruncationPolicy::default(),
                pipelines: Vec::new(),
                out: PathBuf::from("results"),
                format: OutputFormat::default(),
                workers: None,
            },
        };
        if let Some(m) = self.model {
            cfg.model = m;
        }
        if !self.n.is_empty() {
            cfg.n = self.n;
        }
        if !self.epsilon.is_empty() {
            cfg.epsilon = self.epsilon;
        }
        if !self.pipeline.is_empty() {
            cfg.pipelines = self.pipeline;
        }
        if let Some(v) = self.w_max {
            cfg.policy.w_max = v;
        }
        if self.n_max.is_some() {
            cfg.policy.n_max = self.n_max;
        }
        if let Some(v) = self.tol {
            cfg.policy.tol = v;
        }
        if let Some(v) = self.max_iter {
            cfg.policy.max_iter = v;
        }
        if let Some(v) = self.norm_m {
            cfg.policy.norm_m = v;
        }
        if let Some(v) = self.out {
            cfg.out = v;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG as u8 } else { 0 });
        }
    };
    let code = match cli.into_config().and_then(|cfg| {
        let report = run_sweep(&cfg)?;
        write_report(&report)?;
        Ok(report)
    }) {
        Ok(report) => {
            for cell in &report.cells {
                if let kt_runner::CellStatus::Failed { stage, message, .. } = &cell.meta.outcome {
                    eprintln!("{} N={} eps={}: {stage} failed: {message}", cell.meta.model, cell.meta.n, cell.meta.epsilon);
                }
            }
            report.exit_code()
        }
        Err(e @ RunError::Config(_)) => {
            eprintln!("error: {e}");
            exit::CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    ExitCode::from(code as u8)
}
