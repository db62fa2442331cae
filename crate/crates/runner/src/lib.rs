//! Parameter sweeps over the cluster-expansion solvers and the exact oracle.

pub mod config;
pub mod output;
pub mod pipeline;

use std::collections::BTreeMap;

use kt_core::{extrapolate, DispersionSeries};
use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, OutputFormat, Pipeline};
pub use pipeline::{run_cell, CellReport, CellStatus, FailureKind};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Process exit status for a finished sweep.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const PARTIAL: i32 = 3;
    pub const INVARIANT: i32 = 4;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackReport {
    pub s: i64,
    pub values: Vec<(usize, f64)>,
    pub estimate: f64,
    pub rate: f64,
    pub cauchy: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationReport {
    pub epsilon: f64,
    /// `(N, Σ_{s≠0} |c_s|)` for every chain used.
    pub flatness: Vec<(usize, f64)>,
    pub tracks: Vec<TrackReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
    pub extrapolations: Vec<ExtrapolationReport>,
}

impl SweepReport {
    pub fn exit_code(&self) -> i32 {
        let failures = self.cells.iter().filter_map(|c| match &c.meta.outcome {
            CellStatus::Failed { kind, .. } => Some(*kind),
            CellStatus::Ok => None,
        });
        let mut code = exit::OK;
        for kind in failures {
            if kind == FailureKind::Invariant {
                return exit::INVARIANT;
            }
            code = exit::PARTIAL;
        }
        if code == exit::OK && self.extrapolations.iter().any(|e| e.error.is_some()) {
            code = exit::PARTIAL;
        }
        code
    }
}

/// Runs every `(N, ε)` cell, in parallel, and returns them in config order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport, RunError> {
    cfg.validate()?;
    let cells: Vec<(usize, f64)> =
        cfg.epsilon.iter().flat_map(|&eps| cfg.n.iter().map(move |&n| (n, eps))).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| RunError::Pool(e.to_string()))?;
    let runs = pool.install(|| {
        use rayon::prelude::*;
        cells.par_iter().map(|&(n, eps)| run_cell(cfg, n, eps)).collect::<Vec<_>>()
    });

    let mut extrapolations = Vec::new();
    if cfg.wants(Pipeline::Extrapolate) {
        let mut by_eps: BTreeMap<usize, Vec<&DispersionSeries>> = BTreeMap::new();
        for (i, run) in runs.iter().enumerate() {
            if let Some(series) = &run.series {
                let eps_slot = cfg.epsilon.iter().position(|&e| e == cells[i].1).expect("epsilon from config");
                by_eps.entry(eps_slot).or_default().push(series);
            }
        }
        for (slot, &eps) in cfg.epsilon.iter().enumerate() {
            let series: Vec<DispersionSeries> =
                by_eps.get(&slot).map(|v| v.iter().map(|s| (*s).clone()).collect()).unwrap_or_default();
            extrapolations.push(extrapolation_report(eps, &series));
        }
    }
    Ok(SweepReport {
        config: cfg.clone(),
        cells: runs.into_iter().map(|r| r.report).collect(),
        extrapolations,
    })
}

fn extrapolation_report(eps: f64, series: &[DispersionSeries]) -> ExtrapolationReport {
    let mut flatness: Vec<(usize, f64)> = series.iter().map(|s| (s.n_sites, s.off_constant_weight())).collect();
    flatness.sort_by_key(|f| f.0);
    match extrapolate(series) {
        Ok(ex) => ExtrapolationReport {
            epsilon: eps,
            flatness,
            tracks: ex
                .tracks
                .into_iter()
                .map(|t| TrackReport { s: t.s, values: t.values, estimate: t.estimate, rate: t.rate, cauchy: t.cauchy })
                .collect(),
            error: None,
        },
        Err(e) => ExtrapolationReport { epsilon: eps, flatness, tracks: Vec::new(), error: Some(e.to_string()) },
    }
}
