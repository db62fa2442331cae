//! One sweep cell: a model at one `(N, ε)`, through the requested stages.

use std::collections::BTreeMap;

use kt_core::ed::{build_hamiltonian, build_symmetries, oracle_bands, oracle_dispersion, parity_energies, transformed_frame};
use kt_core::interface::MAX_RESIDUAL_SITES;
use kt_core::{
    compute_h, from_interface, residual_ground, residual_interface, solve_ground, solve_interface, DispersionSeries,
    Error, ModelKind, ModelSpec, TruncationPolicy, SeamExpansion, SiteSet,
};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Pipeline};

/// Pointwise ground residuals are skipped above this length.
const GROUND_RESIDUAL_SITES: usize = 20;
/// Coefficient window compared between expansion and oracle.
const CROSSVAL_WINDOW: i64 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub sites: Vec<usize>,
    pub value: f64,
}

fn entries(map: &BTreeMap<SiteSet, f64>) -> Vec<Entry> {
    map.iter().map(|(x, &v)| Entry { sites: x.sites(), value: v }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundReport {
    pub g: Vec<Entry>,
    #[serde(rename = "E_plus")]
    pub e_plus: f64,
    #[serde(rename = "E_minus")]
    pub e_minus: f64,
    pub norm: f64,
    pub iterations: usize,
    pub residual: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterfaceReport {
    pub e_map: Vec<Entry>,
    pub e_s: Vec<f64>,
    pub norm: f64,
    pub iterations: usize,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub s: i64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionReport {
    pub k: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
    pub coeffs: Vec<Coefficient>,
    pub bandwidth: f64,
    /// `Σ_{s≠0} |c_s|`.
    pub off_constant_weight: f64,
    pub warnings: Vec<String>,
}

impl DispersionReport {
    pub fn new(series: &DispersionSeries) -> Self {
        let (k, d) = series.evaluate_grid().into_iter().unzip();
        DispersionReport {
            k,
            d,
            coeffs: (series.s_min..=series.s_max()).map(|s| Coefficient { s, value: series.coeff(s) }).collect(),
            bandwidth: series.bandwidth(),
            off_constant_weight: series.off_constant_weight(),
            warnings: series.warnings.clone(),
        }
    }

    pub fn coeff(&self, s: i64) -> f64 {
        self.coeffs.iter().find(|c| c.s == s).map_or(0.0, |c| c.value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdReport {
    #[serde(rename = "E_plus")]
    pub e_plus: f64,
    #[serde(rename = "E_minus")]
    pub e_minus: f64,
    /// Lowest interface energy per momentum, odd `N` only.
    pub e1: Option<Vec<f64>>,
    pub dispersion: Option<DispersionReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossvalReport {
    pub e_plus_diff: Option<f64>,
    pub e_minus_diff: Option<f64>,
    pub e2_kt: Option<f64>,
    pub e2_ed: Option<f64>,
    pub e2_diff: Option<f64>,
    /// `max_{|s| ≤ 4} |c_s^KT - c_s^ED|`.
    pub max_coeff_diff: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Divergence,
    Invariant,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed { kind: FailureKind, stage: Pipeline, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellMeta {
    pub model: ModelKind,
    pub n: usize,
    pub epsilon: f64,
    pub policy: TruncationPolicy,
    pub outcome: CellStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub meta: CellMeta,
    pub ground: Option<GroundReport>,
    pub interface: Option<InterfaceReport>,
    pub dispersion: Option<DispersionReport>,
    pub ed: Option<EdReport>,
    pub crossval: Option<CrossvalReport>,
}

impl CellReport {
    pub fn is_ok(&self) -> bool {
        self.meta.outcome == CellStatus::Ok
    }
}

fn classify(e: &Error) -> FailureKind {
    match e {
        Error::Divergence { .. } => FailureKind::Divergence,
        Error::InvariantViolation(_) | Error::SymmetryViolation(_) => FailureKind::Invariant,
        _ => FailureKind::Other,
    }
}

fn fail(stage: Pipeline, e: Error) -> CellStatus {
    CellStatus::Failed { kind: classify(&e), stage, message: e.to_string() }
}

/// A finished cell plus the expansion series the extrapolation stage needs.
pub struct CellRun {
    pub report: CellReport,
    pub series: Option<DispersionSeries>,
}

/// Runs every stage the config asks for at this cell. A failing stage stops
/// the cell and is recorded; earlier results are kept.
pub fn run_cell(cfg: &ExperimentConfig, n: usize, eps: f64) -> CellRun {
    let mut cell = CellReport {
        meta: CellMeta { model: cfg.model, n, epsilon: eps, policy: cfg.policy.clone(), outcome: CellStatus::Ok },
        ground: None,
        interface: None,
        dispersion: None,
        ed: None,
        crossval: None,
    };
    let mut series = None;
    if let Err(status) = fill_cell(cfg, &mut cell, &mut series) {
        cell.meta.outcome = status;
    }
    CellRun { report: cell, series }
}

fn fill_cell(
    cfg: &ExperimentConfig,
    cell: &mut CellReport,
    kt_series: &mut Option<DispersionSeries>,
) -> Result<(), CellStatus> {
    let (model, n, eps) = (cfg.model, cell.meta.n, cell.meta.epsilon);
    let policy = &cfg.policy;

    let ground = if cfg.needs_ground(n) {
        let spec = ModelSpec::uniform(model, n, eps);
        let sol = solve_ground(&spec, policy).map_err(|e| fail(Pipeline::Ground, e))?;
        let residual = if n <= GROUND_RESIDUAL_SITES {
            let r = residual_ground(&sol, &spec).map_err(|e| fail(Pipeline::Ground, e))?;
            Some([r.max_dev_even, r.max_dev_odd])
        } else {
            None
        };
        cell.ground = Some(GroundReport {
            g: entries(&sol.g),
            e_plus: sol.e_plus,
            e_minus: sol.e_minus,
            norm: sol.norm_g,
            iterations: sol.iterations,
            residual,
        });
        Some(sol)
    } else {
        None
    };

    if cfg.needs_interface(n) {
        let seam = match &ground {
            Some(g) => compute_h(g, policy).map_err(|e| fail(Pipeline::Interface, e))?,
            None => SeamExpansion::zero(model, n, eps),
        };
        let spec = ModelSpec::interface(model, n, eps);
        let sol = solve_interface(&seam, &spec, policy).map_err(|e| fail(Pipeline::Interface, e))?;
        let residual = if n <= MAX_RESIDUAL_SITES {
            Some(residual_interface(&sol, &seam, &spec).map_err(|e| fail(Pipeline::Interface, e))?)
        } else {
            None
        };
        cell.interface = Some(InterfaceReport {
            e_map: entries(&sol.e_map),
            e_s: sol.e_s.clone(),
            norm: sol.norm_e,
            iterations: sol.iterations,
            residual,
        });
        let series = from_interface(&sol).map_err(|e| fail(Pipeline::Interface, e))?;
        cell.dispersion = Some(DispersionReport::new(&series));
        *kt_series = Some(series);
    }

    if cfg.needs_ed() {
        cell.ed = Some(run_ed(model, n, eps).map_err(|e| fail(Pipeline::Ed, e))?);
    }

    if cfg.wants(Pipeline::Crossval) {
        let ed = cell.ed.as_ref().expect("ed stage ran");
        let mut cv = CrossvalReport {
            e_plus_diff: None,
            e_minus_diff: None,
            e2_kt: None,
            e2_ed: None,
            e2_diff: None,
            max_coeff_diff: None,
        };
        if let Some(g) = &cell.ground {
            cv.e_plus_diff = Some((g.e_plus - ed.e_plus).abs());
            cv.e_minus_diff = Some((g.e_minus - ed.e_minus).abs());
        }
        if let (Some(kt), Some(exact)) = (kt_series.as_ref(), &ed.dispersion) {
            let e2_kt = kt.coeff(2);
            let e2_ed = exact.coeff(2);
            cv.e2_kt = Some(e2_kt);
            cv.e2_ed = Some(e2_ed);
            cv.e2_diff = Some((e2_kt - e2_ed).abs());
            cv.max_coeff_diff = Some(
                (-CROSSVAL_WINDOW..=CROSSVAL_WINDOW)
                    .map(|s| (kt.coeff(s) - exact.coeff(s)).abs())
                    .fold(0.0, f64::max),
            );
        }
        cell.crossval = Some(cv);
    }
    Ok(())
}

fn run_ed(model: ModelKind, n: usize, eps: f64) -> kt_core::Result<EdReport> {
    if n % 2 == 1 {
        let spec = ModelSpec::interface(model, n, eps);
        let bands = oracle_bands(&spec)?;
        let series = oracle_dispersion(&spec)?;
        return Ok(EdReport {
            e_plus: bands.e_plus,
            e_minus: bands.e_minus,
            e1: Some(bands.e1),
            dispersion: Some(DispersionReport::new(&series)),
        });
    }
    let spec = ModelSpec::uniform(model, n, eps);
    let h = build_hamiltonian(&spec, transformed_frame(&spec))?;
    let (_, p) = build_symmetries(&spec)?;
    let (e_plus, e_minus) = parity_energies(&h, &p)?;
    Ok(EdReport { e_plus, e_minus, e1: None, dispersion: None })
}

/// `(k, D)` rows for CSV export, from whichever sources the cell has.
pub fn dispersion_rows(cell: &CellReport) -> Vec<(&'static str, usize, f64, f64)> {
    let mut rows = Vec::new();
    let mut push = |source: &'static str, d: &DispersionReport| {
        for (j, (&k, &v)) in d.k.iter().zip(&d.d).enumerate() {
            rows.push((source, j, k, v));
        }
    };
    if let Some(d) = &cell.dispersion {
        push("KT", d);
    }
    if let Some(d) = cell.ed.as_ref().and_then(|e| e.dispersion.as_ref()) {
        push("ED", d);
    }
    rows
}
