//! Files written for a finished sweep.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::pipeline::{dispersion_rows, CellReport};
use crate::{RunError, SweepReport};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.display().to_string(), source }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

/// `cells/xz_af_n9_eps0.05.json` and so on.
pub fn cell_file_name(cell: &CellReport) -> String {
    format!("{}_n{}_eps{}.json", cell.meta.model.name(), cell.meta.n, cell.meta.epsilon)
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    model: &'a str,
    n: usize,
    epsilon: f64,
    status: &'a str,
    message: Option<&'a str>,
    #[serde(rename = "E_plus")]
    e_plus: Option<f64>,
    #[serde(rename = "E_minus")]
    e_minus: Option<f64>,
    e2: Option<f64>,
    bandwidth: Option<f64>,
    off_constant_weight: Option<f64>,
    e2_diff: Option<f64>,
    max_coeff_diff: Option<f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a crate::ExperimentConfig,
    exit_code: i32,
    cells: Vec<SummaryRow<'a>>,
    extrapolations: &'a [crate::ExtrapolationReport],
}

/// Writes the sweep under `report.config.out` and returns the files written.
/// Output depends only on the results, so identical sweeps give identical
/// bytes.
pub fn write_report(report: &SweepReport) -> Result<Vec<PathBuf>, RunError> {
    let out = &report.config.out;
    let mut written = Vec::new();
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let format = report.config.format;

    if format.json() {
        let dir = out.join("cells");
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        for cell in &report.cells {
            let path = dir.join(cell_file_name(cell));
            write_json(&path, cell)?;
            written.push(path);
        }
    }

    let rows = report
        .cells
        .iter()
        .map(|c| {
            let (status, message) = match &c.meta.outcome {
                crate::CellStatus::Ok => ("ok", None),
                crate::CellStatus::Failed { message, .. } => ("failed", Some(message.as_str())),
            };
            let cv = c.crossval.as_ref();
            SummaryRow {
                model: c.meta.model.name(),
                n: c.meta.n,
                epsilon: c.meta.epsilon,
                status,
                message,
                e_plus: c.ground.as_ref().map(|g| g.e_plus),
                e_minus: c.ground.as_ref().map(|g| g.e_minus),
                e2: c.dispersion.as_ref().map(|d| d.coeff(2)),
                bandwidth: c.dispersion.as_ref().map(|d| d.bandwidth),
                off_constant_weight: c.dispersion.as_ref().map(|d| d.off_constant_weight),
                e2_diff: cv.and_then(|v| v.e2_diff),
                max_coeff_diff: cv.and_then(|v| v.max_coeff_diff),
            }
        })
        .collect();
    let summary = Summary {
        config: &report.config,
        exit_code: report.exit_code(),
        cells: rows,
        extrapolations: &report.extrapolations,
    };
    let path = out.join("summary.json");
    write_json(&path, &summary)?;
    written.push(path);

    if format.csv() {
        let mut csv = String::from("model,n,epsilon,source,j,k,D\n");
        for cell in &report.cells {
            for (source, j, k, d) in dispersion_rows(cell) {
                writeln!(csv, "{},{},{},{source},{j},{k:e},{d:e}", cell.meta.model.name(), cell.meta.n, cell.meta.epsilon)
                    .expect("string write");
            }
        }
        let path = out.join("dispersion.csv");
        std::fs::write(&path, csv).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
