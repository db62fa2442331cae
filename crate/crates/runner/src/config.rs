//! Sweep configuration and its validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use kt_core::ed::{MAX_ED_SITES, MAX_ORACLE_SITES};
use kt_core::interface::MAX_INTERFACE_SITES;
use kt_core::ground::MAX_GROUND_SITES;
use kt_core::{ModelKind, TruncationPolicy};
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Ground,
    Interface,
    Ed,
    Crossval,
    Extrapolate,
}

impl FromStr for Pipeline {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        match s.to_ascii_lowercase().as_str() {
            "ground" => Ok(Pipeline::Ground),
            "interface" => Ok(Pipeline::Interface),
            "ed" => Ok(Pipeline::Ed),
            "crossval" => Ok(Pipeline::Crossval),
            "extrapolate" => Ok(Pipeline::Extrapolate),
            other => Err(RunError::Config(format!("unknown pipeline `{other}`"))),
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pipeline::Ground => "ground",
            Pipeline::Interface => "interface",
            Pipeline::Ed => "ed",
            Pipeline::Crossval => "crossval",
            Pipeline::Extrapolate => "extrapolate",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Both,
}

impl FromStr for OutputFormat {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "both" => Ok(OutputFormat::Both),
            other => Err(RunError::Config(format!("unknown output format `{other}`"))),
        }
    }
}

impl OutputFormat {
    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub n: Vec<usize>,
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub policy: TruncationPolicy,
    pub pipelines: Vec<Pipeline>,
    pub out: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
    /// Concurrent sweep cells; `None` uses every core.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))
    }

    pub fn wants(&self, p: Pipeline) -> bool {
        self.pipelines.contains(&p)
    }

    /// Whether a cell needs the interface solve, directly or for a later stage.
    pub fn needs_interface(&self, n: usize) -> bool {
        n % 2 == 1 && (self.wants(Pipeline::Interface) || self.wants(Pipeline::Extrapolate) || self.wants(Pipeline::Crossval))
    }

    pub fn needs_ground(&self, n: usize) -> bool {
        self.model.is_af() && (self.wants(Pipeline::Ground) || self.wants(Pipeline::Crossval) || self.needs_interface(n))
    }

    pub fn needs_ed(&self) -> bool {
        self.wants(Pipeline::Ed) || self.wants(Pipeline::Crossval)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Config(m));
        if self.n.is_empty() || self.epsilon.is_empty() || self.pipelines.is_empty() {
            return bad("need at least one N, one epsilon and one pipeline".into());
        }
        self.policy.validate().map_err(|e| RunError::Config(e.to_string()))?;
        for &eps in &self.epsilon {
            if !eps.is_finite() || eps.abs() * self.policy.norm_m > 1.0 {
                return bad(format!("epsilon {eps} outside |epsilon|*M <= 1 (M = {})", self.policy.norm_m));
            }
        }
        let interface = self.wants(Pipeline::Interface) || self.wants(Pipeline::Extrapolate);
        for &n in &self.n {
            if n < 3 {
                return bad(format!("N = {n} is below 3"));
            }
            if interface && n % 2 == 0 {
                return bad(format!("interface pipelines need odd N, got {n}"));
            }
            if interface && n > MAX_INTERFACE_SITES {
                return bad(format!("N = {n} above the interface limit {MAX_INTERFACE_SITES}"));
            }
            if self.wants(Pipeline::Ground) && self.model.is_af() && n > MAX_GROUND_SITES {
                return bad(format!("N = {n} above the ground limit {MAX_GROUND_SITES}"));
            }
            if self.needs_ed() {
                let limit = if n % 2 == 1 { MAX_ORACLE_SITES } else { MAX_ED_SITES };
                if n > limit {
                    return bad(format!("N = {n} above the exact-diagonalization limit {limit}"));
                }
            }
        }
        if self.wants(Pipeline::Ground) && !self.model.is_af() && self.pipelines.len() == 1 {
            return bad("the ferromagnet has no ground expansion to run".into());
        }
        if self.wants(Pipeline::Extrapolate) {
            let mut ns = self.n.clone();
            ns.sort_unstable();
            ns.dedup();
            if ns.len() < 3 {
                return bad("extrapolate needs at least three distinct N".into());
            }
        }
        if self.workers == Some(0) {
            return bad("workers must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            model: ModelKind::XzAf,
            n: vec![7, 9, 11],
            epsilon: vec![0.05],
            policy: TruncationPolicy::default(),
            pipelines: vec![Pipeline::Interface],
            out: PathBuf::from("out"),
            format: OutputFormat::Json,
            workers: None,
        }
    }

    #[test]
    fn accepts_a_plain_sweep() {
        assert!(base().validate().is_ok());
    }

    #[test]
    fn rejects_bad_fields() {
        let cases: Vec<Box<dyn Fn(&mut ExperimentConfig)>> = vec![
            Box::new(|c| c.n.push(8)),
            Box::new(|c| c.epsilon = vec![0.2]),
            Box::new(|c| c.n = vec![]),
            Box::new(|c| c.policy.tol = 0.0),
            Box::new(|c| c.workers = Some(0)),
            Box::new(|c| {
                c.n = vec![7, 9];
                c.pipelines.push(Pipeline::Extrapolate)
            }),
            Box::new(|c| {
                c.n = vec![15];
                c.pipelines = vec![Pipeline::Crossval]
            }),
        ];
        for (i, f) in cases.iter().enumerate() {
            let mut c = base();
            f(&mut c);
            assert!(matches!(c.validate(), Err(RunError::Config(_))), "case {i}");
        }
    }

    #[test]
    fn even_n_is_fine_for_ground() {
        let mut c = base();
        c.n = vec![6, 8];
        c.pipelines = vec![Pipeline::Ground];
        assert!(c.validate().is_ok());
        assert!(!c.needs_interface(8));
    }

    #[test]
    fn names_parse() {
        for p in [Pipeline::Ground, Pipeline::Interface, Pipeline::Ed, Pipeline::Crossval, Pipeline::Extrapolate] {
            assert_eq!(p.to_string().parse::<Pipeline>().unwrap(), p);
        }
        assert_eq!("BOTH".parse::<OutputFormat>().unwrap(), OutputFormat::Both);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
