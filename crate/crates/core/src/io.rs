//! Case-file loading and result reporting.
//!
//! Case files are UTF-8 JSON with snake_case fields. Unknown fields are
//! rejected so typos fail loudly, and parsing round-trips losslessly:
//! growth can be given as a geometric rate or explicit per-period factor
//! tables and is preserved as written.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ccg::CcgConfig;
use crate::error::{Error, Result};
use crate::model::{
    validate_case, Bus, Demand, GammaGenStep, Generator, GeneratorGroup, Line, NetworkCase,
    PlanningConfig,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Per-period series that can be written compactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SeriesSpec {
    /// The same value for every period.
    Uniform(f64),
    /// One value per period, first period first.
    PerPeriod(Vec<f64>),
}

impl SeriesSpec {
    fn expand(&self, periods: usize) -> Vec<f64> {
        match self {
            SeriesSpec::Uniform(v) => vec![*v; periods],
            SeriesSpec::PerPeriod(vs) => vs.clone(),
        }
    }
}

/// Load evolution: a geometric yearly rate or explicit factor tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GrowthSpec {
    Geometric { mean_rate: f64, dispersion_rate: f64 },
    Explicit { mean: Vec<f64>, dispersion: Vec<f64> },
}

impl GrowthSpec {
    fn expand(&self, periods: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            GrowthSpec::Geometric { mean_rate, dispersion_rate } => (
                Demand::geometric_factors(*mean_rate, periods),
                Demand::geometric_factors(*dispersion_rate, periods),
            ),
            GrowthSpec::Explicit { mean, dispersion } => (mean.clone(), dispersion.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSpec {
    pub id: String,
    pub bus: String,
    pub load_nominal_mw: f64,
    pub load_deviation_mw: f64,
    pub shed_cost_eur_per_mwh: f64,
    pub shed_fraction: SeriesSpec,
    pub growth: GrowthSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusSpec {
    pub id: String,
    #[serde(default)]
    pub slack: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CcgSpec {
    pub epsilon: f64,
    pub max_iterations: usize,
}

/// On-disk schema of a planning case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub schema_version: u32,
    pub name: String,
    /// Free-form provenance notes (data sources, reconstructions).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub buses: Vec<BusSpec>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generator_groups: Vec<GeneratorGroup>,
    pub demands: Vec<DemandSpec>,
    pub planning: PlanningSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ccg: Option<CcgSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanningSpec {
    pub horizon_years: usize,
    pub discount_rate: f64,
    pub sigma_hours: f64,
    pub line_budget_meur: f64,
    pub gen_budget_meur: f64,
    pub gamma_demand: usize,
    pub gamma_gen_base: usize,
    #[serde(default)]
    pub gamma_gen_steps: Vec<GammaGenStep>,
}

impl CaseFile {
    /// Expands the compact file form into the in-memory case.
    pub fn to_case(&self) -> NetworkCase {
        let ny = self.planning.horizon_years;
        NetworkCase {
            name: self.name.clone(),
            buses: self
                .buses
                .iter()
                .map(|b| Bus { id: b.id.clone(), slack: b.slack })
                .collect(),
            lines: self.lines.clone(),
            generators: self.generators.clone(),
            generator_groups: self.generator_groups.clone(),
            demands: self
                .demands
                .iter()
                .map(|d| {
                    let (growth_mean, growth_dispersion) = d.growth.expand(ny);
                    Demand {
                        id: d.id.clone(),
                        bus: d.bus.clone(),
                        load_nominal_mw: d.load_nominal_mw,
                        load_deviation_mw: d.load_deviation_mw,
                        shed_cost_eur_per_mwh: d.shed_cost_eur_per_mwh,
                        shed_fraction: d.shed_fraction.expand(ny),
                        growth_mean,
                        growth_dispersion,
                    }
                })
                .collect(),
            planning: PlanningConfig {
                horizon_years: ny,
                discount_rate: self.planning.discount_rate,
                sigma_hours: self.planning.sigma_hours,
                line_budget_meur: self.planning.line_budget_meur,
                gen_budget_meur: self.planning.gen_budget_meur,
                gamma_demand: self.planning.gamma_demand,
                gamma_gen_base: self.planning.gamma_gen_base,
                gamma_gen_steps: self.planning.gamma_gen_steps.clone(),
            },
        }
    }

    pub fn ccg_config(&self) -> CcgConfig {
        match &self.ccg {
            Some(c) => CcgConfig {
                epsilon: c.epsilon,
                max_iterations: c.max_iterations,
                verbose: false,
            },
            None => CcgConfig::default(),
        }
    }
}

/// Parses a case file without validating the case it describes.
pub fn parse_case_file(path: impl AsRef<Path>) -> Result<CaseFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let file: CaseFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        detail: e.to_string(), // serde_json reports line and column
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse {
            path: path.display().to_string(),
            detail: format!(
                "schema_version {} unsupported, expected {SCHEMA_VERSION}",
                file.schema_version
            ),
        });
    }
    Ok(file)
}

/// Loads and validates a case.
pub fn load_case(path: impl AsRef<Path>) -> Result<NetworkCase> {
    let file = parse_case_file(&path)?;
    let case = file.to_case();
    let report = validate_case(&case);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    Ok(case)
}

/// Canonical serialization of a case file (pretty JSON, stable field order).
pub fn case_file_to_string(file: &CaseFile) -> String {
    let mut out = serde_json::to_string_pretty(file).expect("case files always serialize");
    out.push('\n');
    out
}

pub fn save_case(file: &CaseFile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), case_file_to_string(file))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_json() -> String {
        r#"{
  "schema_version": 1,
  "name": "sample",
  "buses": [
    {"id": "b1", "slack": true},
    {"id": "b2"}
  ],
  "lines": [
    {"id": "e1", "from_bus": "b1", "to_bus": "b2", "susceptance_s": 5.0,
     "capacity_mw": 100.0, "status": "existing"},
    {"id": "c1", "from_bus": "b1", "to_bus": "b2", "susceptance_s": 5.0,
     "capacity_mw": 100.0, "status": "candidate", "invest_cost_meur": 10.0}
  ],
  "generators": [
    {"id": "g1", "bus": "b1", "op_cost_eur_per_mwh": 10.0,
     "cap_nominal_mw": 200.0, "cap_deviation_mw": 100.0,
     "category": {"kind": "fixed"}}
  ],
  "demands": [
    {"id": "d1", "bus": "b2", "load_nominal_mw": 80.0, "load_deviation_mw": 16.0,
     "shed_cost_eur_per_mwh": 1000.0,
     "shed_fraction": {"uniform": 1.0},
     "growth": {"geometric": {"mean_rate": 0.012, "dispersion_rate": 0.012}}}
  ],
  "planning": {
    "horizon_years": 3,
    "discount_rate": 0.1,
    "sigma_hours": 8760.0,
    "line_budget_meur": 50.0,
    "gen_budget_meur": 50.0,
    "gamma_demand": 1,
    "gamma_gen_base": 1
  }
}
"#
        .to_string()
    }

    #[test]
    fn parse_expand_validate() {
        let dir = std::env::temp_dir().join("gridplan-io-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sample.json");
        fs::write(&path, sample_json()).unwrap();
        let case = load_case(&path).unwrap();
        assert_eq!(case.buses.len(), 2);
        assert_eq!(case.demands[0].growth_mean.len(), 3);
        assert!((case.demands[0].growth_mean[2] - 1.012f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn save_load_is_identity_after_normalization() {
        let dir = std::env::temp_dir().join("gridplan-io-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.json");
        fs::write(&path, sample_json()).unwrap();
        let parsed = parse_case_file(&path).unwrap();
        let normalized = case_file_to_string(&parsed);
        let path2 = dir.join("roundtrip2.json");
        fs::write(&path2, &normalized).unwrap();
        let reparsed = parse_case_file(&path2).unwrap();
        assert_eq!(parsed, reparsed);
        assert_eq!(normalized, case_file_to_string(&reparsed));
    }

    #[test]
    fn unknown_fields_rejected() {
        let dir = std::env::temp_dir().join("gridplan-io-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("unknown.json");
        let text = sample_json().replace("\"name\": \"sample\",", "\"name\": \"sample\", \"surprise\": 1,");
        fs::write(&path, text).unwrap();
        let err = parse_case_file(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn negative_capacity_rejected_with_context() {
        let dir = std::env::temp_dir().join("gridplan-io-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("negcap.json");
        let text = sample_json().replace("\"capacity_mw\": 100.0, \"status\": \"candidate\"", "\"capacity_mw\": -5.0, \"status\": \"candidate\"");
        fs::write(&path, text).unwrap();
        let err = load_case(&path).unwrap_err();
        match err {
            Error::Validation(report) => {
                assert!(report.violations.iter().any(|v| v.code == "nonpositive-capacity"));
            }
            other => panic!("expected validation failure, got {other}"),
        }
    }
}
