//! Scenario files: a flat JSON object whose field names mirror the model
//! symbols in ASCII, with an optional sweep block and optional reference
//! `eta` values that are checked against the commuting rates on load.

use std::fs;
use std::path::Path;

use commuter_sir::{eta, EpidemicParams, MobilityParams, PopulationSplit, Scenario};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Stated reference etas further than this from the rate-derived values
/// produce a load warning.
const ETA_WARN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub beta1: f64,
    pub beta2: f64,
    pub gamma: f64,
    pub lambda1: f64,
    pub mu1: f64,
    pub lambda2: f64,
    pub mu2: f64,
    #[serde(rename = "N1r")]
    pub n1r: f64,
    #[serde(rename = "N1c")]
    pub n1c: f64,
    #[serde(rename = "N2r")]
    pub n2r: f64,
    #[serde(rename = "N2c")]
    pub n2c: f64,
    /// Reference commuting fractions, when the source that defined the
    /// scenario also stated them; checked against the rates on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub p1_points: usize,
    pub p2_points: usize,
}

/// A validated scenario plus everything the file carried around it.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub sweep: Option<SweepBlock>,
    pub warnings: Vec<String>,
}

impl ScenarioFile {
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let ep = scenario.epidemic();
        let mo = scenario.mobility();
        let pop = scenario.population();
        Self {
            beta1: ep.beta1(),
            beta2: ep.beta2(),
            gamma: ep.gamma(),
            lambda1: mo.lambda1(),
            mu1: mo.mu1(),
            lambda2: mo.lambda2(),
            mu2: mo.mu2(),
            n1r: pop.n1r(),
            n1c: pop.n1c(),
            n2r: pop.n2r(),
            n2c: pop.n2c(),
            eta1: None,
            eta2: None,
            sweep: None,
        }
    }

    /// Builds the validated scenario and collects load warnings.
    pub fn into_loaded(self) -> Result<LoadedScenario, CliError> {
        let epidemic = EpidemicParams::new(self.beta1, self.beta2, self.gamma)?;
        let mobility = MobilityParams::new(self.lambda1, self.mu1, self.lambda2, self.mu2)?;
        let population = PopulationSplit::new(self.n1r, self.n1c, self.n2r, self.n2c)?;
        let scenario = Scenario::new(epidemic, mobility, population)?;
        if let Some(sweep) = self.sweep {
            if sweep.p1_points < 2 || sweep.p2_points < 2 {
                return Err(CliError::Validation(format!(
                    "sweep resolutions must be >= 2, got {}x{}",
                    sweep.p1_points, sweep.p2_points
                )));
            }
        }

        let mut warnings = Vec::new();
        let computed = eta(scenario.mobility());
        for (name, stated, derived) in [
            ("eta1", self.eta1, computed.eta1),
            ("eta2", self.eta2, computed.eta2),
        ] {
            if let Some(stated) = stated {
                if (stated - derived).abs() > ETA_WARN_TOL {
                    warnings.push(format!(
                        "{name} stated as {stated} but the commuting rates give {derived:.9}; \
                         using the rate-derived value"
                    ));
                }
            }
        }
        Ok(LoadedScenario { scenario, sweep: self.sweep, warnings })
    }
}

pub fn parse_scenario_str(contents: &str) -> Result<LoadedScenario, CliError> {
    let file: ScenarioFile = serde_json::from_str(contents).map_err(|e| {
        CliError::Validation(format!(
            "scenario parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    file.into_loaded()
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario, CliError> {
    let contents = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_scenario_str(&contents)
        .map_err(|e| match e {
            CliError::Validation(msg) => {
                CliError::Validation(format!("{}: {msg}", path.display()))
            }
            other => other,
        })
}
