//! Optional TOML configuration.
//!
//! ```toml
//! [scenario]
//! donor_age_sd = 12.0
//! diabetes_prevalence = 0.25
//!
//! [scoring]
//! donor_diabetic = 15.0
//! recipient_dialysis_year = 3.0
//! ```
//!
//! Every key is optional; unset keys keep the preset's value. Unknown keys
//! are rejected.

use std::fs;
use std::path::Path;

use organmatch_core::population::ScenarioConfig;
use serde::Deserialize;

use crate::error::Error;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub scenario: ScenarioOverrides,
    #[serde(default)]
    pub scoring: ScoringOverrides,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOverrides {
    pub patients: Option<usize>,
    pub organs: Option<usize>,
    pub horizon_days: Option<u32>,
    pub donor_age_mean: Option<f64>,
    pub donor_age_sd: Option<f64>,
    pub donor_min_age: Option<f64>,
    pub donor_max_age: Option<f64>,
    pub recipient_age_mean: Option<f64>,
    pub recipient_age_sd: Option<f64>,
    pub recipient_min_age: Option<f64>,
    pub recipient_max_age: Option<f64>,
    pub diabetes_prevalence: Option<f64>,
    pub dialysis_years_mean: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScoringOverrides {
    pub donor_age: Option<f64>,
    pub donor_diabetic: Option<f64>,
    pub recipient_age: Option<f64>,
    pub recipient_diabetic: Option<f64>,
    pub recipient_dialysis_year: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|source| Error::Config { path: path.into(), source })
    }

    pub fn apply(&self, config: &mut ScenarioConfig) {
        let s = &self.scenario;
        set(&mut config.patient_count, s.patients);
        set(&mut config.organ_count, s.organs);
        set(&mut config.horizon_days, s.horizon_days);
        set(&mut config.donor_age_mean, s.donor_age_mean);
        set(&mut config.donor_age_sd, s.donor_age_sd);
        set(&mut config.donor_min_age, s.donor_min_age);
        set(&mut config.donor_max_age, s.donor_max_age);
        set(&mut config.recipient_age_mean, s.recipient_age_mean);
        set(&mut config.recipient_age_sd, s.recipient_age_sd);
        set(&mut config.recipient_min_age, s.recipient_min_age);
        set(&mut config.recipient_max_age, s.recipient_max_age);
        set(&mut config.diabetes_prevalence, s.diabetes_prevalence);
        set(&mut config.dialysis_years_mean, s.dialysis_years_mean);
        let w = &self.scoring;
        let weights = &mut config.weights;
        set(&mut weights.donor_age, w.donor_age);
        set(&mut weights.donor_diabetic, w.donor_diabetic);
        set(&mut weights.recipient_age, w.recipient_age);
        set(&mut weights.recipient_diabetic, w.recipient_diabetic);
        set(&mut weights.recipient_dialysis_year, w.recipient_dialysis_year);
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}
