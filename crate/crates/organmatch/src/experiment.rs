//! Multi-seed experiments on generated scenarios.
//!
//! Seed `s` generates the instance with `generate_instance(config, s)` and
//! runs every mechanism on it with simulation seed `s`.

use num_rational::Ratio;
use organmatch_core::mechanisms::MechanismId;
use organmatch_core::population::{generate_instance, ScenarioConfig};
use organmatch_core::simulator::run_simulation;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::report::{mean_of_present, RationalValue, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRun {
    pub seed: u64,
    pub matched_count: usize,
    pub wasted_count: usize,
    pub total_cost: u64,
    pub mean_abs_diff: Option<RationalValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSeries {
    pub mechanism: String,
    pub seeds_with_matches: usize,
    /// Mean over seeds of the per-seed mean `|KDPI - EPTS|`.
    pub mean_abs_diff: Option<RationalValue>,
    pub runs: Vec<ExperimentRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: String,
    pub preset: String,
    pub patients: usize,
    pub organs: usize,
    pub horizon_days: u32,
    pub seeds: Vec<u64>,
    pub series: Vec<ExperimentSeries>,
}

impl ExperimentReport {
    pub fn series(&self, mechanism: MechanismId) -> Option<&ExperimentSeries> {
        self.series.iter().find(|s| s.mechanism == mechanism.name())
    }
}

pub fn run_experiment(config: &ScenarioConfig, seeds: &[u64], mechanisms: &[MechanismId]) -> Result<ExperimentReport, Error> {
    let instances = seeds
        .iter()
        .map(|&seed| generate_instance(config, seed).map(|i| (seed, i)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut series = Vec::new();
    for &mechanism in mechanisms {
        let mut runs = Vec::new();
        let mut means = Vec::new();
        for (seed, instance) in &instances {
            let allocation = run_simulation(instance, mechanism, *seed).allocation;
            let matched = allocation.matched_count();
            let mean = (matched > 0).then(|| Ratio::new(allocation.total_cost(), matched as u64));
            means.push(mean);
            runs.push(ExperimentRun {
                seed: *seed,
                matched_count: matched,
                wasted_count: instance.organs().len() - matched,
                total_cost: allocation.total_cost(),
                mean_abs_diff: mean.map(RationalValue::from_ratio),
            });
        }
        let (seeds_with_matches, mean) = mean_of_present(means);
        series.push(ExperimentSeries {
            mechanism: mechanism.name().into(),
            seeds_with_matches,
            mean_abs_diff: mean.as_ref().map(RationalValue::from_big),
            runs,
        });
    }
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION.into(),
        preset: config.preset.name().into(),
        patients: config.patient_count,
        organs: config.organ_count,
        horizon_days: config.horizon_days,
        seeds: seeds.to_vec(),
        series,
    })
}
