//! JSON reports.
//!
//! Keys appear in a fixed order, so equal inputs give byte-identical files.
//! Exact rationals are written as `{"exact": "p/q", "approx": 1.222222}`;
//! `approx` is rounded to 6 places for convenience and is not authoritative.
//! An unbounded competitive ratio is `{"exact": "inf", "approx": null}`.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;
use organmatch_core::axioms::{self, MisreportFinding};
use organmatch_core::mechanisms::MechanismId;
use organmatch_core::offline_oracle::{optimal_offline, ENUMERATION_LIMIT};
use organmatch_core::population::{Instance, Score};
use organmatch_core::simulator::{compute_metrics, run_simulation, CompetitiveRatio, Event, Metrics, Trace};
use organmatch_core::Allocation;
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalValue {
    pub exact: String,
    pub approx: Option<f64>,
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

impl RationalValue {
    pub fn from_ratio(r: Ratio<u64>) -> Self {
        Self { exact: format!("{}/{}", r.numer(), r.denom()), approx: Some(round6(*r.numer() as f64 / *r.denom() as f64)) }
    }

    pub fn from_big(r: &BigRational) -> Self {
        Self { exact: format!("{}/{}", r.numer(), r.denom()), approx: r.to_f64().map(round6) }
    }

    pub fn infinite() -> Self {
        Self { exact: "inf".into(), approx: None }
    }

    /// Parses the `exact` field back; `None` for `"inf"` or malformed text.
    pub fn to_big(&self) -> Option<BigRational> {
        let (p, q) = self.exact.split_once('/')?;
        let (p, q): (BigInt, BigInt) = (p.parse().ok()?, q.parse().ok()?);
        (q != BigInt::from(0)).then(|| BigRational::new(p, q))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub total_cost: u64,
    pub matched_count: usize,
    pub wasted_count: usize,
    pub mean_abs_diff: Option<RationalValue>,
    pub max_abs_diff: Option<u32>,
    pub mean_wait_days: Option<RationalValue>,
    pub competitive_ratio: Option<RationalValue>,
}

impl From<&Metrics> for MetricsRecord {
    fn from(m: &Metrics) -> Self {
        Self {
            total_cost: m.total_cost,
            matched_count: m.matched_count,
            wasted_count: m.wasted_count,
            mean_abs_diff: m.mean_abs_diff.map(RationalValue::from_ratio),
            max_abs_diff: m.max_abs_diff,
            mean_wait_days: m.mean_wait_days.map(RationalValue::from_ratio),
            competitive_ratio: m.competitive_ratio.map(|r| match r {
                CompetitiveRatio::Finite(r) => RationalValue::from_ratio(r),
                CompetitiveRatio::Infinite => RationalValue::infinite(),
            }),
        }
    }
}

/// Counts, arrival span and score histograms (ten bins of width ten; the
/// last bin also holds 100).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub patients: usize,
    pub organs: usize,
    pub first_day: Option<u32>,
    pub last_day: Option<u32>,
    pub epts_histogram: [u64; 10],
    pub kdpi_histogram: [u64; 10],
}

fn histogram(scores: impl Iterator<Item = Score>) -> [u64; 10] {
    let mut bins = [0; 10];
    for s in scores {
        bins[usize::from(s.get() / 10).min(9)] += 1;
    }
    bins
}

impl InstanceSummary {
    pub fn of(instance: &Instance) -> Self {
        let days = instance.patients().iter().map(|p| p.arrival_day).chain(instance.organs().iter().map(|o| o.arrival_day));
        Self {
            patients: instance.patients().len(),
            organs: instance.organs().len(),
            first_day: days.clone().min(),
            last_day: days.max(),
            epts_histogram: histogram(instance.patients().iter().map(|p| p.epts)),
            kdpi_histogram: histogram(instance.organs().iter().map(|o| o.kdpi)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OfflineSummary {
    pub matched_count: usize,
    pub total_cost: u64,
}

impl From<&Allocation> for OfflineSummary {
    fn from(a: &Allocation) -> Self {
        Self { matched_count: a.matched_count(), total_cost: a.total_cost() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    PatientArrival,
    OrganArrival,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub day: u32,
    pub kind: EventKind,
    pub subject: String,
    pub decision: Option<String>,
    pub cost: Option<u32>,
}

impl From<&Event> for DecisionRecord {
    fn from(e: &Event) -> Self {
        match e {
            Event::PatientArrival { day, patient } => Self {
                day: *day,
                kind: EventKind::PatientArrival,
                subject: patient.to_string(),
                decision: None,
                cost: None,
            },
            Event::OrganArrival { day, organ, decision, cost } => Self {
                day: *day,
                kind: EventKind::OrganArrival,
                subject: organ.to_string(),
                decision: decision.as_ref().map(ToString::to_string),
                cost: *cost,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    pub mechanism: String,
    pub seed: u64,
    pub instance: InstanceSummary,
    pub metrics: MetricsRecord,
    pub offline: OfflineSummary,
    pub wasted_organs: Vec<String>,
    pub decisions: Vec<DecisionRecord>,
}

impl RunReport {
    pub fn build(instance: &Instance, mechanism: MechanismId, seed: u64) -> Result<Self, Error> {
        let trace = run_simulation(instance, mechanism, seed);
        let offline = optimal_offline(instance);
        Self::from_parts(instance, mechanism, seed, &trace, &offline)
    }

    pub fn from_parts(
        instance: &Instance,
        mechanism: MechanismId,
        seed: u64,
        trace: &Trace,
        offline: &Allocation,
    ) -> Result<Self, Error> {
        let metrics = compute_metrics(trace, offline)?;
        Ok(Self {
            schema_version: SCHEMA_VERSION.into(),
            mechanism: mechanism.name().into(),
            seed,
            instance: InstanceSummary::of(instance),
            metrics: (&metrics).into(),
            offline: offline.into(),
            wasted_organs: trace.wasted_organs.iter().map(ToString::to_string).collect(),
            decisions: trace.events.iter().map(DecisionRecord::from).collect(),
        })
    }

    /// Metrics derived from the report's own decision records and offline
    /// summary, independently of the simulator.
    pub fn recompute_metrics(&self) -> MetricsRecord {
        let mut registered = std::collections::HashMap::new();
        let (mut total, mut matched, mut wasted, mut waits) = (0u64, 0u64, 0usize, 0u64);
        let mut max = None;
        for d in &self.decisions {
            match (d.kind, &d.decision, d.cost) {
                (EventKind::PatientArrival, _, _) => {
                    registered.insert(d.subject.as_str(), d.day);
                }
                (EventKind::OrganArrival, Some(p), Some(c)) => {
                    total += u64::from(c);
                    matched += 1;
                    max = max.max(Some(c));
                    waits += u64::from(d.day - registered[p.as_str()]);
                }
                (EventKind::OrganArrival, _, _) => wasted += 1,
            }
        }
        let mean = |sum: u64| (matched > 0).then(|| RationalValue::from_ratio(Ratio::new(sum, matched)));
        let ratio = (matched as usize == self.offline.matched_count).then(|| match (total, self.offline.total_cost) {
            (0, 0) => RationalValue::from_ratio(Ratio::from_integer(1)),
            (_, 0) => RationalValue::infinite(),
            (on, off) => RationalValue::from_ratio(Ratio::new(on, off)),
        });
        MetricsRecord {
            total_cost: total,
            matched_count: matched as usize,
            wasted_count: wasted,
            mean_abs_diff: mean(total),
            max_abs_diff: max,
            mean_wait_days: mean(waits),
            competitive_ratio: ratio,
        }
    }
}

/// Arithmetic mean over the values that exist.
pub fn mean_of_present(values: impl IntoIterator<Item = Option<Ratio<u64>>>) -> (usize, Option<BigRational>) {
    let mut sum = BigRational::from_integer(BigInt::from(0));
    let mut count = 0usize;
    for v in values.into_iter().flatten() {
        sum += BigRational::new(BigInt::from(*v.numer()), BigInt::from(*v.denom()));
        count += 1;
    }
    (count, (count > 0).then(|| sum / BigRational::from_integer(BigInt::from(count))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub metrics: MetricsRecord,
}

/// Mean of per-seed `mean_abs_diff` over seeds with at least one transplant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub seeds_with_matches: usize,
    pub mean_abs_diff: Option<RationalValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismComparison {
    pub mechanism: String,
    pub runs: Vec<SeedRun>,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema_version: String,
    pub seeds: Vec<u64>,
    pub instance: InstanceSummary,
    pub offline: OfflineSummary,
    pub mechanisms: Vec<MechanismComparison>,
}

impl CompareReport {
    /// Every mechanism (in name order) under every seed, against one
    /// offline optimum.
    pub fn build(instance: &Instance, seeds: &[u64]) -> Result<Self, Error> {
        let offline = optimal_offline(instance);
        let mut mechanisms = Vec::new();
        for mechanism in MechanismId::ALL {
            let mut runs = Vec::with_capacity(seeds.len());
            let mut means = Vec::with_capacity(seeds.len());
            for &seed in seeds {
                log::debug!("compare: {mechanism} seed {seed}");
                let metrics = compute_metrics(&run_simulation(instance, mechanism, seed), &offline)?;
                means.push(metrics.mean_abs_diff);
                runs.push(SeedRun { seed, metrics: (&metrics).into() });
            }
            let (seeds_with_matches, mean) = mean_of_present(means);
            mechanisms.push(MechanismComparison {
                mechanism: mechanism.name().into(),
                runs,
                aggregate: Aggregate { seeds_with_matches, mean_abs_diff: mean.as_ref().map(RationalValue::from_big) },
            });
        }
        Ok(Self {
            schema_version: SCHEMA_VERSION.into(),
            seeds: seeds.to_vec(),
            instance: InstanceSummary::of(instance),
            offline: (&offline).into(),
            mechanisms,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindingRecord {
    pub patient: String,
    pub true_epts: u8,
    pub reported_epts: u8,
    pub truthful_outcome: Option<u8>,
    pub misreport_outcome: Option<u8>,
    pub utility_gain: i32,
}

impl From<&MisreportFinding> for FindingRecord {
    fn from(f: &MisreportFinding) -> Self {
        Self {
            patient: f.patient.to_string(),
            true_epts: f.true_epts.get(),
            reported_epts: f.reported_epts.get(),
            truthful_outcome: f.truthful_outcome.map(Score::get),
            misreport_outcome: f.misreport_outcome.map(Score::get),
            utility_gain: f.utility_gain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomsReport {
    pub schema_version: String,
    pub mechanism: String,
    pub seed: u64,
    pub instance: InstanceSummary,
    pub patients_checked: usize,
    /// One entry per patient with a profitable misreport, in patient order.
    pub findings: Vec<FindingRecord>,
    pub swap_optimal: bool,
    /// `None` when the instance is too large for the exhaustive check.
    pub pareto_efficient: Option<bool>,
}

impl AxiomsReport {
    pub fn build(instance: &Instance, mechanism: MechanismId, seed: u64) -> Result<Self, Error> {
        let mut findings = Vec::new();
        for patient in instance.patients() {
            if let Some(f) = axioms::find_profitable_misreport(mechanism, instance, &patient.id, seed)? {
                findings.push((&f).into());
            }
        }
        let allocation = run_simulation(instance, mechanism, seed).allocation;
        let small = instance.organs().len().min(instance.patients().len()) <= ENUMERATION_LIMIT;
        let pareto_efficient = if small { Some(axioms::check_pareto_efficiency(&allocation, instance)?) } else { None };
        Ok(Self {
            schema_version: SCHEMA_VERSION.into(),
            mechanism: mechanism.name().into(),
            seed,
            instance: InstanceSummary::of(instance),
            patients_checked: instance.patients().len(),
            findings,
            swap_optimal: axioms::check_pairwise_swap_optimality(&allocation, instance)?,
            pareto_efficient,
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, report: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
