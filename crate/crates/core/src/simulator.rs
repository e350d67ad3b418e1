//! Replays an instance's arrivals through an online mechanism.
//!
//! Events are processed by day; within a day all patient registrations come
//! before organ arrivals, and within a kind ids ascend. Each organ is
//! allocated (or wasted) the moment it arrives and matched patients leave the
//! waitlist immediately.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::allocation::{Allocation, Pair};
use crate::error::Error;
use crate::mechanisms::{MechanismId, WaitlistState};
use crate::population::{Instance, OrganId, PatientId};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    PatientArrival { day: u32, patient: PatientId },
    OrganArrival { day: u32, organ: OrganId, decision: Option<PatientId>, cost: Option<u32> },
}

impl Event {
    pub fn day(&self) -> u32 {
        match self {
            Event::PatientArrival { day, .. } | Event::OrganArrival { day, .. } => *day,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<Event>,
    pub allocation: Allocation,
    pub wasted_organs: Vec<OrganId>,
}

/// Runs `mechanism` over `instance`. The random mechanism draws from the
/// stream labelled with the mechanism name under `seed`; the other
/// mechanisms ignore the seed.
pub fn run_simulation(instance: &Instance, mechanism: MechanismId, seed: u64) -> Trace {
    let mut stream = rng::stream(seed, mechanism.name());
    let patients = instance.patients();
    let organs = instance.organs();
    let mut state = WaitlistState::new(0);
    let mut events = Vec::with_capacity(patients.len() + organs.len());
    let mut pairs = Vec::new();
    let mut wasted_organs = Vec::new();
    let (mut next_patient, mut next_organ) = (0, 0);

    while next_patient < patients.len() || next_organ < organs.len() {
        let patient_first = match (patients.get(next_patient), organs.get(next_organ)) {
            (Some(p), Some(o)) => p.arrival_day <= o.arrival_day,
            (Some(_), None) => true,
            _ => false,
        };
        if patient_first {
            let patient = &patients[next_patient];
            next_patient += 1;
            state.advance_to(patient.arrival_day);
            state.register(patient.clone());
            events.push(Event::PatientArrival { day: patient.arrival_day, patient: patient.id.clone() });
        } else {
            let organ = &organs[next_organ];
            next_organ += 1;
            state.advance_to(organ.arrival_day);
            let decision = mechanism.assign(organ, &state, &mut stream);
            let cost = match &decision {
                Some(id) => {
                    let patient = state.remove(id).expect("mechanism chose a waiting patient");
                    let cost = organ.cost(&patient);
                    pairs.push(Pair { organ: organ.id.clone(), patient: patient.id, cost });
                    Some(cost)
                }
                None => {
                    wasted_organs.push(organ.id.clone());
                    None
                }
            };
            events.push(Event::OrganArrival { day: organ.arrival_day, organ: organ.id.clone(), decision, cost });
        }
    }

    Trace { events, allocation: Allocation::new(pairs), wasted_organs }
}

/// Online cost over offline cost at equal cardinality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompetitiveRatio {
    Finite(Ratio<u64>),
    /// Offline cost is zero but the online cost is not.
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metrics {
    pub total_cost: u64,
    pub matched_count: usize,
    pub wasted_count: usize,
    pub mean_abs_diff: Option<Ratio<u64>>,
    pub max_abs_diff: Option<u32>,
    /// Days between registration and transplant, over matched patients.
    pub mean_wait_days: Option<Ratio<u64>>,
    /// `None` when the online and offline allocations differ in size.
    pub competitive_ratio: Option<CompetitiveRatio>,
}

pub fn competitive_ratio(online: &Allocation, offline: &Allocation) -> Option<CompetitiveRatio> {
    if online.matched_count() != offline.matched_count() {
        return None;
    }
    let (on, off) = (online.total_cost(), offline.total_cost());
    Some(match (on, off) {
        (0, 0) => CompetitiveRatio::Finite(Ratio::from_integer(1)),
        (_, 0) => CompetitiveRatio::Infinite,
        _ => CompetitiveRatio::Finite(Ratio::new(on, off)),
    })
}

pub fn compute_metrics(trace: &Trace, offline: &Allocation) -> Result<Metrics, Error> {
    let mut registered = BTreeMap::new();
    let mut organ_ids = BTreeSet::new();
    let mut waits = 0u64;
    for event in &trace.events {
        match event {
            Event::PatientArrival { day, patient } => {
                registered.insert(patient, *day);
            }
            Event::OrganArrival { day, organ, decision, .. } => {
                organ_ids.insert(organ);
                if let Some(patient) = decision {
                    let since = registered
                        .get(patient)
                        .ok_or_else(|| Error::ProvenanceMismatch(format!("`{patient}` matched before arriving")))?;
                    waits += u64::from(day - since);
                }
            }
        }
    }
    for pair in offline.pairs() {
        if !organ_ids.contains(&pair.organ) {
            return Err(Error::ProvenanceMismatch(format!("organ `{}` is not in the trace", pair.organ)));
        }
        if !registered.contains_key(&pair.patient) {
            return Err(Error::ProvenanceMismatch(format!("patient `{}` is not in the trace", pair.patient)));
        }
    }

    let online = &trace.allocation;
    let matched = online.matched_count();
    let total_cost = online.total_cost();
    let mean = |sum: u64| (matched > 0).then(|| Ratio::new(sum, matched as u64));
    Ok(Metrics {
        total_cost,
        matched_count: matched,
        wasted_count: trace.wasted_organs.len(),
        mean_abs_diff: mean(total_cost),
        max_abs_diff: online.pairs().iter().map(|p| p.cost).max(),
        mean_wait_days: mean(waits),
        competitive_ratio: competitive_ratio(online, offline),
    })
}
