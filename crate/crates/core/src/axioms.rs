//! Exhaustive checks of efficiency and manipulability on small instances.
//!
//! A patient values a transplant at `-|kdpi - true epts|` and being left
//! unmatched at `-101`, strictly below any transplant.

use alloc::vec;
use alloc::vec::Vec;

use crate::allocation::Allocation;
use crate::error::Error;
use crate::mechanisms::MechanismId;
use crate::offline_oracle::for_each_feasible_allocation;
use crate::population::{Instance, PatientId, Score};
use crate::simulator::run_simulation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PatientUtility(pub i32);

impl PatientUtility {
    pub const UNMATCHED: PatientUtility = PatientUtility(-101);

    pub fn of(true_epts: Score, assigned_kdpi: Option<Score>) -> Self {
        match assigned_kdpi {
            Some(kdpi) => PatientUtility(-(kdpi.distance(true_epts) as i32)),
            None => Self::UNMATCHED,
        }
    }
}

/// A strictly profitable EPTS misreport.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisreportFinding {
    pub patient: PatientId,
    pub true_epts: Score,
    pub reported_epts: Score,
    /// KDPI of the organ received when reporting truthfully.
    pub truthful_outcome: Option<Score>,
    pub misreport_outcome: Option<Score>,
    pub utility_gain: i32,
}

fn received_kdpi(instance: &Instance, allocation: &Allocation, patient: &PatientId) -> Option<Score> {
    let organ = allocation.organ_of(patient)?;
    Some(instance.organ(organ).expect("allocation built from this instance").kdpi)
}

/// Tries every report in `0..=100` other than the truth, lowest first, and
/// returns the first one that strictly raises the patient's true utility.
pub fn find_profitable_misreport(
    mechanism: MechanismId,
    instance: &Instance,
    patient: &PatientId,
    seed: u64,
) -> Result<Option<MisreportFinding>, Error> {
    let true_epts = instance
        .patient(patient)
        .ok_or_else(|| Error::UnknownPatient(patient.as_str().into()))?
        .epts;
    let truthful = run_simulation(instance, mechanism, seed);
    let truthful_outcome = received_kdpi(instance, &truthful.allocation, patient);
    let truthful_utility = PatientUtility::of(true_epts, truthful_outcome);

    for report in (0..=i64::from(Score::MAX)).filter_map(Score::new) {
        if report == true_epts {
            continue;
        }
        let misreported = instance.with_reported_epts(patient, report)?;
        let trace = run_simulation(&misreported, mechanism, seed);
        let outcome = received_kdpi(instance, &trace.allocation, patient);
        let utility = PatientUtility::of(true_epts, outcome);
        if utility > truthful_utility {
            return Ok(Some(MisreportFinding {
                patient: patient.clone(),
                true_epts,
                reported_epts: report,
                truthful_outcome,
                misreport_outcome: outcome,
                utility_gain: utility.0 - truthful_utility.0,
            }));
        }
    }
    Ok(None)
}

/// True iff no two matched pairs can exchange patients (respecting arrival
/// order) for a strictly smaller combined cost.
pub fn check_pairwise_swap_optimality(allocation: &Allocation, instance: &Instance) -> Result<bool, Error> {
    allocation.check_feasible(instance)?;
    let resolved: Vec<_> = allocation
        .pairs()
        .iter()
        .map(|p| (instance.organ(&p.organ).unwrap(), instance.patient(&p.patient).unwrap()))
        .collect();
    for (i, &(o1, p1)) in resolved.iter().enumerate() {
        for &(o2, p2) in &resolved[i + 1..] {
            if !(o1.is_feasible_for(p2) && o2.is_feasible_for(p1)) {
                continue;
            }
            if o1.cost(p2) + o2.cost(p1) < o1.cost(p1) + o2.cost(p2) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff no feasible allocation leaves every patient at least as well off
/// and some patient strictly better off. Exhaustive; the smaller side must
/// not exceed [`crate::offline_oracle::ENUMERATION_LIMIT`].
pub fn check_pareto_efficiency(allocation: &Allocation, instance: &Instance) -> Result<bool, Error> {
    allocation.check_feasible(instance)?;
    let patients = instance.patients();
    let organs = instance.organs();
    let current: Vec<PatientUtility> = patients
        .iter()
        .map(|p| PatientUtility::of(p.epts, received_kdpi(instance, allocation, &p.id)))
        .collect();

    let mut dominated = false;
    let mut utilities = vec![PatientUtility::UNMATCHED; patients.len()];
    for_each_feasible_allocation(instance, |pairs| {
        if dominated {
            return;
        }
        utilities.fill(PatientUtility::UNMATCHED);
        for &(o, p) in pairs {
            utilities[p] = PatientUtility::of(patients[p].epts, Some(organs[o].kdpi));
        }
        let weakly = utilities.iter().zip(&current).all(|(alt, cur)| alt >= cur);
        let strictly = utilities.iter().zip(&current).any(|(alt, cur)| alt > cur);
        dominated = weakly && strictly;
    })?;
    Ok(!dominated)
}
