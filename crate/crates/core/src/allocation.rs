use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::population::{Instance, OrganId, PatientId};

/// One transplant: `cost = |kdpi - epts|`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub organ: OrganId,
    pub patient: PatientId,
    pub cost: u32,
}

/// A partial matching of organs to patients. Pairs are kept sorted by
/// `(organ id, patient id)`, which is also the order used to compare pair
/// sets lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Allocation {
    pairs: Vec<Pair>,
}

impl Allocation {
    pub fn new(mut pairs: Vec<Pair>) -> Self {
        pairs.sort();
        Self { pairs }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn matched_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn total_cost(&self) -> u64 {
        self.pairs.iter().map(|p| u64::from(p.cost)).sum()
    }

    pub fn patient_of(&self, organ: &OrganId) -> Option<&PatientId> {
        self.pairs.iter().find(|p| &p.organ == organ).map(|p| &p.patient)
    }

    pub fn organ_of(&self, patient: &PatientId) -> Option<&OrganId> {
        self.pairs.iter().find(|p| &p.patient == patient).map(|p| &p.organ)
    }

    /// Structural check against `instance`: known ids, each used at most
    /// once, patient registered no later than the organ, and costs that
    /// match the scores.
    pub fn check_feasible(&self, instance: &Instance) -> Result<(), Error> {
        let mut organs = BTreeSet::new();
        let mut patients = BTreeSet::new();
        for pair in &self.pairs {
            let organ = instance
                .organ(&pair.organ)
                .ok_or_else(|| Error::InfeasibleAllocation(format!("unknown organ `{}`", pair.organ)))?;
            let patient = instance
                .patient(&pair.patient)
                .ok_or_else(|| Error::InfeasibleAllocation(format!("unknown patient `{}`", pair.patient)))?;
            if !organs.insert(&pair.organ) {
                return Err(Error::InfeasibleAllocation(format!("organ `{}` used twice", pair.organ)));
            }
            if !patients.insert(&pair.patient) {
                return Err(Error::InfeasibleAllocation(format!("patient `{}` matched twice", pair.patient)));
            }
            if !organ.is_feasible_for(patient) {
                return Err(Error::InfeasibleAllocation(format!(
                    "patient `{}` arrives after organ `{}`",
                    pair.patient, pair.organ
                )));
            }
            if organ.cost(patient) != pair.cost {
                return Err(Error::InfeasibleAllocation(format!(
                    "cost of ({}, {}) should be {}",
                    pair.organ,
                    pair.patient,
                    organ.cost(patient)
                )));
            }
        }
        Ok(())
    }
}
