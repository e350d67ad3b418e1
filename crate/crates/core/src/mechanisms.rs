//! Online allocation rules.
//!
//! Each rule sees one arriving organ and the current waitlist and returns at
//! most one waiting patient. An organ arriving to an empty waitlist is wasted.
//! All ties are broken by `(arrival_day, id)`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::population::{Organ, Patient, PatientId};
use crate::rng::{bounded_index, RngCore};

/// Patients that have arrived and are not yet matched, in `(arrival_day, id)`
/// order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WaitlistState {
    waiting: Vec<Patient>,
    current_day: u32,
}

impl WaitlistState {
    pub fn new(current_day: u32) -> Self {
        Self { waiting: Vec::new(), current_day }
    }

    /// Builds a state from arbitrary patients; they are sorted and must all
    /// have arrived by `current_day`.
    pub fn from_patients(current_day: u32, mut waiting: Vec<Patient>) -> Self {
        assert!(waiting.iter().all(|p| p.arrival_day <= current_day), "patient from the future");
        waiting.sort_by(|a, b| tie_key(a).cmp(&tie_key(b)));
        Self { waiting, current_day }
    }

    pub fn waiting(&self) -> &[Patient] {
        &self.waiting
    }

    pub fn len(&self) -> usize {
        self.waiting.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waiting.is_empty()
    }

    pub fn current_day(&self) -> u32 {
        self.current_day
    }

    pub fn advance_to(&mut self, day: u32) {
        assert!(day >= self.current_day, "time runs forward");
        self.current_day = day;
    }

    pub fn register(&mut self, patient: Patient) {
        assert!(patient.arrival_day <= self.current_day, "patient from the future");
        let at = self.waiting.partition_point(|p| tie_key(p) < tie_key(&patient));
        self.waiting.insert(at, patient);
    }

    /// Removes and returns the matched patient.
    pub fn remove(&mut self, id: &PatientId) -> Option<Patient> {
        let at = self.waiting.iter().position(|p| &p.id == id)?;
        Some(self.waiting.remove(at))
    }
}

fn tie_key(p: &Patient) -> (u32, &PatientId) {
    (p.arrival_day, &p.id)
}

/// Longest-waiting patient; scores are ignored.
pub fn fifo_assign(_organ: &Organ, state: &WaitlistState) -> Option<PatientId> {
    state.waiting.first().map(|p| p.id.clone())
}

/// Patient with the smallest `|kdpi - epts|`.
pub fn greedy_assign(organ: &Organ, state: &WaitlistState) -> Option<PatientId> {
    // waiting is in tie-break order and min_by_key keeps the first minimum
    state.waiting.iter().min_by_key(|p| organ.cost(p)).map(|p| p.id.clone())
}

/// Maps the organ's percentile onto the waitlist's EPTS ranking: with `n`
/// patients ordered by `(epts, arrival_day, id)`, picks index
/// `round_half_up(kdpi / 100 * (n - 1))`.
pub fn rank_assign(organ: &Organ, state: &WaitlistState) -> Option<PatientId> {
    let n = state.waiting.len();
    if n == 0 {
        return None;
    }
    let mut ranked: Vec<&Patient> = state.waiting.iter().collect();
    ranked.sort_by_key(|p| (p.epts, p.arrival_day, &p.id));
    let numerator = usize::from(organ.kdpi.get()) * (n - 1);
    // floor(numerator / 100 + 1/2)
    let index = (2 * numerator + 100) / 200;
    Some(ranked[index].id.clone())
}

/// Uniform over the waitlist using exactly one draw from `rng`; no draw is
/// taken when the waitlist is empty.
pub fn random_assign(_organ: &Organ, state: &WaitlistState, rng: &mut impl RngCore) -> Option<PatientId> {
    if state.waiting.is_empty() {
        return None;
    }
    let index = bounded_index(rng, state.waiting.len());
    Some(state.waiting[index].id.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MechanismId {
    Fifo,
    Greedy,
    Rank,
    Random,
}

impl MechanismId {
    /// All mechanisms in name order.
    pub const ALL: [MechanismId; 4] = [MechanismId::Fifo, MechanismId::Greedy, MechanismId::Random, MechanismId::Rank];

    pub fn name(self) -> &'static str {
        match self {
            MechanismId::Fifo => "fifo",
            MechanismId::Greedy => "greedy",
            MechanismId::Rank => "rank",
            MechanismId::Random => "random",
        }
    }

    pub fn assign(self, organ: &Organ, state: &WaitlistState, rng: &mut impl RngCore) -> Option<PatientId> {
        match self {
            MechanismId::Fifo => fifo_assign(organ, state),
            MechanismId::Greedy => greedy_assign(organ, state),
            MechanismId::Rank => rank_assign(organ, state),
            MechanismId::Random => random_assign(organ, state, rng),
        }
    }
}

impl fmt::Display for MechanismId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMechanism;

impl fmt::Display for UnknownMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown mechanism (valid: fifo, greedy, random, rank)")
    }
}

impl core::error::Error for UnknownMechanism {}

impl FromStr for MechanismId {
    type Err = UnknownMechanism;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MechanismId::ALL.into_iter().find(|m| m.name() == s).ok_or(UnknownMechanism)
    }
}
