//! Patients, organs, instances and synthetic scenario generation.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_distr::{Bernoulli, Distribution, Exp, Normal};

use crate::error::Error;
use crate::rng;
use crate::scoring::{Cohort, DonorProfile, RecipientProfile, ScoringWeights};

/// An integer percentile score in `0..=100` (KDPI or EPTS).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(u8);

impl Score {
    pub const MAX: u8 = 100;

    pub fn new(value: i64) -> Option<Self> {
        (0..=i64::from(Self::MAX)).contains(&value).then_some(Self(value as u8))
    }

    pub(crate) fn new_unchecked(value: u8) -> Self {
        debug_assert!(value <= Self::MAX);
        Self(value)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// `|self - other|`, the cost of pairing an organ with a patient.
    pub fn distance(self, other: Score) -> u32 {
        u32::from(self.0.abs_diff(other.0))
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_id(id: &str) -> Result<(), Error> {
    let ok = !id.is_empty()
        && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-');
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidId(id.to_string()))
    }
}

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: &str) -> Result<Self, Error> {
                check_id(id)?;
                Ok(Self(id.to_string()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

id_type!(PatientId);
id_type!(OrganId);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patient {
    pub id: PatientId,
    pub arrival_day: u32,
    pub epts: Score,
}

impl Patient {
    pub fn new(id: &str, arrival_day: u32, epts: i64) -> Result<Self, Error> {
        let id = PatientId::new(id)?;
        let epts = Score::new(epts)
            .ok_or_else(|| Error::ScoreOutOfRange { id: id.to_string(), score: epts })?;
        Ok(Self { id, arrival_day, epts })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Organ {
    pub id: OrganId,
    pub arrival_day: u32,
    pub kdpi: Score,
}

impl Organ {
    pub fn new(id: &str, arrival_day: u32, kdpi: i64) -> Result<Self, Error> {
        let id = OrganId::new(id)?;
        let kdpi = Score::new(kdpi)
            .ok_or_else(|| Error::ScoreOutOfRange { id: id.to_string(), score: kdpi })?;
        Ok(Self { id, arrival_day, kdpi })
    }

    /// Cost of transplanting this organ into `patient`.
    pub fn cost(&self, patient: &Patient) -> u32 {
        self.kdpi.distance(patient.epts)
    }

    /// A patient is eligible if registered on or before the organ's day.
    pub fn is_feasible_for(&self, patient: &Patient) -> bool {
        patient.arrival_day <= self.arrival_day
    }
}

/// A validated instance: both lists sorted by `(arrival_day, id)` with
/// unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Instance {
    patients: Vec<Patient>,
    organs: Vec<Organ>,
}

impl Instance {
    pub fn new(patients: Vec<Patient>, organs: Vec<Organ>) -> Result<Self, Error> {
        validate_instance(patients, organs)
    }

    pub fn patients(&self) -> &[Patient] {
        &self.patients
    }

    pub fn organs(&self) -> &[Organ] {
        &self.organs
    }

    pub fn patient(&self, id: &PatientId) -> Option<&Patient> {
        self.patients.iter().find(|p| &p.id == id)
    }

    pub fn organ(&self, id: &OrganId) -> Option<&Organ> {
        self.organs.iter().find(|o| &o.id == id)
    }

    pub fn into_parts(self) -> (Vec<Patient>, Vec<Organ>) {
        (self.patients, self.organs)
    }

    /// Same instance with one patient's EPTS replaced.
    pub fn with_reported_epts(&self, id: &PatientId, epts: Score) -> Result<Self, Error> {
        let mut patients = self.patients.clone();
        let patient = patients
            .iter_mut()
            .find(|p| &p.id == id)
            .ok_or_else(|| Error::UnknownPatient(id.to_string()))?;
        patient.epts = epts;
        Ok(Self { patients, organs: self.organs.clone() })
    }
}

/// Sorts both lists stably by `(arrival_day, id)` and rejects duplicate ids.
/// Scores are range-checked when patients and organs are constructed.
pub fn validate_instance(mut patients: Vec<Patient>, mut organs: Vec<Organ>) -> Result<Instance, Error> {
    let mut seen = BTreeSet::new();
    for p in &patients {
        if !seen.insert(p.id.as_str()) {
            return Err(Error::DuplicateId(p.id.to_string()));
        }
    }
    let mut seen = BTreeSet::new();
    for o in &organs {
        if !seen.insert(o.id.as_str()) {
            return Err(Error::DuplicateId(o.id.to_string()));
        }
    }
    patients.sort_by(|a, b| (a.arrival_day, &a.id).cmp(&(b.arrival_day, &b.id)));
    organs.sort_by(|a, b| (a.arrival_day, &a.id).cmp(&(b.arrival_day, &b.id)));
    Ok(Instance { patients, organs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Era1989,
    Era2014,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Era1989, Preset::Era2014, Preset::Custom];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Era1989 => "era1989",
            Preset::Era2014 => "era2014",
            Preset::Custom => "custom",
        }
    }
}

impl core::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or(Error::InvalidConfig("unknown preset (expected era1989, era2014 or custom)"))
    }
}

/// Parameters of a synthetic scenario.
///
/// Age means are the means of the generated (clipped) ages, not the location
/// of the underlying normal; see [`ClippedNormal::calibrated`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub preset: Preset,
    pub patient_count: usize,
    pub organ_count: usize,
    pub horizon_days: u32,
    pub donor_age_mean: f64,
    pub donor_age_sd: f64,
    pub donor_min_age: f64,
    pub donor_max_age: f64,
    pub recipient_age_mean: f64,
    pub recipient_age_sd: f64,
    pub recipient_min_age: f64,
    pub recipient_max_age: f64,
    pub diabetes_prevalence: f64,
    pub dialysis_years_mean: f64,
    pub weights: ScoringWeights,
}

impl ScenarioConfig {
    /// Defaults for a preset: 500 patients, 400 organs, 365 days.
    ///
    /// * `era1989`: donor age mean 32, maximum 69.
    /// * `era2014` and `custom`: donor age mean 46, maximum 80.
    ///
    /// Donor ages have sd 15 and are clipped below at 18. Recipients: mean 50,
    /// sd 13, clipped to `[18, 80]`; diabetes prevalence 0.2 and mean 3 years
    /// of dialysis.
    pub fn preset(preset: Preset) -> Self {
        let (donor_age_mean, donor_max_age) = match preset {
            Preset::Era1989 => (32.0, 69.0),
            Preset::Era2014 | Preset::Custom => (46.0, 80.0),
        };
        Self {
            preset,
            patient_count: 500,
            organ_count: 400,
            horizon_days: 365,
            donor_age_mean,
            donor_age_sd: 15.0,
            donor_min_age: 18.0,
            donor_max_age,
            recipient_age_mean: 50.0,
            recipient_age_sd: 13.0,
            recipient_min_age: 18.0,
            recipient_max_age: 80.0,
            diabetes_prevalence: 0.2,
            dialysis_years_mean: 3.0,
            weights: ScoringWeights::default(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.horizon_days == 0 {
            return Err(Error::InvalidConfig("horizon must be at least one day"));
        }
        if !(0.0..=1.0).contains(&self.diabetes_prevalence) {
            return Err(Error::InvalidConfig("diabetes prevalence must lie in [0, 1]"));
        }
        if !(self.dialysis_years_mean.is_finite() && self.dialysis_years_mean >= 0.0) {
            return Err(Error::InvalidConfig("dialysis mean must be finite and non-negative"));
        }
        self.donor_ages()?;
        self.recipient_ages()?;
        self.weights.validate()
    }

    fn donor_ages(&self) -> Result<ClippedNormal, Error> {
        ClippedNormal::calibrated(self.donor_age_mean, self.donor_age_sd, self.donor_min_age, self.donor_max_age)
    }

    fn recipient_ages(&self) -> Result<ClippedNormal, Error> {
        ClippedNormal::calibrated(
            self.recipient_age_mean,
            self.recipient_age_sd,
            self.recipient_min_age,
            self.recipient_max_age,
        )
    }
}

/// A normal distribution whose samples are clamped into `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClippedNormal {
    location: f64,
    sd: f64,
    min: f64,
    max: f64,
}

impl ClippedNormal {
    /// Chooses the location so that the mean of the *clipped* variable equals
    /// `target_mean`. Clipping alone moves the mean (mean 32, sd 15 clipped at
    /// 18 has mean ~33.4), so the location is solved by bisection on the
    /// closed-form clipped mean, which is increasing in the location.
    pub fn calibrated(target_mean: f64, sd: f64, min: f64, max: f64) -> Result<Self, Error> {
        let finite = [target_mean, sd, min, max].iter().all(|v| v.is_finite());
        if !finite || sd < 0.0 {
            return Err(Error::InvalidConfig("age distribution parameters must be finite with sd >= 0"));
        }
        if !(0.0 <= min && min <= max && max <= 130.0) {
            return Err(Error::InvalidConfig("age bounds must satisfy 0 <= min <= max <= 130"));
        }
        if sd == 0.0 || min == max {
            if !(min..=max).contains(&target_mean) {
                return Err(Error::InvalidConfig("age mean must lie within the age bounds"));
            }
            return Ok(Self { location: target_mean, sd, min, max });
        }
        if !(min < target_mean && target_mean < max) {
            return Err(Error::InvalidConfig("age mean must lie strictly inside the age bounds"));
        }
        let mut lo = min - 40.0 * sd;
        let mut hi = max + 40.0 * sd;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if clipped_mean(mid, sd, min, max) < target_mean {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Self { location: 0.5 * (lo + hi), sd, min, max })
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    /// Mean of the clipped variable.
    pub fn mean(&self) -> f64 {
        if self.sd == 0.0 {
            return self.location.clamp(self.min, self.max);
        }
        clipped_mean(self.location, self.sd, self.min, self.max)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.sd == 0.0 {
            return self.location.clamp(self.min, self.max);
        }
        let normal = Normal::new(self.location, self.sd).expect("sd validated positive");
        normal.sample(rng).clamp(self.min, self.max)
    }
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * core::f64::consts::PI)
}

// E[clamp(X, a, b)] for X ~ N(mu, sd^2)
fn clipped_mean(mu: f64, sd: f64, a: f64, b: f64) -> f64 {
    let alpha = (a - mu) / sd;
    let beta = (b - mu) / sd;
    let (cdf_a, cdf_b) = (std_normal_cdf(alpha), std_normal_cdf(beta));
    a * cdf_a + b * (1.0 - cdf_b) + mu * (cdf_b - cdf_a) + sd * (std_normal_pdf(alpha) - std_normal_pdf(beta))
}

/// A generated instance together with the profiles its scores came from,
/// in generation order (id order).
#[derive(Debug, Clone)]
pub struct Scenario {
    pub instance: Instance,
    pub donors: Vec<(OrganId, DonorProfile)>,
    pub recipients: Vec<(PatientId, RecipientProfile)>,
}

fn padded_id(prefix: char, index: usize, count: usize) -> String {
    let width = count.max(1).ilog10() as usize + 1;
    format!("{prefix}{:0width$}", index + 1)
}

/// Draws a scenario. Donors and recipients use the independent streams
/// `"donors"` and `"recipients"` of `seed` (see [`crate::rng`]); per donor the
/// draws are age, diabetes, arrival day; per recipient age, diabetes,
/// dialysis years, arrival day. KDPI and EPTS are percentiles against the
/// generated donor and recipient cohorts respectively.
pub fn generate_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario, Error> {
    config.validate()?;
    let donor_ages = config.donor_ages()?;
    let recipient_ages = config.recipient_ages()?;
    let diabetes = Bernoulli::new(config.diabetes_prevalence)
        .map_err(|_| Error::InvalidConfig("diabetes prevalence must lie in [0, 1]"))?;
    let dialysis = (config.dialysis_years_mean > 0.0)
        .then(|| Exp::new(1.0 / config.dialysis_years_mean))
        .transpose()
        .map_err(|_| Error::InvalidConfig("dialysis mean must be finite and non-negative"))?;

    let mut donor_rng = rng::stream(seed, "donors");
    let mut donors = Vec::with_capacity(config.organ_count);
    let mut organ_days = Vec::with_capacity(config.organ_count);
    for i in 0..config.organ_count {
        let age = donor_ages.sample(&mut donor_rng);
        let diabetic = diabetes.sample(&mut donor_rng);
        organ_days.push(donor_rng.random_range(0..config.horizon_days));
        let id = OrganId::new(&padded_id('o', i, config.organ_count))?;
        donors.push((id, DonorProfile::new(age, diabetic)?));
    }

    let mut recipient_rng = rng::stream(seed, "recipients");
    let mut recipients = Vec::with_capacity(config.patient_count);
    let mut patient_days = Vec::with_capacity(config.patient_count);
    for i in 0..config.patient_count {
        let age = recipient_ages.sample(&mut recipient_rng);
        let diabetic = diabetes.sample(&mut recipient_rng);
        let years = dialysis.map_or(0.0, |d| d.sample(&mut recipient_rng));
        patient_days.push(recipient_rng.random_range(0..config.horizon_days));
        let id = PatientId::new(&padded_id('p', i, config.patient_count))?;
        recipients.push((id, RecipientProfile::new(age, diabetic, years)?));
    }

    let weights = &config.weights;
    let organs = if donors.is_empty() {
        Vec::new()
    } else {
        let cohort = Cohort::new(donors.iter().map(|(_, d)| weights.donor_risk(d)))?;
        donors
            .iter()
            .zip(&organ_days)
            .map(|((id, d), &day)| Organ {
                id: id.clone(),
                arrival_day: day,
                kdpi: cohort.score(weights.donor_risk(d)),
            })
            .collect()
    };
    let patients = if recipients.is_empty() {
        Vec::new()
    } else {
        let cohort = Cohort::new(recipients.iter().map(|(_, r)| weights.recipient_risk(r)))?;
        recipients
            .iter()
            .zip(&patient_days)
            .map(|((id, r), &day)| Patient {
                id: id.clone(),
                arrival_day: day,
                epts: cohort.score(weights.recipient_risk(r)),
            })
            .collect()
    };

    Ok(Scenario { instance: validate_instance(patients, organs)?, donors, recipients })
}

/// Deterministic in `(config, seed)`.
pub fn generate_instance(config: &ScenarioConfig, seed: u64) -> Result<Instance, Error> {
    generate_scenario(config, seed).map(|s| s.instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn score_bounds() {
        assert!(Score::new(-1).is_none());
        assert!(Score::new(101).is_none());
        assert_eq!(Score::new(100).unwrap().get(), 100);
        assert_eq!(Score::new(40).unwrap().distance(Score::new(55).unwrap()), 15);
    }

    #[test]
    fn ids_are_checked() {
        assert!(PatientId::new("p-1_a").is_ok());
        assert_eq!(PatientId::new(""), Err(Error::InvalidId(String::new())));
        assert!(OrganId::new("o,1").is_err());
        assert!(OrganId::new("o 1").is_err());
    }

    #[test]
    fn organ_with_kdpi_150_is_rejected() {
        assert_eq!(
            Organ::new("o1", 0, 150),
            Err(Error::ScoreOutOfRange { id: "o1".into(), score: 150 })
        );
    }

    #[test]
    fn sorted_instance_is_unchanged() {
        let patients = vec![Patient::new("a", 0, 10).unwrap(), Patient::new("b", 2, 30).unwrap()];
        let organs = vec![Organ::new("x", 1, 5).unwrap(), Organ::new("y", 1, 7).unwrap()];
        let instance = Instance::new(patients.clone(), organs.clone()).unwrap();
        assert_eq!(instance.patients(), &patients[..]);
        assert_eq!(instance.organs(), &organs[..]);
    }

    #[test]
    fn organs_are_sorted_by_day_then_id() {
        let organs = vec![
            Organ::new("z", 3, 5).unwrap(),
            Organ::new("b", 1, 5).unwrap(),
            Organ::new("a", 1, 5).unwrap(),
        ];
        let instance = Instance::new(vec![], organs).unwrap();
        let ids: Vec<&str> = instance.organs().iter().map(|o| o.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "z"]);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let patients = vec![Patient::new("p1", 0, 10).unwrap(), Patient::new("p1", 2, 30).unwrap()];
        assert_eq!(Instance::new(patients, vec![]), Err(Error::DuplicateId("p1".into())));
        // a patient and an organ may share an id
        let ok = Instance::new(vec![Patient::new("x", 0, 1).unwrap()], vec![Organ::new("x", 0, 1).unwrap()]);
        assert!(ok.is_ok());
    }

    #[test]
    fn validation_is_idempotent() {
        let config = ScenarioConfig { patient_count: 40, organ_count: 30, ..ScenarioConfig::preset(Preset::Era2014) };
        let once = generate_instance(&config, 3).unwrap();
        let (p, o) = once.clone().into_parts();
        assert_eq!(validate_instance(p, o).unwrap(), once);
    }

    #[test]
    fn calibrated_mean_matches_target() {
        let dist = ClippedNormal::calibrated(32.0, 15.0, 18.0, 69.0).unwrap();
        assert!((dist.mean() - 32.0).abs() < 1e-9);
        assert!(dist.location() < 32.0);
        // uncalibrated clipping would overshoot
        let naive = clipped_mean(32.0, 15.0, 18.0, 69.0);
        assert!(naive > 33.0, "{naive}");
    }

    #[test]
    fn clipped_mean_matches_quadrature() {
        // midpoint rule over a wide range as an independent check
        let (mu, sd, a, b) = (30.0, 12.0, 18.0, 69.0);
        let steps = 200_000;
        let (lo, hi) = (mu - 12.0 * sd, mu + 12.0 * sd);
        let h = (hi - lo) / steps as f64;
        let mut acc = 0.0;
        for i in 0..steps {
            let x = lo + (i as f64 + 0.5) * h;
            acc += x.clamp(a, b) * std_normal_pdf((x - mu) / sd) / sd * h;
        }
        assert!((acc - clipped_mean(mu, sd, a, b)).abs() < 1e-6);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let base = ScenarioConfig::preset(Preset::Era2014);
        assert!(ScenarioConfig { horizon_days: 0, ..base.clone() }.validate().is_err());
        assert!(ScenarioConfig { diabetes_prevalence: 1.5, ..base.clone() }.validate().is_err());
        assert!(ScenarioConfig { donor_age_sd: -1.0, ..base.clone() }.validate().is_err());
        assert!(ScenarioConfig { donor_age_mean: 90.0, ..base.clone() }.validate().is_err());
        assert!(base.validate().is_ok());
    }

    #[test]
    fn empty_patient_cohort() {
        let config = ScenarioConfig { patient_count: 0, organ_count: 5, ..ScenarioConfig::preset(Preset::Era1989) };
        let instance = generate_instance(&config, 1).unwrap();
        assert!(instance.patients().is_empty());
        assert_eq!(instance.organs().len(), 5);
    }

    #[test]
    fn generation_is_deterministic_and_in_bounds() {
        let config = ScenarioConfig { patient_count: 300, organ_count: 200, ..ScenarioConfig::preset(Preset::Era1989) };
        let a = generate_scenario(&config, 99).unwrap();
        let b = generate_scenario(&config, 99).unwrap();
        assert_eq!(a.instance, b.instance);
        assert_ne!(a.instance, generate_instance(&config, 100).unwrap());
        for (_, d) in &a.donors {
            assert!((18.0..=69.0).contains(&d.age()));
        }
        for o in a.instance.organs() {
            assert!(o.arrival_day < 365);
        }
        assert_eq!(a.instance.organs()[0].id.as_str().len(), 4);
    }

    #[test]
    fn padded_ids_sort_numerically() {
        assert_eq!(padded_id('p', 0, 10), "p01");
        assert_eq!(padded_id('p', 9, 10), "p10");
        assert_eq!(padded_id('o', 0, 1), "o1");
        assert_eq!(padded_id('o', 0, 0), "o1");
    }
}
