//! Raw risk scores and their conversion into KDPI / EPTS percentiles.
//!
//! Raw risk is a weighted linear combination of profile attributes. The
//! percentile of a value is `floor(100 * below / len)` where `below` counts
//! cohort members with strictly smaller risk, so the cohort minimum always
//! scores 0 and 100 is only reachable above every member.

use alloc::vec::Vec;

use crate::error::Error;
use crate::population::Score;

const MAX_AGE: f64 = 130.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DonorProfile {
    age: f64,
    diabetic: bool,
}

impl DonorProfile {
    pub fn new(age: f64, diabetic: bool) -> Result<Self, Error> {
        check_age(age)?;
        Ok(Self { age, diabetic })
    }

    pub fn age(&self) -> f64 {
        self.age
    }

    pub fn diabetic(&self) -> bool {
        self.diabetic
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecipientProfile {
    age: f64,
    diabetic: bool,
    dialysis_years: f64,
}

impl RecipientProfile {
    pub fn new(age: f64, diabetic: bool, dialysis_years: f64) -> Result<Self, Error> {
        check_age(age)?;
        if !(dialysis_years.is_finite() && dialysis_years >= 0.0) {
            return Err(Error::InvalidProfile("dialysis years must be finite and non-negative"));
        }
        Ok(Self { age, diabetic, dialysis_years })
    }

    pub fn age(&self) -> f64 {
        self.age
    }

    pub fn diabetic(&self) -> bool {
        self.diabetic
    }

    pub fn dialysis_years(&self) -> f64 {
        self.dialysis_years
    }
}

fn check_age(age: f64) -> Result<(), Error> {
    if age.is_finite() && (0.0..=MAX_AGE).contains(&age) {
        Ok(())
    } else {
        Err(Error::InvalidProfile("age must lie in [0, 130]"))
    }
}

/// Pre-percentile risk value. Larger means higher expected graft failure
/// (donors) or shorter expected survival (recipients).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RawRisk(pub f64);

/// Linear weights of the raw risk formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoringWeights {
    pub donor_age: f64,
    pub donor_diabetic: f64,
    pub recipient_age: f64,
    pub recipient_diabetic: f64,
    pub recipient_dialysis_year: f64,
}

impl Default for ScoringWeights {
    fn default() -> Self {
        Self {
            donor_age: 1.0,
            donor_diabetic: 20.0,
            recipient_age: 1.0,
            recipient_diabetic: 20.0,
            recipient_dialysis_year: 2.0,
        }
    }
}

impl ScoringWeights {
    /// Age weights must be strictly positive (risk strictly increasing in
    /// age) and the remaining weights finite and non-negative.
    pub fn validate(&self) -> Result<(), Error> {
        let finite = [
            self.donor_age,
            self.donor_diabetic,
            self.recipient_age,
            self.recipient_diabetic,
            self.recipient_dialysis_year,
        ]
        .iter()
        .all(|w| w.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("scoring weights must be finite"));
        }
        if self.donor_age <= 0.0 || self.recipient_age <= 0.0 {
            return Err(Error::InvalidConfig("age weights must be positive"));
        }
        if self.donor_diabetic < 0.0 || self.recipient_diabetic < 0.0 || self.recipient_dialysis_year <= 0.0 {
            return Err(Error::InvalidConfig(
                "diabetes weights must be non-negative and the dialysis weight positive",
            ));
        }
        Ok(())
    }

    pub fn donor_risk(&self, profile: &DonorProfile) -> RawRisk {
        RawRisk(self.donor_age * profile.age + indicator(profile.diabetic) * self.donor_diabetic)
    }

    pub fn recipient_risk(&self, profile: &RecipientProfile) -> RawRisk {
        RawRisk(
            self.recipient_age * profile.age
                + indicator(profile.diabetic) * self.recipient_diabetic
                + self.recipient_dialysis_year * profile.dialysis_years,
        )
    }
}

fn indicator(flag: bool) -> f64 {
    if flag {
        1.0
    } else {
        0.0
    }
}

/// `age + 20·[diabetic]` under the default weights.
pub fn raw_donor_risk(profile: &DonorProfile) -> RawRisk {
    ScoringWeights::default().donor_risk(profile)
}

/// `age + 20·[diabetic] + 2·dialysis_years` under the default weights.
pub fn raw_recipient_risk(profile: &RecipientProfile) -> RawRisk {
    ScoringWeights::default().recipient_risk(profile)
}

/// Percentile rank of `value` within `cohort`.
pub fn percentile_score(value: RawRisk, cohort: &[RawRisk]) -> Result<Score, Error> {
    if cohort.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let below = cohort.iter().filter(|c| c.0 < value.0).count();
    Ok(rank_to_score(below, cohort.len()))
}

fn rank_to_score(below: usize, len: usize) -> Score {
    // below <= len, so the quotient is at most 100
    Score::new_unchecked((100 * below / len) as u8)
}

/// A reference population sorted once so that many values can be scored in
/// `O(log n)` each.
#[derive(Debug, Clone)]
pub struct Cohort {
    sorted: Vec<f64>,
}

impl Cohort {
    pub fn new(risks: impl IntoIterator<Item = RawRisk>) -> Result<Self, Error> {
        let mut sorted: Vec<f64> = risks.into_iter().map(|r| r.0).collect();
        if sorted.is_empty() {
            return Err(Error::EmptyCohort);
        }
        if sorted.iter().any(|r| r.is_nan()) {
            return Err(Error::InvalidProfile("raw risk is NaN"));
        }
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn score(&self, value: RawRisk) -> Score {
        let below = self.sorted.partition_point(|&c| c < value.0);
        rank_to_score(below, self.sorted.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn risks(values: &[f64]) -> Vec<RawRisk> {
        values.iter().copied().map(RawRisk).collect()
    }

    #[test]
    fn donor_risk_examples() {
        let d = |age, diabetic| raw_donor_risk(&DonorProfile::new(age, diabetic).unwrap()).0;
        assert_eq!(d(0.0, false), 0.0);
        assert_eq!(d(46.0, true), 66.0);
        assert_eq!(d(80.0, false), 80.0);
    }

    #[test]
    fn recipient_risk_examples() {
        let r = |age, diabetic, years| {
            raw_recipient_risk(&RecipientProfile::new(age, diabetic, years).unwrap()).0
        };
        assert_eq!(r(0.0, false, 0.0), 0.0);
        assert_eq!(r(30.0, true, 5.0), 60.0);
        assert_eq!(r(30.0, false, 0.0), 30.0);
    }

    #[test]
    fn profile_bounds() {
        assert!(DonorProfile::new(-1.0, false).is_err());
        assert!(DonorProfile::new(131.0, false).is_err());
        assert!(DonorProfile::new(f64::NAN, false).is_err());
        assert!(RecipientProfile::new(40.0, false, -0.5).is_err());
        assert!(DonorProfile::new(130.0, true).is_ok());
    }

    #[test]
    fn weights_validation() {
        assert!(ScoringWeights::default().validate().is_ok());
        let w = ScoringWeights { donor_age: 0.0, ..Default::default() };
        assert!(w.validate().is_err());
        let w = ScoringWeights { recipient_diabetic: f64::INFINITY, ..Default::default() };
        assert!(w.validate().is_err());
    }

    #[test]
    fn percentile_examples() {
        let cohort = risks(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(percentile_score(RawRisk(3.0), &cohort).unwrap().get(), 50);
        assert_eq!(percentile_score(RawRisk(1.0), &cohort).unwrap().get(), 0);
        assert_eq!(percentile_score(RawRisk(9.0), &cohort).unwrap().get(), 100);

        let hundred: Vec<RawRisk> = (0..100).map(|i| RawRisk(i as f64 * 0.5)).collect();
        assert_eq!(percentile_score(RawRisk(49.5), &hundred).unwrap().get(), 99);
    }

    #[test]
    fn empty_cohort_is_an_error() {
        assert_eq!(percentile_score(RawRisk(1.0), &[]), Err(Error::EmptyCohort));
        assert!(Cohort::new(vec![]).is_err());
    }

    #[test]
    fn identical_cohort_scores_zero() {
        let cohort = Cohort::new(vec![RawRisk(7.0); 25]).unwrap();
        assert_eq!(cohort.score(RawRisk(7.0)).get(), 0);
    }

    proptest! {
        #[test]
        fn score_in_range_and_matches_fraction(
            values in prop::collection::vec(0.0f64..200.0, 1..60),
            probe in 0.0f64..220.0,
        ) {
            let cohort = risks(&values);
            let score = percentile_score(RawRisk(probe), &cohort).unwrap().get() as f64;
            prop_assert!(score <= 100.0);
            let below = values.iter().filter(|&&v| v < probe).count() as f64;
            let fraction = below / values.len() as f64;
            prop_assert!(fraction >= score / 100.0 - 1e-12);
            prop_assert!(fraction < (score + 1.0) / 100.0);
        }

        #[test]
        fn sorted_cohort_agrees_with_scan(
            values in prop::collection::vec(0.0f64..50.0, 1..40),
            probe in 0.0f64..55.0,
        ) {
            let cohort = risks(&values);
            let sorted = Cohort::new(cohort.iter().copied()).unwrap();
            prop_assert_eq!(sorted.score(RawRisk(probe)), percentile_score(RawRisk(probe), &cohort).unwrap());
        }

        #[test]
        fn percentile_monotone(
            values in prop::collection::vec(0.0f64..100.0, 1..40),
            a in 0.0f64..110.0,
            delta in 0.0f64..30.0,
        ) {
            let cohort = risks(&values);
            let low = percentile_score(RawRisk(a), &cohort).unwrap();
            let high = percentile_score(RawRisk(a + delta), &cohort).unwrap();
            prop_assert!(high >= low);
        }

        #[test]
        fn risk_strictly_increasing_in_age(
            age in 0.0f64..120.0,
            step in 0.01f64..10.0,
            diabetic: bool,
            years in 0.0f64..20.0,
        ) {
            let older = (age + step).min(130.0);
            prop_assume!(older > age);
            let d1 = raw_donor_risk(&DonorProfile::new(age, diabetic).unwrap());
            let d2 = raw_donor_risk(&DonorProfile::new(older, diabetic).unwrap());
            prop_assert!(d2.0 > d1.0);
            let r1 = raw_recipient_risk(&RecipientProfile::new(age, diabetic, years).unwrap());
            let r2 = raw_recipient_risk(&RecipientProfile::new(older, diabetic, years).unwrap());
            prop_assert!(r2.0 > r1.0);
            let r3 = raw_recipient_risk(&RecipientProfile::new(age, diabetic, years + step).unwrap());
            prop_assert!(r3.0 > r1.0);
        }
    }
}
