//! Offline benchmark: the best allocation with hindsight over the whole
//! horizon, still respecting arrival order (a patient can only receive an
//! organ that arrives on or after their registration day).
//!
//! Optimality is lexicographic: most transplants first, then least total
//! `|kdpi - epts|`, then the smallest pair set when pairs are listed in
//! `(organ id, patient id)` order.

use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::allocation::{Allocation, Pair};
use crate::assignment::{self, CostMatrix, FORBIDDEN};
use crate::error::Error;
use crate::population::{Instance, Organ, Patient};

/// Largest smaller side accepted by the exhaustive routines.
pub const ENUMERATION_LIMIT: usize = 8;

/// Exact optimum via one min-cost assignment plus a lexicographic pass over
/// the optimal face.
///
/// Organs are rows, patients columns. Each organ also has a "stay
/// unmatched" column priced above any achievable matching cost difference,
/// so a larger matching always wins; padding rows let every patient stay
/// unmatched for free.
pub fn optimal_offline(instance: &Instance) -> Allocation {
    let organs = sorted_by_id(instance.organs(), |o: &Organ| o.id.as_str());
    let patients = sorted_by_id(instance.patients(), |p: &Patient| p.id.as_str());
    let (n_organs, n_patients) = (organs.len(), patients.len());
    if n_organs == 0 || n_patients == 0 {
        return Allocation::empty();
    }
    let unmatched_penalty = 100 * n_organs.min(n_patients) as i64 + 1;
    let size = n_organs + n_patients;
    // padding rows (patients left unmatched) cost nothing anywhere
    let mut costs = CostMatrix::filled(size, 0);
    for (row, organ) in organs.iter().enumerate() {
        for (col, patient) in patients.iter().enumerate() {
            let cost = if organ.is_feasible_for(patient) { i64::from(organ.cost(patient)) } else { FORBIDDEN };
            costs.set(row, col, cost);
        }
        for col in n_patients..size {
            costs.set(row, col, unmatched_penalty);
        }
    }

    let solution = assignment::solve(&costs);
    let organ_rows: Vec<usize> = (0..n_organs).collect();
    let col_rank: Vec<usize> = (0..size).map(|c| c.min(n_patients)).collect();
    let col_of_row = assignment::lexicographic_optimum(&costs, solution, &organ_rows, &col_rank);

    let pairs = organs
        .iter()
        .zip(&col_of_row)
        .filter(|(_, &col)| col < n_patients)
        .map(|(organ, &col)| pair(organ, patients[col]))
        .collect();
    Allocation::new(pairs)
}

fn sorted_by_id<T>(items: &[T], key: impl Fn(&T) -> &str) -> Vec<&T> {
    let mut sorted: Vec<&T> = items.iter().collect();
    sorted.sort_by(|a, b| key(a).cmp(key(b)));
    sorted
}

fn pair(organ: &Organ, patient: &Patient) -> Pair {
    Pair { organ: organ.id.clone(), patient: patient.id.clone(), cost: organ.cost(patient) }
}

fn check_size(instance: &Instance) -> Result<(), Error> {
    let min_side = instance.organs().len().min(instance.patients().len());
    if min_side > ENUMERATION_LIMIT {
        return Err(Error::InstanceTooLarge { min_side, limit: ENUMERATION_LIMIT });
    }
    Ok(())
}

/// Calls `visit` once for every feasible allocation (including the empty
/// one), as `(organ index, patient index)` pairs into the instance lists.
/// The smaller side drives the search, so the work is bounded by the
/// injections of the smaller side into the larger.
pub fn for_each_feasible_allocation(instance: &Instance, mut visit: impl FnMut(&[(usize, usize)])) -> Result<(), Error> {
    check_size(instance)?;
    let organs = instance.organs();
    let patients = instance.patients();
    let organs_drive = organs.len() <= patients.len();
    let (small, large) = if organs_drive { (organs.len(), patients.len()) } else { (patients.len(), organs.len()) };
    let feasible = |s: usize, l: usize| {
        if organs_drive {
            organs[s].is_feasible_for(&patients[l])
        } else {
            organs[l].is_feasible_for(&patients[s])
        }
    };

    struct Search<'f, F, V> {
        small: usize,
        large: usize,
        organs_drive: bool,
        feasible: F,
        visit: &'f mut V,
        used: Vec<bool>,
        current: Vec<(usize, usize)>,
    }

    impl<F: Fn(usize, usize) -> bool, V: FnMut(&[(usize, usize)])> Search<'_, F, V> {
        fn go(&mut self, s: usize) {
            if s == self.small {
                (self.visit)(&self.current);
                return;
            }
            self.go(s + 1);
            for l in 0..self.large {
                if self.used[l] || !(self.feasible)(s, l) {
                    continue;
                }
                self.used[l] = true;
                self.current.push(if self.organs_drive { (s, l) } else { (l, s) });
                self.go(s + 1);
                self.current.pop();
                self.used[l] = false;
            }
        }
    }

    let mut search = Search {
        small,
        large,
        organs_drive,
        feasible,
        visit: &mut visit,
        used: alloc::vec![false; large],
        current: Vec::with_capacity(small),
    };
    search.go(0);
    Ok(())
}

/// Exhaustive reference for [`optimal_offline`]; refuses instances whose
/// smaller side exceeds [`ENUMERATION_LIMIT`].
pub fn brute_force_offline(instance: &Instance) -> Result<Allocation, Error> {
    let organs = instance.organs();
    let patients = instance.patients();
    let mut best: Option<(Reverse<usize>, u64, Allocation)> = None;
    for_each_feasible_allocation(instance, |pairs| {
        let cost: u64 = pairs.iter().map(|&(o, p)| u64::from(organs[o].cost(&patients[p]))).sum();
        let key = (Reverse(pairs.len()), cost);
        let better_or_tied = match &best {
            None => true,
            Some((count, best_cost, _)) => key <= (*count, *best_cost),
        };
        if !better_or_tied {
            return;
        }
        let candidate = Allocation::new(pairs.iter().map(|&(o, p)| pair(&organs[o], &patients[p])).collect());
        let replace = match &best {
            Some((count, best_cost, incumbent)) if key == (*count, *best_cost) => candidate.pairs() < incumbent.pairs(),
            _ => true,
        };
        if replace {
            best = Some((key.0, key.1, candidate));
        }
    })?;
    Ok(best.map(|(_, _, a)| a).unwrap_or_default())
}
