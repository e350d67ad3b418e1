//! Online allocation of deceased-donor kidneys to a waitlist.
//!
//! Organs carry a KDPI score and patients an EPTS score, both integer
//! percentiles in `0..=100`. Each arriving organ must be placed (or wasted)
//! immediately by an online [`mechanisms::MechanismId`]; the quality of an
//! allocation is the summed distance `|KDPI - EPTS|` over matched pairs.
//!
//! The crate is `no_std` with `alloc`. File formats, reports and the CLI live
//! in the `organmatch` companion crate.
//!
//! ```
//! use organmatch_core::{mechanisms::MechanismId, offline_oracle, simulator, population::*};
//!
//! let instance = Instance::new(
//!     vec![
//!         Patient::new("a", 0, 0).unwrap(),
//!         Patient::new("b", 0, 50).unwrap(),
//!     ],
//!     vec![Organ::new("x", 1, 40).unwrap(), Organ::new("y", 2, 45).unwrap()],
//! )
//! .unwrap();
//! let trace = simulator::run_simulation(&instance, MechanismId::Greedy, 0);
//! let offline = offline_oracle::optimal_offline(&instance);
//! assert_eq!(trace.allocation.total_cost(), 55);
//! assert_eq!(offline.total_cost(), 45);
//! ```
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod allocation;
pub mod axioms;
pub mod error;
pub mod mechanisms;
pub mod offline_oracle;
pub mod population;
pub mod rng;
pub mod scoring;
pub mod simulator;

mod assignment;

pub use allocation::{Allocation, Pair};
pub use error::Error;
