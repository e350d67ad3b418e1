//! Files, reports and the command line around [`organmatch_core`].
//!
//! * [`formats`]: the patients / organs CSV files.
//! * [`config`]: the optional TOML configuration (scenario and scoring weights).
//! * [`report`]: JSON reports with exact rationals rendered as `"p/q"`.
//! * [`experiment`]: multi-seed mechanism comparisons on generated scenarios.
//! * [`cli`]: the `organmatch` binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod report;

pub use error::Error;
