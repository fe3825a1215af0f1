//! Interference alignment with reduced channel-state feedback.
//!
//! The crate designs feedback profiles that decide, for every cross link of a
//! K-user MIMO interference network, whether and how its channel is reported
//! to the transmitters; it checks whether alignment remains feasible under a
//! profile, computes aligned precoders from the reported information only,
//! and measures throughput against conventional feedback schemes.

pub mod cli;
pub mod designer;
pub mod error;
pub mod evaluator;
pub mod feasibility;
pub mod fixtures;
pub mod matproc;
pub mod netcfg;
pub mod profile;
pub mod quantizer;
pub mod seeding;
pub mod solver;

#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
