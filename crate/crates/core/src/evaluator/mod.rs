//! Reference schemes, throughput and Monte-Carlo experiments.
//!
//! Schemes are selected by name through a [`SchemeRegistry`]:
//!
//! * `proposed`: the greedy-designed profile.
//! * `baseline1`: direction of every full cross-link matrix.
//! * `baseline2`: row space of every full cross link.
//! * `baseline3`: row spaces on the smallest feasible uniform truncation.
//! * `profile`: a fixed profile supplied by the caller.

mod baselines;
mod rate;
mod schemes;
mod sweep;

pub use baselines::{baseline1_dimension, baseline2_profile, baseline3_profile};
pub use rate::sum_rate;
pub use schemes::{
    Baseline1, Baseline2, Baseline3, FeedbackMode, FeedbackScheme, FixedProfile, PreparedScheme, Proposed,
    SchemeContext, SchemeRegistry,
};
pub use sweep::{fit_slope, mean_ci95, run_sweep, write_results_csv, ExperimentResult, SweepPoint, SweepSpec, SweepVariable};
