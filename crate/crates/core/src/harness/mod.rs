//! Runs games, checks analytic bounds and exports CSV and SVG artifacts.
//!
//! Trials run in parallel. Each one owns its stream, predictor and learner
//! and draws from a ChaCha8 generator seeded by [`trial_seed`], so results
//! depend only on the config and the master seed.

mod bounds;
mod config;
mod export;
mod lower;
mod run;
mod sweep;

pub use bounds::{
    agnostic_meta_bound, baseline_bound, class_ldim, default_bounds, envelope_bound, evaluate_bounds,
    expert_at_mistakes_bound, expert_bound, meta_bound, restart_bound, standard_error, BoundKind,
    BoundReport, BoundRow, Direction, SLACK_NOTE,
};
pub use config::{Axis, ClassSpec, Corruption, GameConfig, PredictorSpec, StreamSpec, SweepSpec};
pub use export::{
    sweep_svg, write_bounds, write_sweep, write_transcripts, BOUND_HEADER, SWEEP_HEADER,
    TRANSCRIPT_HEADER,
};
pub use lower::{run_lower_bound, LowerBoundChecks};
pub use run::{play, random_realizable, run_game, splitmix64, trial_seed, RunReport, TrialResult};
pub use sweep::{sweep, SweepPoint, SweepReport};
