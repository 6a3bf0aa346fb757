use crate::adversary::{lower_bound_value, nature_peeks_game, stream_gen};
use crate::error::{Error, Result};
use crate::offline::best_in_hindsight;
use crate::transcript::predictor_mistake_count;

use super::bounds::{BoundReport, BoundRow, Direction};
use super::config::{GameConfig, StreamSpec};

/// Structural checks of one lower-bound game.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundChecks {
    pub realizable: bool,
    pub in_stream_class: bool,
    pub predictor_mistakes: u64,
    pub final_space_nonempty: bool,
    pub forced: f64,
    pub bound: f64,
}

impl LowerBoundChecks {
    pub fn pass(&self, n: usize) -> bool {
        self.realizable
            && self.in_stream_class
            && self.final_space_nonempty
            && self.predictor_mistakes == n as u64
            && self.forced >= self.bound - 1e-9
    }
}

/// Plays the adversary against the configured learner and checks the
/// forced expected mistakes reach `((n+1)/2)·log2(T/(n+1))`.
pub fn run_lower_bound(cfg: &GameConfig) -> Result<(BoundReport, LowerBoundChecks)> {
    cfg.validate()?;
    if cfg.stream != StreamSpec::NatureZn {
        return Err(Error::Config("the lower bound needs a nature-zn stream".into()));
    }
    let params = cfg
        .zn_params()?
        .ok_or_else(|| Error::Config("the lower bound needs the zn predictor".into()))?;
    let class = cfg.class.build();
    let mut learner = cfg.learner.build(&class, cfg.horizon, cfg.mode())?;
    let out = nature_peeks_game(learner.as_mut(), &params, cfg.retain_full_predictions)?;
    let checks = LowerBoundChecks {
        realizable: best_in_hindsight(&class, &out.stream)? == 0,
        in_stream_class: stream_gen(&params, &out.indices)?.examples == out.stream.examples(),
        predictor_mistakes: predictor_mistake_count(&out.transcript),
        final_space_nonempty: out.version_spaces.last().is_some_and(|v| !v.is_empty()),
        forced: out.forced,
        bound: lower_bound_value(cfg.horizon, params.n())?,
    };
    let row = BoundRow {
        name: format!("lower-bound:{}", learner.name()),
        m_p: checks.predictor_mistakes as f64,
        offline: None,
        ldim: None,
        horizon: cfg.horizon,
        c: Some(params.n()),
        analytic: checks.bound,
        measured_mean: checks.forced,
        stderr: 0.0,
        randomized: false,
        direction: Direction::AtLeast,
        pass: checks.pass(params.n()),
    };
    Ok((BoundReport { rows: vec![row] }, checks))
}
