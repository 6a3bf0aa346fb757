use crate::error::{Error, Result};

use super::bounds::{default_bounds, evaluate_bounds, standard_error};
use super::config::{Axis, GameConfig, SweepSpec};
use super::run::{run_game, RunReport};

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: usize,
    /// Mean expected mistakes, or mean regret in agnostic mode.
    pub measured_mean: f64,
    pub stderr: f64,
    pub predictor_mistakes_mean: f64,
    /// `measured_mean / T`.
    pub per_round: f64,
    pub bound_name: String,
    pub bound: Option<f64>,
    pub bound_pass: bool,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub points: Vec<SweepPoint>,
    pub runs: Vec<RunReport>,
}

impl SweepReport {
    pub fn axis_name(&self) -> &'static str {
        match self.spec.axis {
            Axis::K => "k",
            Axis::T => "T",
        }
    }

    pub fn all_pass(&self) -> bool {
        self.points.iter().all(|p| p.bound_pass)
    }

    /// Whether the measurement never decreases along the axis.
    pub fn is_nondecreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[0].measured_mean <= w[1].measured_mean)
    }

    /// Whether `measured / T` strictly decreases along the axis.
    pub fn per_round_strictly_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].per_round < w[0].per_round)
    }
}

/// Runs the base config at every axis value.
pub fn sweep(base: &GameConfig, spec: &SweepSpec) -> Result<SweepReport> {
    if spec.values.is_empty() {
        return Err(Error::Config("sweep axis has no values".into()));
    }
    let mut points = Vec::with_capacity(spec.values.len());
    let mut runs = Vec::with_capacity(spec.values.len());
    for &v in &spec.values {
        let cfg = spec.point(base, v)?;
        let run = run_game(&cfg)?;
        let kinds = default_bounds(cfg.learner, cfg.mode());
        let bounds = evaluate_bounds(&run, &kinds[..kinds.len().min(1)])?;
        let regret = kinds.first().is_some_and(|k| k.is_regret());
        let measured: Vec<f64> = run
            .trials
            .iter()
            .map(|t| if regret { t.regret } else { t.expected_mistakes })
            .collect();
        let mean = measured.iter().sum::<f64>() / measured.len() as f64;
        let row = bounds.rows.first();
        points.push(SweepPoint {
            value: v,
            measured_mean: mean,
            stderr: standard_error(&measured),
            predictor_mistakes_mean: run.mean_predictor_mistakes(),
            per_round: mean / cfg.horizon as f64,
            bound_name: row.map_or(String::new(), |r| r.name.clone()),
            bound: row.map(|r| r.analytic),
            bound_pass: row.is_none_or(|r| r.pass),
        });
        runs.push(run);
    }
    Ok(SweepReport {
        spec: spec.clone(),
        points,
        runs,
    })
}
