use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::example::{Example, Label, Rational};
use crate::hypotheses::{threshold_chain_ldim, FiniteTable, HypothesisClass, LdimOracle, VersionSpace};
use crate::predictors::Forecast;
use crate::transcript::Prediction;

use super::{OnlineLearner, Turn};

#[derive(Debug, Clone)]
enum Backend {
    Table {
        table: FiniteTable,
        oracle: LdimOracle,
        mask: u64,
        col: Option<usize>,
    },
    /// Thresholds have no finite Littlestone dimension, so the version
    /// interval is measured by its behaviors on the examples known so far
    /// (the latest forecast, which contains the observed prefix).
    Threshold {
        version: VersionSpace,
        x: Option<Example>,
    },
}

/// Standard optimal algorithm: predicts the label whose consistent
/// restriction keeps the larger Littlestone dimension (ties toward the
/// smaller label). Ignores forecasts except to size threshold version spaces.
#[derive(Debug, Clone)]
pub struct Soa {
    horizon: usize,
    turn: Turn,
    backend: Backend,
}

impl Soa {
    /// Finite tables must fit the Littlestone-dimension guards.
    pub fn new(class: &HypothesisClass, horizon: usize) -> Result<Self> {
        let backend = match class {
            HypothesisClass::Table(t) => {
                let table = t.dedup_columns();
                let oracle = LdimOracle::new(&table)?;
                let mask = oracle.full_mask();
                Backend::Table {
                    table,
                    oracle,
                    mask,
                    col: None,
                }
            }
            HypothesisClass::Threshold => Backend::Threshold {
                version: VersionSpace::all_thresholds(),
                x: None,
            },
        };
        Ok(Self {
            horizon,
            turn: Turn::default(),
            backend,
        })
    }

    pub fn version_space(&self) -> Option<&VersionSpace> {
        match &self.backend {
            Backend::Threshold { version, .. } => Some(version),
            Backend::Table { .. } => None,
        }
    }
}

/// Littlestone dimension of a threshold interval projected on `points`.
fn interval_ldim(v: &VersionSpace, points: &BTreeSet<&Rational>) -> Option<u32> {
    if v.is_empty() {
        return None;
    }
    let VersionSpace::ThresholdInterval { lo, hi, .. } = v else {
        return None;
    };
    let inside = points
        .iter()
        .filter(|p| lo.as_ref().is_none_or(|l| l < **p) && hi.as_ref().is_none_or(|h| **p < h))
        .count();
    threshold_chain_ldim(inside + 1)
}

fn argmax_ldim(scores: &[Option<u32>]) -> Option<Label> {
    let mut best: Option<(usize, u32)> = None;
    for (y, s) in scores.iter().enumerate() {
        if let Some(s) = s {
            if best.is_none_or(|(_, b)| *s > b) {
                best = Some((y, *s));
            }
        }
    }
    best.map(|(y, _)| Label(y as u32))
}

impl OnlineLearner for Soa {
    fn name(&self) -> String {
        "soa".into()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn predict(&mut self, x: &Example, forecast: &Forecast) -> Result<Prediction> {
        let t = self.turn.begin(self.horizon)?;
        let label = match &mut self.backend {
            Backend::Table {
                table,
                oracle,
                mask,
                col,
            } => {
                let c = table.column_of(x)?;
                *col = Some(c);
                let scores: Vec<Option<u32>> = (0..table.label_count())
                    .map(|y| {
                        let m = oracle.restrict(*mask, c, Label(y as u32));
                        oracle.ldim(m)
                    })
                    .collect();
                argmax_ldim(&scores)
            }
            Backend::Threshold { version, x: slot } => {
                *slot = Some(x.clone());
                let points: BTreeSet<&Rational> = forecast.iter().filter_map(Example::as_point).collect();
                let scores = [Label::ZERO, Label::ONE]
                    .iter()
                    .map(|&y| version.restrict(x, y).map(|v| interval_ldim(&v, &points)))
                    .collect::<Result<Vec<_>>>()?;
                argmax_ldim(&scores)
            }
        };
        label
            .map(Prediction::Point)
            .ok_or(Error::RealizabilityViolation { round: t })
    }

    fn update(&mut self, y: Label) -> Result<()> {
        let t = self.turn.finish()?;
        let empty = match &mut self.backend {
            Backend::Table {
                oracle, mask, col, ..
            } => {
                let c = col.ok_or_else(|| Error::Structural("no pending example".into()))?;
                *mask = oracle.restrict(*mask, c, y);
                *mask == 0
            }
            Backend::Threshold { version, x } => {
                let x = x.take().ok_or_else(|| Error::Structural("no pending example".into()))?;
                *version = version.restrict(&x, y)?;
                version.is_empty()
            }
        };
        if empty {
            return Err(Error::RealizabilityViolation { round: t });
        }
        Ok(())
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}
