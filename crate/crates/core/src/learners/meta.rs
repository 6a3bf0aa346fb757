use crate::aggregate::{Dwma, Rewa};
use crate::error::Result;
use crate::example::{Example, Label};
use crate::hypotheses::HypothesisClass;
use crate::offline::Mode;
use crate::predictors::Forecast;
use crate::transcript::Prediction;

use super::{Expert, OnlineLearner, Turn};

#[derive(Debug, Clone)]
enum Aggregator {
    Dwma(Dwma),
    Rewa(Rewa),
}

/// Aggregates `Expert(0), …, Expert(T−1)`: DWMA in realizable mode, REWA in
/// agnostic mode. All experts are built up front and advanced in index order.
#[derive(Debug, Clone)]
pub struct Meta {
    horizon: usize,
    turn: Turn,
    experts: Vec<Expert>,
    aggregator: Aggregator,
    advice: Vec<Prediction>,
}

impl Meta {
    pub fn new(class: HypothesisClass, mode: Mode, horizon: usize) -> Result<Self> {
        let experts = (0..horizon)
            .map(|c| Expert::new(class.clone(), mode, horizon, c))
            .collect::<Result<Vec<_>>>()?;
        let aggregator = match mode {
            Mode::Realizable => Aggregator::Dwma(Dwma::new(horizon)?),
            Mode::Agnostic => Aggregator::Rewa(Rewa::new(horizon, horizon)?),
        };
        Ok(Self {
            horizon,
            turn: Turn::default(),
            experts,
            aggregator,
            advice: Vec::new(),
        })
    }

    pub fn experts(&self) -> &[Expert] {
        &self.experts
    }

    /// Per-expert mistake counts of the realizable aggregator.
    pub fn expert_mistakes(&self) -> Option<&[u64]> {
        match &self.aggregator {
            Aggregator::Dwma(d) => Some(d.mistakes()),
            Aggregator::Rewa(_) => None,
        }
    }
}

fn modes(advice: &[Prediction]) -> Vec<Label> {
    advice.iter().map(Prediction::mode).collect()
}

impl OnlineLearner for Meta {
    fn name(&self) -> String {
        "meta".into()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn predict(&mut self, x: &Example, forecast: &Forecast) -> Result<Prediction> {
        self.turn.begin(self.horizon)?;
        self.advice = self
            .experts
            .iter_mut()
            .map(|e| e.predict(x, forecast))
            .collect::<Result<Vec<_>>>()?;
        match &self.aggregator {
            Aggregator::Dwma(d) => Ok(Prediction::Point(d.predict(&modes(&self.advice))?)),
            Aggregator::Rewa(r) => r.mixture(&self.advice),
        }
    }

    fn update(&mut self, y: Label) -> Result<()> {
        self.turn.finish()?;
        match &mut self.aggregator {
            Aggregator::Dwma(d) => d.update(&modes(&self.advice), y)?,
            Aggregator::Rewa(r) => {
                let losses: Vec<f64> = self.advice.iter().map(|p| p.mistake_prob(y)).collect();
                r.update(&losses)?
            }
        }
        for e in &mut self.experts {
            e.update(y)?;
        }
        Ok(())
    }

    fn is_deterministic(&self) -> bool {
        matches!(self.aggregator, Aggregator::Dwma(_))
    }
}
