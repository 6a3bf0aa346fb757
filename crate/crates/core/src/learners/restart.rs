use crate::error::{contract, Error, Result};
use crate::example::{Example, Label};
use crate::hypotheses::HypothesisClass;
use crate::offline::{Mode, OfflineLearner};
use crate::predictors::Forecast;
use crate::transcript::Prediction;

use super::{at_round, OnlineLearner, Turn};

/// Runs one offline learner on the forecast and starts a fresh one, on the
/// forecast suffix, every time the previous forecast missed `x_t`.
///
/// The instance count therefore ends at one plus the predictor's mistakes.
#[derive(Debug, Clone)]
pub struct Restart {
    class: HypothesisClass,
    mode: Mode,
    horizon: usize,
    turn: Turn,
    observed: Vec<Example>,
    prev: Option<Forecast>,
    offline: Option<OfflineLearner>,
    instances: u64,
}

impl Restart {
    pub fn new(class: HypothesisClass, mode: Mode, horizon: usize) -> Self {
        Self {
            class,
            mode,
            horizon,
            turn: Turn::default(),
            observed: Vec::with_capacity(horizon),
            prev: None,
            offline: None,
            instances: 0,
        }
    }

    pub fn instance_count(&self) -> u64 {
        self.instances
    }

    /// The active offline learner.
    pub fn offline(&self) -> Option<&OfflineLearner> {
        self.offline.as_ref()
    }
}

impl OnlineLearner for Restart {
    fn name(&self) -> String {
        "restart".into()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn predict(&mut self, x: &Example, forecast: &Forecast) -> Result<Prediction> {
        let t = self.turn.begin(self.horizon)?;
        if forecast.len() != self.horizon {
            return Err(contract(format!(
                "forecast of length {} for horizon {}",
                forecast.len(),
                self.horizon
            )));
        }
        if &forecast[t - 1] != x {
            return Err(contract(format!("forecast disagrees with x_{t} = {x}")));
        }
        self.observed.push(x.clone());
        let fire = match &self.prev {
            None => true,
            Some(prev) => &prev[t - 1] != x,
        };
        if fire {
            if forecast[..t] != self.observed[..] {
                return Err(contract(format!("forecast prefix differs from x_1..x_{t}")));
            }
            self.offline = Some(OfflineLearner::new(&self.class, &forecast[t - 1..], self.mode)?);
            self.instances += 1;
        }
        self.prev = Some(forecast.clone());
        match &self.offline {
            Some(b) => b.predict_at(x),
            None => Err(Error::Structural("no active offline learner".into())),
        }
    }

    fn update(&mut self, y: Label) -> Result<()> {
        let t = self.turn.finish()?;
        match &mut self.offline {
            Some(b) => b.update(y).map_err(at_round(t)),
            None => Err(Error::Structural("no active offline learner".into())),
        }
    }

    fn is_deterministic(&self) -> bool {
        self.mode == Mode::Realizable
    }

    fn instances(&self) -> Option<u64> {
        Some(self.instances)
    }
}

/// `0 = t̃_0 ≤ t̃_1 ≤ … ≤ t̃_{c+1} = T` with `t̃_i = min(i⌈T/(c+1)⌉, T)`.
pub fn block_boundaries(horizon: usize, c: usize) -> Vec<usize> {
    let step = horizon.div_ceil(c + 1);
    let mut b: Vec<usize> = (0..=c).map(|i| (i * step).min(horizon)).collect();
    b.push(horizon);
    b
}

/// Splits the horizon into `c + 1` blocks and runs a fresh [`Restart`] on
/// each, fed the block's window of every forecast.
#[derive(Debug, Clone)]
pub struct Expert {
    class: HypothesisClass,
    mode: Mode,
    horizon: usize,
    c: usize,
    bounds: Vec<usize>,
    turn: Turn,
    block: usize,
    current: Option<Restart>,
    instances: u64,
}

impl Expert {
    pub fn new(class: HypothesisClass, mode: Mode, horizon: usize, c: usize) -> Result<Self> {
        if horizon == 0 || c >= horizon {
            return Err(Error::Config(format!(
                "expert parameter {c} outside 0..={}",
                horizon.saturating_sub(1)
            )));
        }
        Ok(Self {
            class,
            mode,
            horizon,
            c,
            bounds: block_boundaries(horizon, c),
            turn: Turn::default(),
            block: 0,
            current: None,
            instances: 0,
        })
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.bounds
    }
}

impl OnlineLearner for Expert {
    fn name(&self) -> String {
        format!("expert:{}", self.c)
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn predict(&mut self, x: &Example, forecast: &Forecast) -> Result<Prediction> {
        let t = self.turn.begin(self.horizon)?;
        if forecast.len() != self.horizon {
            return Err(contract(format!(
                "forecast of length {} for horizon {}",
                forecast.len(),
                self.horizon
            )));
        }
        // skips empty blocks
        while t > self.bounds[self.block + 1] {
            self.block += 1;
        }
        let (start, end) = (self.bounds[self.block], self.bounds[self.block + 1]);
        if t == start + 1 {
            if let Some(done) = &self.current {
                self.instances += done.instance_count();
            }
            self.current = Some(Restart::new(self.class.clone(), self.mode, end - start));
        }
        let window = forecast.window(start, end - start)?;
        match &mut self.current {
            Some(r) => r.predict(x, &window).map_err(at_round(t)),
            None => Err(Error::Structural("no active block".into())),
        }
    }

    fn update(&mut self, y: Label) -> Result<()> {
        let t = self.turn.finish()?;
        match &mut self.current {
            Some(r) => r.update(y).map_err(at_round(t)),
            None => Err(Error::Structural("no active block".into())),
        }
    }

    fn is_deterministic(&self) -> bool {
        self.mode == Mode::Realizable
    }

    fn instances(&self) -> Option<u64> {
        Some(self.instances + self.current.as_ref().map_or(0, Restart::instance_count))
    }
}
