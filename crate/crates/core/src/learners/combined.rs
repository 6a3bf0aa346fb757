use crate::aggregate::{Dwma, Rewa};
use crate::error::{Error, Result};
use crate::example::{Example, Label};
use crate::hypotheses::{
    evaluate, sorted_distinct_points, threshold_representatives, Hypothesis, HypothesisClass,
    LDIM_MAX_DOMAIN, LDIM_MAX_HYPOTHESES,
};
use crate::offline::Mode;
use crate::predictors::Forecast;
use crate::transcript::Prediction;

use super::{at_round, Meta, OnlineLearner, Restart, Soa, Turn};

/// DWMA over SOA (finite tables within the Littlestone guards only), the
/// restart learner and the realizable meta-learner.
pub struct CombinedRealizable {
    horizon: usize,
    turn: Turn,
    members: Vec<Box<dyn OnlineLearner>>,
    dwma: Dwma,
    advice: Vec<Label>,
}

/// Whether the SOA slot is available for `class`.
pub fn soa_fits(class: &HypothesisClass) -> bool {
    match class {
        HypothesisClass::Table(t) => {
            let d = t.dedup_columns();
            d.len() <= LDIM_MAX_HYPOTHESES && d.domain().len() <= LDIM_MAX_DOMAIN
        }
        HypothesisClass::Threshold => false,
    }
}

impl CombinedRealizable {
    pub fn new(class: &HypothesisClass, horizon: usize) -> Result<Self> {
        let mut members: Vec<Box<dyn OnlineLearner>> = Vec::new();
        if soa_fits(class) {
            members.push(Box::new(Soa::new(class, horizon)?));
        }
        members.push(Box::new(Restart::new(class.clone(), Mode::Realizable, horizon)));
        members.push(Box::new(Meta::new(class.clone(), Mode::Realizable, horizon)?));
        let dwma = Dwma::new(members.len())?;
        Ok(Self {
            horizon,
            turn: Turn::default(),
            members,
            dwma,
            advice: Vec::new(),
        })
    }

    pub fn member_names(&self) -> Vec<String> {
        self.members.iter().map(|m| m.name()).collect()
    }

    pub fn member_mistakes(&self) -> &[u64] {
        self.dwma.mistakes()
    }
}

impl OnlineLearner for CombinedRealizable {
    fn name(&self) -> String {
        "combined".into()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn predict(&mut self, x: &Example, forecast: &Forecast) -> Result<Prediction> {
        self.turn.begin(self.horizon)?;
        self.advice = self
            .members
            .iter_mut()
            .map(|m| m.predict(x, forecast).map(|p| p.mode()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Prediction::Point(self.dwma.predict(&self.advice)?))
    }

    fn update(&mut self, y: Label) -> Result<()> {
        let t = self.turn.finish()?;
        self.dwma.update(&self.advice, y)?;
        for m in &mut self.members {
            m.update(y).map_err(at_round(t))?;
        }
        Ok(())
    }

    fn is_deterministic(&self) -> bool {
        true
    }
}

/// Exponential weights over a fixed finite set of hypotheses: every row of
/// a finite table, or one threshold per behavior on the first forecast.
#[derive(Debug, Clone)]
pub struct HedgeBaseline {
    class: HypothesisClass,
    horizon: usize,
    turn: Turn,
    hypotheses: Vec<Hypothesis>,
    weights: Option<Rewa>,
    advice: Vec<Prediction>,
}

impl HedgeBaseline {
    pub fn new(class: HypothesisClass, horizon: usize) -> Self {
        Self {
            class,
            horizon,
            turn: Turn::default(),
            hypotheses: Vec::new(),
            weights: None,
            advice: Vec::new(),
        }
    }

    fn init(&mut self, forecast: &Forecast) -> Result<()> {
        self.hypotheses = match &self.class {
            HypothesisClass::Table(t) => (0..t.len()).map(Hypothesis::Row).collect(),
            HypothesisClass::Threshold => {
                threshold_representatives(&sorted_distinct_points(forecast)?)
                    .into_iter()
                    .map(Hypothesis::Threshold)
                    .collect()
            }
        };
        self.weights = Some(Rewa::new(self.hypotheses.len(), self.horizon)?);
        Ok(())
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }
}

impl OnlineLearner for HedgeBaseline {
    fn name(&self) -> String {
        "hedge".into()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn predict(&mut self, x: &Example, forecast: &Forecast) -> Result<Prediction> {
        self.turn.begin(self.horizon)?;
        if self.weights.is_none() {
            self.init(forecast)?;
        }
        self.advice = self
            .hypotheses
            .iter()
            .map(|h| evaluate(&self.class, h, x).map(Prediction::Point))
            .collect::<Result<Vec<_>>>()?;
        match &self.weights {
            Some(w) => w.mixture(&self.advice),
            None => Err(Error::Structural("baseline not initialized".into())),
        }
    }

    fn update(&mut self, y: Label) -> Result<()> {
        self.turn.finish()?;
        let losses: Vec<f64> = self.advice.iter().map(|p| p.mistake_prob(y)).collect();
        match &mut self.weights {
            Some(w) => w.update(&losses),
            None => Err(Error::Structural("baseline not initialized".into())),
        }
    }

    fn is_deterministic(&self) -> bool {
        false
    }

    fn comparators(&self) -> Option<Vec<Hypothesis>> {
        Some(self.hypotheses.clone())
    }
}

/// REWA over the finite-class baseline and the agnostic meta-learner.
pub struct CombinedAgnostic {
    horizon: usize,
    turn: Turn,
    baseline: HedgeBaseline,
    meta: Meta,
    rewa: Rewa,
    advice: Vec<Prediction>,
}

impl CombinedAgnostic {
    pub fn new(class: HypothesisClass, horizon: usize) -> Result<Self> {
        Ok(Self {
            horizon,
            turn: Turn::default(),
            baseline: HedgeBaseline::new(class.clone(), horizon),
            meta: Meta::new(class, Mode::Agnostic, horizon)?,
            rewa: Rewa::new(2, horizon)?,
            advice: Vec::new(),
        })
    }
}

impl OnlineLearner for CombinedAgnostic {
    fn name(&self) -> String {
        "combined-agnostic".into()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn predict(&mut self, x: &Example, forecast: &Forecast) -> Result<Prediction> {
        self.turn.begin(self.horizon)?;
        self.advice = vec![
            self.baseline.predict(x, forecast)?,
            self.meta.predict(x, forecast)?,
        ];
        self.rewa.mixture(&self.advice)
    }

    fn update(&mut self, y: Label) -> Result<()> {
        self.turn.finish()?;
        let losses: Vec<f64> = self.advice.iter().map(|p| p.mistake_prob(y)).collect();
        self.rewa.update(&losses)?;
        self.baseline.update(y)?;
        self.meta.update(y)
    }

    fn is_deterministic(&self) -> bool {
        false
    }

    fn comparators(&self) -> Option<Vec<Hypothesis>> {
        self.baseline.comparators()
    }
}
