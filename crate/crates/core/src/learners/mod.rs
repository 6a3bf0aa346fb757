//! Online learners that consume a forecast of the example stream.
//!
//! Every learner is a state machine driven by [`OnlineLearner::predict`]
//! (round `t`: the revealed `x_t` and the forecast `x̂^t_{1:T}`) followed by
//! [`OnlineLearner::update`] with `y_t`.

mod combined;
mod meta;
mod restart;
mod soa;

pub use combined::{soa_fits, CombinedAgnostic, CombinedRealizable, HedgeBaseline};
pub use meta::Meta;
pub use restart::{block_boundaries, Expert, Restart};
pub use soa::Soa;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::example::{Example, Label};
use crate::hypotheses::{Hypothesis, HypothesisClass};
use crate::offline::Mode;
use crate::predictors::Forecast;
use crate::transcript::Prediction;

pub trait OnlineLearner: Send {
    fn name(&self) -> String;

    fn horizon(&self) -> usize;

    /// Label distribution for `x_t` given the forecast made at round `t`.
    fn predict(&mut self, x: &Example, forecast: &Forecast) -> Result<Prediction>;

    /// Absorbs `y_t`; must follow a call to `predict`.
    fn update(&mut self, y: Label) -> Result<()>;

    /// Whether every prediction is a point mass.
    fn is_deterministic(&self) -> bool;

    /// Offline learners instantiated so far, for restart-based learners.
    fn instances(&self) -> Option<u64> {
        None
    }

    /// The fixed comparator set of a finite-class baseline, if any.
    fn comparators(&self) -> Option<Vec<Hypothesis>> {
        None
    }
}

impl<L: OnlineLearner + ?Sized> OnlineLearner for Box<L> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn horizon(&self) -> usize {
        (**self).horizon()
    }

    fn predict(&mut self, x: &Example, forecast: &Forecast) -> Result<Prediction> {
        (**self).predict(x, forecast)
    }

    fn update(&mut self, y: Label) -> Result<()> {
        (**self).update(y)
    }

    fn is_deterministic(&self) -> bool {
        (**self).is_deterministic()
    }

    fn instances(&self) -> Option<u64> {
        (**self).instances()
    }

    fn comparators(&self) -> Option<Vec<Hypothesis>> {
        (**self).comparators()
    }
}

/// Learner selection: `soa`, `restart`, `expert:<c>`, `meta`, `combined` or
/// `combined-agnostic`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LearnerSpec {
    Soa,
    Restart,
    Expert(usize),
    Meta,
    Combined,
    CombinedAgnostic,
}

impl FromStr for LearnerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "soa" => LearnerSpec::Soa,
            "restart" => LearnerSpec::Restart,
            "meta" => LearnerSpec::Meta,
            "combined" => LearnerSpec::Combined,
            "combined-agnostic" => LearnerSpec::CombinedAgnostic,
            other => match other.strip_prefix("expert:") {
                Some(c) => LearnerSpec::Expert(
                    c.parse()
                        .map_err(|_| Error::Config(format!("bad expert parameter {c:?}")))?,
                ),
                None => return Err(Error::Config(format!("unknown learner {other:?}"))),
            },
        })
    }
}

impl TryFrom<String> for LearnerSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LearnerSpec> for String {
    fn from(s: LearnerSpec) -> String {
        s.to_string()
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerSpec::Soa => write!(f, "soa"),
            LearnerSpec::Restart => write!(f, "restart"),
            LearnerSpec::Expert(c) => write!(f, "expert:{c}"),
            LearnerSpec::Meta => write!(f, "meta"),
            LearnerSpec::Combined => write!(f, "combined"),
            LearnerSpec::CombinedAgnostic => write!(f, "combined-agnostic"),
        }
    }
}

impl LearnerSpec {
    /// Builds the learner for `class` over `horizon` rounds.
    pub fn build(
        &self,
        class: &HypothesisClass,
        horizon: usize,
        mode: Mode,
    ) -> Result<Box<dyn OnlineLearner>> {
        if horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        Ok(match (self, mode) {
            (LearnerSpec::Soa, Mode::Realizable) => Box::new(Soa::new(class, horizon)?),
            (LearnerSpec::Soa, Mode::Agnostic) => {
                return Err(Error::Config("soa is realizable-only".into()))
            }
            (LearnerSpec::Restart, _) => Box::new(Restart::new(class.clone(), mode, horizon)),
            (LearnerSpec::Expert(c), _) => Box::new(Expert::new(class.clone(), mode, horizon, *c)?),
            (LearnerSpec::Meta, _) => Box::new(Meta::new(class.clone(), mode, horizon)?),
            (LearnerSpec::Combined, Mode::Realizable) => {
                Box::new(CombinedRealizable::new(class, horizon)?)
            }
            (LearnerSpec::Combined, Mode::Agnostic) => {
                return Err(Error::Config(
                    "combined is realizable-only; use combined-agnostic".into(),
                ))
            }
            (LearnerSpec::CombinedAgnostic, _) => Box::new(CombinedAgnostic::new(class.clone(), horizon)?),
        })
    }
}

/// Guards the predict/update alternation shared by all learners.
#[derive(Debug, Clone, Default)]
pub(crate) struct Turn {
    round: usize,
    awaiting_label: bool,
}

impl Turn {
    pub(crate) fn begin(&mut self, horizon: usize) -> Result<usize> {
        if self.awaiting_label {
            return Err(Error::Contract("predict called twice without an update".into()));
        }
        if self.round >= horizon {
            return Err(Error::Structural(format!(
                "round {} past the horizon {horizon}",
                self.round + 1
            )));
        }
        self.round += 1;
        self.awaiting_label = true;
        Ok(self.round)
    }

    pub(crate) fn finish(&mut self) -> Result<usize> {
        if !self.awaiting_label {
            return Err(Error::Contract("update called without a prediction".into()));
        }
        self.awaiting_label = false;
        Ok(self.round)
    }
}

/// Rewrites a nested learner's local violation round to the global one.
pub(crate) fn at_round(round: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::RealizabilityViolation { .. } => Error::RealizabilityViolation { round },
        e => e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_strings_round_trip() {
        for s in ["soa", "restart", "expert:3", "meta", "combined", "combined-agnostic"] {
            let spec: LearnerSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("expert:x".parse::<LearnerSpec>().is_err());
        assert!("oracle".parse::<LearnerSpec>().is_err());
        let json: LearnerSpec = serde_json::from_str("\"expert:2\"").unwrap();
        assert_eq!(json, LearnerSpec::Expert(2));
    }

    #[test]
    fn mode_restrictions() {
        let c = HypothesisClass::Threshold;
        assert!(LearnerSpec::Soa.build(&c, 4, Mode::Agnostic).is_err());
        assert!(LearnerSpec::Combined.build(&c, 4, Mode::Agnostic).is_err());
        assert!(LearnerSpec::Expert(4).build(&c, 4, Mode::Realizable).is_err());
        assert!(LearnerSpec::Restart.build(&c, 0, Mode::Realizable).is_err());
    }
}
