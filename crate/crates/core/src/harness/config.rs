use serde::{Deserialize, Serialize};

use crate::adversary::ZnParams;
use crate::error::{Error, Result};
use crate::example::{Example, Label};
use crate::hypotheses::{FiniteTable, HypothesisClass};
use crate::learners::LearnerSpec;
use crate::offline::Mode;
use crate::transcript::digest_bytes;

/// `{"kind": "threshold"}` or `{"kind": "table", "domain": […], "table": […]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassSpec {
    Threshold,
    Table(FiniteTable),
}

impl ClassSpec {
    pub fn build(&self) -> HypothesisClass {
        match self {
            ClassSpec::Threshold => HypothesisClass::Threshold,
            ClassSpec::Table(t) => HypothesisClass::table(t.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PredictorSpec {
    /// Forecasts the true stream.
    Perfect,
    /// A fixed sequence; defaults to all `⋆` for thresholds and the first
    /// domain element for tables.
    Static {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sequence: Option<Vec<Example>>,
    },
    /// The true stream with exactly `mistakes` corrupted positions.
    Corrupting { mistakes: usize },
    /// The block predictor for the lower-bound stream class.
    Zn { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StreamSpec {
    Explicit {
        examples: Vec<Example>,
        labels: Vec<Label>,
    },
    /// Uniform examples labeled by a uniformly drawn hypothesis.
    RandomRealizable,
    /// The adaptive lower-bound adversary; needs a `zn` predictor.
    NatureZn,
    /// A random realizable stream with each label flipped at `rate`.
    AgnosticNoise { rate: f64 },
}

fn one() -> usize {
    1
}

/// One experiment: class, predictor, learner, stream source and trial count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub class: ClassSpec,
    pub predictor: PredictorSpec,
    pub learner: LearnerSpec,
    pub stream: StreamSpec,
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub trials: usize,
    /// Defaults to agnostic for noisy streams, realizable otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub retain_full_predictions: bool,
}

impl GameConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: GameConfig =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(match self.stream {
            StreamSpec::AgnosticNoise { .. } => Mode::Agnostic,
            _ => Mode::Realizable,
        })
    }

    /// Digest of the canonical JSON form, with the seed and trial count
    /// left out so repeated runs of one experiment share it.
    pub fn digest(&self) -> u64 {
        let mut c = self.clone();
        c.seed = 0;
        c.trials = 1;
        digest_bytes(serde_json::to_string(&c).expect("config serializes").as_bytes())
    }

    pub fn zn_params(&self) -> Result<Option<ZnParams>> {
        match self.predictor {
            PredictorSpec::Zn { n } => ZnParams::new(self.horizon, n).map(Some),
            _ => Ok(None),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.horizon;
        if t == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        match &self.stream {
            StreamSpec::Explicit { examples, labels } => {
                if examples.len() != t || labels.len() != t {
                    return Err(Error::Config(format!(
                        "explicit stream has {} examples and {} labels for horizon {t}",
                        examples.len(),
                        labels.len()
                    )));
                }
            }
            StreamSpec::AgnosticNoise { rate } if !(0.0..=1.0).contains(rate) => {
                return Err(Error::Config(format!("flip rate {rate} outside [0, 1]")));
            }
            StreamSpec::NatureZn => {
                if !matches!(self.predictor, PredictorSpec::Zn { .. }) {
                    return Err(Error::Config("nature-zn streams need the zn predictor".into()));
                }
                if self.class != ClassSpec::Threshold {
                    return Err(Error::Config("nature-zn streams need the threshold class".into()));
                }
            }
            _ => {}
        }
        match &self.predictor {
            PredictorSpec::Corrupting { mistakes } if *mistakes >= t => {
                return Err(Error::Config(format!(
                    "{mistakes} corruptions do not fit rounds 2..={t}"
                )));
            }
            PredictorSpec::Static { sequence: Some(s) } if s.len() != t => {
                return Err(Error::Config(format!(
                    "static sequence of length {} for horizon {t}",
                    s.len()
                )));
            }
            PredictorSpec::Zn { .. } => {
                self.zn_params()?;
                if self.class != ClassSpec::Threshold {
                    return Err(Error::Config("the zn predictor needs the threshold class".into()));
                }
            }
            _ => {}
        }
        if let LearnerSpec::Expert(c) = self.learner {
            if c >= t {
                return Err(Error::Config(format!("expert parameter {c} outside 0..{t}")));
            }
        }
        if matches!(
            (self.learner, self.mode()),
            (LearnerSpec::Soa, Mode::Agnostic) | (LearnerSpec::Combined, Mode::Agnostic)
        ) {
            return Err(Error::Config(format!(
                "learner {} is realizable-only",
                self.learner
            )));
        }
        Ok(())
    }
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// Corruption count of a `corrupting` predictor.
    #[serde(rename = "k")]
    K,
    /// The horizon.
    #[serde(rename = "T")]
    T,
}

/// Corruption count used at each point of a horizon sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corruption {
    /// Keep the base config's count.
    #[default]
    Fixed,
    /// `⌈√T⌉`.
    SqrtT,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<usize>,
    #[serde(default)]
    pub corruption: Corruption,
}

impl SweepSpec {
    /// The base config specialised to one axis value.
    pub fn point(&self, base: &GameConfig, value: usize) -> Result<GameConfig> {
        let mut cfg = base.clone();
        match self.axis {
            Axis::K => match &mut cfg.predictor {
                PredictorSpec::Corrupting { mistakes } => *mistakes = value,
                _ => return Err(Error::Config("a k sweep needs a corrupting predictor".into())),
            },
            Axis::T => {
                cfg.horizon = value;
                if self.corruption == Corruption::SqrtT {
                    match &mut cfg.predictor {
                        PredictorSpec::Corrupting { mistakes } => {
                            *mistakes = (value as f64).sqrt().ceil() as usize
                        }
                        _ => {
                            return Err(Error::Config(
                                "sqrt-t corruption needs a corrupting predictor".into(),
                            ))
                        }
                    }
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
