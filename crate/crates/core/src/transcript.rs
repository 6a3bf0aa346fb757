//! Per-round records of a game and the expected-mistake / regret accounting
//! built on them.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{structural, Result};
use crate::example::{Example, Label};

/// Tolerance on the total mass of floating-point label distributions.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// A learner's randomized prediction for one round, as a distribution over labels.
///
/// Deterministic learners emit `Point`, whose mistake probability is exactly
/// 0 or 1, so sums of them stay exact integers. Exponential-weights learners
/// emit `Mixture`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Prediction {
    Point(Label),
    Mixture(Vec<f64>),
}

impl Prediction {
    /// Probability assigned to `y`.
    pub fn prob(&self, y: Label) -> f64 {
        match self {
            Prediction::Point(l) => {
                if *l == y {
                    1.0
                } else {
                    0.0
                }
            }
            Prediction::Mixture(p) => p.get(y.index()).copied().unwrap_or(0.0),
        }
    }

    /// Probability of predicting label 1 (the `p̂_t` nature observes).
    pub fn prob_one(&self) -> f64 {
        self.prob(Label::ONE)
    }

    /// Expected 0-1 loss against the true label.
    pub fn mistake_prob(&self, y: Label) -> f64 {
        match self {
            Prediction::Point(l) => {
                if *l == y {
                    0.0
                } else {
                    1.0
                }
            }
            Prediction::Mixture(_) => (1.0 - self.prob(y)).max(0.0),
        }
    }

    /// Most likely label, ties toward the smaller label.
    pub fn mode(&self) -> Label {
        match self {
            Prediction::Point(l) => *l,
            Prediction::Mixture(p) => {
                let mut best = 0;
                for (i, &v) in p.iter().enumerate() {
                    if v > p[best] {
                        best = i;
                    }
                }
                Label(best as u32)
            }
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Prediction::Point(_))
    }

    /// Checks nonnegativity and unit mass.
    pub fn validate(&self) -> Result<()> {
        if let Prediction::Mixture(p) = self {
            if p.is_empty() || p.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(structural(format!("invalid label distribution {p:?}")));
            }
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(structural(format!("label distribution sums to {total}")));
            }
        }
        Ok(())
    }

    /// Dense probability vector with at least `labels` entries.
    pub fn to_vec(&self, labels: usize) -> Vec<f64> {
        match self {
            Prediction::Point(l) => {
                let mut v = vec![0.0; labels.max(l.index() + 1)];
                v[l.index()] = 1.0;
                v
            }
            Prediction::Mixture(p) => {
                let mut v = p.clone();
                if v.len() < labels {
                    v.resize(labels, 0.0);
                }
                v
            }
        }
    }

    /// `Σ_i weights[i] · parts[i]`, collapsing to a point mass when every
    /// part with positive weight agrees on a single label.
    pub fn mix(weights: &[f64], parts: &[Prediction]) -> Prediction {
        debug_assert_eq!(weights.len(), parts.len());
        let support: Vec<&Prediction> = weights
            .iter()
            .zip(parts)
            .filter(|(w, _)| **w > 0.0)
            .map(|(_, p)| p)
            .collect();
        if let Some(Prediction::Point(first)) = support.first() {
            if support.iter().all(|p| **p == Prediction::Point(*first)) {
                return Prediction::Point(*first);
            }
        }
        let labels = parts
            .iter()
            .map(|p| match p {
                Prediction::Point(l) => l.index() + 1,
                Prediction::Mixture(v) => v.len(),
            })
            .max()
            .unwrap_or(2);
        let mut out = vec![0.0; labels];
        for (w, p) in weights.iter().zip(parts) {
            for (slot, v) in out.iter_mut().zip(p.to_vec(labels)) {
                *slot += w * v;
            }
        }
        let total: f64 = out.iter().sum();
        if total > 0.0 {
            out.iter_mut().for_each(|v| *v /= total);
        }
        Prediction::Mixture(out)
    }

    /// `"p0;p1;..."` with shortest round-trip float formatting.
    pub fn format_dist(&self, labels: usize) -> String {
        self.to_vec(labels)
            .iter()
            .map(|v| format!("{v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// One round of Protocol-2 play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// 1-based round index.
    pub t: usize,
    pub x: Example,
    pub y: Label,
    pub prediction: Prediction,
    pub predictor_output_digest: u64,
    /// Whether the predictor's previous forecast was wrong at this round.
    /// Always false at `t = 1`.
    pub predictor_mistake: bool,
    /// The full forecast `x̂^t_{1:T}`, kept only when retention was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_prediction: Option<Vec<Example>>,
}

/// A complete record of one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub horizon: usize,
    pub rounds: Vec<RoundRecord>,
    pub config_digest: u64,
    pub seed: u64,
}

impl Transcript {
    pub fn new(horizon: usize, config_digest: u64, seed: u64) -> Self {
        Self {
            horizon,
            rounds: Vec::with_capacity(horizon),
            config_digest,
            seed,
        }
    }

    pub fn push(&mut self, record: RoundRecord) {
        self.rounds.push(record);
    }

    pub fn is_complete(&self) -> bool {
        self.rounds.len() == self.horizon
    }

    /// Checks length, index order and the round-1 predictor convention.
    pub fn validate(&self) -> Result<()> {
        if !self.is_complete() {
            return Err(structural(format!(
                "transcript has {} of {} rounds",
                self.rounds.len(),
                self.horizon
            )));
        }
        for (i, r) in self.rounds.iter().enumerate() {
            if r.t != i + 1 {
                return Err(structural(format!("round {} recorded at position {}", r.t, i + 1)));
            }
            r.prediction.validate()?;
        }
        if self.rounds.first().is_some_and(|r| r.predictor_mistake) {
            return Err(structural("predictor mistake flagged at round 1"));
        }
        Ok(())
    }

    /// Concatenates two transcripts, renumbering the second one's rounds.
    pub fn concat(&self, other: &Transcript) -> Transcript {
        let mut out = self.clone();
        out.horizon += other.horizon;
        for r in &other.rounds {
            let mut r = r.clone();
            r.t += self.rounds.len();
            out.rounds.push(r);
        }
        out
    }

    pub fn examples(&self) -> Vec<Example> {
        self.rounds.iter().map(|r| r.x.clone()).collect()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.rounds.iter().map(|r| r.y).collect()
    }
}

/// `Σ_t (1 − prediction_t[y_t])`.
pub fn expected_mistakes(tr: &Transcript) -> Result<f64> {
    if !tr.is_complete() {
        return Err(structural(format!(
            "cannot score an incomplete transcript ({} of {} rounds)",
            tr.rounds.len(),
            tr.horizon
        )));
    }
    Ok(tr.rounds.iter().map(|r| r.prediction.mistake_prob(r.y)).sum())
}

/// Expected mistakes minus the best fixed hypothesis' loss. May be negative.
pub fn regret(tr: &Transcript, best_loss: u64) -> Result<f64> {
    Ok(expected_mistakes(tr)? - best_loss as f64)
}

/// Number of rounds `t ≥ 2` at which the predictor's forecast was wrong.
pub fn predictor_mistake_count(tr: &Transcript) -> u64 {
    tr.rounds
        .iter()
        .filter(|r| r.t >= 2 && r.predictor_mistake)
        .count() as u64
}

/// 64-bit digest of an example sequence.
pub fn sequence_digest(xs: &[Example]) -> u64 {
    let mut buf = Vec::with_capacity(xs.len() * 8);
    for x in xs {
        x.write_bytes(&mut buf);
    }
    digest_bytes(&buf)
}

pub fn digest_bytes(bytes: &[u8]) -> u64 {
    let out = Sha256::digest(bytes);
    let mut head = [0u8; 8];
    head.copy_from_slice(&out[..8]);
    u64::from_le_bytes(head)
}
