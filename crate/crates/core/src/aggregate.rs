//! Expert aggregation: deterministic weighted majority (DWMA) and randomized
//! exponential weights (REWA).

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{structural, Result};
use crate::example::{Label, Rational};
use crate::transcript::Prediction;

/// Deterministic weighted majority with learning rate 1/2.
///
/// Expert `i`'s weight is exactly `2^{-m_i}` where `m_i` is its mistake
/// count, so the state is the vector of mistake counts and every comparison
/// is exact. Predictions are the weighted plurality label; ties go to the
/// smaller label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dwma {
    mistakes: Vec<u64>,
}

impl Dwma {
    pub const ETA: f64 = 0.5;

    pub fn new(experts: usize) -> Result<Self> {
        if experts == 0 {
            return Err(structural("DWMA needs at least one expert"));
        }
        Ok(Self {
            mistakes: vec![0; experts],
        })
    }

    /// Starts from given per-expert mistake counts.
    pub fn from_mistakes(mistakes: Vec<u64>) -> Result<Self> {
        if mistakes.is_empty() {
            return Err(structural("DWMA needs at least one expert"));
        }
        Ok(Self { mistakes })
    }

    pub fn experts(&self) -> usize {
        self.mistakes.len()
    }

    pub fn mistakes(&self) -> &[u64] {
        &self.mistakes
    }

    /// Exact weight `2^{-m_i}`.
    pub fn weight(&self, i: usize) -> Rational {
        Rational::new(BigInt::one(), BigInt::one() << self.mistakes[i] as usize)
    }

    fn check(&self, advice: &[Label]) -> Result<()> {
        if advice.len() != self.mistakes.len() {
            return Err(structural(format!(
                "{} pieces of advice for {} experts",
                advice.len(),
                self.mistakes.len()
            )));
        }
        Ok(())
    }

    /// Weighted plurality of `advice`.
    pub fn predict(&self, advice: &[Label]) -> Result<Label> {
        self.check(advice)?;
        let top = *self.mistakes.iter().max().unwrap_or(&0);
        let labels = advice.iter().map(|l| l.index() + 1).max().unwrap_or(1);
        // Scale every weight by 2^top so the sums are integers.
        let mut mass = vec![BigUint::zero(); labels];
        for (a, &m) in advice.iter().zip(&self.mistakes) {
            mass[a.index()] += BigUint::one() << (top - m) as usize;
        }
        let mut best = 0;
        for (l, v) in mass.iter().enumerate() {
            if v > &mass[best] {
                best = l;
            }
        }
        Ok(Label(best as u32))
    }

    /// Halves the weight of every expert whose advice differs from `y`.
    pub fn update(&mut self, advice: &[Label], y: Label) -> Result<()> {
        self.check(advice)?;
        for (a, m) in advice.iter().zip(self.mistakes.iter_mut()) {
            if *a != y {
                *m += 1;
            }
        }
        Ok(())
    }
}

/// Randomized exponential weights over `N` experts with a known horizon.
///
/// Weights are kept in log space; the normalized distribution is a softmax
/// shifted by the largest log-weight, so it never underflows to zero mass.
#[derive(Debug, Clone, PartialEq)]
pub struct Rewa {
    log_weights: Vec<f64>,
    eta: f64,
}

impl Rewa {
    /// `η = sqrt(8 ln N / T)`.
    pub fn learning_rate(experts: usize, horizon: usize) -> f64 {
        if experts <= 1 || horizon == 0 {
            return 0.0;
        }
        (8.0 * (experts as f64).ln() / horizon as f64).sqrt()
    }

    pub fn new(experts: usize, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(structural("REWA needs a positive horizon"));
        }
        Self::with_rate(experts, Self::learning_rate(experts, horizon))
    }

    pub fn with_rate(experts: usize, eta: f64) -> Result<Self> {
        if experts == 0 {
            return Err(structural("REWA needs at least one expert"));
        }
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(structural(format!("invalid learning rate {eta}")));
        }
        Ok(Self {
            log_weights: vec![0.0; experts],
            eta,
        })
    }

    /// Starts from explicit positive weights.
    pub fn from_weights(weights: &[f64], eta: f64) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(structural("REWA weights must be positive"));
        }
        let mut r = Self::with_rate(weights.len(), eta)?;
        r.log_weights = weights.iter().map(|w| w.ln()).collect();
        Ok(r)
    }

    pub fn experts(&self) -> usize {
        self.log_weights.len()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Normalized distribution over experts.
    pub fn distribution(&self) -> Vec<f64> {
        let top = self
            .log_weights
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = self.log_weights.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    /// The label distribution obtained by following a random expert.
    pub fn mixture(&self, advice: &[Prediction]) -> Result<Prediction> {
        if advice.len() != self.experts() {
            return Err(structural(format!(
                "{} pieces of advice for {} experts",
                advice.len(),
                self.experts()
            )));
        }
        Ok(Prediction::mix(&self.distribution(), advice))
    }

    /// Draws an expert index from the current distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let dist = self.distribution();
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, p) in dist.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        dist.len() - 1
    }

    /// Multiplies weight `i` by `exp(−η·loss_i)`. Losses must lie in `[0, 1]`.
    pub fn update(&mut self, losses: &[f64]) -> Result<()> {
        if losses.len() != self.experts() {
            return Err(structural(format!(
                "{} losses for {} experts",
                losses.len(),
                self.experts()
            )));
        }
        if let Some(l) = losses.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(structural(format!("loss {l} outside [0, 1]")));
        }
        for (w, l) in self.log_weights.iter_mut().zip(losses) {
            *w -= self.eta * l;
        }
        Ok(())
    }
}
