use serde::{Deserialize, Serialize};

use crate::hypotheses::HypothesisClass;

use super::Mode;

/// Closed-form mistake or regret bound as a function of the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "c", rename_all = "snake_case")]
pub enum BoundFn {
    /// `c`
    Constant(f64),
    /// `c·log2(T+1)`
    Log(f64),
    /// `c·sqrt(T·log2(T+1))`
    SqrtLog(f64),
    /// `c·sqrt(T)`
    Sqrt(f64),
}

impl BoundFn {
    /// Value at a real horizon `t ≥ 0`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match *self {
            BoundFn::Constant(c) => c,
            BoundFn::Log(c) => c * (t + 1.0).log2(),
            BoundFn::SqrtLog(c) => c * (t * (t + 1.0).log2()).sqrt(),
            BoundFn::Sqrt(c) => c * t.sqrt(),
        }
    }

    pub fn coefficient(&self) -> f64 {
        match *self {
            BoundFn::Constant(c) | BoundFn::Log(c) | BoundFn::SqrtLog(c) | BoundFn::Sqrt(c) => c,
        }
    }

    /// Checks monotonicity and midpoint concavity on `1..=max_t`.
    pub fn is_concave_nondecreasing(&self, max_t: u32) -> bool {
        let tol = 1e-9;
        let max_t = max_t.max(2);
        let f = |t: u32| self.eval(t as f64);
        (1..max_t).all(|t| f(t + 1) + tol >= f(t))
            && (1..=max_t).all(|a| {
                (a..=max_t).step_by(((max_t - a) / 16).max(1) as usize).all(|b| {
                    self.eval((a + b) as f64 / 2.0) + tol >= (f(a) + f(b)) / 2.0
                })
            })
    }

    pub fn describe(&self) -> String {
        match *self {
            BoundFn::Constant(c) => format!("{c}"),
            BoundFn::Log(c) => format!("{c}*log2(T+1)"),
            BoundFn::SqrtLog(c) => format!("{c}*sqrt(T*log2(T+1))"),
            BoundFn::Sqrt(c) => format!("{c}*sqrt(T)"),
        }
    }
}

/// Mistake bound (realizable) or regret bound (agnostic) of the offline
/// learner built by [`super::OfflineLearner::new`] for `class`.
pub fn offline_bound(class: &HypothesisClass, mode: Mode) -> BoundFn {
    match (class, mode) {
        // halving over at most T + 1 gap behaviors
        (HypothesisClass::Threshold, Mode::Realizable) => BoundFn::Log(1.0),
        (HypothesisClass::Threshold, Mode::Agnostic) => BoundFn::SqrtLog(1.0),
        (HypothesisClass::Table(t), Mode::Realizable) => BoundFn::Constant((t.len() as f64).log2()),
        (HypothesisClass::Table(t), Mode::Agnostic) => BoundFn::Sqrt((t.len() as f64).log2().sqrt()),
    }
}
