//! Transductive learners: initialized with the whole example sequence, they
//! then predict its labels in order.
//!
//! The realizable learner is halving over the class projected onto the
//! sequence; the agnostic learner runs exponential weights over the same
//! projected behaviors. Thresholds never materialize the projection: every
//! behavior is a cut in the sorted order of the sequence's points, so
//! a version space is a contiguous range of cuts.

mod bound;

pub use bound::{offline_bound, BoundFn};

use serde::{Deserialize, Serialize};

use crate::aggregate::Rewa;
use crate::error::{contract, structural, Error, Result};
use crate::example::{Example, Label, LabeledStream};
use crate::hypotheses::{project, sorted_distinct_points, FiniteTable, HypothesisClass};
use crate::transcript::Prediction;

/// Realizable (mistake-bounded) or agnostic (regret-bounded) play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Realizable,
    Agnostic,
}

/// Representation used for the projected class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Cut ranges for thresholds, explicit tables otherwise.
    Auto,
    /// Always materialize the projected table.
    Table,
}

/// Rank of each position among the distinct points of `xs`; `None` for `⋆`.
fn threshold_ranks(xs: &[Example]) -> Result<(Vec<Option<usize>>, usize)> {
    let points = sorted_distinct_points(xs)?;
    let ranks = xs
        .iter()
        .map(|x| x.as_point().map(|q| points.binary_search(q).unwrap_or_else(|i| i)))
        .collect();
    Ok((ranks, points.len()))
}

/// Label of cut `g` at rank `r`: the `g` smallest points get label 1.
fn cut_label(g: usize, rank: Option<usize>) -> Label {
    Label::from(rank.is_some_and(|r| r < g))
}

#[derive(Debug, Clone)]
enum Engine {
    TableHalving {
        table: FiniteTable,
        alive: Vec<bool>,
    },
    /// Surviving cuts are exactly `lo..=hi`.
    CutHalving {
        ranks: Vec<Option<usize>>,
        lo: usize,
        hi: usize,
    },
    TableHedge {
        table: FiniteTable,
        weights: Rewa,
    },
    CutHedge {
        ranks: Vec<Option<usize>>,
        weights: Rewa,
    },
}

/// A transductive learner bound to its initializing sequence.
///
/// It answers only at its cursor: [`OfflineLearner::predict_at`] rejects any
/// example other than the next one in the sequence.
#[derive(Debug, Clone)]
pub struct OfflineLearner {
    sequence: Vec<Example>,
    cursor: usize,
    mode: Mode,
    behaviors: usize,
    label_count: usize,
    engine: Engine,
}

impl OfflineLearner {
    pub fn new(class: &HypothesisClass, xs: &[Example], mode: Mode) -> Result<Self> {
        Self::with_backend(class, xs, mode, Backend::Auto)
    }

    pub fn with_backend(
        class: &HypothesisClass,
        xs: &[Example],
        mode: Mode,
        backend: Backend,
    ) -> Result<Self> {
        if xs.is_empty() {
            return Err(structural("offline learner needs a nonempty sequence"));
        }
        let cuts = matches!(class, HypothesisClass::Threshold) && backend == Backend::Auto;
        let (engine, behaviors) = if cuts {
            let (ranks, k) = threshold_ranks(xs)?;
            let engine = match mode {
                Mode::Realizable => Engine::CutHalving { ranks, lo: 0, hi: k },
                Mode::Agnostic => Engine::CutHedge {
                    ranks,
                    weights: Rewa::new(k + 1, xs.len())?,
                },
            };
            (engine, k + 1)
        } else {
            let table = project(class, xs)?;
            let n = table.len();
            let engine = match mode {
                Mode::Realizable => Engine::TableHalving {
                    alive: vec![true; n],
                    table,
                },
                Mode::Agnostic => Engine::TableHedge {
                    weights: Rewa::new(n, xs.len())?,
                    table,
                },
            };
            (engine, n)
        };
        Ok(Self {
            sequence: xs.to_vec(),
            cursor: 0,
            mode,
            behaviors,
            label_count: class.label_count(),
            engine,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn sequence(&self) -> &[Example] {
        &self.sequence
    }

    pub fn horizon(&self) -> usize {
        self.sequence.len()
    }

    /// 1-based index of the next round, in `1..=T'+1`.
    pub fn round(&self) -> usize {
        self.cursor + 1
    }

    pub fn is_finished(&self) -> bool {
        self.cursor == self.sequence.len()
    }

    /// The example the learner will be asked about next.
    pub fn next_example(&self) -> Option<&Example> {
        self.sequence.get(self.cursor)
    }

    /// Number of distinct projected behaviors.
    pub fn behaviors(&self) -> usize {
        self.behaviors
    }

    /// Surviving behaviors in realizable mode.
    pub fn survivors(&self) -> Option<usize> {
        match &self.engine {
            Engine::TableHalving { alive, .. } => Some(alive.iter().filter(|&&a| a).count()),
            Engine::CutHalving { lo, hi, .. } => Some(hi + 1 - lo),
            _ => None,
        }
    }

    /// Learning rate of the agnostic learner.
    pub fn learning_rate(&self) -> Option<f64> {
        match &self.engine {
            Engine::TableHedge { weights, .. } | Engine::CutHedge { weights, .. } => Some(weights.eta()),
            _ => None,
        }
    }

    fn ensure_open(&self) -> Result<()> {
        if self.is_finished() {
            return Err(structural(format!(
                "offline learner queried past its horizon {}",
                self.sequence.len()
            )));
        }
        Ok(())
    }

    /// Prediction for the example at the cursor.
    pub fn predict(&self) -> Result<Prediction> {
        self.ensure_open()?;
        let c = self.cursor;
        Ok(match &self.engine {
            Engine::TableHalving { table, alive } => {
                let mut counts = vec![0usize; self.label_count];
                for (row, _) in table.rows().iter().zip(alive).filter(|(_, &a)| a) {
                    counts[row[c].index()] += 1;
                }
                Prediction::Point(plurality(&counts))
            }
            Engine::CutHalving { ranks, lo, hi } => {
                // cuts g in lo..=hi with g > rank label the position 1
                let ones = match ranks[c] {
                    Some(r) => (hi + 1).saturating_sub((r + 1).max(*lo)),
                    None => 0,
                };
                let zeros = hi + 1 - lo - ones;
                Prediction::Point(plurality(&[zeros, ones]))
            }
            Engine::TableHedge { table, weights } => {
                let advice: Vec<Prediction> =
                    table.rows().iter().map(|row| Prediction::Point(row[c])).collect();
                weights.mixture(&advice)?
            }
            Engine::CutHedge { ranks, weights } => {
                let advice: Vec<Prediction> = (0..weights.experts())
                    .map(|g| Prediction::Point(cut_label(g, ranks[c])))
                    .collect();
                weights.mixture(&advice)?
            }
        })
    }

    /// Like [`predict`](Self::predict), after checking that `x` is the
    /// example at the cursor.
    pub fn predict_at(&self, x: &Example) -> Result<Prediction> {
        self.ensure_open()?;
        if &self.sequence[self.cursor] != x {
            return Err(contract(format!(
                "offline learner expected {} at its round {}, got {x}",
                self.sequence[self.cursor],
                self.round()
            )));
        }
        self.predict()
    }

    /// Absorbs the true label of the example at the cursor and advances.
    pub fn update(&mut self, y: Label) -> Result<()> {
        self.ensure_open()?;
        let c = self.cursor;
        match &mut self.engine {
            Engine::TableHalving { table, alive } => {
                for (row, a) in table.rows().iter().zip(alive.iter_mut()) {
                    *a &= row[c] == y;
                }
                if !alive.iter().any(|&a| a) {
                    return Err(Error::RealizabilityViolation { round: c + 1 });
                }
            }
            Engine::CutHalving { ranks, lo, hi } => {
                match (ranks[c], y) {
                    (Some(r), Label::ONE) => *lo = (*lo).max(r + 1),
                    (Some(r), Label::ZERO) => *hi = (*hi).min(r),
                    (None, Label::ZERO) => {}
                    _ => *lo = *hi + 1,
                }
                if lo > hi {
                    return Err(Error::RealizabilityViolation { round: c + 1 });
                }
            }
            Engine::TableHedge { table, weights } => {
                let losses: Vec<f64> = table
                    .rows()
                    .iter()
                    .map(|row| if row[c] == y { 0.0 } else { 1.0 })
                    .collect();
                weights.update(&losses)?;
            }
            Engine::CutHedge { ranks, weights } => {
                let losses: Vec<f64> = (0..weights.experts())
                    .map(|g| if cut_label(g, ranks[c]) == y { 0.0 } else { 1.0 })
                    .collect();
                weights.update(&losses)?;
            }
        }
        self.cursor += 1;
        Ok(())
    }
}

/// Index of the largest count, ties toward the smaller label.
fn plurality(counts: &[usize]) -> Label {
    let mut best = 0;
    for (l, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = l;
        }
    }
    Label(best as u32)
}

/// `min_h Σ_t 1{h(x_t) ≠ y_t}` over the class projected on the stream.
pub fn best_in_hindsight(class: &HypothesisClass, stream: &LabeledStream) -> Result<u64> {
    let xs = stream.examples();
    let ys = stream.labels();
    match class {
        HypothesisClass::Threshold => {
            let (ranks, k) = threshold_ranks(&xs)?;
            // loss(g) = #(rank < g, y ≠ 1) + #(rank ≥ g, y ≠ 0) + #(⋆, y ≠ 0)
            let mut not_one = vec![0u64; k];
            let mut not_zero = vec![0u64; k];
            let mut base = 0u64;
            for (r, y) in ranks.iter().zip(&ys) {
                match r {
                    Some(r) => {
                        not_one[*r] += u64::from(*y != Label::ONE);
                        not_zero[*r] += u64::from(*y != Label::ZERO);
                    }
                    None => base += u64::from(*y != Label::ZERO),
                }
            }
            let mut loss = base + not_zero.iter().sum::<u64>();
            let mut best = loss;
            for r in 0..k {
                loss = loss - not_zero[r] + not_one[r];
                best = best.min(loss);
            }
            Ok(best)
        }
        HypothesisClass::Table(_) => {
            let table = project(class, &xs)?;
            Ok(table
                .rows()
                .iter()
                .map(|row| row.iter().zip(&ys).filter(|(h, y)| h != y).count() as u64)
                .min()
                .unwrap_or(0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::ratio;

    fn pts(ns: &[i64], d: i64) -> Vec<Example> {
        ns.iter().map(|&n| Example::frac(n, d).unwrap()).collect()
    }

    #[test]
    fn seven_points_give_eight_behaviors() {
        let xs = pts(&[3, 1, 7, 5, 2, 6, 4], 8);
        let l = OfflineLearner::new(&HypothesisClass::Threshold, &xs, Mode::Realizable).unwrap();
        assert_eq!(l.behaviors(), 8);
        assert_eq!(l.survivors(), Some(8));
        assert_eq!(l.round(), 1);
    }

    #[test]
    fn agnostic_rate_for_two_behaviors() {
        let t = FiniteTable::new(
            vec![Example::Atom(0)],
            vec![vec![Label(0)], vec![Label(1)]],
        )
        .unwrap();
        let xs = vec![Example::Atom(0); 32];
        let l = OfflineLearner::new(&HypothesisClass::table(t), &xs, Mode::Agnostic).unwrap();
        assert!((l.learning_rate().unwrap() - 0.4163).abs() < 1e-4);
    }

    #[test]
    fn empty_sequence_rejected() {
        assert!(OfflineLearner::new(&HypothesisClass::Threshold, &[], Mode::Realizable).is_err());
    }

    #[test]
    fn queries_off_the_sequence_are_contract_errors() {
        let xs = pts(&[1, 2], 4);
        let mut l = OfflineLearner::new(&HypothesisClass::Threshold, &xs, Mode::Realizable).unwrap();
        assert!(matches!(l.predict_at(&xs[1]), Err(Error::Contract(_))));
        l.predict_at(&xs[0]).unwrap();
        l.update(Label(1)).unwrap();
        l.update(Label(0)).unwrap();
        assert!(l.is_finished());
        assert!(matches!(l.update(Label(0)), Err(Error::Structural(_))));
        assert!(l.predict().is_err());
    }

    #[test]
    fn contradiction_is_a_realizability_violation() {
        let xs = pts(&[1, 2], 4);
        let mut l = OfflineLearner::new(&HypothesisClass::Threshold, &xs, Mode::Realizable).unwrap();
        l.update(Label(0)).unwrap();
        assert_eq!(l.update(Label(1)), Err(Error::RealizabilityViolation { round: 2 }));
        let mut s = OfflineLearner::new(&HypothesisClass::Threshold, &[Example::Star], Mode::Realizable).unwrap();
        assert!(s.update(Label(1)).is_err());
    }

    #[test]
    fn halving_predicts_majority_with_low_ties() {
        // 3 points, 4 cuts; at the middle point two cuts say 1 and two say 0
        let xs = pts(&[2, 1, 3], 4);
        let mut l = OfflineLearner::new(&HypothesisClass::Threshold, &xs, Mode::Realizable).unwrap();
        assert_eq!(l.predict().unwrap(), Prediction::Point(Label(0)));
        l.update(Label(1)).unwrap();
        // survivors: cuts 2, 3 both label 1/4 as 1
        assert_eq!(l.survivors(), Some(2));
        assert_eq!(l.predict().unwrap(), Prediction::Point(Label(1)));
    }

    #[test]
    fn best_in_hindsight_examples() {
        let xs = pts(&[1, 2, 3, 4], 5);
        let c = HypothesisClass::Threshold;
        // labels of the threshold at 2/5 → 0
        let s = LabeledStream::from_parts(xs.clone(), vec![Label(1), Label(1), Label(0), Label(0)]).unwrap();
        assert_eq!(best_in_hindsight(&c, &s).unwrap(), 0);
        // complement of that behavior
        let s = LabeledStream::from_parts(xs.clone(), vec![Label(0), Label(0), Label(1), Label(1)]).unwrap();
        assert_eq!(best_in_hindsight(&c, &s).unwrap(), 2);
        let s = LabeledStream::from_parts(xs, vec![Label(0); 4]).unwrap();
        assert_eq!(best_in_hindsight(&c, &s).unwrap(), 0);
        let s = LabeledStream::from_parts(vec![Example::Star], vec![Label(1)]).unwrap();
        assert_eq!(best_in_hindsight(&c, &s).unwrap(), 1);
    }

    #[test]
    fn ranks_handle_repeats_and_stars() {
        let xs = vec![Example::Point(ratio(1, 2)), Example::Star, Example::Point(ratio(1, 4)), Example::Point(ratio(1, 2))];
        let (ranks, k) = threshold_ranks(&xs).unwrap();
        assert_eq!(k, 2);
        assert_eq!(ranks, vec![Some(1), None, Some(0), Some(1)]);
    }
}
