use crate::error::{contract, structural, Result};
use crate::example::{Example, Label, LabeledStream};
use crate::hypotheses::VersionSpace;
use crate::learners::OnlineLearner;
use crate::predictors::{Forecast, Predictor};
use crate::transcript::{digest_bytes, sequence_digest, RoundRecord, Transcript};

use super::{stream_gen, ZnParams, ZnPredictor};

/// One round of the offline strategy: answer against the learner's lean
/// whenever some surviving hypothesis allows it.
pub fn nature_offline_step(p_one: f64, v: &VersionSpace, x: &Example) -> Result<(Label, VersionSpace)> {
    if v.is_empty() {
        return Err(structural("nature started from an empty version space"));
    }
    let (against, with) = if p_one >= 0.5 {
        (Label::ZERO, Label::ONE)
    } else {
        (Label::ONE, Label::ZERO)
    };
    let y = if v.exists(x, against)? { against } else { with };
    Ok((y, v.restrict(x, y)?))
}

/// Result of a full game against the block predictor.
#[derive(Debug, Clone)]
pub struct PeeksOutcome {
    pub stream: LabeledStream,
    pub transcript: Transcript,
    /// `j_1, …, j_n`.
    pub indices: Vec<usize>,
    /// `V_1, …, V_{n+2}`.
    pub version_spaces: Vec<VersionSpace>,
    /// `Σ_t (1 − p̂_t(y_t))` under the learner's own distributions.
    pub forced: f64,
    pub predictor_mistake_rounds: Vec<usize>,
}

/// Plays nature's block strategy against `learner` over the threshold class,
/// with the block predictor wrapped lazy and consistent.
pub fn nature_peeks_game(
    learner: &mut dyn OnlineLearner,
    params: &ZnParams,
    retain_predictions: bool,
) -> Result<PeeksOutcome> {
    let (horizon, b) = (params.horizon(), params.block());
    if learner.horizon() != horizon {
        return Err(contract(format!(
            "learner horizon {} differs from {horizon}",
            learner.horizon()
        )));
    }
    let mut predictor = Predictor::new(ZnPredictor::new(*params));
    let digest = digest_bytes(format!("zn:{horizon}:{}", params.n()).as_bytes());
    let mut transcript = Transcript::new(horizon, digest, 0);
    let mut v = VersionSpace::all_thresholds();
    let mut version_spaces = vec![v.clone()];
    let mut indices = Vec::with_capacity(params.n());
    let mut items = Vec::with_capacity(horizon);
    let mut forced = 0.0;
    let mut mistake_rounds = Vec::new();
    let mut last: Option<(Forecast, u64)> = None;

    for i in 0..=params.n() {
        let block = stream_gen(params, &indices)?
            .examples
            .split_off(i * b);
        let mut labeled = Vec::with_capacity(b);
        for x in block {
            let t = items.len() + 1;
            let f = predictor.observe(x.clone())?;
            if predictor.last_mistake() {
                mistake_rounds.push(t);
            }
            let fd = match &last {
                Some((g, d)) if g.same_as(&f) => *d,
                _ => sequence_digest(&f),
            };
            let p = learner.predict(&x, &f)?;
            let (y, next) = nature_offline_step(p.prob_one(), &v, &x)?;
            learner.update(y)?;
            v = next;
            forced += p.mistake_prob(y);
            transcript.push(RoundRecord {
                t,
                x: x.clone(),
                y,
                prediction: p,
                predictor_output_digest: fd,
                predictor_mistake: predictor.last_mistake(),
                full_prediction: retain_predictions.then(|| f.to_vec()),
            });
            last = Some((f, fd));
            labeled.push((x.clone(), y));
            items.push((x, y));
        }
        version_spaces.push(v.clone());
        if i < params.n() {
            indices.push(next_index(labeled)?);
        }
    }

    Ok(PeeksOutcome {
        stream: LabeledStream::new(items)?,
        transcript,
        indices,
        version_spaces,
        forced,
        predictor_mistake_rounds: mistake_rounds,
    })
}

/// Sorts a labeled block by example and locates its first 0 label, checking
/// the labels form a run of 1s followed by a run of 0s.
fn next_index(mut block: Vec<(Example, Label)>) -> Result<usize> {
    block.sort_by(|a, b| a.0.as_point().cmp(&b.0.as_point()));
    let labels: Vec<Label> = block.iter().map(|p| p.1).collect();
    let first_zero = labels.iter().position(|&y| y == Label::ZERO);
    let split = first_zero.unwrap_or(labels.len());
    if labels[split..].iter().any(|&y| y != Label::ZERO) || labels[..split].iter().any(|&y| y != Label::ONE) {
        return Err(structural("block labels are not a threshold pattern"));
    }
    Ok(split + 1)
}
