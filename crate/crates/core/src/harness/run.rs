use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adversary::nature_peeks_game;
use crate::error::{Error, Result};
use crate::example::{ratio, Example, Label, LabeledStream};
use crate::hypotheses::{evaluate, threshold_label, Hypothesis, HypothesisClass};
use crate::learners::OnlineLearner;
use crate::offline::{best_in_hindsight, Mode};
use crate::predictors::{Corrupting, Forecast, Forecaster, Perfect, Predictor, Static};
use crate::adversary::ZnPredictor;
use crate::transcript::{expected_mistakes, predictor_mistake_count, sequence_digest, RoundRecord, Transcript};

use super::config::{ClassSpec, GameConfig, PredictorSpec, StreamSpec};

/// Grid resolution for random threshold examples.
const GRID: i64 = 1 << 20;

/// splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `i`: `splitmix64(master + i·φ)` with `φ` the 64-bit golden
/// ratio constant, so each trial's generator depends only on `(master, i)`.
pub fn trial_seed(master: u64, i: usize) -> u64 {
    splitmix64(master.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Outcome of one trial.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub index: usize,
    pub seed: u64,
    pub transcript: Transcript,
    pub expected_mistakes: f64,
    pub best_loss: u64,
    pub regret: f64,
    pub predictor_mistakes: u64,
    /// Offline learners instantiated, for restart-based learners.
    pub instances: Option<u64>,
    /// Fewest mistakes of a finite baseline's comparators, when it has any.
    pub comparator_best: Option<u64>,
    /// Comparator count of that baseline.
    pub comparator_count: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: GameConfig,
    pub learner: String,
    pub deterministic: bool,
    pub trials: Vec<TrialResult>,
}

impl RunReport {
    pub fn mode(&self) -> Mode {
        self.config.mode()
    }

    pub fn mean_expected_mistakes(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.expected_mistakes))
    }

    pub fn mean_regret(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.regret))
    }

    pub fn mean_predictor_mistakes(&self) -> f64 {
        mean(self.trials.iter().map(|t| t.predictor_mistakes as f64))
    }
}

pub(crate) fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Runs every trial of `cfg`, in parallel, merged in trial order.
pub fn run_game(cfg: &GameConfig) -> Result<RunReport> {
    cfg.validate()?;
    let class = cfg.class.build();
    let probe = cfg.learner.build(&class, cfg.horizon, cfg.mode())?;
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, &class, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunReport {
        config: cfg.clone(),
        learner: probe.name(),
        deterministic: probe.is_deterministic(),
        trials,
    })
}

fn run_trial(cfg: &GameConfig, class: &HypothesisClass, index: usize) -> Result<TrialResult> {
    let seed = trial_seed(cfg.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut learner = cfg.learner.build(class, cfg.horizon, cfg.mode())?;
    let transcript = match &cfg.stream {
        StreamSpec::NatureZn => {
            let params = cfg
                .zn_params()?
                .ok_or_else(|| Error::Config("nature-zn streams need the zn predictor".into()))?;
            let mut tr = nature_peeks_game(learner.as_mut(), &params, cfg.retain_full_predictions)?.transcript;
            tr.config_digest = cfg.digest();
            tr.seed = seed;
            tr
        }
        source => {
            let stream = draw_stream(source, &cfg.class, class, cfg.horizon, &mut rng)?;
            let forecaster = build_forecaster(cfg, &stream, rng.next_u64())?;
            let mut tr = Transcript::new(cfg.horizon, cfg.digest(), seed);
            play(learner.as_mut(), Predictor::from_box(forecaster), &stream, cfg.retain_full_predictions, &mut tr)?;
            tr
        }
    };
    let stream = LabeledStream::from_parts(transcript.examples(), transcript.labels())?;
    let best_loss = best_in_hindsight(class, &stream)?;
    let expected = expected_mistakes(&transcript)?;
    let comparators = learner.comparators();
    let comparator_best = match &comparators {
        Some(hs) => Some(comparator_loss(class, hs, &stream)?),
        None => None,
    };
    Ok(TrialResult {
        index,
        seed,
        predictor_mistakes: predictor_mistake_count(&transcript),
        expected_mistakes: expected,
        best_loss,
        regret: expected - best_loss as f64,
        instances: learner.instances(),
        comparator_best,
        comparator_count: comparators.map(|c| c.len()),
        transcript,
    })
}

/// Protocol loop over a fixed stream.
pub fn play(
    learner: &mut dyn OnlineLearner,
    mut predictor: Predictor,
    stream: &LabeledStream,
    retain: bool,
    tr: &mut Transcript,
) -> Result<()> {
    let mut last: Option<(Forecast, u64)> = None;
    for (i, (x, y)) in stream.items().iter().enumerate() {
        let f = predictor.observe(x.clone())?;
        let digest = match &last {
            Some((g, d)) if g.same_as(&f) => *d,
            _ => sequence_digest(&f),
        };
        let p = learner.predict(x, &f)?;
        learner.update(*y)?;
        tr.push(RoundRecord {
            t: i + 1,
            x: x.clone(),
            y: *y,
            prediction: p,
            predictor_output_digest: digest,
            predictor_mistake: predictor.last_mistake(),
            full_prediction: retain.then(|| f.to_vec()),
        });
        last = Some((f, digest));
    }
    Ok(())
}

fn comparator_loss(class: &HypothesisClass, hs: &[Hypothesis], stream: &LabeledStream) -> Result<u64> {
    let mut best = u64::MAX;
    for h in hs {
        let mut loss = 0;
        for (x, y) in stream.items() {
            loss += u64::from(evaluate(class, h, x)? != *y);
        }
        best = best.min(loss);
    }
    Ok(best)
}

fn draw_stream(
    source: &StreamSpec,
    spec: &ClassSpec,
    class: &HypothesisClass,
    horizon: usize,
    rng: &mut ChaCha8Rng,
) -> Result<LabeledStream> {
    match source {
        StreamSpec::Explicit { examples, labels } => LabeledStream::from_parts(examples.clone(), labels.clone()),
        StreamSpec::RandomRealizable => random_realizable(spec, horizon, rng),
        StreamSpec::AgnosticNoise { rate } => {
            let clean = random_realizable(spec, horizon, rng)?;
            let k = class.label_count() as u32;
            let items = clean
                .items()
                .iter()
                .map(|(x, y)| {
                    let flip = rng.gen_bool(*rate);
                    (x.clone(), if flip { Label((y.0 + 1) % k) } else { *y })
                })
                .collect();
            LabeledStream::new(items)
        }
        StreamSpec::NatureZn => Err(Error::Config("nature-zn streams are adaptive".into())),
    }
}

/// Grid points `u/2^20` labeled by a random threshold, or random domain
/// elements labeled by a random table row.
pub fn random_realizable(spec: &ClassSpec, horizon: usize, rng: &mut ChaCha8Rng) -> Result<LabeledStream> {
    match spec {
        ClassSpec::Threshold => {
            let a = ratio(rng.gen_range(0..=GRID), GRID);
            let items = (0..horizon)
                .map(|_| {
                    let x = Example::Point(ratio(rng.gen_range(1..GRID), GRID));
                    threshold_label(&a, &x).map(|y| (x, y))
                })
                .collect::<Result<Vec<_>>>()?;
            LabeledStream::new(items)
        }
        ClassSpec::Table(t) => {
            let row = &t.rows()[rng.gen_range(0..t.len())];
            let items = (0..horizon)
                .map(|_| {
                    let c = rng.gen_range(0..t.domain().len());
                    (t.domain()[c].clone(), row[c])
                })
                .collect();
            LabeledStream::new(items)
        }
    }
}

fn build_forecaster(cfg: &GameConfig, stream: &LabeledStream, seed: u64) -> Result<Box<dyn Forecaster>> {
    let domain: Vec<Example> = match &cfg.class {
        ClassSpec::Table(t) => t.domain().to_vec(),
        ClassSpec::Threshold => Vec::new(),
    };
    Ok(match &cfg.predictor {
        PredictorSpec::Perfect => Box::new(Perfect::new(stream.examples())?),
        PredictorSpec::Static { sequence } => {
            let seq = match sequence {
                Some(s) => s.clone(),
                None => vec![domain.first().cloned().unwrap_or(Example::Star); cfg.horizon],
            };
            Box::new(Static::new(seq)?)
        }
        PredictorSpec::Corrupting { mistakes } => {
            Box::new(Corrupting::new(stream.examples(), *mistakes, seed, &domain)?)
        }
        PredictorSpec::Zn { n } => {
            let params = crate::adversary::ZnParams::new(cfg.horizon, *n)?;
            Box::new(ZnPredictor::new(params))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> GameConfig {
        GameConfig::from_json(json).unwrap()
    }

    #[test]
    fn trial_seeds_are_distinct_and_stable() {
        let s: Vec<u64> = (0..100).map(|i| trial_seed(7, i)).collect();
        let mut d = s.clone();
        d.sort();
        d.dedup();
        assert_eq!(d.len(), 100);
        assert_eq!(trial_seed(7, 3), s[3]);
        assert_ne!(trial_seed(8, 3), s[3]);
    }

    #[test]
    fn perfect_restart_within_halving_bound() {
        let c = cfg(r#"{"class":{"kind":"threshold"},"predictor":{"kind":"perfect"},"learner":"restart",
            "stream":{"kind":"random-realizable"},"horizon":64,"seed":1,"trials":20}"#);
        let r = run_game(&c).unwrap();
        assert_eq!(r.trials.len(), 20);
        for t in &r.trials {
            assert!(t.expected_mistakes <= 65f64.log2());
            assert_eq!(t.best_loss, 0);
            assert_eq!(t.predictor_mistakes, 0);
            assert_eq!(t.instances, Some(1));
        }
    }

    #[test]
    fn corruption_count_is_measured() {
        let c = cfg(r#"{"class":{"kind":"threshold"},"predictor":{"kind":"corrupting","mistakes":5},"learner":"restart",
            "stream":{"kind":"random-realizable"},"horizon":40,"seed":3,"trials":8}"#);
        for t in run_game(&c).unwrap().trials {
            assert_eq!(t.predictor_mistakes, 5);
            assert_eq!(t.instances, Some(6));
        }
    }

    #[test]
    fn noisy_streams_have_positive_best_loss_on_average() {
        let c = cfg(r#"{"class":{"kind":"threshold"},"predictor":{"kind":"perfect"},"learner":"combined-agnostic",
            "stream":{"kind":"agnostic-noise","rate":0.2},"horizon":32,"seed":5,"trials":10}"#);
        let r = run_game(&c).unwrap();
        assert!(!r.deterministic);
        assert!(r.trials.iter().any(|t| t.best_loss > 0));
        for t in &r.trials {
            assert!(t.comparator_best.unwrap() >= t.best_loss);
        }
    }

    #[test]
    fn nature_source_runs_the_adversary() {
        let c = cfg(r#"{"class":{"kind":"threshold"},"predictor":{"kind":"zn","n":2},"learner":"restart",
            "stream":{"kind":"nature-zn"},"horizon":21}"#);
        let t = &run_game(&c).unwrap().trials[0];
        assert_eq!(t.predictor_mistakes, 2);
        assert_eq!(t.best_loss, 0);
        assert!(t.expected_mistakes >= 1.5 * 7f64.log2() - 1e-9);
    }

    #[test]
    fn trial_results_do_not_depend_on_trial_count() {
        let a = cfg(r#"{"class":{"kind":"threshold"},"predictor":{"kind":"corrupting","mistakes":2},"learner":"meta",
            "stream":{"kind":"random-realizable"},"horizon":16,"seed":11,"trials":3}"#);
        let mut b = a.clone();
        b.trials = 5;
        let (ra, rb) = (run_game(&a).unwrap(), run_game(&b).unwrap());
        for (x, y) in ra.trials.iter().zip(&rb.trials) {
            assert_eq!(x.transcript, y.transcript);
        }
    }
}
