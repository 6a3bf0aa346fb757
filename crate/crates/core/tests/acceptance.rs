//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Bound values are recomputed here from their closed forms rather than
//! taken from the harness, so a wrong formula in the library shows up as a
//! mismatch.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prescient::adversary::{nature_peeks_game, stream_gen, ZnParams, ZnPredictor};
use prescient::aggregate::{Dwma, Rewa};
use prescient::example::{ratio, Example, Label};
use prescient::harness::{
    run_game, sweep, write_transcripts, ClassSpec, Corruption, GameConfig, PredictorSpec,
    RunReport, StreamSpec, SweepSpec, Axis,
};
use prescient::hypotheses::{
    littlestone_dimension, threshold_label, threshold_shatter_check, FiniteTable, HypothesisClass,
};
use prescient::learners::LearnerSpec;
use prescient::offline::{Mode, OfflineLearner};
use prescient::predictors::Predictor;

/// Slack for randomized measurements, in standard errors.
const SE_SLACK: f64 = 3.0;
/// Tolerance for analytic lower-bound accounting.
const EXACT_TOL: f64 = 1e-9;
const KS: [usize; 4] = [0, 1, 3, 7];

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (var / n).sqrt())
}

fn threshold_cfg(learner: LearnerSpec, k: usize, trials: usize, seed: u64) -> GameConfig {
    GameConfig {
        class: ClassSpec::Threshold,
        predictor: PredictorSpec::Corrupting { mistakes: k },
        learner,
        stream: StreamSpec::RandomRealizable,
        horizon: 64,
        seed,
        trials,
        mode: None,
        retain_full_predictions: false,
    }
}

fn mistakes(r: &RunReport) -> Vec<f64> {
    r.trials.iter().map(|t| t.expected_mistakes).collect()
}

fn grid_points(rng: &mut ChaCha8Rng, t: usize) -> Vec<Example> {
    (0..t)
        .map(|_| Example::Point(ratio(rng.gen_range(1..4096), 4096)))
        .collect()
}

fn offline_mistakes(xs: &[Example], ys: &[Label]) -> f64 {
    let mut b = OfflineLearner::new(&HypothesisClass::Threshold, xs, Mode::Realizable).unwrap();
    let mut m = 0.0;
    for y in ys {
        m += b.predict().unwrap().mistake_prob(*y);
        b.update(*y).unwrap();
    }
    m
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// 1. Offline halving on thresholds.
fn offline_halving() -> Outcome {
    // every order of 7 points, every realizable labeling: the learner is
    // deterministic, so this covers every adaptive adversary
    let pts: Vec<Example> = (1..=7).map(|i| Example::frac(i, 8).unwrap()).collect();
    let cuts: Vec<_> = (0..=7).map(|a| ratio(a, 8)).collect();
    let mut worst = 0.0f64;
    for order in permutations(7) {
        let xs: Vec<Example> = order.iter().map(|&i| pts[i].clone()).collect();
        for a in &cuts {
            let ys: Vec<Label> = xs.iter().map(|x| threshold_label(a, x).unwrap()).collect();
            worst = worst.max(offline_mistakes(&xs, &ys));
        }
    }
    let exact = worst == 8f64.log2();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut over = 0;
    for _ in 0..400 {
        let t = rng.gen_range(1..=256);
        let xs = grid_points(&mut rng, t);
        let a = ratio(rng.gen_range(0..=4096), 4096);
        let ys: Vec<Label> = xs.iter().map(|x| threshold_label(&a, x).unwrap()).collect();
        if offline_mistakes(&xs, &ys) > ((t + 1) as f64).log2().ceil() {
            over += 1;
        }
    }
    check(
        exact && over == 0,
        format!("max over 5040 orders x 8 labelings = {worst} (want 3); 400 random streams over ceil(log2(T+1)): {over}"),
    )
}

/// 2. Restart learner under k corruptions.
fn restart_under_corruption() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for k in KS {
        let r = run_game(&threshold_cfg(LearnerSpec::Restart, k, 200, 100 + k as u64)).unwrap();
        let (m, se) = mean_se(&mistakes(&r));
        let bound = (k as f64 + 1.0) * 65f64.log2();
        let pass = if k == 0 { m <= bound } else { m <= bound + SE_SLACK * se };
        ok &= pass && r.trials.iter().all(|t| t.predictor_mistakes == k as u64);
        lines.push(format!("k={k}: {m:.3}±{se:.3} <= {bound:.3}"));
    }
    check(ok, lines.join("; "))
}

/// 3. Per-expert and meta-learner guarantees.
fn expert_and_meta() -> Outcome {
    let mb = |x: f64| (x + 1.0).log2();
    let t = 64.0;
    let mut lines = Vec::new();
    let mut ok = true;
    for k in KS {
        for c in BTreeSet::from([0, k, 63]) {
            let r = run_game(&threshold_cfg(LearnerSpec::Expert(c), k, 200, 200 + k as u64)).unwrap();
            let (m, _) = mean_se(&mistakes(&r));
            let bound = (k as f64 + c as f64 + 1.0) * mb(t / (c as f64 + 1.0) + 1.0);
            // deterministic: every trial must sit under the bound
            ok &= r.trials.iter().all(|tr| tr.expected_mistakes <= bound);
            lines.push(format!("k={k} c={c}: {m:.2} <= {bound:.2}"));
        }
        let r = run_game(&threshold_cfg(LearnerSpec::Meta, k, 200, 300 + k as u64)).unwrap();
        let (m, _) = mean_se(&mistakes(&r));
        let kp = k as f64 + 1.0;
        let bound = 6.0 * (kp * mb(t / kp + 1.0) + t.log2());
        ok &= r.trials.iter().all(|tr| tr.expected_mistakes <= bound);
        lines.push(format!("k={k} meta: {m:.2} <= {bound:.2}"));
    }
    check(ok, lines.join("; "))
}

fn dwma_bound(mistakes: &[u64]) -> f64 {
    3.0 * (*mistakes.iter().min().unwrap() as f64 + (mistakes.len() as f64).log2())
}

/// 4. DWMA mistake bound.
fn dwma() -> Outcome {
    // With two experts the aggregator's state is its pair of mistake
    // counts, so exploring every reachable (m1, m2, M) per round covers
    // every advice/label pattern of that length.
    let mut frontier = BTreeSet::from([(0u64, 0u64, 0u64)]);
    let mut worst_gap = f64::NEG_INFINITY;
    let mut states = 0usize;
    for _ in 0..12 {
        let mut next = BTreeSet::new();
        for &(m1, m2, big) in &frontier {
            let d = Dwma::from_mistakes(vec![m1, m2]).unwrap();
            for a in 0..4u32 {
                let advice = [Label(a & 1), Label(a >> 1)];
                let p = d.predict(&advice).unwrap();
                for y in [Label(0), Label(1)] {
                    let s = (
                        m1 + u64::from(advice[0] != y),
                        m2 + u64::from(advice[1] != y),
                        big + u64::from(p != y),
                    );
                    worst_gap = worst_gap.max(s.2 as f64 - dwma_bound(&[s.0, s.1]));
                    next.insert(s);
                }
            }
        }
        states += next.len();
        frontier = next;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    for case in 0..10_000 {
        let n = rng.gen_range(1..=8);
        let t = rng.gen_range(1..=200);
        let mut d = Dwma::new(n).unwrap();
        let good = rng.gen_range(0..n);
        let noise = rng.gen_range(0.0..0.3);
        let mut big = 0u64;
        for _ in 0..t {
            let advice: Vec<Label> = (0..n).map(|_| Label(rng.gen_range(0..2))).collect();
            let p = d.predict(&advice).unwrap();
            // half the cases label against the aggregator, half follow a
            // mostly reliable expert
            let y = if case % 2 == 0 {
                Label(1 - p.0)
            } else if rng.gen_bool(noise) {
                Label(1 - advice[good].0)
            } else {
                advice[good]
            };
            big += u64::from(p != y);
            d.update(&advice, y).unwrap();
        }
        if big as f64 > dwma_bound(d.mistakes()) {
            violations += 1;
        }
    }
    check(
        worst_gap <= 0.0 && violations == 0,
        format!("N=2, T<=12: {states} reachable states, max(M - bound) = {worst_gap:.3}; 10^4 random cases: {violations} violations"),
    )
}

fn cube3() -> FiniteTable {
    let rows = (0..8u32).map(|m| (0..3).map(|i| Label((m >> i) & 1)).collect()).collect();
    FiniteTable::new((0..3).map(Example::Atom).collect(), rows).unwrap()
}

/// 5. Combined learner within 3·min{(i),(ii),(iii)} + 5.
fn envelope() -> Outcome {
    let table = cube3();
    let ldim = littlestone_dimension(&table).unwrap() as f64;
    let t = 64.0f64;
    let mut lines = vec![format!("L(H) = {ldim}")];
    let mut ok = ldim == 3.0;
    for k in KS {
        let kp = k as f64 + 1.0;
        let mut cfg = threshold_cfg(LearnerSpec::Combined, k, 50, 500 + k as u64);
        cfg.class = ClassSpec::Table(table.clone());
        // halving over |H| = 8 rows makes at most 3 mistakes at any length
        let mb = 8f64.log2();
        let table_bound = 3.0 * ldim.min(kp * mb).min(6.0 * (kp * mb + t.log2())) + 5.0;
        let r = run_game(&cfg).unwrap();
        let (m, _) = mean_se(&mistakes(&r));
        ok &= m <= table_bound;
        lines.push(format!("table k={k}: {m:.2} <= {table_bound:.2}"));

        let cfg = threshold_cfg(LearnerSpec::Combined, k, 50, 600 + k as u64);
        let mb = |x: f64| (x + 1.0).log2();
        let thr_bound = 3.0 * (kp * mb(t)).min(6.0 * (kp * mb(t / kp + 1.0) + t.log2())) + 5.0;
        let r = run_game(&cfg).unwrap();
        let (m, _) = mean_se(&mistakes(&r));
        ok &= m <= thr_bound;
        lines.push(format!("thresholds k={k}: {m:.2} <= {thr_bound:.2}"));
    }
    check(ok, lines.join("; "))
}

fn shipped_learners(t: usize, n: usize) -> Vec<(LearnerSpec, Mode)> {
    let mut v: Vec<(LearnerSpec, Mode)> = [
        LearnerSpec::Soa,
        LearnerSpec::Restart,
        LearnerSpec::Expert(0),
        LearnerSpec::Expert(n),
        LearnerSpec::Expert(t - 1),
        LearnerSpec::Meta,
        LearnerSpec::Combined,
    ]
    .into_iter()
    .map(|l| (l, Mode::Realizable))
    .collect();
    for l in [LearnerSpec::Restart, LearnerSpec::Meta, LearnerSpec::CombinedAgnostic] {
        v.push((l, Mode::Agnostic));
    }
    v
}

/// 6. The adversary forces the lower bound on every learner.
fn lower_bound() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (t, n) in [(21usize, 2usize), (60, 3)] {
        let b = t / (n + 1);
        let bound = (n as f64 + 1.0) / 2.0 * (b as f64).log2();
        let p = ZnParams::new(t, n).unwrap();
        let want_rounds: Vec<usize> = (1..=n).map(|i| i * b + 1).collect();
        let mut least = f64::INFINITY;
        for (spec, mode) in shipped_learners(t, n) {
            let mut l = spec.build(&HypothesisClass::Threshold, t, mode).unwrap();
            let out = nature_peeks_game(l.as_mut(), &p, false).unwrap();
            least = least.min(out.forced);
            let xs = out.stream.examples();
            let sets = stream_gen(&p, &out.indices).unwrap().sets;
            let shattered = sets.iter().enumerate().all(|(i, s)| {
                let chain: Vec<Example> = s.iter().cloned().map(Example::Point).collect();
                threshold_shatter_check(&out.version_spaces[i], &chain).unwrap()
            });
            let realizable = out
                .stream
                .items()
                .iter()
                .all(|(x, y)| out.version_spaces.last().unwrap().exists(x, *y).unwrap());
            ok &= out.forced >= bound - EXACT_TOL
                && stream_gen(&p, &out.indices).unwrap().examples == xs
                && !out.version_spaces.last().unwrap().is_empty()
                && realizable
                && shattered
                && out.predictor_mistake_rounds == want_rounds;
        }
        lines.push(format!(
            "T={t} n={n}: min forced {least:.4} >= {bound:.4}, predictor errs at {want_rounds:?}"
        ));
    }
    check(ok, lines.join("; "))
}

/// 7. Forecasts under the block predictor reveal exactly the current block.
fn peeks_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let b = [3usize, 7, 15][rng.gen_range(0..3)];
        let t = b * (n + 1);
        let p = ZnParams::new(t, n).unwrap();
        let js: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=b + 1)).collect();
        let xs = stream_gen(&p, &js).unwrap().examples;
        let mut pred = Predictor::new(ZnPredictor::new(p));
        for (i, x) in xs.iter().enumerate() {
            let r = i + 1;
            let f = pred.observe(x.clone()).unwrap();
            let known: Vec<usize> = (r + 1..=t).filter(|&s| f[s - 1] == xs[s - 1]).collect();
            // the peek schedule: at round r in block i+1 the rest of that block
            let block_end = r.div_ceil(b) * b;
            if known != (r + 1..=block_end).collect::<Vec<_>>() {
                bad += 1;
            }
        }
    }
    check(bad == 0, format!("100 random streams, {bad} rounds off the block schedule"))
}

/// 8. Agnostic restart regret and REWA on fixed advice.
fn agnostic() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let t = 64.0f64;
    let rb = (t * (t + 1.0).log2()).sqrt();
    for k in KS {
        let mut cfg = threshold_cfg(LearnerSpec::Restart, k, 200, 800 + k as u64);
        cfg.stream = StreamSpec::AgnosticNoise { rate: 0.1 };
        let r = run_game(&cfg).unwrap();
        let regrets: Vec<f64> = r.trials.iter().map(|t| t.regret).collect();
        let (m, se) = mean_se(&regrets);
        let bound = (k as f64 + 1.0) * rb;
        ok &= m <= bound + SE_SLACK * se;
        lines.push(format!("k={k}: regret {m:.2}±{se:.2} <= {bound:.2}"));
    }

    // fixed advice: 4 experts over 200 rounds, expert 2 mostly right
    let (n, horizon) = (4usize, 200usize);
    let mut arng = ChaCha8Rng::seed_from_u64(88);
    let labels: Vec<u32> = (0..horizon).map(|_| arng.gen_range(0..2)).collect();
    let advice: Vec<Vec<u32>> = labels
        .iter()
        .map(|&y| {
            (0..n)
                .map(|i| if i == 2 && arng.gen_bool(0.9) { y } else { arng.gen_range(0..2) })
                .collect()
        })
        .collect();
    let expert_mistakes: Vec<u64> = (0..n)
        .map(|i| (0..horizon).filter(|&s| advice[s][i] != labels[s]).count() as u64)
        .collect();
    let best = *expert_mistakes.iter().min().unwrap() as f64;
    let runs: Vec<f64> = (0..200u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut w = Rewa::new(n, horizon).unwrap();
            let mut m = 0.0;
            for s in 0..horizon {
                let pick = w.sample(&mut rng);
                m += f64::from(u8::from(advice[s][pick] != labels[s]));
                let losses: Vec<f64> = (0..n).map(|i| f64::from(u8::from(advice[s][i] != labels[s]))).collect();
                w.update(&losses).unwrap();
            }
            m
        })
        .collect();
    let (m, se) = mean_se(&runs);
    let bound = best + (horizon as f64 * (n as f64).log2()).sqrt();
    ok &= m <= bound + SE_SLACK * se;
    lines.push(format!("REWA fixed advice: {m:.2}±{se:.2} <= {bound:.2}"));
    check(ok, lines.join("; "))
}

/// 9. Mistakes per round fall along a horizon sweep with ⌈√T⌉ corruptions.
fn sublinearity() -> Outcome {
    let base = threshold_cfg(LearnerSpec::Restart, 0, 200, 9);
    let spec = SweepSpec {
        axis: Axis::T,
        values: vec![16, 32, 64, 128, 256],
        corruption: Corruption::SqrtT,
    };
    let r = sweep(&base, &spec).unwrap();
    let ratios: Vec<String> = r
        .points
        .iter()
        .map(|p| format!("T={}: {:.4}", p.value, p.measured_mean / p.value as f64))
        .collect();
    let ks_ok = r
        .points
        .iter()
        .all(|p| p.predictor_mistakes_mean == (p.value as f64).sqrt().ceil());
    let dec = r
        .points
        .windows(2)
        .all(|w| w[1].measured_mean / (w[1].value as f64) < w[0].measured_mean / (w[0].value as f64));
    check(dec && ks_ok, format!("mistakes/T {}", ratios.join(", ")))
}

/// 10. Identical config and seed give identical CSV bytes.
fn determinism() -> Outcome {
    let mut cfg = threshold_cfg(LearnerSpec::Combined, 3, 8, 1234);
    cfg.horizon = 32;
    let csv = |c: &GameConfig| {
        let mut buf = Vec::new();
        write_transcripts(&run_game(c).unwrap(), &mut buf).unwrap();
        buf
    };
    let lib_same = csv(&cfg) == csv(&cfg);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    cfg.learner = LearnerSpec::CombinedAgnostic;
    cfg.stream = StreamSpec::AgnosticNoise { rate: 0.1 };
    std::fs::write(&path, cfg.to_json()).unwrap();
    let run = |out: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_prescient"))
            .args(["run", "--config"])
            .arg(&path)
            .arg("--out")
            .arg(dir.path().join(out))
            .env_remove("PRESCIENT_SEED")
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        std::fs::read(dir.path().join(out).join("transcript.csv")).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    check(
        lib_same && a == b && !a.is_empty(),
        format!("library CSV identical: {lib_same}; CLI CSV identical: {} ({} bytes)", a == b, a.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("offline halving", offline_halving),
        ("restart under k corruptions", restart_under_corruption),
        ("expert and meta guarantees", expert_and_meta),
        ("DWMA mistake bound", dwma),
        ("combined envelope", envelope),
        ("adversary lower bound", lower_bound),
        ("peeks equivalence", peeks_equivalence),
        ("agnostic regret", agnostic),
        ("sublinear mistakes per round", sublinearity),
        ("CSV determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("PASS {:>2} {name} [{secs:.1}s]: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.1}s]: {d}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
