use proptest::prelude::*;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prescient::adversary::{dyadic_order, stream_gen, ZnParams};
use prescient::aggregate::{Dwma, Rewa};
use prescient::example::{ratio, Example, Label, LabeledStream};
use prescient::hypotheses::{
    evaluate, littlestone_dimension, project, project_with_handles, threshold_label,
    threshold_shatter_check, vc_dimension, FiniteTable, HypothesisClass, VersionSpace,
};
use prescient::learners::{Expert, LearnerSpec, OnlineLearner, Restart};
use prescient::offline::{best_in_hindsight, Backend, Mode, OfflineLearner};
use prescient::predictors::{Corrupting, Custom, Forecast, Predictor};
use prescient::transcript::{expected_mistakes, regret, Prediction, RoundRecord, Transcript};

fn points(raw: &[u16]) -> Vec<Example> {
    raw.iter().map(|&u| Example::Point(ratio(u as i64, 64))).collect()
}

fn table(domain: usize, rows: &[u32]) -> FiniteTable {
    let masks: std::collections::BTreeSet<u32> = rows.iter().map(|m| m & ((1 << domain) - 1)).collect();
    let rs: Vec<Vec<Label>> = masks
        .iter()
        .map(|m| (0..domain).map(|i| Label((m >> i) & 1)).collect())
        .collect();
    FiniteTable::new((0..domain as u64).map(Example::Atom).collect(), rs).unwrap()
}

fn play_offline(b: &mut OfflineLearner, ys: &[Label]) -> Vec<Prediction> {
    ys.iter()
        .map(|y| {
            let p = b.predict().unwrap();
            b.update(*y).unwrap();
            p
        })
        .collect()
}

fn play_online(l: &mut dyn OnlineLearner, p: &mut Predictor, xs: &[Example], ys: &[Label]) -> Vec<Prediction> {
    xs.iter()
        .zip(ys)
        .map(|(x, y)| {
            let f = p.observe(x.clone()).unwrap();
            let pr = l.predict(x, &f).unwrap();
            l.update(*y).unwrap();
            pr
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn threshold_fast_path_matches_the_table(
        raw in prop::collection::vec(0u16..=64, 1..40),
        a in 0i64..=64,
        flips in prop::collection::vec(any::<bool>(), 40),
        agnostic in any::<bool>(),
    ) {
        let xs = points(&raw);
        let a = ratio(a, 64);
        let mut ys: Vec<Label> = xs.iter().map(|x| threshold_label(&a, x).unwrap()).collect();
        let mode = if agnostic {
            for (y, f) in ys.iter_mut().zip(&flips) {
                if *f { *y = Label(1 - y.0); }
            }
            Mode::Agnostic
        } else {
            Mode::Realizable
        };
        let class = HypothesisClass::Threshold;
        let mut fast = OfflineLearner::with_backend(&class, &xs, mode, Backend::Auto).unwrap();
        let mut slow = OfflineLearner::with_backend(&class, &xs, mode, Backend::Table).unwrap();
        let pf = play_offline(&mut fast, &ys);
        let ps = play_offline(&mut slow, &ys);
        for (f, s) in pf.iter().zip(&ps) {
            prop_assert!((f.prob_one() - s.prob_one()).abs() < 1e-9);
        }
    }

    #[test]
    fn halving_on_tables_is_logarithmic(
        domain in 1usize..6,
        rows in prop::collection::vec(0u32..64, 1..20),
        order in prop::collection::vec(0usize..6, 1..30),
        pick in any::<prop::sample::Index>(),
    ) {
        let t = table(domain, &rows);
        let truth = t.rows()[pick.index(t.len())].clone();
        let xs: Vec<Example> = order.iter().map(|&i| Example::Atom((i % domain) as u64)).collect();
        let ys: Vec<Label> = xs.iter().map(|x| truth[t.column_of(x).unwrap()]).collect();
        let class = HypothesisClass::table(t.clone());
        let mut b = OfflineLearner::new(&class, &xs, Mode::Realizable).unwrap();
        let m: f64 = play_offline(&mut b, &ys).iter().zip(&ys).map(|(p, y)| p.mistake_prob(*y)).sum();
        prop_assert!(m <= (t.len() as f64).log2().ceil());
    }

    #[test]
    fn dimensions_are_ordered(domain in 1usize..6, rows in prop::collection::vec(0u32..64, 1..24)) {
        let t = table(domain, &rows);
        let vc = vc_dimension(&t).unwrap();
        let ld = littlestone_dimension(&t).unwrap();
        prop_assert!(vc <= ld);
        prop_assert!((ld as f64) <= (t.len() as f64).log2() + 1e-12);
    }

    #[test]
    fn projection_is_idempotent(raw in prop::collection::vec(0u16..=64, 1..12)) {
        let xs = points(&raw);
        let once = project(&HypothesisClass::Threshold, &xs).unwrap();
        let twice = project(&HypothesisClass::table(once.clone()), &xs).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn full_class_shatters_any_chain(raw in prop::collection::btree_set(1u16..64, 1..10)) {
        let xs: Vec<Example> = points(&raw.into_iter().collect::<Vec<_>>());
        prop_assert!(threshold_shatter_check(&VersionSpace::all_thresholds(), &xs).unwrap());
    }

    #[test]
    fn best_in_hindsight_is_the_minimum_row_loss(
        raw in prop::collection::vec(0u16..=64, 1..30),
        labels in prop::collection::vec(0u32..2, 30),
    ) {
        let xs = points(&raw);
        let ys: Vec<Label> = labels[..xs.len()].iter().map(|&y| Label(y)).collect();
        let stream = LabeledStream::from_parts(xs.clone(), ys.clone()).unwrap();
        let best = best_in_hindsight(&HypothesisClass::Threshold, &stream).unwrap();
        let (_, hs) = project_with_handles(&HypothesisClass::Threshold, &xs).unwrap();
        let losses: Vec<u64> = hs
            .iter()
            .map(|h| {
                xs.iter()
                    .zip(&ys)
                    .filter(|(x, y)| evaluate(&HypothesisClass::Threshold, h, x).unwrap() != **y)
                    .count() as u64
            })
            .collect();
        prop_assert!(losses.iter().all(|&l| best <= l));
        prop_assert_eq!(best, *losses.iter().min().unwrap());
    }

    #[test]
    fn dwma_bound_holds(
        n in 1usize..8,
        rounds in prop::collection::vec((any::<u8>(), any::<bool>()), 1..120),
    ) {
        let mut d = Dwma::new(n).unwrap();
        let mut m = 0u64;
        for (bits, y) in rounds {
            let advice: Vec<Label> = (0..n).map(|i| Label(u32::from((bits >> i) & 1))).collect();
            let y = Label::from(y);
            let p = d.predict(&advice).unwrap();
            m += u64::from(p != y);
            d.update(&advice, y).unwrap();
            for i in 0..n {
                let w = d.weight(i);
                prop_assert!(w.numer().is_one());
                prop_assert_eq!(w.denom().clone(), num_bigint::BigInt::one() << d.mistakes()[i] as usize);
            }
        }
        let min = *d.mistakes().iter().min().unwrap() as f64;
        prop_assert!(m as f64 <= 3.0 * (min + (n as f64).log2()));
    }

    #[test]
    fn rewa_distribution_ignores_weight_scale(
        w in prop::collection::vec(0.01f64..10.0, 1..8),
        scale in 0.01f64..100.0,
    ) {
        let scaled: Vec<f64> = w.iter().map(|v| v * scale).collect();
        let a = Rewa::from_weights(&w, 0.3).unwrap().distribution();
        let b = Rewa::from_weights(&scaled, 0.3).unwrap().distribution();
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn wrapped_forecasts_are_consistent_and_lazy(seed in any::<u64>(), t in 2usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<Example> = (0..t).map(|_| Example::Atom(rng.gen_range(0..4))).collect();
        // an erratic forecaster: random guesses everywhere
        let mut g = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let mut p = Predictor::new(Custom::new("noise", t, move |_: &[Example], _| {
            (0..t).map(|_| Example::Atom(g.gen_range(0..4))).collect()
        }));
        let mut prev: Option<Forecast> = None;
        for (i, x) in xs.iter().enumerate() {
            let f = p.observe(x.clone()).unwrap();
            prop_assert_eq!(&f[..=i], &xs[..=i]);
            if let Some(q) = &prev {
                if q[i] == *x {
                    prop_assert!(f.same_as(q));
                }
            }
            prev = Some(f);
        }
    }

    #[test]
    fn restart_instances_track_predictor_mistakes(seed in any::<u64>(), k in 0usize..20) {
        let t = 24;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<Example> = (0..t).map(|_| Example::Point(ratio(rng.gen_range(1..100), 100))).collect();
        let a = ratio(rng.gen_range(0..=100), 100);
        let ys: Vec<Label> = xs.iter().map(|x| threshold_label(&a, x).unwrap()).collect();
        let mut r = Restart::new(HypothesisClass::Threshold, Mode::Realizable, t);
        let mut e = Expert::new(HypothesisClass::Threshold, Mode::Realizable, t, 0).unwrap();
        let mut p1 = Predictor::new(Corrupting::new(xs.clone(), k, seed, &[]).unwrap());
        let mut p2 = Predictor::new(Corrupting::new(xs.clone(), k, seed, &[]).unwrap());
        let a1 = play_online(&mut r, &mut p1, &xs, &ys);
        let a2 = play_online(&mut e, &mut p2, &xs, &ys);
        prop_assert_eq!(a1, a2);
        prop_assert_eq!(r.instance_count(), p1.mistakes() + 1);
        prop_assert_eq!(p1.mistakes(), k as u64);
    }

    #[test]
    fn learners_emit_valid_distributions(seed in any::<u64>(), which in 0usize..7, k in 0usize..6) {
        let t = 12;
        let specs = [
            (LearnerSpec::Soa, Mode::Realizable),
            (LearnerSpec::Restart, Mode::Realizable),
            (LearnerSpec::Expert(3), Mode::Realizable),
            (LearnerSpec::Meta, Mode::Realizable),
            (LearnerSpec::Combined, Mode::Realizable),
            (LearnerSpec::Meta, Mode::Agnostic),
            (LearnerSpec::CombinedAgnostic, Mode::Agnostic),
        ];
        let (spec, mode) = specs[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<Example> = (0..t).map(|_| Example::Point(ratio(rng.gen_range(1..50), 50))).collect();
        let a = ratio(rng.gen_range(0..=50), 50);
        let ys: Vec<Label> = xs
            .iter()
            .map(|x| {
                let y = threshold_label(&a, x).unwrap();
                if mode == Mode::Agnostic && rng.gen_bool(0.2) { Label(1 - y.0) } else { y }
            })
            .collect();
        let mut l = spec.build(&HypothesisClass::Threshold, t, mode).unwrap();
        let mut p = Predictor::new(Corrupting::new(xs.clone(), k, seed, &[]).unwrap());
        for pr in play_online(l.as_mut(), &mut p, &xs, &ys) {
            prop_assert!(pr.validate().is_ok());
            if l.is_deterministic() {
                prop_assert!(pr.is_point());
            }
        }
    }

    #[test]
    fn expected_mistakes_add_over_concatenation(
        a in prop::collection::vec(0.0f64..=1.0, 1..20),
        b in prop::collection::vec(0.0f64..=1.0, 1..20),
    ) {
        let tr = |ps: &[f64]| {
            let mut t = Transcript::new(ps.len(), 0, 0);
            for (i, p) in ps.iter().enumerate() {
                t.push(RoundRecord {
                    t: i + 1,
                    x: Example::Star,
                    y: Label(1),
                    prediction: Prediction::Mixture(vec![1.0 - p, *p]),
                    predictor_output_digest: 0,
                    predictor_mistake: false,
                    full_prediction: None,
                });
            }
            t
        };
        let (x, y) = (tr(&a), tr(&b));
        let joint = expected_mistakes(&x.concat(&y)).unwrap();
        let parts = expected_mistakes(&x).unwrap() + expected_mistakes(&y).unwrap();
        prop_assert!((joint - parts).abs() < 1e-9);
        prop_assert_eq!(regret(&x, 0).unwrap(), expected_mistakes(&x).unwrap());
    }

    #[test]
    fn generated_streams_nest(n in 1usize..4, k in 1u32..4, seed in any::<u64>()) {
        let b = (1usize << k) - 1;
        let p = ZnParams::new(b * (n + 1), n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let js: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=b + 1)).collect();
        let g = stream_gen(&p, &js).unwrap();
        for i in 1..g.sets.len() {
            let (lo, hi) = &g.gaps[i];
            for later in &g.sets[i..] {
                prop_assert!(later.iter().all(|v| lo < v && v < hi));
            }
        }
        let mut d = dyadic_order(&(0..b).collect::<Vec<_>>()).unwrap();
        d.sort();
        prop_assert_eq!(d, (0..b).collect::<Vec<_>>());
    }
}
