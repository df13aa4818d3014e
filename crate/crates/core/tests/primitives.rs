use proptest::prelude::*;
use weak_tt::primitives::{
    prg_expand, sample_conditioned_prf, sample_surjective_prf, sample_uniform_preimage, PrfKey,
    PrfRole, PrfShape, PrgSeed, PuncturedPrfKey, RunSeed, DEFAULT_REJECTION_BUDGET,
};
use weak_tt::Error;

fn shape(domain: u64, range: u64) -> PrfShape {
    PrfShape::index(64, domain, range, PrfRole::Generic).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn punctured_key_agrees_off_the_set(
        domain in 1u64..=4096,
        range in 1u64..=9,
        master in any::<u64>(),
        a in any::<u64>(),
        b in proptest::option::of(any::<u64>()),
    ) {
        let key = PrfKey::random(shape(domain, range), &RunSeed::from_master(master));
        let mut points = vec![a % domain];
        if let Some(b) = b.map(|b| b % domain).filter(|b| *b != points[0]) {
            points.push(b);
        }
        let p = key.puncture(&points).unwrap();
        for x in 0..domain {
            let got = p.eval(x).unwrap();
            if points.contains(&x) {
                prop_assert_eq!(got, None);
            } else {
                prop_assert_eq!(got, Some(key.eval(x).unwrap()));
            }
        }
    }

    #[test]
    fn punctured_key_survives_json(domain in 2u64..=512, master in any::<u64>(), a in any::<u64>()) {
        let key = PrfKey::random(shape(domain, 5), &RunSeed::from_master(master));
        let p = key.puncture(&[a % domain]).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: PuncturedPrfKey = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        prop_assert_eq!(back, p);
    }

    #[test]
    fn surjective_sampling_covers_every_value(m in 8u64..=128, n in 1u64..=8, master in any::<u64>()) {
        let s = sample_surjective_prf(&RunSeed::from_master(master), shape(m, n), DEFAULT_REJECTION_BUDGET).unwrap();
        let (key, table) = s.value;
        prop_assert!(table.iter().all(|pre| !pre.is_empty()));
        prop_assert_eq!(key.preimage_table().unwrap(), table);
    }

    #[test]
    fn same_seed_same_key(master in any::<u64>(), label in "[a-z]{1,8}") {
        let s = RunSeed::from_master(master).derive(label.as_str());
        let a = PrfKey::random(shape(300, 7), &s);
        let b = PrfKey::random(shape(300, 7), &s);
        prop_assert_eq!(a.evaluate_all().unwrap(), b.evaluate_all().unwrap());
    }
}

#[test]
fn prg_output_length_is_lambda() {
    let seed = PrgSeed::new(vec![7; 8], 128).unwrap();
    assert_eq!(prg_expand(&seed, 128).unwrap().len(), 16);
    assert!(matches!(PrgSeed::new(vec![7; 5], 128), Err(Error::Parameter(_))));
}

#[test]
fn large_domain_is_surjective_on_first_draw_mostly() {
    let first = (0..100)
        .filter(|t| {
            let s = sample_surjective_prf(&RunSeed::from_master(*t), shape(256, 8), DEFAULT_REJECTION_BUDGET).unwrap();
            s.attempts == 1
        })
        .count();
    assert!(first >= 95, "{first}");
}

#[test]
fn preimage_frequencies_are_uniform() {
    // Find a key with exactly four preimages of 0, then draw 10^4 times.
    let (key, pre) = (0..)
        .find_map(|t| {
            let key = PrfKey::random(shape(16, 4), &RunSeed::from_master(t));
            let pre = key.preimage_table().unwrap().swap_remove(0);
            (pre.len() == 4).then_some((key, pre))
        })
        .unwrap();
    let mut counts = [0u32; 4];
    let base = RunSeed::from_master(99);
    for t in 0..10_000u64 {
        let x = sample_uniform_preimage(&key, 0, &base.derive(t)).unwrap();
        counts[pre.iter().position(|p| *p == x).unwrap()] += 1;
    }
    for c in counts {
        let f = f64::from(c) / 10_000.0;
        assert!((0.2..=0.3).contains(&f), "{counts:?}");
    }
}

#[test]
fn conditioned_sampling_takes_two_draws_on_average() {
    let base = RunSeed::from_master(5);
    let total: u64 = (0..1000u64)
        .map(|t| {
            let s = sample_conditioned_prf(&base.derive(t), shape(8, 2), (3, 1), DEFAULT_REJECTION_BUDGET).unwrap();
            assert_eq!(s.value.eval(3).unwrap(), 1);
            s.attempts
        })
        .sum();
    let mean = total as f64 / 1000.0;
    assert!((1.7..=2.3).contains(&mean), "{mean}");
}

#[test]
fn conditioning_leaves_other_points_nearly_untouched() {
    // Empirical distribution of the table restricted to x ≠ 3, conditioned
    // versus unconditioned, 10^4 keys each.
    let tally = |conditioned: bool| {
        let base = RunSeed::from_master(if conditioned { 6 } else { 7 });
        let mut hist = vec![0u32; 128];
        for t in 0..10_000u64 {
            let key = if conditioned {
                sample_conditioned_prf(&base.derive(t), shape(8, 2), (3, 1), DEFAULT_REJECTION_BUDGET)
                    .unwrap()
                    .value
            } else {
                PrfKey::random(shape(8, 2), &base.derive(t))
            };
            let rest = key
                .evaluate_all()
                .unwrap()
                .into_iter()
                .enumerate()
                .filter(|(x, _)| *x != 3)
                .fold(0usize, |acc, (_, v)| acc * 2 + v as usize);
            hist[rest] += 1;
        }
        hist
    };
    let (a, b) = (tally(true), tally(false));
    let tv: f64 = a.iter().zip(&b).map(|(x, y)| (f64::from(*x) - f64::from(*y)).abs()).sum::<f64>() / 20_000.0;
    assert!(tv <= 0.1, "{tv}");
}

#[test]
fn full_domain_histogram() {
    let key = PrfKey::random(shape(256, 4), &RunSeed::from_master(12));
    let mut hist = [0u32; 4];
    for v in key.evaluate_all().unwrap() {
        hist[v as usize] += 1;
    }
    for h in hist {
        assert!((f64::from(h) / 256.0 - 0.25).abs() <= 0.15, "{hist:?}");
    }
}
