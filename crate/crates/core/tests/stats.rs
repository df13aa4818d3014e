use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use proptest::prelude::*;
use rayon::prelude::*;

use weak_tt::json::{frac, to_f64};
use weak_tt::primitives::{PrfKey, PrfRole, PrfShape, RunSeed};
use weak_tt::stats::{
    pairwise_delta, renyi_divergence, statistical_distance, verify_conditional_hash_lemma, Divergence,
    FiniteDist, HashFamily,
};

fn dist(weights: &[u32]) -> FiniteDist<usize> {
    let total: u32 = weights.iter().sum();
    FiniteDist::new(
        weights
            .iter()
            .enumerate()
            .map(|(o, &w)| (o, frac(w.into(), total.into())))
            .collect::<BTreeMap<_, _>>(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn distance_is_bounded_by_divergence(
        pairs in prop::collection::vec((1u32..20, 0u32..20), 2..7),
    ) {
        prop_assume!(pairs.iter().any(|(_, b)| *b > 0));
        let (pw, qw): (Vec<u32>, Vec<u32>) = pairs.into_iter().unzip();
        let (p, q) = (dist(&pw), dist(&qw));
        let sd = statistical_distance(&p, &q).unwrap();
        let rd = renyi_divergence(&p, &q).unwrap();
        prop_assert!(rd.bounds_sd(&sd));

        let (ps, qs) = (pw.iter().sum::<u32>() as f64, qw.iter().sum::<u32>() as f64);
        let sd_f: f64 = pw.iter().zip(&qw).map(|(a, b)| (*a as f64 / ps - *b as f64 / qs).abs()).sum::<f64>() / 2.0;
        let rd_f: f64 = pw.iter().zip(&qw).map(|(a, b)| (*b as f64 / qs).powi(2) / (*a as f64 / ps)).sum();
        prop_assert!((to_f64(&sd) - sd_f).abs() < 1e-12);
        let Divergence::Finite(rd) = rd else { panic!("p has full support") };
        prop_assert!((to_f64(&rd) - rd_f).abs() < 1e-9);
    }
}

#[test]
fn lemma_holds_on_every_small_independent_family() {
    let mut cases = Vec::new();
    for k in 2..=4u64 {
        for t in 1..=6u64 {
            for mask in 1u64..(1 << t) {
                for y in 0..k {
                    cases.push((t, k, mask, y));
                }
            }
        }
    }
    assert_eq!(cases.len(), 1080);
    let families: HashMap<(u64, u64), HashFamily> = (2..=4)
        .flat_map(|k| (1..=6).map(move |t| (t, k)))
        .map(|(t, k)| ((t, k), HashFamily::all_functions(t, k).unwrap()))
        .collect();
    let failures: Vec<_> = cases
        .par_iter()
        .filter_map(|&(t, k, mask, y)| {
            let target: Vec<u64> = (0..t).filter(|x| mask >> x & 1 == 1).collect();
            let r = verify_conditional_hash_lemma(&families[&(t, k)], &target, y).unwrap();
            (!r.pass).then_some((t, k, target, y))
        })
        .collect();
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn distance_shrinks_as_the_target_grows() {
    let fam = HashFamily::all_functions(4, 2).unwrap();
    let sds: Vec<BigRational> = (1..=4)
        .map(|m| verify_conditional_hash_lemma(&fam, &(0..m).collect::<Vec<_>>(), 0).unwrap().sd)
        .collect();
    // Independent bits: D₂(f) ∝ Z/m with Z = #{x ∈ M : f(x) = 0} ~ Bin(m, 1/2),
    // so SD = E|m - 2Z| / 2m.
    for (m, sd) in (1i64..).zip(&sds) {
        let mut binom = 1i64;
        let mut num = 0i64;
        for z in 0..=m {
            num += binom * (m - 2 * z).abs();
            binom = binom * (m - z) / (z + 1);
        }
        assert_eq!(*sd, frac(num, 2 * m * (1 << m)), "m = {m}");
    }
    assert!(sds.windows(2).all(|w| w[1] <= w[0]));
    assert!(sds[3] < sds[0]);
}

#[test]
fn constant_functions_are_far_but_within_bound() {
    let fam = HashFamily::constant_functions(5, 3).unwrap();
    let r = verify_conditional_hash_lemma(&fam, &[0, 2, 4], 1).unwrap();
    assert_eq!(r.sd, frac(2, 3));
    assert_eq!(r.rd, Divergence::Finite(frac(3, 1)));
    assert_eq!(r.delta, frac(2, 9));
    assert!(r.pass);
}

#[test]
fn unreachable_points_are_excluded() {
    let fam = HashFamily::from_tables(2, 2, vec![vec![0, 0], vec![0, 1]]).unwrap();
    let r = verify_conditional_hash_lemma(&fam, &[0, 1], 1).unwrap();
    assert_eq!(r.excluded, vec![0]);
    assert_eq!(r.m, 1);
    assert!(verify_conditional_hash_lemma(&fam, &[0], 1).is_err());
}

#[test]
fn ggm_family_delta() {
    let seed = RunSeed::from_master(0).derive("ggm-family");
    let fam = HashFamily::ggm(8, 2, 64, 256, &seed).unwrap();
    assert_eq!(fam.dist.len(), 166);
    assert_eq!(pairwise_delta(&fam), frac(9, 128));

    let shape = PrfShape::index(64, 8, 2, PrfRole::Generic).unwrap();
    let tables: Vec<Vec<u64>> = (0..256u64)
        .map(|j| PrfKey::random(shape, &seed.derive(j)).evaluate_all().unwrap())
        .collect();
    let mut worst = 0.0f64;
    for x0 in 0..8 {
        for x1 in 0..8 {
            if x0 == x1 {
                continue;
            }
            let mut counts = [[0u32; 2]; 2];
            for t in &tables {
                counts[t[x0] as usize][t[x1] as usize] += 1;
            }
            for c in counts.iter().flatten() {
                worst = worst.max((*c as f64 / 256.0 - 0.25).abs());
            }
        }
    }
    assert_eq!(worst, 9.0 / 128.0);
    let r = verify_conditional_hash_lemma(&fam, &[1, 3, 5, 7], 0).unwrap();
    assert!(r.pass);
}
