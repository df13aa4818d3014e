use num_rational::BigRational;

use weak_tt::dp::{
    check_accuracy, constant_summary, make_hardness_instance, privacy_violation_experiment, run_mechanism, trace,
    Calibration, Composition, ExperimentOptions, MechanismKind, PrivacyParams, TraceOptions,
};
use weak_tt::json::{frac, to_f64};
use weak_tt::primitives::RunSeed;
use weak_tt::schemes::{Ciphertext, SchemeKind, SchemeParams};
use weak_tt::Error;

fn params(scheme: SchemeKind, n: u64, m: u64) -> SchemeParams {
    SchemeParams::new(scheme, 64, n, Some(m)).unwrap()
}

fn third() -> BigRational {
    frac(1, 3)
}

#[test]
fn gaussian_calibration() {
    let p = PrivacyParams::new(1.0, 1.0 / 16.0).unwrap();
    let h = Calibration::noisy_histogram(p, 8);
    let expect = 2f64.sqrt() / 8.0 * (2.0 * 20f64.ln()).sqrt();
    assert!((h.sigma - expect).abs() < 1e-12);

    let one = Calibration::noisy_table(p, 1, 8);
    assert_eq!(one.composition, Composition::Basic);
    assert!((one.sigma - (2.0 * 20f64.ln()).sqrt() / 8.0).abs() < 1e-12);

    let many = Calibration::noisy_table(p, 1000, 8);
    assert_eq!(many.composition, Composition::Advanced);
    let (e0, k) = (many.epsilon0, 1000.0);
    let spent = e0 * (2.0 * k * (1.0 / (p.delta / 2.0)).ln()).sqrt() + k * e0 * (e0.exp() - 1.0);
    assert!((spent - 1.0).abs() < 1e-9, "{spent}");
    assert!(many.sigma < Calibration::noisy_table(PrivacyParams::new(1.0 / 1000.0, p.delta / 1000.0).unwrap(), 1, 8).sigma);
}

#[test]
fn exact_summary_curve_is_a_step() {
    for n in 3..=8 {
        let hi = make_hardness_instance(&params(SchemeKind::ShortCtext, n, 4 * n), &RunSeed::from_master(n)).unwrap();
        let s = run_mechanism(MechanismKind::Exact, &hi.dataset, &hi, PrivacyParams::standard(n), &RunSeed::from_master(0))
            .unwrap();
        let opts = TraceOptions { samples_per_index: 20, ..TraceOptions::default() };
        let t = trace(&s, &hi.instance.master(), &opts, &RunSeed::from_master(1)).unwrap();
        let expect: Vec<BigRational> = (0..=n).map(|j| frac(i64::from(3 * j <= n), 1)).collect();
        assert_eq!(t.curve, expect, "n = {n}");
        assert_eq!(t.accused, Some(n / 3 + 1));
        assert!(t.separates(n / 3 + 1));
    }
}

#[test]
fn histogram_with_vanishing_noise_traces_like_the_data() {
    let n = 4;
    let hi = make_hardness_instance(&params(SchemeKind::ShortKey, n, 8), &RunSeed::from_master(2)).unwrap();
    let loose = PrivacyParams::new(1e9, 0.5).unwrap();
    let s = run_mechanism(MechanismKind::NoisyHistogram, &hi.dataset, &hi, loose, &RunSeed::from_master(3)).unwrap();
    assert!(s.calibration().unwrap().sigma < 1e-9);
    let acc = check_accuracy(&s, &hi, &hi.dataset, &third(), 300, &RunSeed::from_master(4)).unwrap();
    assert!(acc.pass && !acc.enumerated);
    assert!(to_f64(&acc.max_error) < 1e-6);
    let opts = TraceOptions { samples_per_index: 30, ..TraceOptions::default() };
    let t = trace(&s, &hi.instance.master(), &opts, &RunSeed::from_master(5)).unwrap();
    assert_eq!(t.accused, Some(2));
}

#[test]
fn private_noisy_table_is_too_noisy_to_be_accurate() {
    let n = 4;
    let p = params(SchemeKind::ShortCtext, n, 32);
    let hi = make_hardness_instance(&p, &RunSeed::from_master(6)).unwrap();
    let s = run_mechanism(MechanismKind::NoisyTable, &hi.dataset, &hi, PrivacyParams::standard(n), &RunSeed::from_master(7))
        .unwrap();
    assert!(s.calibration().unwrap().sigma > 1.0);
    let acc = check_accuracy(&s, &hi, &hi.dataset, &third(), 0, &RunSeed::from_master(8)).unwrap();
    assert!(!acc.pass);
    assert_eq!(acc.queries_checked, 32);
    // Evaluations are clamped even when the noise is huge.
    for c in 0..32 {
        let v = s.eval(&Ciphertext::ShortCtext(c)).unwrap();
        assert!(v >= frac(0, 1) && v <= frac(1, 1));
    }

    let report = privacy_violation_experiment(&p, &ExperimentOptions::standard(MechanismKind::NoisyTable, 4, n), &RunSeed::from_master(9))
        .unwrap();
    assert_eq!(report.accurate_runs, 0);
    assert!(!report.accuracy_gate);
    assert_eq!(report.violation, Some(false));
}

#[test]
fn raw_dataset_on_short_keys_is_traced() {
    let n = 3;
    let p = params(SchemeKind::ShortKey, n, 8);
    let mut opts = ExperimentOptions::standard(MechanismKind::Raw, 3, n);
    opts.trace.samples_per_index = 20;
    opts.accuracy_budget = 60;
    let report = privacy_violation_experiment(&p, &opts, &RunSeed::from_master(10)).unwrap();
    assert_eq!(report.accurate_runs, 3);
    assert_eq!(report.target, Some(2));
    assert_eq!(report.p_dataset, Some(frac(1, 1)));
    assert_eq!(report.p_neighbor, Some(frac(0, 1)));
    assert_eq!(report.violation, Some(true));
}

#[test]
fn constant_summaries_clamp() {
    let c = Ciphertext::ShortCtext(0);
    assert_eq!(constant_summary(frac(-1, 2)).eval(&c).unwrap(), frac(0, 1));
    assert_eq!(constant_summary(frac(3, 2)).eval(&c).unwrap(), frac(1, 1));
    assert_eq!(constant_summary(frac(2, 5)).eval(&c).unwrap(), frac(2, 5));
}

#[test]
fn restricted_tables_refuse_other_queries() {
    let n = 3;
    let mut hi = make_hardness_instance(&params(SchemeKind::ShortCtext, n, 24), &RunSeed::from_master(11)).unwrap();
    hi.restrict_queries(n, &RunSeed::from_master(12)).unwrap();
    let s = run_mechanism(MechanismKind::Exact, &hi.dataset, &hi, PrivacyParams::standard(n), &RunSeed::from_master(0))
        .unwrap();
    let kept = match &hi.family {
        weak_tt::dp::QueryFamily::Enumerated { ciphertexts } => ciphertexts.clone(),
        _ => unreachable!(),
    };
    assert_eq!(kept.len(), 3);
    let outside = (0..24).find(|c| !kept.contains(c)).unwrap();
    assert!(matches!(s.eval(&Ciphertext::ShortCtext(outside)), Err(Error::Parameter(_))));
    let acc = check_accuracy(&s, &hi, &hi.dataset, &third(), 0, &RunSeed::from_master(0)).unwrap();
    assert_eq!((acc.queries_checked, acc.max_error), (3, frac(0, 1)));
}

#[test]
fn mechanisms_refuse_what_they_cannot_enumerate() {
    let sc = make_hardness_instance(&params(SchemeKind::ShortCtext, 3, 12), &RunSeed::from_master(0)).unwrap();
    let sk = make_hardness_instance(&params(SchemeKind::ShortKey, 3, 8), &RunSeed::from_master(0)).unwrap();
    let p = PrivacyParams::standard(3);
    let s = RunSeed::from_master(0);
    assert!(matches!(run_mechanism(MechanismKind::NoisyHistogram, &sc.dataset, &sc, p, &s), Err(Error::Capacity(_))));
    assert!(matches!(run_mechanism(MechanismKind::NoisyTable, &sk.dataset, &sk, p, &s), Err(Error::Capacity(_))));
    assert!(matches!(run_mechanism(MechanismKind::Exact, &sk.dataset, &sk, p, &s), Err(Error::Capacity(_))));
}
