//! Cross-module checks of the bound machinery at moderate resolution.

use wn_core::experiments::{
    builtin_functions, condition_evidence, convergence_check, jump_weights, summarize, MeanSpec,
    Subject, Theorem,
};
use wn_core::weights::{moricz_siddiqi_condition, weight_family, WeightSequence, WeightSpec};
use wn_core::{Resolution, StepFunction};

const PS: [f64; 3] = [1.0, 2.0, 3.0];

fn res(m: u32) -> Resolution {
    Resolution::new(m).unwrap()
}

fn weights(spec: &str, horizon: usize) -> WeightSequence {
    weight_family(&spec.parse::<WeightSpec>().unwrap(), horizon).unwrap()
}

fn subjects(m: u32) -> Vec<Subject> {
    builtin_functions(res(m), 3)
        .unwrap()
        .into_iter()
        .map(|(name, f)| Subject::new(name, f, &PS).unwrap())
        .collect()
}

#[test]
fn log_weights_satisfy_the_nondecreasing_bound() {
    let m = 10;
    let q = weights("log", 1 << m);
    let orders: Vec<usize> = (1..=1 << (m - 1)).collect();
    for s in subjects(m) {
        let reps = s.sweep(Theorem::T1, &orders, Some(&q), &PS, None).unwrap();
        assert!(summarize(Theorem::T1, &reps).all_hold, "{}", s.name());
    }
}

#[test]
fn constant_weight_bound_is_within_six_fejer_bounds() {
    // With q ≡ 1 and 2^N ≤ n, every term of the non-decreasing bound is at
    // most six times the matching term of the Fejer estimate.
    let m = 10;
    let q = weights("const", 1 << m);
    let orders: Vec<usize> = (2..=1 << (m - 1)).collect();
    for s in subjects(m) {
        let t1 = s.sweep(Theorem::T1, &orders, Some(&q), &PS, None).unwrap();
        let fe = s.sweep(Theorem::Fejer, &orders, None, &PS, None).unwrap();
        for (a, b) in t1.iter().zip(&fe) {
            assert_eq!((a.n, a.p), (b.n, b.p));
            assert!((a.lhs - b.lhs).abs() < 1e-12);
            assert!(a.rhs <= 6.0 * b.rhs + 1e-12, "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn jump_weights_separate_the_two_hypotheses() {
    let m = 11;
    let horizon = 1 << m;
    let q = WeightSequence::from_values("jump", jump_weights(horizon)).unwrap();
    assert!(!moricz_siddiqi_condition(&q, 2.0, horizon)
        .unwrap()
        .bounded());
    let evidence = condition_evidence(&q, horizon).unwrap();
    assert!(evidence.monotonicity.is_non_decreasing());
    assert!(!evidence.moment_condition.bounded);

    let orders: Vec<usize> = (2..=1 << (m - 1)).collect();
    for s in subjects(m) {
        let t1 = s.sweep(Theorem::T1, &orders, Some(&q), &PS, None).unwrap();
        assert!(summarize(Theorem::T1, &t1).all_hold, "{}", s.name());
        // The earlier estimate's structural sum is still computable; only its
        // hypothesis is missing.
        let ms = s
            .sweep(Theorem::MoriczSiddiqi, &orders, Some(&q), &PS, None)
            .unwrap();
        assert_eq!(summarize(Theorem::MoriczSiddiqi, &ms).impossible, 0);
    }
}

#[test]
fn constant_weights_give_the_fejer_sum_for_the_earlier_estimate() {
    let m = 9;
    let q = weights("const", 1 << m);
    let f = builtin_functions(res(m), 1).unwrap().pop().unwrap().1;
    let s = Subject::new("f", f, &[2.0]).unwrap();
    for n in 2..=1usize << (m - 1) {
        let rep = s
            .verify(Theorem::MoriczSiddiqi, n, Some(&q), &[2.0], None)
            .unwrap()
            .pop()
            .unwrap();
        let omega = &s.profile(2.0).unwrap().values;
        let j = (usize::BITS - 1 - (n - 1).leading_zeros()) as usize;
        let expected: f64 =
            (0..j).map(|i| (1usize << i) as f64 * omega[i]).sum::<f64>() / n as f64 + omega[j];
        assert!((rep.rhs - expected).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn harmonic_weights_fail_linear_growth_but_still_report_ratios() {
    let m = 11;
    let horizon = 1 << (m - 1);
    let q = weights("poly:-1", horizon);
    let evidence = condition_evidence(&q, horizon).unwrap();
    assert!(!evidence.linear_growth.bounded);
    assert_eq!(evidence.regularity, Some(true));
    let orders: Vec<usize> = (1..=horizon).collect();
    for s in subjects(m) {
        let summary = summarize(
            Theorem::T3,
            &s.sweep(Theorem::T3, &orders, Some(&q), &[2.0], None)
                .unwrap(),
        );
        assert_eq!(summary.impossible, 0);
        assert!(summary.sup_ratio.is_none_or(f64::is_finite));
    }
}

#[test]
fn convergence_under_harmonic_weights_is_reported() {
    let m = 12;
    let f = wn_core::metrics::lip_generator(0.5, res(m), wn_core::LipVariant::Lacunary, 0).unwrap();
    let orders: Vec<usize> = (4..=11).map(|e| 1usize << e).collect();
    let q = weights("poly:-1", 1 << 11);
    let rep = convergence_check(&f, 2.0, &MeanSpec::Norlund(q), &orders).unwrap();
    assert_eq!(rep.errors.len(), orders.len());
    assert!(rep.errors.iter().all(|e| e.is_finite() && *e >= 0.0));
    for w in rep.envelope.windows(2) {
        assert!(w[1] <= w[0]);
    }
}

#[test]
fn sweep_matches_cell_by_cell_evaluation() {
    let m = 9;
    let q = weights("poly:1", 1 << m);
    let f: StepFunction = builtin_functions(res(m), 5).unwrap().remove(12).1;
    let s = Subject::new("f", f, &PS).unwrap();
    let orders: Vec<usize> = (1..=1 << (m - 1)).rev().collect();
    let swept = s.sweep(Theorem::T1, &orders, Some(&q), &PS, None).unwrap();
    let mut single: Vec<_> = orders
        .iter()
        .flat_map(|&n| s.verify(Theorem::T1, n, Some(&q), &PS, None).unwrap())
        .collect();
    single.sort_by(|a, b| a.n.cmp(&b.n).then(a.p.total_cmp(&b.p)));
    assert_eq!(swept.len(), single.len());
    for (a, b) in swept.iter().zip(&single) {
        assert_eq!(
            (a.n, a.p, a.lhs, a.rhs, a.holds),
            (b.n, b.p, b.lhs, b.rhs, b.holds)
        );
    }
}
