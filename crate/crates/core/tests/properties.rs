//! Randomized checks of algebraic identities and of the bounds themselves.

use proptest::prelude::*;
use wn_core::experiments::{Subject, Theorem};
use wn_core::kernels::{dirichlet_kernel, norlund_kernel};
use wn_core::means::{convolve, norlund_mean, MeanMethod};
use wn_core::metrics::{lp_norm, modulus_profile};
use wn_core::transform::{analyze, partial_sum, synthesize};
use wn_core::{GroupElement, Resolution, StepFunction, WeightSequence};

fn res(m: u32) -> Resolution {
    Resolution::new(m).unwrap()
}

/// A step function at a random resolution in `1..=max_m`.
fn step_function(max_m: u32) -> impl Strategy<Value = StepFunction> {
    (1..=max_m).prop_flat_map(|m| {
        prop::collection::vec(-4.0f64..4.0, 1usize << m)
            .prop_map(move |v| StepFunction::new(res(m), v).unwrap())
    })
}

/// Function plus an order in `1..=2^M`.
fn with_order(max_m: u32) -> impl Strategy<Value = (StepFunction, usize)> {
    step_function(max_m).prop_flat_map(|f| {
        let size = f.resolution().size();
        (Just(f), 1..=size)
    })
}

/// Non-negative weights with `q_0 > 0`; sorted when `order` is given.
fn weight_values(len: usize, order: Option<bool>) -> impl Strategy<Value = WeightSequence> {
    prop::collection::vec(0.0f64..3.0, len).prop_map(move |mut v| {
        match order {
            Some(true) => {
                v.iter_mut().for_each(|x| *x += 0.05);
                v.sort_by(f64::total_cmp);
            }
            Some(false) => {
                v.sort_by(|a, b| b.total_cmp(a));
                v[0] += 0.5;
            }
            None => v[0] += 0.5,
        }
        WeightSequence::from_values("random", v).unwrap()
    })
}

fn max_diff(a: &StepFunction, b: &StepFunction) -> f64 {
    a.max_abs_diff(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_is_an_involution_preserving_the_integral(f in step_function(8), t in any::<u64>()) {
        let t = GroupElement::new((t % f.resolution().size() as u64) as usize, f.resolution()).unwrap();
        let g = f.translate(t).unwrap();
        prop_assert!((g.integrate() - f.integrate()).abs() < 1e-12);
        prop_assert_eq!(g.translate(t).unwrap(), f);
    }

    #[test]
    fn round_trip_and_parseval(f in step_function(10)) {
        let s = analyze(&f);
        prop_assert!(max_diff(&synthesize(&s), &f) < 1e-12);
        let l2 = lp_norm(&f, 2.0).unwrap();
        prop_assert!((s.energy() - l2 * l2).abs() < 1e-10);
    }

    #[test]
    fn convolution_commutes_and_reproduces_partial_sums((f, n) in with_order(8), seed in any::<u64>()) {
        let g = f.map(|v| (v * seed as f64).sin());
        prop_assert!(max_diff(&convolve(&f, &g).unwrap(), &convolve(&g, &f).unwrap()) < 1e-10);
        let d = dirichlet_kernel(n, f.resolution()).unwrap();
        prop_assert!(max_diff(&convolve(&f, &d).unwrap(), &partial_sum(&f, n).unwrap()) < 1e-10);
    }

    #[test]
    fn mean_routes_agree(
        (f, n) in with_order(7),
        q in weight_values(129, None),
    ) {
        let means: Vec<_> = MeanMethod::ALL
            .iter()
            .map(|&m| norlund_mean(&f, n, &q, m).unwrap().values)
            .collect();
        prop_assert!(max_diff(&means[0], &means[1]) < 1e-10);
        prop_assert!(max_diff(&means[1], &means[2]) < 1e-10);
    }

    #[test]
    fn norlund_kernels_have_unit_mass(m in 1u32..9, n_seed in any::<usize>(), q in weight_values(257, None)) {
        let r = res(m);
        let n = 1 + n_seed % r.size();
        let k = norlund_kernel(&q, n, r).unwrap();
        prop_assert!((k.integrate() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn modulus_profile_shape(f in step_function(9), p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])) {
        let prof = modulus_profile(&f, p).unwrap();
        let m = f.resolution().bits() as usize;
        prop_assert_eq!(prof.values.len(), m + 1);
        prop_assert_eq!(prof.values[m], 0.0);
        let bound = 2.0 * lp_norm(&f, p).unwrap() + 1e-12;
        for w in prof.values.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        prop_assert!(prof.values[0] <= bound);
    }

    #[test]
    fn fejer_estimate_holds(f in step_function(9), n_seed in any::<usize>(), p in prop::sample::select(vec![1.0, 2.0, 3.0])) {
        let r = f.resolution();
        prop_assume!(r.bits() >= 2);
        let n = 2 + n_seed % (r.size() / 2 - 1).max(1);
        let s = Subject::new("f", f, &[p]).unwrap();
        let rep = s.verify(Theorem::Fejer, n, None, &[p], None).unwrap().pop().unwrap();
        prop_assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn nondecreasing_bound_holds_for_random_weights(
        f in step_function(9),
        n_seed in any::<usize>(),
        q in weight_values(256, Some(true)),
        p in prop::sample::select(vec![1.0, 2.0, 3.0]),
    ) {
        let r = f.resolution();
        prop_assume!(r.bits() >= 2);
        let n = 1 + n_seed % (r.size() / 2).min(256);
        let s = Subject::new("f", f, &[p]).unwrap();
        let rep = s.verify(Theorem::T1, n, Some(&q), &[p], None).unwrap().pop().unwrap();
        prop_assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn nonincreasing_dyadic_bound_holds_for_random_weights(
        f in step_function(9),
        e_seed in any::<u32>(),
        q in weight_values(257, Some(false)),
        p in prop::sample::select(vec![1.0, 2.0, 3.0]),
    ) {
        let r = f.resolution();
        let e = e_seed % r.bits();
        prop_assume!(q.values()[1usize << e] > 0.0);
        let s = Subject::new("f", f, &[p]).unwrap();
        let rep = s.verify(Theorem::T2, 1 << e, Some(&q), &[p], None).unwrap().pop().unwrap();
        prop_assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn ratio_is_scale_invariant(f in step_function(8), n_seed in any::<usize>(), c in 0.01f64..100.0) {
        let r = f.resolution();
        prop_assume!(r.bits() >= 2);
        let n = 1 + n_seed % (r.size() / 2);
        let q = WeightSequence::from_values("harmonic", (0..=n).map(|k| 1.0 / (k + 1) as f64).collect()).unwrap();
        let a = Subject::new("f", f.clone(), &[2.0]).unwrap();
        let b = Subject::new("cf", f.scaled(c), &[2.0]).unwrap();
        let ra = a.verify(Theorem::T3, n, Some(&q), &[2.0], None).unwrap().pop().unwrap();
        let rb = b.verify(Theorem::T3, n, Some(&q), &[2.0], None).unwrap().pop().unwrap();
        match (ra.ratio, rb.ratio) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0)),
            (x, y) => prop_assert_eq!(x.is_none(), y.is_none()),
        }
    }
}
