use std::f64::consts::PI;

use proptest::prelude::*;
use shiftflow_core::dynamics_diagnostics::{odd_anticommutator_scalar, tail_weight};
use shiftflow_core::implementability::hs_partial_sum;
use shiftflow_core::one_particle::{
    apply_shift_convolved, apply_shift_exact, apply_shift_fft, MomentumGrid, WaveFunction, Window,
};
use shiftflow_core::Complex64;

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn wave(lo: i64, amps: Vec<(f64, f64)>) -> WaveFunction {
    let window = Window::new(lo, lo + amps.len() as i64 - 1).unwrap();
    WaveFunction::new(
        window,
        amps.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect(),
    )
    .unwrap()
}

fn amplitudes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integer_times_translate(lo in -50i64..50, amps in amplitudes(), n in -20i64..20) {
        let f = wave(lo, amps);
        let g = apply_shift_exact(&f, n as f64, 32).unwrap();
        for j in f.window().sites() {
            prop_assert_eq!(g.amplitude(j + n), f.amplitude(j));
        }
        prop_assert_eq!(g.norm_sqr(), f.norm_sqr());
    }

    #[test]
    fn column_deficit_within_tail_bound(j in -100i64..100, t in -4.0..4.0f64, pad in 50u64..400) {
        let deficit = 1.0 - apply_shift_exact(&WaveFunction::basis(j), t, pad).unwrap().norm_sqr();
        prop_assert!(deficit >= -1e-12);
        prop_assert!(deficit <= 4.5 / (PI * PI * pad as f64));
    }

    #[test]
    fn group_law_on_inner_window(s in -2.0..2.0f64, t in -2.0..2.0f64) {
        // truncation only disturbs the far field; near the origin the error is O(1/pad)
        let pad = 2000u64;
        let f = WaveFunction::basis(0);
        let two_steps = apply_shift_convolved(&apply_shift_exact(&f, t, pad).unwrap(), s, pad).unwrap();
        let one_step = apply_shift_exact(&f, s + t, 2 * pad).unwrap();
        let err = Window::centered(16)
            .sites()
            .map(|l| (two_steps.amplitude(l) - one_step.amplitude(l)).norm())
            .fold(0.0, f64::max);
        prop_assert!(err <= 10.0 / pad as f64, "err = {}", err);
    }

    #[test]
    fn shift_commutes_with_translation(j in -30i64..30, k in -30i64..30, t in -3.0..3.0f64) {
        let a = apply_shift_exact(&WaveFunction::basis(j), t, 40).unwrap();
        let b = apply_shift_exact(&WaveFunction::basis(j + k), t, 40).unwrap();
        for l in a.window().sites() {
            prop_assert_eq!(a.amplitude(l), b.amplitude(l + k));
        }
    }

    #[test]
    fn fft_route_preserves_norm(amps in amplitudes(), t in -5.0..5.0f64) {
        let f = wave(0, amps);
        let g = apply_shift_fft(&f, t, &MomentumGrid::new(256).unwrap()).unwrap();
        prop_assert!((g.norm_sqr() - f.norm_sqr()).abs() <= 1e-12);
    }

    #[test]
    fn odd_scalar_is_sinc(i in -20i64..20, j in -20i64..20, t in -6.0..6.0f64) {
        let z = odd_anticommutator_scalar(&WaveFunction::basis(i), &WaveFunction::basis(j), t, 8)
            .unwrap();
        prop_assert!((z.re - sinc(j as f64 + t - i as f64)).abs() <= 1e-12);
        prop_assert!(z.im.abs() <= 1e-15);
    }

    #[test]
    fn tail_nonincreasing_in_radius(t in -2.0..2.0f64, r in 1u64..60) {
        let f = WaveFunction::basis(3);
        let a = tail_weight(&f, t, r, 200).unwrap();
        let b = tail_weight(&f, t, r + 1, 200).unwrap();
        prop_assert!(b <= a);
    }

    #[test]
    fn hs_sums_grow_and_vanish_only_at_integers(t in -1.9..5.0f64, m in 1u64..2000) {
        let a = hs_partial_sum(t, m).unwrap();
        let b = hs_partial_sum(t, 2 * m).unwrap();
        prop_assert!(b >= a);
        if t.fract() == 0.0 {
            prop_assert_eq!(a, 0.0);
        } else {
            prop_assert!(a > 0.0);
        }
    }
}
