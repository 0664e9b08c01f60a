//! Property tests for the numeric core: the circle arithmetic and the
//! partition machinery have to hold for arbitrary inputs, not the
//! hand-picked ones.

use proptest::prelude::*;
use stable_sets::dirichlet::DirichletCharacter;
use stable_sets::phase::{self, Arc, Phase};
use stable_sets::schedule::{build_schedule, BuildParams, Location, Schedule};
use stable_sets::stable_set::strip_q;
use stable_sets::tsearch::TargetMode;
use std::sync::OnceLock;

fn circ(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn toy_schedule() -> &'static Schedule {
    static TOY: OnceLock<Schedule> = OnceLock::new();
    TOY.get_or_init(|| {
        build_schedule(&BuildParams {
            q: 3,
            mode: TargetMode::ConjChi,
            eps: vec![0.5],
            d_max: vec![2],
            eps_final: Some(0.25),
            d_final: None,
            growth: 2.0,
            t0: 0.0,
            search_budget: 50_000_000,
        })
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn phase_is_additive_mod_one(
        m in 2u64..(1 << 31),
        n in 2u64..(1 << 31),
        t in 1e-3f64..1e10,
    ) {
        let pm = phase::phase(m, t).unwrap().turns();
        let pn = phase::phase(n, t).unwrap().turns();
        let pmn = phase::phase(m * n, t).unwrap().turns();
        prop_assert!(circ(pmn, (pm + pn).fract()) <= 2e-9);
    }

    #[test]
    fn phase_respects_integer_powers(
        n in 2u64..100_000,
        a in 2u32..=3,
        t in 1e-3f64..1e10,
    ) {
        let p1 = phase::phase(n, t).unwrap().turns();
        let pa = phase::phase(n.pow(a), t).unwrap().turns();
        prop_assert!(circ(pa, (a as f64 * p1).fract()) <= (a as f64 + 1.0) * 1e-9);
    }

    #[test]
    fn shift_chord_is_below_the_arc(
        n in 10_000u64..(1 << 40),
        h in 1u64..=3,
        t_frac in 0.01f64..0.45,
    ) {
        // any T with T h < n/2: chord(n+h, n) <= T ln(1 + h/n)
        let t = t_frac * (n / h) as f64;
        let a = phase::phase(n, t).unwrap();
        let b = phase::phase(n + h, t).unwrap();
        let arc = t * (h as f64 / n as f64).ln_1p();
        prop_assert!(phase::chordal_distance(&a, &b) <= arc + 1e-7);
    }

    #[test]
    fn chordal_distance_is_a_chord(p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let (a, b) = (Phase::exact(p), Phase::exact(q));
        let chord = phase::chordal_distance(&a, &b);
        prop_assert!((0.0..=2.0 + 1e-12).contains(&chord));
        prop_assert!((chord - phase::chordal_distance(&b, &a)).abs() < 1e-15);
        // consistent with the circular distance through 2 sin(pi d)
        let expect = 2.0 * (std::f64::consts::PI * a.circular_distance(&b)).sin();
        prop_assert!((chord - expect).abs() < 1e-9);
    }

    #[test]
    fn arc_membership_is_rotation_invariant(
        lo in 0.0f64..1.0,
        len in 0.01f64..0.99,
        x in 0.0f64..1.0,
        rot_num in 0u32..64,
    ) {
        // rotations by exact multiples of 1/64 cannot change membership
        let rot = rot_num as f64 / 64.0;
        let a = Arc::new(lo, len).unwrap();
        let a_rot = Arc::new((lo + rot).rem_euclid(1.0), len).unwrap();
        let p = Phase::exact(x);
        let p_rot = Phase::exact((x + rot).rem_euclid(1.0));
        prop_assert_eq!(phase::in_arc(&p, &a), phase::in_arc(&p_rot, &a_rot));
    }

    #[test]
    fn full_circle_contains_everything(lo in 0.0f64..1.0, x in 0.0f64..1.0) {
        let a = Arc::new(lo, 1.0).unwrap();
        prop_assert!(phase::in_arc(&Phase::exact(x), &a));
    }

    #[test]
    fn strip_reconstructs(q in prop::sample::select(vec![3u64, 5, 7, 11]), n in 1u64..(1 << 40)) {
        let (m, rest) = strip_q(q, n);
        prop_assert!(rest % q != 0);
        prop_assert_eq!(q.pow(m) * rest, n);
    }

    #[test]
    fn character_is_multiplicative(
        q in prop::sample::select(vec![3u64, 5, 7, 13, 31]),
        r in 1u64..1000,
        s in 1u64..1000,
    ) {
        let chi = DirichletCharacter::mod_q(q).unwrap();
        prop_assume!(r % q != 0 && s % q != 0);
        let order = (q - 1) as u32;
        prop_assert_eq!(
            chi.exponent(r * s % q).unwrap(),
            (chi.exponent(r).unwrap() + chi.exponent(s).unwrap()) % order
        );
    }

    #[test]
    fn locate_is_monotone_and_consistent(seed in 1u64..u64::MAX) {
        let s = toy_schedule();
        let n = 1 + seed % (s.terminal - 2);
        let flat = |loc: Location| match loc {
            Location::PreEpoch => 0usize,
            Location::Cell { k, j } => {
                1 + s.epochs[..(k - 1) as usize].iter().map(|e| e.cuts.len()).sum::<usize>()
                    + j as usize
            }
        };
        let a = flat(s.locate(n).unwrap());
        let b = flat(s.locate(n + 1).unwrap());
        prop_assert!(a == b || b == a + 1);
        // alpha is the ramp value of the located cell
        let alpha = s.alpha(n).unwrap();
        prop_assert!((-1.0..=2.0).contains(&alpha));
    }
}
