use std::f64::consts::PI;

use klein::analytic::{barrier_scatter, kappa, step_scatter};
use klein::dirac::{dirac_residual, momentum_branch, plane_wave};
use klein::spectrum::{
    adiabatic_sweep, positron_bound, supercritical_count, well_bound_states, well_ledger,
    EventKind,
};
use klein::transfer::{build_profile, scatter_numeric, Segment};
use klein::{Direction, Mass, Normalization, Regime};
use proptest::prelude::*;

const M: Mass = Mass::UNIT;

fn off_threshold(e: f64, v: f64) -> bool {
    ((e - v).abs() - 1.0).abs() > 1e-6
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dispersion_holds(e in -20.0..20.0f64, v in -20.0..20.0f64) {
        prop_assume!((e - v).abs() > 1.0 + 1e-9);
        let b = momentum_branch(e, v, M);
        let w = e - v;
        let q = b.q.re;
        prop_assert!(((w * w - q * q) - 1.0).abs() <= 1e-12 * w * w);
        prop_assert_eq!(q.signum(), w.signum());
    }

    #[test]
    fn plane_waves_solve_the_equation(
        e in -20.0..20.0f64,
        v in -20.0..20.0f64,
        x in -10.0..10.0f64,
        left in any::<bool>(),
    ) {
        prop_assume!(off_threshold(e, v));
        let dir = if left { Direction::Left } else { Direction::Right };
        let mode = plane_wave(e, v, M, dir, Normalization::Energy).unwrap();
        let x = if mode.regime == Regime::Evanescent { x.clamp(-1.0, 1.0) } else { x };
        prop_assert!(dirac_residual(&mode, x) < 1e-12);
    }

    #[test]
    fn box_and_energy_normalization_differ_by_constant(
        e in -20.0..20.0f64,
        v in -20.0..20.0f64,
        l in 0.5..100.0f64,
    ) {
        prop_assume!((e - v).abs() > 1.0 + 1e-6);
        let en = plane_wave(e, v, M, Direction::Right, Normalization::Energy).unwrap();
        let bx = plane_wave(e, v, M, Direction::Right, Normalization::Box { half_length: l }).unwrap();
        let ratio = bx.amplitude.norm() / en.amplitude.norm();
        prop_assert!((ratio - (2.0 * PI / (2.0 * l)).sqrt()).abs() < 1e-12 * ratio);
    }

    #[test]
    fn barrier_is_unitary(e in 1.0001..15.0f64, v in -10.0..15.0f64, a in 0.01..20.0f64) {
        prop_assume!(off_threshold(e, v));
        let s = barrier_scatter(e, v, a, M).unwrap();
        prop_assert!((s.r + s.t - 1.0).abs() < 1e-10);
        let st = step_scatter(e, v, M).unwrap();
        prop_assert!((st.r + st.t - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kappa_is_symmetric_in_klein_zone(v in 2.01..30.0f64, u in 0.001..0.999f64) {
        let e = 1.0 + u * (v - 2.0);
        let a = kappa(e, v, M).unwrap();
        let b = kappa(v - e, v, M).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * a.max(1.0));
        let ta = step_scatter(e, v, M).unwrap().t;
        let tb = step_scatter(v - e, v, M).unwrap().t;
        prop_assert!((ta - tb).abs() < 1e-12);
    }

    #[test]
    fn splitting_a_segment_changes_nothing(
        e in 1.01..10.0f64,
        v in -5.0..12.0f64,
        a in 0.05..3.0f64,
        cut in 0.01..0.99f64,
    ) {
        prop_assume!(off_threshold(e, v));
        let whole = build_profile(0.0, 0.0, vec![Segment::new(-a, a, v)], M).unwrap();
        let x = -a + 2.0 * a * cut;
        let split = build_profile(
            0.0,
            0.0,
            vec![Segment::new(-a, x, v), Segment::new(x, a, v)],
            M,
        )
        .unwrap();
        let t1 = scatter_numeric(&whole, e).unwrap().scattering;
        let t2 = scatter_numeric(&split, e).unwrap().scattering;
        prop_assert!((t1.t - t2.t).abs() < 1e-12);
        prop_assert!((t1.r - t2.r).abs() < 1e-12);
    }

    #[test]
    fn reversed_profile_transmits_equally(
        e in 1.01..10.0f64,
        v1 in -4.0..9.0f64,
        v2 in -4.0..9.0f64,
        w1 in 0.05..1.5f64,
        w2 in 0.05..1.5f64,
    ) {
        prop_assume!(off_threshold(e, v1) && off_threshold(e, v2));
        let profile = build_profile(
            0.0,
            0.0,
            vec![Segment::new(0.0, w1, v1), Segment::new(w1, w1 + w2, v2)],
            M,
        )
        .unwrap();
        let a = scatter_numeric(&profile, e).unwrap();
        let b = scatter_numeric(&profile.reversed(), e).unwrap();
        prop_assert!((a.scattering.t - b.scattering.t).abs() < 1e-10);
        prop_assert!((a.current_left - a.current_right).abs() < 1e-10);
    }

    #[test]
    fn levels_descend_as_well_deepens(
        v in 0.05..6.0f64,
        dv in 0.001..0.5f64,
        a in 0.2..4.0f64,
    ) {
        let shallow = well_bound_states(v, a, M).unwrap();
        let deep = well_bound_states(v + dv, a, M).unwrap();
        for s in &shallow {
            if let Some(d) = deep.iter().find(|d| d.n == s.n) {
                prop_assert!(d.energy < s.energy, "N={} {} -> {}", s.n, s.energy, d.energy);
                prop_assert_eq!(d.parity, s.parity);
            }
        }
        for s in shallow.iter().chain(&deep) {
            prop_assert!(s.residual < 1e-10);
        }
    }

    #[test]
    fn supercritical_count_matches_closed_form(v in 2.05..8.0f64, a in 0.3..6.0f64) {
        let exact = 2.0 * a / PI * (v * (v - 2.0)).sqrt();
        prop_assume!((exact - exact.round()).abs() > 1e-6);
        let ledger = well_ledger(v, a, M).unwrap();
        prop_assert_eq!(ledger.q_s, supercritical_count(v, a, M));
        let bound = positron_bound(v, a, M);
        prop_assert!(ledger.q_p - 1 <= bound && bound <= ledger.q_p);
        prop_assert_eq!(ledger.q_total, 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sweep_conserves_charge(v_max in 2.2..6.0f64, a in 0.3..2.5f64) {
        let exact = 2.0 * a / PI * (v_max * (v_max - 2.0)).sqrt();
        prop_assume!((exact - exact.round()).abs() > 1e-6);
        let events = adiabatic_sweep(a, M, v_max, 0.1).unwrap();
        prop_assert!(events.iter().all(|e| e.ledger.q_total == 0 && e.ledger.q_0 == -e.ledger.q_p));
        let dives = events.iter().filter(|e| e.event == EventKind::GoesSupercritical).count() as i64;
        prop_assert_eq!(dives, supercritical_count(v_max, a, M));
        let crossings = events.iter().filter(|e| e.event == EventKind::CrossesZero).count() as i64;
        prop_assert_eq!(crossings, well_ledger(v_max, a, M).unwrap().q_p);
    }
}
