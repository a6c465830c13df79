mod common;

use common::*;
use nric::harvester::{bessel_i0, design_space, ln_bessel_i0, min_stages, rect_input, v_out, HarvesterConstraints, ZinModel};
use proptest::prelude::*;
use std::f64::consts::PI;

/// `ln I0(x)` from the integral of `exp(x (cos t - 1))`, which never overflows.
fn ln_i0_oracle(x: f64) -> f64 {
    let n = 20_000;
    let h = PI / n as f64;
    let mut s = 0.5 * (1.0 + (-2.0 * x).exp());
    for i in 1..n {
        s += (x * ((i as f64 * h).cos() - 1.0)).exp();
    }
    x + (s * h / PI).ln()
}

fn constraints() -> HarvesterConstraints {
    HarvesterConstraints {
        n_min: 1,
        n_max: 40,
        q_values: vec![1.0, 2.0, 5.0, 10.0],
        max_charge_time: 1.0,
        tissue_z: c(20.0, 40.0),
        i_load: 10e-6,
        c_store: 1e-6,
        v_t: 26e-3,
        f0: 40e6,
    }
}

proptest! {
    #[test]
    fn i0_agrees_with_integral_form(x in 0.0..60.0f64) {
        let o = i0_integral_oracle(x);
        prop_assert!((bessel_i0(x) - o).abs() <= 1e-12 * o);
    }

    #[test]
    fn ln_i0_holds_past_overflow(x in 1.0..2000.0f64) {
        let o = ln_i0_oracle(x);
        prop_assert!((ln_bessel_i0(x) - o).abs() <= 1e-10 * o.abs().max(1.0));
    }

    #[test]
    fn output_is_linear_in_stage_count(n in 1u32..200, v in 1e-3..1.0f64, vt in 0.02..0.03f64) {
        let one = v_out(1, v, vt).unwrap();
        prop_assert!((v_out(n, v, vt).unwrap() - n as f64 * one).abs() <= 1e-12 * n as f64 * one.max(1e-300));
    }

    #[test]
    fn output_grows_with_amplitude(n in 1u32..50, v in 1e-3..1.0f64) {
        prop_assert!(v_out(n, v * 1.01, 0.026).unwrap() > v_out(n, v, 0.026).unwrap());
    }

    #[test]
    fn min_stages_is_the_smallest_sufficient_count(target in 0.1..5.0f64, v in 0.01..0.3f64) {
        let n = min_stages(target, v, 0.026).unwrap();
        prop_assert!(v_out(n, v, 0.026).unwrap() >= target * (1.0 - 1e-12));
        if n > 1 {
            prop_assert!(v_out(n - 1, v, 0.026).unwrap() < target);
        }
    }

    #[test]
    fn rect_input_round_trips(re in 1.0..1e4f64, im in -1e4..1e4f64, f in 1e5..1e9f64) {
        let z = c(re, im);
        let back = rect_input(z, f).unwrap().impedance(f);
        prop_assert!((back - z).norm() <= 1e-9 * z.norm());
    }
}

#[test]
fn small_signal_limit_is_quadratic() {
    // ln I0(x) ~ x^2 / 4 for small x
    let (v, vt) = (1e-4, 0.026);
    let x: f64 = v / vt;
    let want = 2.0 * vt * x * x / 4.0;
    assert!((v_out(1, v, vt).unwrap() - want).abs() < 1e-6 * want);
}

#[test]
fn exploration_is_deterministic_and_picks_fewest_stages() {
    let c = constraints();
    let a = design_space(0.05, 1.0, &c, &ZinModel::default()).unwrap();
    let b = design_space(0.05, 1.0, &c, &ZinModel::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.table.len(), 40 * 4);
    let (spec, point) = a.chosen.clone().unwrap();
    assert!(point.v_out >= 1.0);
    for p in &a.table {
        if p.v_out >= 1.0 && p.charge_time <= c.max_charge_time {
            assert!(p.n >= spec.n_stages);
        }
    }
}

#[test]
fn infeasible_targets_report_the_best_alternatives() {
    let mut c = constraints();
    c.n_max = 3;
    let out = design_space(0.01, 5.0, &c, &ZinModel::default()).unwrap();
    assert!(out.chosen.is_none());
    let best = out.best_output.unwrap();
    assert!(out.table.iter().all(|p| p.v_out <= best.v_out));
    assert!(out.fastest_charge.is_some());
}

#[test]
fn csv_has_one_row_per_point() {
    let out = design_space(0.05, 1.0, &constraints(), &ZinModel::default()).unwrap();
    assert_eq!(out.to_csv().lines().count(), out.table.len() + 1);
}
