mod common;

use common::*;
use nric::spiral::{
    ac_resistance, estimate_k, filament_mutual, inductance, skin_depth, synthesize, FabConstraints, ShapeCoefficients,
    SpiralGeometry, COPPER_RESISTIVITY,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn neumann_integral_matches_elliptic_form(a in 1e-4..2e-2f64, b in 1e-4..2e-2f64, t in 0.02..3.0f64) {
        let d = t * (a + b);
        let want = loop_mutual(a, b, d);
        let got = filament_mutual(a, b, d);
        prop_assert!((got - want).abs() <= 1e-8 * want.abs());
    }

    #[test]
    fn square_spirals_track_modified_wheeler(n in 2u32..20, r in 5e-4..5e-3f64, w in 1e-4..5e-4f64, gap in 1e-4..5e-4f64) {
        let shape = ShapeCoefficients::square();
        let g = SpiralGeometry::new(shape, n, r, w + gap, w, 35e-6).unwrap();
        prop_assume!((0.15..=0.85).contains(&g.phi));
        let cs = shape.cos_factor();
        let d_out = g.w + 2.0 * (g.r + n as f64 * g.dr) * cs;
        let d_in = 2.0 * g.r * cs - g.w;
        prop_assume!(d_in > 0.0);
        let lw = wheeler_square(n, d_out, d_in);
        let l = inductance(&g).unwrap();
        prop_assert!((l - lw).abs() <= 0.08 * lw, "n={} L={} Wheeler={}", n, l, lw);
    }

    #[test]
    fn skin_effect_only_adds_resistance(f in 1e3..1e9f64) {
        let g = SpiralGeometry::new(ShapeCoefficients::square(), 5, 2e-3, 6e-4, 3e-4, 35e-6).unwrap();
        let dc = ac_resistance(&g, 0.0, COPPER_RESISTIVITY).unwrap();
        prop_assert!(ac_resistance(&g, f, COPPER_RESISTIVITY).unwrap() >= dc);
    }
}

#[test]
fn distant_loops_behave_as_dipoles() {
    let (a, b, d) = (1e-4, 2e-4, 5e-2_f64);
    let dipole = MU0 * std::f64::consts::PI * a * a * b * b / (2.0 * d.powi(3));
    assert!((filament_mutual(a, b, d) - dipole).abs() <= 1e-4 * dipole);
}

#[test]
fn copper_skin_depth_at_20_mhz() {
    // sqrt(rho / (pi f mu0)) for rho = 1.68e-8: about 14.6 um.
    let d = skin_depth(20e6, COPPER_RESISTIVITY);
    assert!((d - 14.59e-6).abs() < 0.02e-6, "{d}");
}

#[test]
fn dc_resistance_is_rho_length_over_section() {
    let g = SpiralGeometry::new(ShapeCoefficients::circular(), 3, 1e-3, 5e-4, 2e-4, 35e-6).unwrap();
    let len: f64 = (0..3).map(|i| 2.0 * std::f64::consts::PI * (1e-3 + (i as f64 + 0.5) * 5e-4)).sum();
    let want = COPPER_RESISTIVITY * len / (2e-4 * 35e-6);
    assert!((ac_resistance(&g, 0.0, COPPER_RESISTIVITY).unwrap() - want).abs() < 1e-12 * want);
}

#[test]
fn coupling_falls_with_distance() {
    let g = SpiralGeometry::new(ShapeCoefficients::square(), 4, 3e-3, 1e-3, 5e-4, 35e-6).unwrap();
    let mut prev = 1.0;
    for d in [1e-3, 2e-3, 5e-3, 1e-2, 2e-2] {
        let k = estimate_k(&g, &g, d).unwrap();
        assert!(k > 0.0 && k < prev, "k({d}) = {k}");
        prev = k;
    }
}

#[test]
fn synthesis_is_deterministic_and_ranked() {
    let fab = FabConstraints::default();
    let shape = ShapeCoefficients::square();
    let a = synthesize(400.4e-9, &fab, &shape).unwrap();
    let b = synthesize(400.4e-9, &fab, &shape).unwrap();
    assert_eq!(a, b);
    assert!(!a.candidates.is_empty());
    for pair in a.candidates.windows(2) {
        assert!(pair[0].geometry.area >= pair[1].geometry.area);
    }
    for c in &a.candidates {
        assert!(c.geometry.area <= fab.max_area);
        assert!((c.inductance - inductance(&c.geometry).unwrap()).abs() < 1e-18);
        let (lo, hi) = fab.fill_ratio_range;
        assert!(c.geometry.phi >= lo && c.geometry.phi <= hi);
    }
}

#[test]
fn unreachable_target_reports_nearest_miss() {
    let fab = FabConstraints::default().with_max_area(1e-6);
    let out = synthesize(10e-6, &fab, &ShapeCoefficients::square()).unwrap();
    assert!(out.candidates.is_empty());
    assert!(out.nearest_miss.is_some());
}

#[test]
fn bad_geometry_is_rejected() {
    let s = ShapeCoefficients::square();
    assert!(SpiralGeometry::new(s, 0, 1e-3, 5e-4, 2e-4, 35e-6).is_err());
    assert!(SpiralGeometry::new(s, 3, 1e-3, 1e-4, 2e-4, 35e-6).is_err());
    assert!(ShapeCoefficients::polygon(2).is_err());
    assert!(synthesize(-1.0, &FabConstraints::default(), &s).is_err());
}


