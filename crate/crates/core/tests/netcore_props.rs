mod common;

use common::*;
use nric::netcore::{abcd_to_s, cascade, input_reflection, s_to_abcd, s_to_z, z_to_abcd, z_to_s, PortPair, TwoPortMatrix};
use proptest::prelude::*;

fn cplx() -> impl Strategy<Value = C> {
    (0.0..3.0f64, -1.5..1.5f64).prop_map(|(lg, ph)| C::from_polar(10f64.powf(lg), ph))
}

fn zmat() -> impl Strategy<Value = M2> {
    (cplx(), cplx(), cplx(), cplx()).prop_map(|(a, b, c, d)| [[a, b], [c, d]])
}

fn port() -> impl Strategy<Value = f64> {
    5.0..300.0f64
}

proptest! {
    #[test]
    fn s_matches_matrix_oracle(z in zmat(), zp1 in port(), zp2 in port()) {
        let s = z_to_s(&TwoPortMatrix::z(z).unwrap(), zp1, zp2).unwrap();
        prop_assert!(max_rel(&s.matrix(), &z_to_s_matrix(&z, zp1, zp2)) < 1e-12);
    }

    #[test]
    fn abcd_s_round_trip(z in zmat(), zp1 in port(), zp2 in port()) {
        let a = z_to_abcd(&TwoPortMatrix::z(z).unwrap()).unwrap();
        let s = abcd_to_s(&a, zp1, zp2).unwrap();
        prop_assert_eq!(s.ports(), PortPair::new(zp1, zp2).unwrap());
        prop_assert!(s_to_abcd(&s).unwrap().max_rel_diff(&a) < 1e-12);
        prop_assert!(s_to_z(&s).unwrap().max_rel_diff(&TwoPortMatrix::z(z).unwrap()) < 1e-12);
    }

    #[test]
    fn cascade_multiplies_determinants(x in zmat(), y in zmat()) {
        let a = z_to_abcd(&TwoPortMatrix::z(x).unwrap()).unwrap();
        let b = z_to_abcd(&TwoPortMatrix::z(y).unwrap()).unwrap();
        let ab = cascade(&a, &b).unwrap();
        prop_assert!(max_rel(&ab.matrix(), &mat_mul(&a.matrix(), &b.matrix())) < 1e-12);
        let want = a.det() * b.det();
        // A D - B C rounds at eps times the largest entry squared.
        let scale = ab.matrix().iter().flatten().map(|v| v.norm_sqr()).fold(want.norm(), f64::max);
        prop_assert!((ab.det() - want).norm() <= 1e-13 * scale);
    }

    #[test]
    fn reciprocal_ladder_has_unit_determinant(
        xs in prop::collection::vec((-200.0..200.0f64, 0.0..10.0f64, -0.1..0.1f64), 1..8)
    ) {
        let mut t = TwoPortMatrix::identity();
        for (x, r, b) in xs {
            t = cascade(&t, &TwoPortMatrix::series(c(r, x))).unwrap();
            t = cascade(&t, &TwoPortMatrix::shunt(c(1e-3, b))).unwrap();
        }
        let scale = t.matrix().iter().flatten().map(|v| v.norm_sqr()).fold(1.0, f64::max);
        prop_assert!((t.det() - 1.0).norm() <= 1e-13 * scale);
    }

    #[test]
    fn terminated_input_matches_impedance_route(z in zmat(), zp1 in port(), zp2 in port(), zl in cplx()) {
        // Keep the load passive.
        let zl = c(zl.re.abs(), zl.im);
        let s = z_to_s(&TwoPortMatrix::z(z).unwrap(), zp1, zp2).unwrap();
        let gl = (zl - zp2) / (zl + zp2);
        let zin = z[0][0] - z[0][1] * z[1][0] / (z[1][1] + zl);
        let want = (zin - zp1) / (zin + zp1);
        let got = input_reflection(&s, gl).unwrap();
        prop_assert!((got - want).norm() <= 1e-9 * want.norm().max(1.0));
    }
}

#[test]
fn matched_termination_returns_s11() {
    let z = [[c(10.0, 30.0), c(0.0, 5.0)], [c(0.0, 5.0), c(20.0, -4.0)]];
    let s = z_to_s(&TwoPortMatrix::z(z).unwrap(), 50.0, 50.0).unwrap();
    assert_eq!(input_reflection(&s, c(0.0, 0.0)).unwrap(), s.m11());
}

#[test]
fn wrong_representation_is_an_error() {
    let z = TwoPortMatrix::z([[c(1.0, 0.0); 2]; 2]).unwrap();
    assert!(s_to_z(&z).is_err());
    assert!(input_reflection(&z, c(0.0, 0.0)).is_err());
}
