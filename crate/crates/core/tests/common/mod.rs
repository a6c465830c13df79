//! Independent reference implementations used only by the tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type C = Complex64;
pub type M2 = [[C; 2]; 2];

pub const MU0: f64 = 4.0e-7 * PI;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn log_uniform(r: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (r.gen_range(lo.ln()..hi.ln())).exp()
}

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn mat_mul(a: &M2, b: &M2) -> M2 {
    let mut m = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

pub fn mat_inv(a: &M2) -> M2 {
    let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

pub fn mat_add(a: &M2, b: &M2) -> M2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

pub fn mat_sub(a: &M2, b: &M2) -> M2 {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

/// Power-wave S from Z with real references: `F (Z - G) (Z + G)^-1 F^-1`.
pub fn z_to_s_matrix(z: &M2, zp1: f64, zp2: f64) -> M2 {
    let g = [[c(zp1, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(zp2, 0.0)]];
    let f = [[c(0.5 / zp1.sqrt(), 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.5 / zp2.sqrt(), 0.0)]];
    mat_mul(&mat_mul(&f, &mat_mul(&mat_sub(z, &g), &mat_inv(&mat_add(z, &g)))), &mat_inv(&f))
}

pub fn max_rel(a: &M2, b: &M2) -> f64 {
    let scale = a.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

/// Open-circuit impedance matrix of two coupled coils, written out directly.
pub fn coil_z_matrix(l1: f64, l2: f64, r1: f64, r2: f64, k: f64, f: f64) -> M2 {
    let w = 2.0 * PI * f;
    let m = k * (l1 * l2).sqrt();
    [[c(r1, w * l1), c(0.0, w * m)], [c(0.0, w * m), c(r2, w * l2)]]
}

/// |S21| of the bare pair from the full matrix route.
#[allow(clippy::too_many_arguments)]
pub fn s21_matrix(l1: f64, l2: f64, r1: f64, r2: f64, k: f64, f: f64, zp1: f64, zp2: f64) -> f64 {
    z_to_s_matrix(&coil_z_matrix(l1, l2, r1, r2, k, f), zp1, zp2)[1][0].norm()
}

/// Complete elliptic integrals K(m), E(m) (parameter m = k^2) by the
/// arithmetic-geometric mean.
pub fn ellip_ke(m: f64) -> (f64, f64) {
    let (mut a, mut b) = (1.0_f64, (1.0 - m).sqrt());
    let mut c_n = m.sqrt();
    let mut sum = 0.5 * c_n * c_n;
    let mut pow = 0.5;
    for _ in 0..64 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        // (a - b) / 2 written without the subtraction
        c_n = c_n * c_n / (4.0 * an);
        pow *= 2.0;
        sum += pow * c_n * c_n;
        a = an;
        b = bn;
        if c_n.abs() < 1e-17 {
            break;
        }
    }
    let k = PI / (2.0 * a);
    (k, k * (1.0 - sum))
}

/// Mutual inductance of coaxial circular filaments, elliptic closed form.
pub fn loop_mutual(a: f64, b: f64, d: f64) -> f64 {
    let m = 4.0 * a * b / ((a + b) * (a + b) + d * d);
    let k = m.sqrt();
    let (kk, ee) = ellip_ke(m);
    MU0 * (a * b).sqrt() * ((2.0 / k - k) * kk - 2.0 / k * ee)
}

/// Modified-Wheeler inductance for a square spiral from its outer and
/// inner side lengths.
pub fn wheeler_square(n: u32, d_out: f64, d_in: f64) -> f64 {
    let (k1, k2) = (2.34, 2.75);
    let d_avg = 0.5 * (d_out + d_in);
    let rho = (d_out - d_in) / (d_out + d_in);
    k1 * MU0 * (n as f64).powi(2) * d_avg / (1.0 + k2 * rho)
}

/// I0 by the defining power series with explicit factorials.
pub fn i0_series_oracle(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact = 1.0_f64;
    for k in 0..120 {
        if k > 0 {
            fact *= k as f64;
        }
        sum += (x * x / 4.0).powi(k) / (fact * fact);
    }
    sum
}

/// I0 by the integral `(1/pi) int_0^pi exp(x cos t) dt`; the trapezoid rule
/// converges geometrically for this periodic integrand.
pub fn i0_integral_oracle(x: f64) -> f64 {
    let n = 2000;
    let h = PI / n as f64;
    let mut s = 0.5 * (x.exp() + (-x).exp());
    for i in 1..n {
        s += (x * (i as f64 * h).cos()).exp();
    }
    s * h / PI
}
