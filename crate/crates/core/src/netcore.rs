//! Two-port network algebra: S, Z and ABCD representations with real,
//! possibly unequal, reference impedances.
//!
//! ABCD is the working form for cascades; S is the form used for reporting
//! and efficiency arithmetic. All conversions are exact closed forms and
//! refuse to divide by a denominator smaller than `1e-300`.

use num_complex::Complex64;

use crate::error::{Error, Result, DEGENERATE_EPS};

pub type ComplexValue = Complex64;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    S,
    Z,
    Abcd,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::S => "S",
            Representation::Z => "Z",
            Representation::Abcd => "ABCD",
        }
    }
}

/// Real reference impedances of the TX (port 1) and RX (port 2) ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PortPair {
    pub zp1: f64,
    pub zp2: f64,
}

impl PortPair {
    pub fn new(zp1: f64, zp2: f64) -> Result<Self> {
        if !(zp1.is_finite() && zp2.is_finite() && zp1 > 0.0 && zp2 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "port impedances must be positive and finite, got {zp1} / {zp2}"
            )));
        }
        Ok(Self { zp1, zp2 })
    }

    pub fn fifty() -> Self {
        Self { zp1: 50.0, zp2: 50.0 }
    }
}

impl Default for PortPair {
    fn default() -> Self {
        Self::fifty()
    }
}

/// A complex 2x2 network in one of three representations.
///
/// `ports` holds the reference impedances; they only carry meaning for
/// the S representation and default to 50/50 otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPortMatrix {
    repr: Representation,
    m: [[Complex64; 2]; 2],
    ports: PortPair,
}

fn check_finite(m: &[[Complex64; 2]; 2]) -> Result<()> {
    if m.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("non-finite matrix element".into()))
    }
}

fn checked_div(num: Complex64, den: Complex64, what: &str) -> Result<Complex64> {
    if den.norm() < DEGENERATE_EPS {
        return Err(Error::Degenerate(format!("{what} denominator vanishes")));
    }
    Ok(num / den)
}

impl TwoPortMatrix {
    pub fn new(repr: Representation, m: [[Complex64; 2]; 2], ports: PortPair) -> Result<Self> {
        check_finite(&m)?;
        PortPair::new(ports.zp1, ports.zp2)?;
        Ok(Self { repr, m, ports })
    }

    pub fn z(m: [[Complex64; 2]; 2]) -> Result<Self> {
        Self::new(Representation::Z, m, PortPair::fifty())
    }

    pub fn abcd(m: [[Complex64; 2]; 2]) -> Result<Self> {
        Self::new(Representation::Abcd, m, PortPair::fifty())
    }

    pub fn s(m: [[Complex64; 2]; 2], ports: PortPair) -> Result<Self> {
        Self::new(Representation::S, m, ports)
    }

    /// Through connection in ABCD form.
    pub fn identity() -> Self {
        Self {
            repr: Representation::Abcd,
            m: [[ONE, ZERO], [ZERO, ONE]],
            ports: PortPair::fifty(),
        }
    }

    /// Series impedance element in ABCD form.
    pub fn series(z: Complex64) -> Self {
        Self {
            repr: Representation::Abcd,
            m: [[ONE, z], [ZERO, ONE]],
            ports: PortPair::fifty(),
        }
    }

    /// Shunt admittance element in ABCD form.
    pub fn shunt(y: Complex64) -> Self {
        Self {
            repr: Representation::Abcd,
            m: [[ONE, ZERO], [y, ONE]],
            ports: PortPair::fifty(),
        }
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn ports(&self) -> PortPair {
        self.ports
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn m11(&self) -> Complex64 {
        self.m[0][0]
    }
    pub fn m12(&self) -> Complex64 {
        self.m[0][1]
    }
    pub fn m21(&self) -> Complex64 {
        self.m[1][0]
    }
    pub fn m22(&self) -> Complex64 {
        self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    fn expect(&self, repr: Representation) -> Result<()> {
        if self.repr == repr {
            Ok(())
        } else {
            Err(Error::Representation {
                expected: repr.name(),
                found: self.repr.name(),
            })
        }
    }

    /// Converts any representation to S at the given reference impedances.
    /// An S matrix is returned unchanged only when its ports already match.
    pub fn to_s(&self, ports: PortPair) -> Result<Self> {
        match self.repr {
            Representation::Z => z_to_s(self, ports.zp1, ports.zp2),
            Representation::Abcd => abcd_to_s(self, ports.zp1, ports.zp2),
            Representation::S if self.ports == ports => Ok(*self),
            Representation::S => abcd_to_s(&s_to_abcd(self)?, ports.zp1, ports.zp2),
        }
    }

    pub fn to_abcd(&self) -> Result<Self> {
        match self.repr {
            Representation::Abcd => Ok(*self),
            Representation::Z => z_to_abcd(self),
            Representation::S => s_to_abcd(self),
        }
    }

    pub fn to_z(&self) -> Result<Self> {
        match self.repr {
            Representation::Z => Ok(*self),
            Representation::Abcd => abcd_to_z(self),
            Representation::S => s_to_z(self),
        }
    }

    /// Largest element-wise distance to `other`, relative to the largest
    /// element magnitude of `self`.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        let scale = self
            .m
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max)
            / scale
    }
}

/// Z to S with real reference impedances.
pub fn z_to_s(net: &TwoPortMatrix, zp1: f64, zp2: f64) -> Result<TwoPortMatrix> {
    net.expect(Representation::Z)?;
    let ports = PortPair::new(zp1, zp2)?;
    let [[z11, z12], [z21, z22]] = net.m;
    let (p1, p2) = (Complex64::from(zp1), Complex64::from(zp2));
    let dz = (z11 + p1) * (z22 + p2) - z12 * z21;
    if dz.norm() < DEGENERATE_EPS {
        return Err(Error::Degenerate("Z-to-S determinant vanishes".into()));
    }
    let g = 2.0 * (zp1 * zp2).sqrt();
    let s11 = ((z11 - p1) * (z22 + p2) - z12 * z21) / dz;
    let s12 = g * z12 / dz;
    let s21 = g * z21 / dz;
    let s22 = ((z11 + p1) * (z22 - p2) - z12 * z21) / dz;
    TwoPortMatrix::s([[s11, s12], [s21, s22]], ports)
}

/// S to Z using the stored reference impedances.
pub fn s_to_z(net: &TwoPortMatrix) -> Result<TwoPortMatrix> {
    net.expect(Representation::S)?;
    let [[s11, s12], [s21, s22]] = net.m;
    let PortPair { zp1, zp2 } = net.ports;
    let ds = (ONE - s11) * (ONE - s22) - s12 * s21;
    if ds.norm() < DEGENERATE_EPS {
        return Err(Error::Degenerate("S-to-Z determinant vanishes".into()));
    }
    let g = 2.0 * (zp1 * zp2).sqrt();
    let z11 = zp1 * ((ONE + s11) * (ONE - s22) + s12 * s21) / ds;
    let z12 = g * s12 / ds;
    let z21 = g * s21 / ds;
    let z22 = zp2 * ((ONE - s11) * (ONE + s22) + s12 * s21) / ds;
    TwoPortMatrix::z([[z11, z12], [z21, z22]])
}

/// ABCD to S with real, possibly unequal, reference impedances.
pub fn abcd_to_s(net: &TwoPortMatrix, zp1: f64, zp2: f64) -> Result<TwoPortMatrix> {
    net.expect(Representation::Abcd)?;
    let ports = PortPair::new(zp1, zp2)?;
    let [[a, b], [c, d]] = net.m;
    let den = a * zp2 + b + c * zp1 * zp2 + d * zp1;
    if den.norm() < DEGENERATE_EPS {
        return Err(Error::Degenerate("ABCD-to-S denominator vanishes".into()));
    }
    let g = 2.0 * (zp1 * zp2).sqrt();
    let s11 = (a * zp2 + b - c * zp1 * zp2 - d * zp1) / den;
    let s12 = g * (a * d - b * c) / den;
    let s21 = g / den;
    let s22 = (-a * zp2 + b - c * zp1 * zp2 + d * zp1) / den;
    TwoPortMatrix::s([[s11, s12], [s21, s22]], ports)
}

/// S to ABCD using the stored reference impedances, via
/// p = 1+S11, q = 1-S11, u = 1+S22, v = 1-S22, x = S12*S21.
pub fn s_to_abcd(net: &TwoPortMatrix) -> Result<TwoPortMatrix> {
    net.expect(Representation::S)?;
    let [[s11, s12], [s21, s22]] = net.m;
    if s12.norm() < DEGENERATE_EPS || s21.norm() < DEGENERATE_EPS {
        return Err(Error::Degenerate(
            "S12 or S21 is zero: no transmission, ABCD undefined".into(),
        ));
    }
    let PortPair { zp1, zp2 } = net.ports;
    let (p, q, u, v, x) = (ONE + s11, ONE - s11, ONE + s22, ONE - s22, s12 * s21);
    let two_s21 = 2.0 * s21;
    let a = (zp1 / zp2).sqrt() * (p * v + x) / two_s21;
    let b = (zp1 * zp2).sqrt() * (p * u - x) / two_s21;
    let c = (q * v - x) / (two_s21 * (zp1 * zp2).sqrt());
    let d = (zp2 / zp1).sqrt() * (q * u + x) / two_s21;
    TwoPortMatrix::abcd([[a, b], [c, d]])
}

pub fn z_to_abcd(net: &TwoPortMatrix) -> Result<TwoPortMatrix> {
    net.expect(Representation::Z)?;
    let z21 = net.m21();
    let a = checked_div(net.m11(), z21, "Z-to-ABCD")?;
    let b = checked_div(net.det(), z21, "Z-to-ABCD")?;
    let c = checked_div(ONE, z21, "Z-to-ABCD")?;
    let d = checked_div(net.m22(), z21, "Z-to-ABCD")?;
    TwoPortMatrix::abcd([[a, b], [c, d]])
}

pub fn abcd_to_z(net: &TwoPortMatrix) -> Result<TwoPortMatrix> {
    net.expect(Representation::Abcd)?;
    let c = net.m21();
    let z11 = checked_div(net.m11(), c, "ABCD-to-Z")?;
    let z12 = checked_div(net.det(), c, "ABCD-to-Z")?;
    let z21 = checked_div(ONE, c, "ABCD-to-Z")?;
    let z22 = checked_div(net.m22(), c, "ABCD-to-Z")?;
    TwoPortMatrix::z([[z11, z12], [z21, z22]])
}

/// Chain product `a * b`: `a` sits on the port-1 side.
pub fn cascade(a: &TwoPortMatrix, b: &TwoPortMatrix) -> Result<TwoPortMatrix> {
    a.expect(Representation::Abcd)?;
    b.expect(Representation::Abcd)?;
    let (x, y) = (a.m, b.m);
    let m = [
        [
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ],
        [
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ],
    ];
    TwoPortMatrix::abcd(m)
}

/// Reflection coefficient seen at port 1 with port 2 terminated in `gamma_load`.
pub fn input_reflection(s: &TwoPortMatrix, gamma_load: Complex64) -> Result<Complex64> {
    s.expect(Representation::S)?;
    if gamma_load.norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidInput(format!(
            "|gamma_load| = {} exceeds 1",
            gamma_load.norm()
        )));
    }
    let den = ONE - s.m22() * gamma_load;
    let t = checked_div(s.m12() * s.m21() * gamma_load, den, "input reflection")?;
    Ok(s.m11() + t)
}

/// Magnitude in decibels, `20 log10 |x|`.
pub fn db(x: Complex64) -> f64 {
    20.0 * x.norm().log10()
}
