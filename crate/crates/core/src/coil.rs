//! The coupled-coil electrical model of the bare link.
//!
//! |S21| of two magnetically coupled coils between real ports peaks at a
//! frequency fixed by the coil parameters alone. Working backwards from a
//! target frequency gives the geometric-mean self-inductance that puts the
//! peak there; that inductance seeds the rest of the design flow.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result, DEGENERATE_EPS};
use crate::netcore::{PortPair, Representation, TwoPortMatrix};

/// Electrical model of a TX/RX coil pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoilPair {
    pub l1: f64,
    pub l2: f64,
    pub r1: f64,
    pub r2: f64,
    pub k: f64,
}

impl CoilPair {
    pub fn new(l1: f64, l2: f64, r1: f64, r2: f64, k: f64) -> Result<Self> {
        let finite = [l1, l2, r1, r2, k].iter().all(|v| v.is_finite());
        if !finite || l1 <= 0.0 || l2 <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "inductances must be positive and finite (l1={l1}, l2={l2})"
            )));
        }
        if r1 < 0.0 || r2 < 0.0 {
            return Err(Error::InvalidInput(format!(
                "resistances must be non-negative (r1={r1}, r2={r2})"
            )));
        }
        if !(0.0..1.0).contains(&k) {
            return Err(Error::InvalidInput(format!("coupling must lie in [0, 1), got {k}")));
        }
        Ok(Self { l1, l2, r1, r2, k })
    }

    pub fn symmetric(l: f64, r: f64, k: f64) -> Result<Self> {
        Self::new(l, l, r, r, k)
    }

    /// Mutual inductance `k * sqrt(l1 * l2)`.
    pub fn mutual(&self) -> f64 {
        self.k * (self.l1 * self.l2).sqrt()
    }
}

/// The composite terms of the closed-form |S21| expression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkAuxiliaries {
    /// `2 M sqrt(zp1 zp2)`
    pub t1: f64,
    /// `(r1 + zp1)(r2 + zp2)`
    pub t2: f64,
    /// `l1 l2 - M^2`
    pub t3: f64,
    /// `l1 (r2 + zp2) + l2 (r1 + zp1)`
    pub t4: f64,
}

impl LinkAuxiliaries {
    pub fn new(coils: &CoilPair, ports: &PortPair) -> Self {
        let m = coils.mutual();
        let (a1, a2) = (coils.r1 + ports.zp1, coils.r2 + ports.zp2);
        Self {
            t1: 2.0 * m * (ports.zp1 * ports.zp2).sqrt(),
            t2: a1 * a2,
            t3: coils.l1 * coils.l2 - m * m,
            t4: coils.l1 * a2 + coils.l2 * a1,
        }
    }
}

/// Z matrix of the coupled coils at `f`.
pub fn coil_z(coils: &CoilPair, f: f64) -> Result<TwoPortMatrix> {
    check_freq(f)?;
    let w = 2.0 * PI * f;
    let zm = Complex64::new(0.0, w * coils.mutual());
    TwoPortMatrix::z([
        [Complex64::new(coils.r1, w * coils.l1), zm],
        [zm, Complex64::new(coils.r2, w * coils.l2)],
    ])
}

/// ABCD matrix of the coupled coils at `f`. Undefined for `k = 0`.
pub fn coil_abcd(coils: &CoilPair, f: f64) -> Result<TwoPortMatrix> {
    check_freq(f)?;
    let m = coils.mutual();
    if coils.k <= DEGENERATE_EPS {
        return Err(Error::Degenerate("uncoupled coils have no ABCD matrix".into()));
    }
    let w = 2.0 * PI * f;
    let z21 = Complex64::new(0.0, w * m);
    // det Z with l1 l2 (1 - k^2) written out so weak coupling keeps its digits
    let det_z = Complex64::new(
        coils.r1 * coils.r2 - w * w * coils.l1 * coils.l2 * (1.0 - coils.k * coils.k),
        w * (coils.r1 * coils.l2 + coils.r2 * coils.l1),
    );
    TwoPortMatrix::abcd([
        [Complex64::new(coils.r1, w * coils.l1) / z21, det_z / z21],
        [z21.inv(), Complex64::new(coils.r2, w * coils.l2) / z21],
    ])
}

/// |S21| of the bare coils between the given ports.
pub fn s21_mag(coils: &CoilPair, ports: &PortPair, f: f64) -> Result<f64> {
    check_freq(f)?;
    let t = LinkAuxiliaries::new(coils, ports);
    let w = 2.0 * PI * f;
    let d = t.t2 - t.t3 * w * w;
    Ok(w * t.t1 / (d * d + w * w * t.t4 * t.t4).sqrt())
}

/// Frequency at which the bare-link |S21| peaks.
pub fn f_opt(coils: &CoilPair, ports: &PortPair) -> Result<f64> {
    let t = LinkAuxiliaries::new(coils, ports);
    if t.t3 <= 0.0 {
        return Err(Error::InvalidInput("l1*l2 - M^2 must be positive (k < 1)".into()));
    }
    Ok((t.t2 / t.t3).sqrt() / (2.0 * PI))
}

/// Peak |S21| of the bare link, reached at [`f_opt`].
pub fn s_max(coils: &CoilPair, ports: &PortPair) -> Result<f64> {
    let t = LinkAuxiliaries::new(coils, ports);
    if t.t3 <= 0.0 {
        return Err(Error::InvalidInput("l1*l2 - M^2 must be positive (k < 1)".into()));
    }
    Ok(t.t1 / t.t4)
}

/// Geometric-mean inductance `sqrt(l1 l2)` that places the |S21| peak at
/// `f_target`. Only the positive real root is returned.
pub fn l_opt(f_target: f64, r1: f64, r2: f64, ports: &PortPair, k: f64) -> Result<f64> {
    check_freq(f_target)?;
    if !(0.0..1.0).contains(&k) {
        return Err(Error::InvalidInput(format!("coupling must lie in [0, 1), got {k}")));
    }
    if r1 < 0.0 || r2 < 0.0 {
        return Err(Error::InvalidInput("resistances must be non-negative".into()));
    }
    let num = (r1 + ports.zp1) * (r2 + ports.zp2);
    let w = 2.0 * PI * f_target;
    Ok((num / (w * w * (1.0 - k * k))).sqrt())
}

/// Series capacitor resonating `l` at `f` (series-series compensation).
pub fn resonant_capacitance(l: f64, f: f64) -> Result<f64> {
    check_freq(f)?;
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidInput(format!("inductance must be positive, got {l}")));
    }
    let w = 2.0 * PI * f;
    Ok(1.0 / (w * w * l))
}

/// How the optimal inductance is divided between the two coils.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InductanceSplit {
    /// `l1 = l2 = l_opt`
    Symmetric,
    /// Caller picks `l1`; `l2 = l_opt^2 / l1`.
    Asymmetric { l1: f64 },
}

/// Returns `(l1, l2)` with `sqrt(l1 l2) = l_opt`.
pub fn split_inductance(l_opt: f64, split: InductanceSplit) -> Result<(f64, f64)> {
    if !(l_opt.is_finite() && l_opt > 0.0) {
        return Err(Error::InvalidInput(format!("l_opt must be positive, got {l_opt}")));
    }
    match split {
        InductanceSplit::Symmetric => Ok((l_opt, l_opt)),
        InductanceSplit::Asymmetric { l1 } if l1.is_finite() && l1 > 0.0 => {
            Ok((l1, l_opt * l_opt / l1))
        }
        InductanceSplit::Asymmetric { l1 } => Err(Error::InvalidInput(format!(
            "chosen l1 must be positive, got {l1}"
        ))),
    }
}

/// Coil parameters recovered from a two-port S matrix.
///
/// `physical` is false when any value falls outside its physical range
/// (negative L or R, k outside [0, 1) or not a number); the raw numbers
/// are kept either way.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractedCoils {
    pub l1: f64,
    pub l2: f64,
    pub r1: f64,
    pub r2: f64,
    pub k: f64,
    pub physical: bool,
}

impl ExtractedCoils {
    pub fn to_coil_pair(&self) -> Result<CoilPair> {
        if !self.physical {
            return Err(Error::InvalidInput(format!(
                "extracted parameters are not physical: {self:?}"
            )));
        }
        CoilPair::new(self.l1, self.l2, self.r1, self.r2, self.k)
    }
}

/// Relative tolerance on |S12 - S21| before extraction gives up on reciprocity.
pub const RECIPROCITY_TOL: f64 = 1e-6;

/// Recovers (L1, R1, L2, R2, k) from S-parameters measured at `f`.
///
/// Slightly non-reciprocal data is averaged (S12 and S21 within
/// [`RECIPROCITY_TOL`]); anything worse is rejected.
pub fn extract_params(s: &TwoPortMatrix, f: f64) -> Result<ExtractedCoils> {
    check_freq(f)?;
    if s.representation() != Representation::S {
        return Err(Error::Representation {
            expected: "S",
            found: s.representation().name(),
        });
    }
    let (s12, s21) = (s.m12(), s.m21());
    let scale = s12.norm().max(s21.norm());
    if scale < DEGENERATE_EPS {
        return Err(Error::Degenerate("S12 = 0: coils are not coupled".into()));
    }
    if (s12 - s21).norm() > RECIPROCITY_TOL * scale {
        return Err(Error::InvalidInput(format!(
            "network is not reciprocal: |S12 - S21| / |S21| = {:.3e}",
            (s12 - s21).norm() / scale
        )));
    }
    let st = 0.5 * (s12 + s21);
    let one = Complex64::new(1.0, 0.0);
    let (s11, s22) = (s.m11(), s.m22());
    let (p, q, u, v, x) = (one + s11, one - s11, one + s22, one - s22, st * st);
    let den = q * v - x;
    if den.norm() < DEGENERATE_EPS {
        return Err(Error::Degenerate("qv - x vanishes".into()));
    }
    let PortPair { zp1, zp2 } = s.ports();
    let w = 2.0 * PI * f;
    // A/C and D/C are the open-circuit self impedances of each side.
    let z1 = zp1 * (p * v + x) / den;
    let z2 = zp2 * (q * u + x) / den;
    let a = (zp1 / zp2).sqrt() * (p * v + x) / (2.0 * st);
    let d = (zp2 / zp1).sqrt() * (q * u + x) / (2.0 * st);
    let k = (a.re * d.re).powf(-0.5);
    let (l1, l2, r1, r2) = (z1.im / w, z2.im / w, z1.re, z2.re);
    let physical = l1 > 0.0 && l2 > 0.0 && r1 >= 0.0 && r2 >= 0.0 && k.is_finite() && (0.0..1.0).contains(&k);
    Ok(ExtractedCoils { l1, l2, r1, r2, k, physical })
}

fn check_freq(f: f64) -> Result<()> {
    if f.is_finite() && f > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("frequency must be positive, got {f}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::z_to_s;

    fn paper_pair() -> CoilPair {
        CoilPair::symmetric(400e-9, 0.5, 0.1).unwrap()
    }

    #[test]
    fn rejects_unit_coupling_and_bad_values() {
        assert!(CoilPair::new(1e-6, 1e-6, 0.1, 0.1, 1.0).is_err());
        assert!(CoilPair::new(-1e-6, 1e-6, 0.1, 0.1, 0.2).is_err());
        assert!(CoilPair::new(1e-6, 1e-6, -0.1, 0.1, 0.2).is_err());
        assert!(l_opt(20e6, 0.5, 0.5, &PortPair::fifty(), 1.0).is_err());
    }

    #[test]
    fn coil_z_at_twenty_megahertz() {
        let z = coil_z(&paper_pair(), 20e6).unwrap();
        let w = 2.0 * PI * 2e7;
        assert!((z.m11().re - 0.5).abs() < 1e-15);
        assert!((z.m11().im - w * 400e-9).abs() < 1e-12);
        assert!((z.m11().im - 50.265_482_457).abs() < 1e-6);
        assert_eq!(z.m12(), z.m21());
        let z2 = coil_z(&paper_pair(), 40e6).unwrap();
        assert!((z2.m11().im - 2.0 * z.m11().im).abs() < 1e-12);
        assert_eq!(z2.m11().re, z.m11().re);
    }

    #[test]
    fn uncoupled_coils_have_no_transimpedance() {
        let c = CoilPair::new(1e-6, 2e-6, 0.3, 0.2, 0.0).unwrap();
        let z = coil_z(&c, 1e6).unwrap();
        assert_eq!(z.m12(), Complex64::new(0.0, 0.0));
        assert_eq!(s_max(&c, &PortPair::fifty()).unwrap(), 0.0);
    }

    #[test]
    fn s_max_hand_value() {
        // t1 / t4 = (2 * 40e-9 * 50) / (2 * 400e-9 * 50.5)
        let expected = (2.0 * 40e-9 * 50.0) / (2.0 * 400e-9 * 50.5);
        let got = s_max(&paper_pair(), &PortPair::fifty()).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.099).abs() < 1e-3);
        let at_peak = s21_mag(&paper_pair(), &PortPair::fifty(), f_opt(&paper_pair(), &PortPair::fifty()).unwrap()).unwrap();
        assert!((at_peak - got).abs() / got < 1e-9);
    }

    #[test]
    fn closed_form_matches_matrix_route() {
        let c = paper_pair();
        let s = z_to_s(&coil_z(&c, 20e6).unwrap(), 50.0, 50.0).unwrap();
        let closed = s21_mag(&c, &PortPair::fifty(), 20e6).unwrap();
        assert!((s.m21().norm() - closed).abs() < 1e-12);
        assert!(s21_mag(&c, &PortPair::fifty(), 1e-3).unwrap() < 1e-9);
    }

    #[test]
    fn asymmetric_split_keeps_geometric_mean() {
        let (l1, l2) = split_inductance(200e-9, InductanceSplit::Asymmetric { l1: 400e-9 }).unwrap();
        assert_eq!(l1, 400e-9);
        assert!(((l1 * l2).sqrt() - 200e-9).abs() < 1e-20);
        assert!(split_inductance(200e-9, InductanceSplit::Asymmetric { l1: 0.0 }).is_err());
    }

    #[test]
    fn extraction_flags_non_physical_coupling() {
        // A resistive L-network has purely real open-circuit impedances: L = 0.
        let net = crate::netcore::cascade(
            &TwoPortMatrix::shunt(Complex64::new(0.01, 0.0)),
            &TwoPortMatrix::series(Complex64::new(10.0, 0.0)),
        )
        .unwrap();
        let s = crate::netcore::abcd_to_s(&net, 50.0, 50.0).unwrap();
        let e = extract_params(&s, 1e6).unwrap();
        assert!(!e.physical);
        assert!(e.to_coil_pair().is_err());
    }

    #[test]
    fn extraction_rejects_non_reciprocal_data() {
        let c = Complex64::new;
        let s = TwoPortMatrix::s([[c(0.1, 0.0), c(0.5, 0.0)], [c(0.4, 0.0), c(0.1, 0.0)]], PortPair::fifty()).unwrap();
        assert!(matches!(extract_params(&s, 1e6), Err(Error::InvalidInput(_))));
    }
}
