//! Power-transfer efficiency from S-parameters and SAR-limited delivered power.

use num_complex::Complex64;

use crate::error::{Error, Result, DEGENERATE_EPS};
use crate::netcore::{input_reflection, PortPair, Representation, TwoPortMatrix};

/// Efficiency with port 2 terminated in `gamma_load`.
pub fn pte_two_port(s: &TwoPortMatrix, gamma_load: Complex64) -> Result<f64> {
    if s.representation() != Representation::S {
        return Err(Error::Representation { expected: "S", found: s.representation().name() });
    }
    if gamma_load.norm() >= 1.0 {
        return Err(Error::InvalidInput(format!("|gamma_load| = {} must be < 1", gamma_load.norm())));
    }
    let one = Complex64::new(1.0, 0.0);
    let den_l = (one - s.m22() * gamma_load).norm_sqr();
    if den_l < DEGENERATE_EPS {
        return Err(Error::Degenerate("1 - S22 gamma_load vanishes".into()));
    }
    let gin = input_reflection(s, gamma_load)?;
    let den_in = 1.0 - gin.norm_sqr();
    if den_in.abs() < DEGENERATE_EPS {
        return Err(Error::Degenerate("input is totally reflective".into()));
    }
    Ok(s.m21().norm_sqr() * (1.0 - gamma_load.norm_sqr()) / (den_in * den_l))
}

/// Maximum efficiency under simultaneous conjugate matching.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PteMax {
    pub k_r: f64,
    /// `None` when `k_r < 1` or the data is not passive: no meaningful
    /// bounded maximum exists.
    pub pte_max: Option<f64>,
}

impl PteMax {
    pub fn flagged(&self) -> bool {
        self.pte_max.is_none()
    }
}

pub fn pte_max(s: &TwoPortMatrix) -> Result<PteMax> {
    if s.representation() != Representation::S {
        return Err(Error::Representation { expected: "S", found: s.representation().name() });
    }
    let p = s.m21() * s.m21();
    let g = p.norm();
    if g < DEGENERATE_EPS {
        return Err(Error::Degenerate("|S21| = 0: nothing is transferred".into()));
    }
    let (s11, s22) = (s.m11(), s.m22());
    let (r11, r22) = (s11.norm_sqr(), s22.norm_sqr());
    // K_r = (1 + a + b + c) / (2|S21^2|) with a = |S11 S22 - S21^2|^2,
    // b = -|S11|^2, c = -|S22|^2. Expanding a and regrouping gives the
    // numerator of K_r - 1 without the 1 - 2|S21|^2 + |S21|^4 cancellation.
    let m = (1.0 - g) * (1.0 - g) - r11 - r22 + r11 * r22 - 2.0 * (s11 * s22 * p.conj()).re;
    let excess = m / (2.0 * g);
    let k_r = 1.0 + excess;
    let pte_max = (excess >= 0.0 && is_passive(s, PASSIVITY_TOL)).then(|| {
        // k - sqrt(k^2 - 1) written as 1 / (k + sqrt((k - 1)(k + 1))).
        1.0 / (k_r + (excess * (2.0 + excess)).sqrt())
    });
    Ok(PteMax { k_r, pte_max })
}

/// Slack allowed on the passivity test for measured data.
pub const PASSIVITY_TOL: f64 = 1e-9;

/// True when `I - S^H S` is positive semidefinite within `tol`, i.e. the
/// network cannot deliver more power than it receives.
pub fn is_passive(s: &TwoPortMatrix, tol: f64) -> bool {
    let [[s11, s12], [s21, s22]] = s.matrix();
    let p11 = 1.0 - s11.norm_sqr() - s21.norm_sqr();
    let p22 = 1.0 - s12.norm_sqr() - s22.norm_sqr();
    let p12 = -(s11.conj() * s12 + s21.conj() * s22);
    p11 >= -tol && p22 >= -tol && p11 * p22 - p12.norm_sqr() >= -tol
}

/// Nominal port impedance the port-mismatch correction is keyed on.
pub const NOMINAL_PORT: f64 = 50.0;

/// Port-mismatch correction for unequal/non-50-ohm ports. Either port at
/// exactly 50 ohm, and any combination outside the four strict-inequality
/// cases, gives 1.
pub fn gamma(ports: &PortPair) -> f64 {
    let (z1, z2) = (ports.zp1, ports.zp2);
    let n = NOMINAL_PORT;
    if z2 > n && z1 < n {
        z2 / z1
    } else if z2 > n && z1 > n {
        (z2 / n) * (z1 / n)
    } else if z2 < n && z1 > n {
        z1 / z2
    } else if z2 < n && z1 < n {
        (n / z2) * (n / z1)
    } else {
        1.0
    }
}

/// `gamma(ports) * |S21|^2` of the matched link.
pub fn pte_link(s21_link: Complex64, ports: &PortPair) -> f64 {
    gamma(ports) * s21_link.norm_sqr()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PteReport {
    pub pte: f64,
    pub pte_max: Option<f64>,
    pub k_r: f64,
    pub gamma: f64,
    pub f0: f64,
}

impl PteReport {
    /// Report for a link at `f0`, assuming both ports are terminated in
    /// their reference impedances.
    pub fn evaluate(s: &TwoPortMatrix, f0: f64) -> Result<Self> {
        let m = pte_max(s)?;
        let ports = s.ports();
        Ok(Self {
            pte: pte_link(s.m21(), &ports),
            pte_max: m.pte_max,
            k_r: m.k_r,
            gamma: gamma(&ports),
            f0,
        })
    }
}

/// IEEE C95.1 peak spatial-average SAR over 1 g of tissue, W/kg.
pub const IEEE_SAR_LIMIT_1G: f64 = 1.6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SarBudget {
    pub sar_limit: f64,
    pub p_tx_max: f64,
    pub pdl_max: f64,
}

/// Deliverable power when the transmitter is capped at `p_tx_max` by SAR.
pub fn sar_constrained_pdl(p_tx_max: f64, pte: f64) -> Result<SarBudget> {
    sar_budget(IEEE_SAR_LIMIT_1G, p_tx_max, pte)
}

pub fn sar_budget(sar_limit: f64, p_tx_max: f64, pte: f64) -> Result<SarBudget> {
    if !(0.0..=1.0).contains(&pte) {
        return Err(Error::InvalidInput(format!("efficiency must lie in [0, 1], got {pte}")));
    }
    if !(p_tx_max >= 0.0 && p_tx_max.is_finite()) {
        return Err(Error::InvalidInput(format!("transmit power must be >= 0, got {p_tx_max}")));
    }
    Ok(SarBudget { sar_limit, p_tx_max, pdl_max: p_tx_max * pte })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matched_load_and_source_collapse_to_s21_squared() {
        let s = TwoPortMatrix::s([[c(0.0, 0.0), c(0.3, 0.4)], [c(0.3, 0.4), c(0.0, 0.0)]], PortPair::fifty()).unwrap();
        assert!((pte_two_port(&s, c(0.0, 0.0)).unwrap() - 0.25).abs() < 1e-15);
        let m = pte_max(&s).unwrap();
        assert!((m.pte_max.unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn lossless_through_is_perfect() {
        let s = TwoPortMatrix::s([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]], PortPair::fifty()).unwrap();
        let m = pte_max(&s).unwrap();
        assert!((m.k_r - 1.0).abs() < 1e-15);
        assert!((m.pte_max.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn active_data_is_flagged() {
        let s = TwoPortMatrix::s([[c(0.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(0.0, 0.0)]], PortPair::fifty()).unwrap();
        let m = pte_max(&s).unwrap();
        assert!(m.flagged());
        assert!(!is_passive(&s, PASSIVITY_TOL));
        let s = TwoPortMatrix::s([[c(0.9, 0.0), c(0.3, 0.0)], [c(0.3, 0.0), c(0.9, 0.0)]], PortPair::fifty()).unwrap();
        let m = pte_max(&s).unwrap();
        assert!(m.k_r < 1.0 && m.flagged());
    }

    #[test]
    fn gamma_branches() {
        let g = |a, b| gamma(&PortPair::new(a, b).unwrap());
        assert_eq!(g(25.0, 100.0), 4.0);
        assert_eq!(g(100.0, 100.0), 4.0);
        assert_eq!(g(100.0, 25.0), 4.0);
        assert_eq!(g(25.0, 25.0), 4.0);
        assert_eq!(g(50.0, 50.0), 1.0);
        assert_eq!(g(50.0, 100.0), 1.0);
        assert_eq!(pte_link(c(0.5, 0.0), &PortPair::fifty()), 0.25);
    }

    #[test]
    fn sar_budget_arithmetic() {
        assert_eq!(sar_constrained_pdl(0.05, 0.0).unwrap().pdl_max, 0.0);
        assert!(sar_constrained_pdl(0.05, 1.5).is_err());
        assert!(sar_constrained_pdl(-1.0, 0.5).is_err());
        let b = sar_constrained_pdl(84.6e-3, 0.04).unwrap();
        assert_eq!(b.sar_limit, 1.6);
        assert_eq!(format!("{:.2}", b.pdl_max * 1e3), "3.38");
    }
}
