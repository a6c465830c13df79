//! L-section impedance matching on both ports of a coil pair.
//!
//! The two targets come from the simultaneous conjugate match of the
//! terminated two-port; each side is then realized by an L-section in one of
//! two orientations, giving four topology cases:
//!
//! | case | TX side (port 1 -> coil) | RX side (coil -> port 2) |
//! |------|--------------------------|--------------------------|
//! | 1    | series, then shunt       | shunt, then series       |
//! | 2    | series, then shunt       | series, then shunt       |
//! | 3    | shunt, then series       | shunt, then series       |
//! | 4    | shunt, then series       | series, then shunt       |
//!
//! In cases 1 and 2 the TX series element touches the port; in cases 1 and 3
//! the RX series element touches the port.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::netcore::{cascade, db, PortPair, TwoPortMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementType {
    SeriesInductor,
    SeriesCapacitor,
    ShuntInductor,
    ShuntCapacitor,
}

impl ElementType {
    pub fn is_series(self) -> bool {
        matches!(self, Self::SeriesInductor | Self::SeriesCapacitor)
    }

    pub fn is_capacitor(self) -> bool {
        matches!(self, Self::SeriesCapacitor | Self::ShuntCapacitor)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SeriesInductor => "series-L",
            Self::SeriesCapacitor => "series-C",
            Self::ShuntInductor => "shunt-L",
            Self::ShuntCapacitor => "shunt-C",
        }
    }

    pub fn unit(self) -> &'static str {
        if self.is_capacitor() {
            "F"
        } else {
            "H"
        }
    }
}

/// A lumped ideal element: henry for inductors, farad for capacitors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementKind {
    pub kind: ElementType,
    pub value: f64,
}

impl ElementKind {
    pub fn new(kind: ElementType, value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidInput(format!("{} value must be positive, got {value}", kind.name())));
        }
        Ok(Self { kind, value })
    }

    /// Series reactance (ohm) or shunt susceptance (siemens) at `f`.
    pub fn immittance(&self, f: f64) -> f64 {
        let w = 2.0 * PI * f;
        match self.kind {
            ElementType::SeriesInductor => w * self.value,
            ElementType::SeriesCapacitor => -1.0 / (w * self.value),
            ElementType::ShuntCapacitor => w * self.value,
            ElementType::ShuntInductor => -1.0 / (w * self.value),
        }
    }

    pub fn abcd(&self, f: f64) -> TwoPortMatrix {
        let x = Complex64::new(0.0, self.immittance(f));
        if self.kind.is_series() {
            TwoPortMatrix::series(x)
        } else {
            TwoPortMatrix::shunt(x)
        }
    }

    /// Element realizing series reactance `x` (or shunt susceptance `b`).
    fn from_immittance(series: bool, x: f64, f: f64) -> Option<Self> {
        let w = 2.0 * PI * f;
        if !(x.is_finite() && x != 0.0) {
            return None;
        }
        let (kind, value) = match (series, x > 0.0) {
            (true, true) => (ElementType::SeriesInductor, x / w),
            (true, false) => (ElementType::SeriesCapacitor, -1.0 / (w * x)),
            (false, true) => (ElementType::ShuntCapacitor, x / w),
            (false, false) => (ElementType::ShuntInductor, -1.0 / (w * x)),
        };
        Self::new(kind, value).ok()
    }
}

/// Chain of elements, first entry at the port-1 side.
pub fn chain(elements: &[ElementKind], f: f64) -> Result<TwoPortMatrix> {
    elements
        .iter()
        .try_fold(TwoPortMatrix::identity(), |acc, e| cascade(&acc, &e.abcd(f)))
}

/// Which element of an L-section sits next to the external port.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Orientation {
    SeriesAtPort,
    ShuntAtPort,
}

impl Orientation {
    pub fn from_case(case: u8) -> Result<(Self, Self)> {
        use Orientation::*;
        match case {
            1 => Ok((SeriesAtPort, SeriesAtPort)),
            2 => Ok((SeriesAtPort, ShuntAtPort)),
            3 => Ok((ShuntAtPort, SeriesAtPort)),
            4 => Ok((ShuntAtPort, ShuntAtPort)),
            _ => Err(Error::InvalidInput(format!("topology case must be 1..4, got {case}"))),
        }
    }

    pub fn case(tx: Self, rx: Self) -> u8 {
        use Orientation::*;
        match (tx, rx) {
            (SeriesAtPort, SeriesAtPort) => 1,
            (SeriesAtPort, ShuntAtPort) => 2,
            (ShuntAtPort, SeriesAtPort) => 3,
            (ShuntAtPort, ShuntAtPort) => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LSectionIMN {
    pub topology_case: u8,
    pub tx_series: ElementKind,
    pub tx_shunt: ElementKind,
    pub rx_series: ElementKind,
    pub rx_shunt: ElementKind,
}

impl LSectionIMN {
    pub fn new(
        topology_case: u8,
        tx_series: ElementKind,
        tx_shunt: ElementKind,
        rx_series: ElementKind,
        rx_shunt: ElementKind,
    ) -> Result<Self> {
        Orientation::from_case(topology_case)?;
        for (e, series) in [(tx_series, true), (tx_shunt, false), (rx_series, true), (rx_shunt, false)] {
            ElementKind::new(e.kind, e.value)?;
            if e.kind.is_series() != series {
                return Err(Error::InvalidInput(format!("{} placed in a {} slot", e.kind.name(), if series { "series" } else { "shunt" })));
            }
        }
        Ok(Self { topology_case, tx_series, tx_shunt, rx_series, rx_shunt })
    }

    pub fn elements(&self) -> [ElementKind; 4] {
        [self.tx_series, self.tx_shunt, self.rx_series, self.rx_shunt]
    }

    pub fn capacitor_count(&self) -> usize {
        self.elements().iter().filter(|e| e.kind.is_capacitor()).count()
    }

    /// Sum of element |reactance| at `f` (shunt elements via 1/|B|).
    pub fn reactive_sum(&self, f: f64) -> f64 {
        self.elements()
            .iter()
            .map(|e| {
                let x = e.immittance(f).abs();
                if e.kind.is_series() {
                    x
                } else {
                    1.0 / x
                }
            })
            .sum()
    }

    fn tx_abcd(&self, f: f64) -> Result<TwoPortMatrix> {
        let (tx, _) = Orientation::from_case(self.topology_case)?;
        match tx {
            Orientation::SeriesAtPort => chain(&[self.tx_series, self.tx_shunt], f),
            Orientation::ShuntAtPort => chain(&[self.tx_shunt, self.tx_series], f),
        }
    }

    fn rx_abcd(&self, f: f64) -> Result<TwoPortMatrix> {
        let (_, rx) = Orientation::from_case(self.topology_case)?;
        match rx {
            Orientation::SeriesAtPort => chain(&[self.rx_shunt, self.rx_series], f),
            Orientation::ShuntAtPort => chain(&[self.rx_series, self.rx_shunt], f),
        }
    }
}

/// The matched link, port 1 (TX) to port 2 (RX), in ABCD form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkNetwork {
    pub t_link: TwoPortMatrix,
    pub f0: f64,
    pub ports: PortPair,
}

impl LinkNetwork {
    pub fn s(&self) -> Result<TwoPortMatrix> {
        self.t_link.to_s(self.ports)
    }
}

pub fn assemble_link(imn: &LSectionIMN, t_coil: &TwoPortMatrix, f: f64, ports: PortPair) -> Result<LinkNetwork> {
    let t_coil = t_coil.to_abcd()?;
    let t = cascade(&cascade(&imn.tx_abcd(f)?, &t_coil)?, &imn.rx_abcd(f)?)?;
    Ok(LinkNetwork { t_link: t, f0: f, ports })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchReport {
    pub s11_db: f64,
    pub s22_db: f64,
    pub s21_db: f64,
}

pub fn verify_match(link: &LinkNetwork) -> Result<MatchReport> {
    let s = link.s()?;
    Ok(MatchReport { s11_db: db(s.m11()), s22_db: db(s.m22()), s21_db: db(s.m21()) })
}

/// Return-loss floor every synthesized network must reach at f0, dB.
pub const MATCH_FLOOR_DB: f64 = -40.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ImnSolution {
    pub imn: LSectionIMN,
    pub report: MatchReport,
    pub s21_mag: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImnSynthesis {
    /// Both ports already present their reference impedance: no network needed.
    pub already_matched: bool,
    /// Impedance each L-section must present towards the coil.
    pub source_target: Complex64,
    pub load_target: Complex64,
    pub solutions: Vec<ImnSolution>,
}

/// Relative distance below which a target counts as already matched.
const MATCHED_TOL: f64 = 1e-9;

/// Source and load impedances that simultaneously conjugate-match `t_coil`
/// at the given ports.
pub fn conjugate_targets(t_coil: &TwoPortMatrix, ports: PortPair) -> Result<(Complex64, Complex64)> {
    let s = t_coil.to_s(ports)?;
    let (s11, s12, s21, s22) = (s.m11(), s.m12(), s.m21(), s.m22());
    let delta = s11 * s22 - s12 * s21;
    let b1 = 1.0 + s11.norm_sqr() - s22.norm_sqr() - delta.norm_sqr();
    let b2 = 1.0 + s22.norm_sqr() - s11.norm_sqr() - delta.norm_sqr();
    let c1 = s11 - delta * s22.conj();
    let c2 = s22 - delta * s11.conj();
    let root = |b: f64, c: Complex64| -> Result<Complex64> {
        // c = 0 leaves Gamma = 0 as the only root, even when b vanishes too
        // (a lossless two-port that is already matched).
        if c.norm() <= 1e-15 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let disc = b * b - 4.0 * c.norm_sqr();
        if disc < 0.0 || b == 0.0 {
            return Err(Error::Infeasible {
                stage: "imn".into(),
                detail: "no simultaneous conjugate match exists (network is not unconditionally stable)".into(),
            });
        }
        // Root inside the unit circle, written to stay finite as c -> 0.
        Ok(2.0 * c.conj() / (b + b.signum() * disc.sqrt()))
    };
    let gs = root(b1, c1)?;
    let gl = root(b2, c2)?;
    let one = Complex64::new(1.0, 0.0);
    let zs = ports.zp1 * (one + gs) / (one - gs);
    let zl = ports.zp2 * (one + gl) / (one - gl);
    for (z, side) in [(zs, "source"), (zl, "load")] {
        if !(z.re > 0.0 && z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Infeasible { stage: "imn".into(), detail: format!("{side} target {z} has no positive real part") });
        }
    }
    Ok((zs, zl))
}

/// Signed (series reactance, shunt susceptance) pairs that make an L-section,
/// terminated in `zp` at its port, present `target` at its coil side.
fn side_solutions(target: Complex64, zp: f64, orientation: Orientation) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    match orientation {
        Orientation::SeriesAtPort => {
            // coil side: shunt B || (zp + jX)
            let y = 1.0 / target;
            let rad = zp / y.re - zp * zp;
            if rad >= 0.0 {
                for x in [rad.sqrt(), -rad.sqrt()] {
                    out.push((x, y.im + x / (zp * zp + x * x)));
                }
            }
        }
        Orientation::ShuntAtPort => {
            // coil side: jX + 1 / (1/zp + jB)
            let g = 1.0 / zp;
            let rad = g / target.re - g * g;
            if rad >= 0.0 {
                for b in [rad.sqrt(), -rad.sqrt()] {
                    out.push((target.im + b / (g * g + b * b), b));
                }
            }
        }
    }
    out
}

fn side_elements(target: Complex64, zp: f64, orientation: Orientation, f: f64) -> Vec<(ElementKind, ElementKind)> {
    side_solutions(target, zp, orientation)
        .into_iter()
        .filter_map(|(x, b)| {
            Some((ElementKind::from_immittance(true, x, f)?, ElementKind::from_immittance(false, b, f)?))
        })
        .collect()
}

/// All 4 x 2^4 kind/topology combinations, in a fixed order.
pub fn combinations() -> Vec<(u8, [ElementType; 4])> {
    use ElementType::*;
    let mut out = Vec::with_capacity(64);
    for case in 1..=4u8 {
        for bits in 0..16u8 {
            let pick = |bit: u8, l, c| if bits & (1 << bit) == 0 { c } else { l };
            out.push((
                case,
                [
                    pick(0, SeriesInductor, SeriesCapacitor),
                    pick(1, ShuntInductor, ShuntCapacitor),
                    pick(2, SeriesInductor, SeriesCapacitor),
                    pick(3, ShuntInductor, ShuntCapacitor),
                ],
            ));
        }
    }
    out
}

/// Orders `a` and `b`, treating values within 1e-9 relative as equal so
/// that rounding noise does not decide the ranking.
fn cmp_tolerant(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= 1e-9 * a.abs().max(b.abs()) {
        Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

/// Solves every L-section combination that matches both ports of `t_coil` at
/// `f0`, re-verifies each one and ranks the survivors: most capacitors first,
/// then highest |S21|, then smallest total reactance.
pub fn synthesize_imn(t_coil: &TwoPortMatrix, ports: PortPair, f0: f64) -> Result<ImnSynthesis> {
    if !(f0 > 0.0 && f0.is_finite()) {
        return Err(Error::InvalidInput(format!("frequency must be positive, got {f0}")));
    }
    let t_coil = t_coil.to_abcd()?;
    let (zs, zl) = conjugate_targets(&t_coil, ports)?;
    let near = |z: Complex64, zp: f64| (z - zp).norm() <= MATCHED_TOL * zp;
    if near(zs, ports.zp1) && near(zl, ports.zp2) {
        return Ok(ImnSynthesis { already_matched: true, source_target: zs, load_target: zl, solutions: Vec::new() });
    }

    let mut solutions: Vec<ImnSolution> = combinations()
        .into_par_iter()
        .filter_map(|(case, kinds)| {
            let (tx_o, rx_o) = Orientation::from_case(case).ok()?;
            let tx = side_elements(zs, ports.zp1, tx_o, f0)
                .into_iter()
                .find(|(s, p)| s.kind == kinds[0] && p.kind == kinds[1])?;
            let rx = side_elements(zl, ports.zp2, rx_o, f0)
                .into_iter()
                .find(|(s, p)| s.kind == kinds[2] && p.kind == kinds[3])?;
            let imn = LSectionIMN::new(case, tx.0, tx.1, rx.0, rx.1).ok()?;
            let link = assemble_link(&imn, &t_coil, f0, ports).ok()?;
            let report = verify_match(&link).ok()?;
            if report.s11_db > MATCH_FLOOR_DB || report.s22_db > MATCH_FLOOR_DB {
                return None;
            }
            let s21_mag = link.s().ok()?.m21().norm();
            Some(ImnSolution { imn, report, s21_mag })
        })
        .collect();

    solutions.sort_by(|a, b| {
        b.imn
            .capacitor_count()
            .cmp(&a.imn.capacitor_count())
            .then(cmp_tolerant(b.s21_mag, a.s21_mag))
            .then(a.imn.reactive_sum(f0).partial_cmp(&b.imn.reactive_sum(f0)).unwrap_or(Ordering::Equal))
            .then(a.imn.topology_case.cmp(&b.imn.topology_case))
            .then_with(|| {
                let k = |s: &ImnSolution| s.imn.elements().map(|e| e.kind);
                k(a).cmp(&k(b))
            })
    });
    Ok(ImnSynthesis { already_matched: false, source_target: zs, load_target: zl, solutions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coil::{coil_abcd, CoilPair};

    fn paper_pair() -> TwoPortMatrix {
        coil_abcd(&CoilPair::symmetric(400e-9, 0.5, 0.1).unwrap(), 20e6).unwrap()
    }

    #[test]
    fn combination_table_is_complete() {
        let c = combinations();
        assert_eq!(c.len(), 64);
        let mut d = c.clone();
        d.sort();
        d.dedup();
        assert_eq!(d.len(), 64);
    }

    #[test]
    fn element_validation() {
        assert!(ElementKind::new(ElementType::SeriesCapacitor, 0.0).is_err());
        assert!(ElementKind::new(ElementType::ShuntInductor, f64::NAN).is_err());
        let c = ElementKind::new(ElementType::SeriesCapacitor, 1e-9).unwrap();
        let l = ElementKind::new(ElementType::ShuntInductor, 1e-6).unwrap();
        assert!(LSectionIMN::new(1, l, c, c, l).is_err());
        assert!(LSectionIMN::new(5, c, l, c, l).is_err());
    }

    #[test]
    fn capacitive_solution_for_reference_pair() {
        let syn = synthesize_imn(&paper_pair(), PortPair::fifty(), 20e6).unwrap();
        assert!(!syn.already_matched);
        assert!(!syn.solutions.is_empty());
        assert_eq!(syn.solutions[0].imn.capacitor_count(), 4);
        let series_at_port = syn
            .solutions
            .iter()
            .find(|s| s.imn.topology_case == 1 && s.imn.capacitor_count() == 4)
            .unwrap();
        for e in [series_at_port.imn.tx_series, series_at_port.imn.rx_series] {
            assert!((e.value - 52.7e-12).abs() / 52.7e-12 < 0.02);
        }
        for e in [series_at_port.imn.tx_shunt, series_at_port.imn.rx_shunt] {
            assert!((e.value - 109.1e-12).abs() / 109.1e-12 < 0.02);
        }
        for s in &syn.solutions {
            assert!(s.imn.elements().iter().all(|e| e.value > 0.0));
            assert!(s.report.s11_db <= MATCH_FLOOR_DB && s.report.s22_db <= MATCH_FLOOR_DB);
        }
    }

    #[test]
    fn matched_pair_needs_no_network() {
        let s = TwoPortMatrix::s(
            [[Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)], [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)]],
            PortPair::fifty(),
        )
        .unwrap();
        let syn = synthesize_imn(&s, PortPair::fifty(), 1e6).unwrap();
        assert!(syn.already_matched);
        assert!(syn.solutions.is_empty());
    }

    #[test]
    fn lossless_reactive_network_is_unmatchable() {
        let t = TwoPortMatrix::series(Complex64::new(0.0, 30.0));
        let t = cascade(&t, &TwoPortMatrix::shunt(Complex64::new(0.0, 0.01))).unwrap();
        // lossless two-port: the matched targets degenerate
        let r = synthesize_imn(&t, PortPair::fifty(), 1e6);
        match r {
            Err(Error::Infeasible { .. }) => {}
            Ok(s) => assert!(s.already_matched || s.solutions.iter().all(|x| x.report.s11_db <= MATCH_FLOOR_DB)),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn transparent_elements_leave_coil_unchanged() {
        let t = paper_pair();
        let tiny_series = ElementKind::new(ElementType::SeriesInductor, 1e-30).unwrap();
        let tiny_shunt = ElementKind::new(ElementType::ShuntCapacitor, 1e-30).unwrap();
        let imn = LSectionIMN::new(2, tiny_series, tiny_shunt, tiny_series, tiny_shunt).unwrap();
        let link = assemble_link(&imn, &t, 20e6, PortPair::fifty()).unwrap();
        assert!(link.t_link.max_rel_diff(&t) < 1e-12);
        assert!((link.t_link.det() - 1.0).norm() < 1e-12);
    }
}
