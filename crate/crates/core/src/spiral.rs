//! Planar spiral coils: geometry, current-sheet inductance, AC resistance,
//! coupling estimate, and a grid synthesizer that maps a target inductance
//! onto layouts that fit an area cap.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Vacuum permeability, H/m.
pub const MU0: f64 = 4.0e-7 * PI;
/// Annealed copper, ohm metre.
pub const COPPER_RESISTIVITY: f64 = 1.68e-8;

/// Current-sheet coefficients for one polygon order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Polygon order; `None` is a circle.
    pub seg: Option<u32>,
}

const SQUARE: ShapeCoefficients = ShapeCoefficients { c1: 1.27, c2: 2.07, c3: 0.18, c4: 0.13, seg: Some(4) };
const HEXAGONAL: ShapeCoefficients = ShapeCoefficients { c1: 1.09, c2: 2.23, c3: 0.00, c4: 0.17, seg: Some(6) };
const OCTAGONAL: ShapeCoefficients = ShapeCoefficients { c1: 1.07, c2: 2.29, c3: 0.00, c4: 0.19, seg: Some(8) };
const CIRCULAR: ShapeCoefficients = ShapeCoefficients { c1: 1.00, c2: 2.46, c3: 0.00, c4: 0.20, seg: None };

impl ShapeCoefficients {
    pub fn square() -> Self {
        SQUARE
    }
    pub fn hexagonal() -> Self {
        HEXAGONAL
    }
    pub fn octagonal() -> Self {
        OCTAGONAL
    }
    pub fn circular() -> Self {
        CIRCULAR
    }

    /// Coefficients for an arbitrary polygon order. Tabulated orders are
    /// exact; others are interpolated linearly in `cos(pi/seg)` between the
    /// neighbouring table rows (extrapolated from square/hexagon below 4).
    pub fn polygon(seg: u32) -> Result<Self> {
        if seg < 3 {
            return Err(Error::InvalidInput(format!("polygon order must be >= 3, got {seg}")));
        }
        let table = [SQUARE, HEXAGONAL, OCTAGONAL, CIRCULAR];
        if let Some(t) = table.iter().find(|t| t.seg == Some(seg)) {
            return Ok(*t);
        }
        let x = (PI / seg as f64).cos();
        let (lo, hi) = match seg {
            3 | 5 => (SQUARE, HEXAGONAL),
            7 => (HEXAGONAL, OCTAGONAL),
            _ => (OCTAGONAL, CIRCULAR),
        };
        let (xl, xh) = (lo.cos_factor(), hi.cos_factor());
        let t = (x - xl) / (xh - xl);
        let lerp = |a: f64, b: f64| a + t * (b - a);
        Ok(Self {
            c1: lerp(lo.c1, hi.c1),
            c2: lerp(lo.c2, hi.c2),
            c3: lerp(lo.c3, hi.c3),
            c4: lerp(lo.c4, hi.c4),
            seg: Some(seg),
        })
    }

    /// Accepts `square`, `hexagonal`, `octagonal`, `circular` or a polygon
    /// order such as `5`.
    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "square" => Ok(SQUARE),
            "hexagonal" | "hexagon" => Ok(HEXAGONAL),
            "octagonal" | "octagon" => Ok(OCTAGONAL),
            "circular" | "circle" => Ok(CIRCULAR),
            other => other
                .parse::<u32>()
                .map_err(|_| Error::InvalidInput(format!("unknown coil shape `{name}`")))
                .and_then(Self::polygon),
        }
    }

    pub fn name(&self) -> String {
        match self.seg {
            None => "circular".into(),
            Some(4) => "square".into(),
            Some(6) => "hexagonal".into(),
            Some(8) => "octagonal".into(),
            Some(n) => format!("{n}-gon"),
        }
    }

    /// `cos(pi/seg)`, 1 for a circle.
    pub fn cos_factor(&self) -> f64 {
        self.seg.map_or(1.0, |s| (PI / s as f64).cos())
    }
}

/// One planar spiral. Derived quantities are computed once at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpiralGeometry {
    pub shape: ShapeCoefficients,
    pub n: u32,
    /// Initial (innermost) radius, m.
    pub r: f64,
    /// Radius increment per turn, m.
    pub dr: f64,
    /// Trace width, m.
    pub w: f64,
    /// Trace thickness, m.
    pub t: f64,
    pub d_avg: f64,
    pub phi: f64,
    pub area: f64,
}

pub fn avg_diameter(shape: &ShapeCoefficients, n: u32, r: f64, dr: f64) -> f64 {
    (2.0 * r + n as f64 * dr) * shape.cos_factor()
}

pub fn coil_area(shape: &ShapeCoefficients, n: u32, r: f64, dr: f64, w: f64) -> f64 {
    let edge = w + 2.0 * (r + n as f64 * dr) * shape.cos_factor();
    edge * edge
}

/// `sqrt(area) / d_avg - 1`
pub fn fill_ratio(area: f64, d_avg: f64) -> f64 {
    area.sqrt() / d_avg - 1.0
}

impl SpiralGeometry {
    pub fn new(shape: ShapeCoefficients, n: u32, r: f64, dr: f64, w: f64, t: f64) -> Result<Self> {
        let finite = [r, dr, w, t].iter().all(|v| v.is_finite());
        if !finite || n < 1 || r <= 0.0 || w <= 0.0 || t <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "spiral needs n >= 1 and positive r, w, t (n={n}, r={r}, w={w}, t={t})"
            )));
        }
        if dr < w {
            return Err(Error::InvalidInput(format!(
                "turns overlap: radius increment {dr} is smaller than trace width {w}"
            )));
        }
        let d_avg = avg_diameter(&shape, n, r, dr);
        let area = coil_area(&shape, n, r, dr, w);
        let phi = fill_ratio(area, d_avg);
        if !(phi > 0.0) {
            return Err(Error::InvalidInput(format!("fill ratio must be positive, got {phi}")));
        }
        Ok(Self { shape, n, r, dr, w, t, d_avg, phi, area })
    }

    /// Outer edge length of the bounding square, `sqrt(area)`.
    pub fn outer_dimension(&self) -> f64 {
        self.area.sqrt()
    }

    /// Radii of equal-area circular filaments, one per turn.
    pub fn filament_radii(&self) -> Vec<f64> {
        let c = self.shape.cos_factor();
        let equal_area = match self.shape.seg {
            None => 1.0,
            Some(s) => (s as f64 * (PI / s as f64).tan() / PI).sqrt(),
        };
        (0..self.n)
            .map(|i| (self.r + (i as f64 + 0.5) * self.dr) * c * equal_area)
            .collect()
    }

    /// Centre-line trace length over all turns, m.
    pub fn trace_length(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let rad = self.r + (i as f64 + 0.5) * self.dr;
                match self.shape.seg {
                    None => 2.0 * PI * rad,
                    Some(s) => 2.0 * s as f64 * rad * (PI / s as f64).sin(),
                }
            })
            .sum()
    }
}

/// Current-sheet inductance of a planar spiral (non-magnetic surroundings).
pub fn inductance(g: &SpiralGeometry) -> Result<f64> {
    inductance_raw(&g.shape, g.n, g.d_avg, g.phi)
}

fn inductance_raw(shape: &ShapeCoefficients, n: u32, d_avg: f64, phi: f64) -> Result<f64> {
    if !(phi > 0.0) {
        return Err(Error::InvalidInput(format!("fill ratio must be positive, got {phi}")));
    }
    let n2 = (n as f64).powi(2);
    let bracket = (shape.c2 / phi).ln() + shape.c3 * phi + shape.c4 * phi * phi;
    Ok(shape.c1 * MU0 * n2 * d_avg / 2.0 * bracket)
}

/// Skin depth `sqrt(rho / (pi f mu0))`, m.
pub fn skin_depth(f: f64, resistivity: f64) -> f64 {
    (resistivity / (PI * f * MU0)).sqrt()
}

/// Trace resistance with a single-sided exponential skin-effect profile.
/// Reduces to the DC value at `f = 0`.
pub fn ac_resistance(g: &SpiralGeometry, f: f64, resistivity: f64) -> Result<f64> {
    if !(f >= 0.0 && f.is_finite()) || !(resistivity > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need f >= 0 and positive resistivity (f={f}, rho={resistivity})"
        )));
    }
    let t_eff = if f == 0.0 {
        g.t
    } else {
        let delta = skin_depth(f, resistivity);
        delta * (1.0 - (-g.t / delta).exp())
    };
    Ok(resistivity * g.trace_length() / (g.w * t_eff))
}

/// Mutual inductance of two coaxial circular filaments of radii `a`, `b`
/// separated axially by `d`, from the Neumann line integral.
pub fn filament_mutual(a: f64, b: f64, d: f64) -> f64 {
    // M = mu0 a b / 2 * int_0^{2pi} cos(t) / sqrt(a^2 + b^2 + d^2 - 2ab cos t) dt
    // The integrand is smooth and periodic, so the trapezoid rule converges
    // geometrically; double the panel count until it settles.
    let s = a * a + b * b + d * d;
    let integrate = |n: usize| -> f64 {
        let h = 2.0 * PI / n as f64;
        (0..n)
            .map(|i| {
                let t = i as f64 * h;
                t.cos() / (s - 2.0 * a * b * t.cos()).sqrt()
            })
            .sum::<f64>()
            * h
    };
    let mut n = 256;
    let mut prev = integrate(n);
    while n < 1 << 20 {
        n *= 2;
        let next = integrate(n);
        if (next - prev).abs() <= 1e-12 * next.abs().max(f64::MIN_POSITIVE) {
            prev = next;
            break;
        }
        prev = next;
    }
    MU0 * a * b / 2.0 * prev
}

/// Coupling of two coaxially aligned spirals `distance` apart, each turn
/// modelled as an equal-area circular filament. Clamped to `[0, 1)`.
pub fn estimate_k(tx: &SpiralGeometry, rx: &SpiralGeometry, distance: f64) -> Result<f64> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::InvalidInput(format!("distance must be positive, got {distance}")));
    }
    let (ra, rb) = (tx.filament_radii(), rx.filament_radii());
    let m: f64 = ra
        .par_iter()
        .map(|&a| rb.iter().map(|&b| filament_mutual(a, b, distance)).sum::<f64>())
        .sum();
    let k = m / (inductance(tx)? * inductance(rx)?).sqrt();
    Ok(k.clamp(0.0, 1.0 - 1e-12))
}

/// Fabrication limits and the synthesis grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FabConstraints {
    pub min_trace_width: f64,
    pub max_trace_width: f64,
    pub min_spacing: f64,
    /// Largest turn-to-turn spacing as a multiple of the trace width.
    pub max_spacing_ratio: f64,
    pub max_area: f64,
    pub substrate_thickness: f64,
    pub trace_thickness: f64,
    /// Step for width and radius increment, m.
    pub grid_step: f64,
    /// Step for the initial radius, m.
    pub radius_step: f64,
    pub max_turns: u32,
    /// Fill-ratio band in which the current-sheet expression is trusted.
    pub fill_ratio_range: (f64, f64),
}

impl Default for FabConstraints {
    fn default() -> Self {
        Self {
            min_trace_width: 100e-6,
            max_trace_width: 1e-3,
            min_spacing: 100e-6,
            max_spacing_ratio: 3.0,
            max_area: 18e-3 * 18e-3,
            substrate_thickness: 25e-6,
            trace_thickness: 35e-6,
            grid_step: 50e-6,
            radius_step: 100e-6,
            max_turns: 40,
            fill_ratio_range: (0.15, 0.85),
        }
    }
}

impl FabConstraints {
    pub fn with_max_area(mut self, max_area: f64) -> Self {
        self.max_area = max_area;
        self
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            self.min_trace_width,
            self.max_trace_width,
            self.min_spacing,
            self.max_spacing_ratio,
            self.max_area,
            self.substrate_thickness,
            self.trace_thickness,
            self.grid_step,
            self.radius_step,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) || self.max_turns == 0 {
            return Err(Error::InvalidInput(format!("fabrication constraints must be positive: {self:?}")));
        }
        if self.max_trace_width < self.min_trace_width {
            return Err(Error::InvalidInput("max trace width below min trace width".into()));
        }
        Ok(())
    }
}

/// One synthesized layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub geometry: SpiralGeometry,
    pub inductance: f64,
    /// `(L - target) / target`
    pub rel_error: f64,
}

/// Synthesis result: ranked candidates, or the closest grid point when
/// nothing qualified.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisOutcome {
    pub target: f64,
    pub candidates: Vec<Candidate>,
    pub nearest_miss: Option<NearestMiss>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NearestMiss {
    pub candidate: Candidate,
    /// True when even this point exceeds the area cap.
    pub exceeds_area: bool,
}

/// Relative inductance tolerance for synthesized layouts.
pub const SYNTH_TOLERANCE: f64 = 0.01;

fn steps(from: f64, to: f64, step: f64) -> impl Iterator<Item = f64> {
    let count = ((to - from) / step + 1e-9).floor().max(-1.0) as i64 + 1;
    (0..count.max(0)).map(move |i| from + i as f64 * step)
}

/// Exhaustive grid search for layouts within 1% of `l_target` whose area
/// fits `fab.max_area`, ranked by descending area (then fewer turns, then
/// smaller error). Deterministic regardless of thread scheduling.
pub fn synthesize(l_target: f64, fab: &FabConstraints, shape: &ShapeCoefficients) -> Result<SynthesisOutcome> {
    if !(l_target > 0.0 && l_target.is_finite()) {
        return Err(Error::InvalidInput(format!("target inductance must be positive, got {l_target}")));
    }
    fab.validate()?;
    let c = shape.cos_factor();
    let (phi_lo, phi_hi) = fab.fill_ratio_range;
    let widths: Vec<f64> = steps(fab.min_trace_width, fab.max_trace_width, fab.grid_step).collect();

    // Each width is an independent partition; results are merged and sorted.
    let per_width: Vec<(Vec<Candidate>, Option<Candidate>)> = widths
        .par_iter()
        .map(|&w| {
            let mut found = Vec::new();
            let mut best: Option<Candidate> = None;
            let dr_max = w * (1.0 + fab.max_spacing_ratio);
            for dr in steps(w + fab.min_spacing, dr_max, fab.grid_step) {
                let mut r = fab.radius_step;
                // Inner opening must stay open: 2 r cos(pi/seg) > w.
                while 2.0 * r * c <= w {
                    r += fab.radius_step;
                }
                loop {
                    if coil_area(shape, 1, r, dr, w) > fab.max_area {
                        break;
                    }
                    for n in 1..=fab.max_turns {
                        let area = coil_area(shape, n, r, dr, w);
                        if area > fab.max_area {
                            break;
                        }
                        let d_avg = avg_diameter(shape, n, r, dr);
                        let phi = fill_ratio(area, d_avg);
                        if phi < phi_lo || phi > phi_hi {
                            continue;
                        }
                        let Ok(l) = inductance_raw(shape, n, d_avg, phi) else { continue };
                        let rel = (l - l_target) / l_target;
                        let Ok(geometry) = SpiralGeometry::new(*shape, n, r, dr, w, fab.trace_thickness) else {
                            continue;
                        };
                        let cand = Candidate { geometry, inductance: l, rel_error: rel };
                        if rel.abs() <= SYNTH_TOLERANCE {
                            found.push(cand);
                        } else if best.is_none_or(|b| rel.abs() < b.rel_error.abs()) {
                            best = Some(cand);
                        }
                    }
                    r += fab.radius_step;
                }
            }
            (found, best)
        })
        .collect();

    let mut candidates: Vec<Candidate> = per_width.iter().flat_map(|(f, _)| f.iter().copied()).collect();
    candidates.sort_by(|a, b| {
        b.geometry
            .area
            .total_cmp(&a.geometry.area)
            .then(a.geometry.n.cmp(&b.geometry.n))
            .then(a.rel_error.abs().total_cmp(&b.rel_error.abs()))
            .then(a.geometry.w.total_cmp(&b.geometry.w))
            .then(a.geometry.dr.total_cmp(&b.geometry.dr))
            .then(a.geometry.r.total_cmp(&b.geometry.r))
    });

    let nearest_miss = if candidates.is_empty() {
        let within_area = per_width
            .iter()
            .filter_map(|(_, b)| *b)
            .min_by(|a, b| a.rel_error.abs().total_cmp(&b.rel_error.abs()));
        match within_area {
            Some(candidate) => Some(NearestMiss { candidate, exceeds_area: false }),
            None => smallest_footprint(l_target, fab, shape).map(|candidate| NearestMiss { candidate, exceeds_area: true }),
        }
    } else {
        None
    };
    Ok(SynthesisOutcome { target: l_target, candidates, nearest_miss })
}

fn smallest_footprint(l_target: f64, fab: &FabConstraints, shape: &ShapeCoefficients) -> Option<Candidate> {
    let w = fab.min_trace_width;
    let dr = w + fab.min_spacing;
    let c = shape.cos_factor();
    let mut r = fab.radius_step;
    while 2.0 * r * c <= w {
        r += fab.radius_step;
    }
    let geometry = SpiralGeometry::new(*shape, 1, r, dr, w, fab.trace_thickness).ok()?;
    let l = inductance(&geometry).ok()?;
    Some(Candidate { geometry, inductance: l, rel_error: (l - l_target) / l_target })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(n: u32, r: f64, dr: f64, w: f64) -> SpiralGeometry {
        SpiralGeometry::new(ShapeCoefficients::square(), n, r, dr, w, 35e-6).unwrap()
    }

    #[test]
    fn circular_limit_has_unit_cos_factor() {
        let c = ShapeCoefficients::circular();
        assert_eq!(avg_diameter(&c, 5, 2e-3, 0.5e-3), 2.0 * 2e-3 + 5.0 * 0.5e-3);
        let big = ShapeCoefficients::polygon(10_000).unwrap();
        assert!((big.c2 - 2.46).abs() < 1e-6);
    }

    #[test]
    fn square_uses_root_two_over_two() {
        let g = square(3, 2e-3, 0.4e-3, 0.2e-3);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((g.d_avg - (4e-3 + 1.2e-3) * h).abs() < 1e-15);
        let edge = 0.2e-3 + 2.0 * (2e-3 + 1.2e-3) * h;
        assert_eq!(g.area, edge * edge);
    }

    #[test]
    fn fill_ratio_identity() {
        let g = square(7, 3e-3, 0.45e-3, 0.25e-3);
        assert!((g.phi * g.d_avg + g.d_avg - g.area.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn polygon_table_and_interpolation() {
        assert_eq!(ShapeCoefficients::polygon(6).unwrap(), ShapeCoefficients::hexagonal());
        let p5 = ShapeCoefficients::polygon(5).unwrap();
        assert!(p5.c1 < 1.27 && p5.c1 > 1.09);
        assert!(ShapeCoefficients::polygon(2).is_err());
        assert_eq!(ShapeCoefficients::from_name("Octagonal").unwrap(), ShapeCoefficients::octagonal());
        assert!(ShapeCoefficients::from_name("blob").is_err());
    }

    #[test]
    fn inductance_scales_with_n_squared() {
        let s = ShapeCoefficients::square();
        let l1 = inductance_raw(&s, 5, 10e-3, 0.3).unwrap();
        let l2 = inductance_raw(&s, 10, 10e-3, 0.3).unwrap();
        assert!((l2 / l1 - 4.0).abs() < 1e-12);
        assert!(inductance_raw(&s, 5, 10e-3, 0.0).is_err());
    }

    #[test]
    fn overlapping_turns_rejected() {
        assert!(SpiralGeometry::new(ShapeCoefficients::square(), 3, 1e-3, 0.1e-3, 0.2e-3, 35e-6).is_err());
    }

    #[test]
    fn resistance_dc_limit_and_monotone() {
        let g = square(5, 3e-3, 0.5e-3, 0.3e-3);
        let dc = ac_resistance(&g, 0.0, COPPER_RESISTIVITY).unwrap();
        assert!((dc - COPPER_RESISTIVITY * g.trace_length() / (g.w * g.t)).abs() < 1e-15);
        let mut prev = dc;
        for f in [1e3, 1e5, 1e6, 1e7, 2e7, 1e8] {
            let r = ac_resistance(&g, f, COPPER_RESISTIVITY).unwrap();
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn copper_skin_depth_at_twenty_megahertz() {
        // sqrt(1.68e-8 / (pi * 2e7 * 4e-7 * pi)) computed by hand: 14.59 um
        let d = skin_depth(20e6, COPPER_RESISTIVITY);
        assert!((d - 14.59e-6).abs() < 0.02e-6);
    }

    #[test]
    fn coupling_vanishes_with_distance() {
        let g = square(5, 3e-3, 0.5e-3, 0.3e-3);
        let mut prev = 1.0;
        for d in [1e-3, 5e-3, 1e-2, 5e-2, 1e-1, 1.0] {
            let k = estimate_k(&g, &g, d).unwrap();
            assert!(k < prev);
            prev = k;
        }
        assert!(prev < 1e-4);
        assert!(estimate_k(&g, &g, 0.0).is_err());
    }

    #[test]
    fn infeasible_area_gives_nearest_miss() {
        let fab = FabConstraints::default().with_max_area(1e-9);
        let out = synthesize(400e-9, &fab, &ShapeCoefficients::square()).unwrap();
        assert!(out.candidates.is_empty());
        let miss = out.nearest_miss.unwrap();
        assert!(miss.exceeds_area);
    }
}
