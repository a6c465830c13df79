//! Layered biological tissue: multi-term Cole-Cole permittivity, the
//! sigma * omega^2 loss law, and a ladder two-port that embeds the RX coil
//! in the tissue stack.
//!
//! Each section of a layer (thickness `dz`, one square of face) is an
//! L-network: a series inductive plate impedance `j omega mu0 dz` followed by
//! a shunt plate admittance `j omega eps0 eps(f) dz`, where the complex
//! relative permittivity carries the conductivity term. Both elements scale
//! with `dz`, so refining the mesh converges to a lossy line whose
//! propagation constant is the plane-wave one of the tissue.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::netcore::{cascade, PortPair, Representation, TwoPortMatrix};
use crate::spiral::MU0;

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// One Cole-Cole relaxation term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dispersion {
    pub delta_eps: f64,
    /// Relaxation time, s.
    pub tau: f64,
    /// Broadening, in [0, 1).
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColeColeLayer {
    pub name: String,
    pub eps_inf: f64,
    pub terms: Vec<Dispersion>,
    /// Static ionic conductivity, S/m.
    pub sigma_static: f64,
    /// m
    pub thickness: f64,
}

impl ColeColeLayer {
    pub fn new(name: impl Into<String>, eps_inf: f64, terms: Vec<Dispersion>, sigma_static: f64, thickness: f64) -> Result<Self> {
        let name = name.into();
        if !(eps_inf >= 1.0) {
            return Err(Error::InvalidInput(format!("{name}: eps_inf must be >= 1, got {eps_inf}")));
        }
        if !(sigma_static >= 0.0 && sigma_static.is_finite()) {
            return Err(Error::InvalidInput(format!("{name}: conductivity must be >= 0")));
        }
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::InvalidInput(format!("{name}: thickness must be positive")));
        }
        for t in &terms {
            if !(0.0..1.0).contains(&t.alpha) || !(t.tau > 0.0) || !(t.delta_eps >= 0.0) {
                return Err(Error::InvalidInput(format!("{name}: bad dispersion term {t:?}")));
            }
        }
        Ok(Self { name, eps_inf, terms, sigma_static, thickness })
    }

    /// Loss-free, dispersion-free slab.
    pub fn vacuum(thickness: f64) -> Result<Self> {
        Self::new("vacuum", 1.0, Vec::new(), 0.0, thickness)
    }

    /// Named literature layer: `skin`, `fat` or `muscle`.
    pub fn preset(name: &str, thickness: f64) -> Result<Self> {
        let d = |delta_eps, tau, alpha| Dispersion { delta_eps, tau, alpha };
        let (eps_inf, terms, sigma) = match name.to_ascii_lowercase().as_str() {
            "skin" | "skin_dry" => (
                4.0,
                vec![d(32.0, 7.234e-12, 0.0), d(1100.0, 32.481e-9, 0.20), d(0.0, 159.155e-6, 0.20), d(0.0, 15.915e-3, 0.20)],
                0.0002,
            ),
            "fat" => (
                2.5,
                vec![d(3.0, 7.958e-12, 0.20), d(15.0, 15.915e-9, 0.10), d(3.3e4, 159.155e-6, 0.05), d(1.0e7, 7.958e-3, 0.01)],
                0.01,
            ),
            "muscle" => (
                4.0,
                vec![d(50.0, 7.234e-12, 0.10), d(7000.0, 353.678e-9, 0.10), d(1.2e6, 318.310e-6, 0.10), d(2.5e7, 2.274e-3, 0.0)],
                0.2,
            ),
            other => return Err(Error::InvalidInput(format!("unknown tissue preset `{other}`"))),
        };
        Self::new(name.to_ascii_lowercase(), eps_inf, terms, sigma, thickness)
    }
}

/// Complex relative permittivity at `f`, conductivity term included.
pub fn complex_permittivity(layer: &ColeColeLayer, f: f64) -> Complex64 {
    let w = 2.0 * PI * f;
    let jw = Complex64::new(0.0, w);
    let relax: Complex64 = layer
        .terms
        .iter()
        .map(|t| t.delta_eps / (1.0 + (jw * t.tau).powf(1.0 - t.alpha)))
        .sum();
    layer.eps_inf + relax + layer.sigma_static / (jw * EPS0)
}

/// Total effective conductivity `omega eps0 eps''`, S/m.
pub fn effective_conductivity(layer: &ColeColeLayer, f: f64) -> f64 {
    -2.0 * PI * f * EPS0 * complex_permittivity(layer, f).im
}

/// `sigma * omega^2`, the frequency dependence of eddy-current loss up to a
/// geometry constant.
pub fn loss_scaling(sigma: f64, omega: f64) -> f64 {
    sigma * omega * omega
}

#[derive(Clone, Debug, PartialEq)]
pub struct TissueStack {
    pub layers: Vec<ColeColeLayer>,
    pub sections_per_layer: usize,
    /// Effective field cross-section, m^2.
    pub face_area: f64,
}

impl TissueStack {
    pub fn new(layers: Vec<ColeColeLayer>, sections_per_layer: usize, face_area: f64) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidInput("tissue stack has no layers".into()));
        }
        if sections_per_layer == 0 {
            return Err(Error::InvalidInput("sections_per_layer must be >= 1".into()));
        }
        if !(face_area > 0.0 && face_area.is_finite()) {
            return Err(Error::InvalidInput("face area must be positive".into()));
        }
        Ok(Self { layers, sections_per_layer, face_area })
    }

    /// 2 mm skin, 2 mm fat, 10 mm muscle, 10 sections per layer.
    pub fn default_body(face_area: f64) -> Result<Self> {
        Self::new(
            vec![
                ColeColeLayer::preset("skin", 2e-3)?,
                ColeColeLayer::preset("fat", 2e-3)?,
                ColeColeLayer::preset("muscle", 10e-3)?,
            ],
            10,
            face_area,
        )
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    pub fn with_sections(mut self, sections_per_layer: usize) -> Self {
        self.sections_per_layer = sections_per_layer.max(1);
        self
    }

    /// Relative volumetric loss `sum sigma_eff(f) omega^2 A t` over layers.
    pub fn loss_factor(&self, f: f64) -> f64 {
        let w = 2.0 * PI * f;
        self.layers
            .iter()
            .map(|l| loss_scaling(effective_conductivity(l, f), w) * self.face_area * l.thickness)
            .sum()
    }
}

/// ABCD of the discretized stack at `f`.
pub fn ladder_two_port(stack: &TissueStack, f: f64) -> Result<TwoPortMatrix> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::InvalidInput(format!("frequency must be positive, got {f}")));
    }
    let w = 2.0 * PI * f;
    let mut acc = TwoPortMatrix::identity();
    for layer in &stack.layers {
        let dz = layer.thickness / stack.sections_per_layer as f64;
        let z_h = Complex64::new(0.0, w * MU0 * dz);
        let y_v = Complex64::new(0.0, w * EPS0 * dz) * complex_permittivity(layer, f);
        let section = cascade(&TwoPortMatrix::series(z_h), &TwoPortMatrix::shunt(y_v))?;
        for _ in 0..stack.sections_per_layer {
            acc = cascade(&acc, &section)?;
        }
    }
    Ok(acc)
}

/// Coil ABCD with the RX side embedded in `stack` (TX in air).
pub fn modified_coil_abcd(t_coil: &TwoPortMatrix, stack: &TissueStack, f: f64) -> Result<TwoPortMatrix> {
    cascade(t_coil, &ladder_two_port(stack, f)?)
}

#[derive(Deserialize)]
struct LayerFile {
    sections_per_layer: Option<usize>,
    face_area: Option<f64>,
    #[serde(rename = "layer")]
    layers: Vec<LayerRecord>,
}

#[derive(Deserialize)]
struct LayerRecord {
    name: Option<String>,
    preset: Option<String>,
    eps_inf: Option<f64>,
    /// `[delta_eps, tau, alpha]` triples.
    #[serde(default)]
    dispersion: Vec<[f64; 3]>,
    sigma: Option<f64>,
    thickness: f64,
}

/// Parses a layer override file (TOML, one `[[layer]]` table per layer).
/// A record may name a `preset` and override any of its fields.
pub fn parse_layer_file(text: &str, default_face_area: f64) -> Result<TissueStack> {
    let file: LayerFile = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
        message: e.message().to_string(),
    })?;
    let mut layers = Vec::with_capacity(file.layers.len());
    for rec in file.layers {
        let mut layer = match &rec.preset {
            Some(p) => ColeColeLayer::preset(p, rec.thickness)?,
            None => ColeColeLayer::new(
                rec.name.clone().unwrap_or_else(|| "layer".into()),
                rec.eps_inf.ok_or_else(|| Error::InvalidInput("layer without preset needs eps_inf".into()))?,
                Vec::new(),
                rec.sigma.ok_or_else(|| Error::InvalidInput("layer without preset needs sigma".into()))?,
                rec.thickness,
            )?,
        };
        if let Some(n) = rec.name {
            layer.name = n;
        }
        if let Some(e) = rec.eps_inf {
            layer.eps_inf = e;
        }
        if let Some(s) = rec.sigma {
            layer.sigma_static = s;
        }
        if !rec.dispersion.is_empty() {
            layer.terms = rec
                .dispersion
                .iter()
                .map(|&[delta_eps, tau, alpha]| Dispersion { delta_eps, tau, alpha })
                .collect();
        }
        // Re-run validation on the merged record.
        layers.push(ColeColeLayer::new(layer.name, layer.eps_inf, layer.terms, layer.sigma_static, layer.thickness)?);
    }
    TissueStack::new(
        layers,
        file.sections_per_layer.unwrap_or(10),
        file.face_area.unwrap_or(default_face_area),
    )
}

/// Frequency-indexed S-parameter table, e.g. from a simulator or a VNA,
/// usable wherever the tissue-modified coil network is expected.
#[derive(Clone, Debug, PartialEq)]
pub struct ImportedTable {
    freqs: Vec<f64>,
    rows: Vec<TwoPortMatrix>,
}

/// Default reciprocity tolerance for imported rows, relative to |S21|.
pub const IMPORT_RECIPROCITY_TOL: f64 = 1e-6;

/// Builds an interpolable table from `(frequency, S)` rows.
pub fn import_override(rows: &[(f64, TwoPortMatrix)], reciprocity_tol: f64) -> Result<ImportedTable> {
    if rows.len() < 2 {
        return Err(Error::Table { row: rows.len(), message: "need at least two rows to interpolate".into() });
    }
    let ports = rows[0].1.ports();
    for (i, (f, s)) in rows.iter().enumerate() {
        if s.representation() != Representation::S {
            return Err(Error::Table { row: i, message: "row is not an S matrix".into() });
        }
        if s.ports() != ports {
            return Err(Error::Table { row: i, message: "reference impedance changes between rows".into() });
        }
        if !(f.is_finite() && *f > 0.0) || (i > 0 && *f <= rows[i - 1].0) {
            return Err(Error::Table { row: i, message: format!("frequency {f} is not strictly increasing") });
        }
        let scale = s.m12().norm().max(s.m21().norm()).max(f64::MIN_POSITIVE);
        if (s.m12() - s.m21()).norm() > reciprocity_tol * scale {
            return Err(Error::Table { row: i, message: "S12 and S21 differ beyond tolerance".into() });
        }
    }
    Ok(ImportedTable {
        freqs: rows.iter().map(|r| r.0).collect(),
        rows: rows.iter().map(|r| r.1).collect(),
    })
}

impl ImportedTable {
    pub fn frequencies(&self) -> &[f64] {
        &self.freqs
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, &TwoPortMatrix)> {
        self.freqs.iter().copied().zip(self.rows.iter())
    }

    pub fn ports(&self) -> PortPair {
        self.rows[0].ports()
    }

    /// S matrix at `f`, linear in real and imaginary parts between rows.
    pub fn query(&self, f: f64) -> Result<TwoPortMatrix> {
        let (lo, hi) = (self.freqs[0], *self.freqs.last().unwrap());
        if !(f >= lo && f <= hi) {
            return Err(Error::InvalidInput(format!("{f} Hz outside tabulated range [{lo}, {hi}]")));
        }
        let i = self.freqs.partition_point(|&x| x < f);
        if self.freqs[i] == f {
            return Ok(self.rows[i]);
        }
        let (f0, f1) = (self.freqs[i - 1], self.freqs[i]);
        let t = (f - f0) / (f1 - f0);
        let (a, b) = (self.rows[i - 1].matrix(), self.rows[i].matrix());
        let mut m = a;
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = a[r][c] + (b[r][c] - a[r][c]) * t;
            }
        }
        TwoPortMatrix::s(m, self.ports())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::abcd_to_s;

    #[test]
    fn dispersionless_lossless_layer_is_constant() {
        let l = ColeColeLayer::new("x", 3.5, Vec::new(), 0.0, 1e-3).unwrap();
        for f in [1e3, 1e6, 1e9] {
            let e = complex_permittivity(&l, f);
            assert_eq!(e, Complex64::new(3.5, 0.0));
        }
    }

    #[test]
    fn loss_law() {
        assert_eq!(loss_scaling(0.0, 1e8), 0.0);
        let a = loss_scaling(0.6, 1e8);
        let b = loss_scaling(0.6, 2e8);
        assert!((b / a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn layer_validation() {
        assert!(ColeColeLayer::new("x", 0.5, Vec::new(), 0.0, 1e-3).is_err());
        assert!(ColeColeLayer::new("x", 2.0, Vec::new(), -1.0, 1e-3).is_err());
        assert!(ColeColeLayer::new("x", 2.0, vec![Dispersion { delta_eps: 1.0, tau: 1e-9, alpha: 1.0 }], 0.0, 1e-3).is_err());
        assert!(ColeColeLayer::preset("bone", 1e-3).is_err());
        assert!(TissueStack::new(Vec::new(), 10, 1e-4).is_err());
    }

    #[test]
    fn thin_vacuum_is_transparent() {
        let mut prev = f64::INFINITY;
        for t in [1e-3, 1e-4, 1e-5, 1e-6] {
            let s = TissueStack::new(vec![ColeColeLayer::vacuum(t).unwrap()], 4, 1e-4).unwrap();
            let d = ladder_two_port(&s, 20e6).unwrap().max_rel_diff(&TwoPortMatrix::identity());
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn ladder_is_reciprocal_and_passive() {
        let s = TissueStack::default_body(3.24e-4).unwrap();
        for f in [1e6, 20e6, 100e6, 500e6] {
            let t = ladder_two_port(&s, f).unwrap();
            assert!((t.det() - 1.0).norm() < 1e-9);
            let sp = abcd_to_s(&t, 50.0, 50.0).unwrap();
            assert!(sp.m11().norm_sqr() + sp.m21().norm_sqr() <= 1.0);
        }
    }

    #[test]
    fn layer_file_with_presets_and_overrides() {
        let text = r#"
            sections_per_layer = 4
            [[layer]]
            preset = "skin"
            thickness = 0.002
            [[layer]]
            name = "gel"
            eps_inf = 60.0
            sigma = 0.5
            thickness = 0.003
            dispersion = [[10.0, 1e-9, 0.1]]
        "#;
        let stack = parse_layer_file(text, 1e-4).unwrap();
        assert_eq!(stack.sections_per_layer, 4);
        assert_eq!(stack.layers.len(), 2);
        assert_eq!(stack.layers[1].terms.len(), 1);
        assert!((stack.total_thickness() - 0.005).abs() < 1e-15);
        assert!(parse_layer_file("[[layer]]\nthickness = 0.001\n", 1e-4).is_err());
        assert!(matches!(parse_layer_file("[[layer]\n", 1e-4), Err(Error::Parse { .. })));
    }

    #[test]
    fn import_rejects_non_monotone_and_non_reciprocal() {
        let c = Complex64::new;
        let good = TwoPortMatrix::s([[c(0.1, 0.0), c(0.5, 0.1)], [c(0.5, 0.1), c(0.2, 0.0)]], PortPair::fifty()).unwrap();
        let bad = TwoPortMatrix::s([[c(0.1, 0.0), c(0.5, 0.1)], [c(0.4, 0.1), c(0.2, 0.0)]], PortPair::fifty()).unwrap();
        let e = import_override(&[(1e6, good), (1e6, good)], 1e-6).unwrap_err();
        assert!(matches!(e, Error::Table { row: 1, .. }));
        let e = import_override(&[(1e6, good), (2e6, good), (3e6, bad)], 1e-6).unwrap_err();
        assert!(matches!(e, Error::Table { row: 2, .. }));
    }
}
