//! End-to-end link design: spec file in, report out.
//!
//! Stages, in order: optimal inductance, split between the coils, spiral
//! synthesis per side, AC resistance (and optionally coupling) estimation,
//! tissue embedding, parameter re-extraction, L-section matching, efficiency,
//! SAR budget and rectifier exploration. The matching stage consumes the same
//! S matrix the extraction stage read.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::coil::{coil_abcd, extract_params, f_opt, l_opt, s_max, split_inductance, CoilPair, ExtractedCoils, InductanceSplit};
use crate::error::{Error, Result};
use crate::harvester::{design_space, DesignSpace, HarvesterConstraints, ZinModel, DEFAULT_VT};
use crate::imn::{assemble_link, synthesize_imn, verify_match, ImnSynthesis, LinkNetwork, MatchReport};
use crate::link_eval::{gamma, pte_link, pte_max, sar_budget, PteMax, SarBudget, IEEE_SAR_LIMIT_1G};
use crate::netcore::{PortPair, TwoPortMatrix};
use crate::spiral::{ac_resistance, estimate_k, synthesize, Candidate, FabConstraints, ShapeCoefficients, COPPER_RESISTIVITY};
use crate::tissue::{modified_coil_abcd, parse_layer_file, TissueStack};

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PortsCfg {
    pub zp1: f64,
    pub zp2: f64,
}

impl Default for PortsCfg {
    fn default() -> Self {
        Self { zp1: 50.0, zp2: 50.0 }
    }
}

/// Either a fixed coupling or the keyword `"estimate"`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum KSetting {
    Value(f64),
    Keyword(String),
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SplitCfg {
    /// `"symmetric"` (default) or `"asymmetric"`.
    pub mode: Option<String>,
    /// TX inductance for the asymmetric split, H.
    pub l1: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoilCfg {
    #[serde(default = "default_shape")]
    pub shape: String,
    /// Largest allowed footprint, m^2.
    pub max_area: f64,
}

fn default_shape() -> String {
    "square".into()
}

/// Overrides for [`FabConstraints`]; unset fields keep their defaults.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FabCfg {
    pub min_trace_width: Option<f64>,
    pub max_trace_width: Option<f64>,
    pub min_spacing: Option<f64>,
    pub max_spacing_ratio: Option<f64>,
    pub trace_thickness: Option<f64>,
    pub substrate_thickness: Option<f64>,
    pub grid_step: Option<f64>,
    pub radius_step: Option<f64>,
    pub max_turns: Option<u32>,
    pub fill_ratio_min: Option<f64>,
    pub fill_ratio_max: Option<f64>,
    pub resistivity: Option<f64>,
}

impl FabCfg {
    fn constraints(&self, max_area: f64) -> FabConstraints {
        let d = FabConstraints::default();
        FabConstraints {
            min_trace_width: self.min_trace_width.unwrap_or(d.min_trace_width),
            max_trace_width: self.max_trace_width.unwrap_or(d.max_trace_width),
            min_spacing: self.min_spacing.unwrap_or(d.min_spacing),
            max_spacing_ratio: self.max_spacing_ratio.unwrap_or(d.max_spacing_ratio),
            max_area,
            substrate_thickness: self.substrate_thickness.unwrap_or(d.substrate_thickness),
            trace_thickness: self.trace_thickness.unwrap_or(d.trace_thickness),
            grid_step: self.grid_step.unwrap_or(d.grid_step),
            radius_step: self.radius_step.unwrap_or(d.radius_step),
            max_turns: self.max_turns.unwrap_or(d.max_turns),
            fill_ratio_range: (
                self.fill_ratio_min.unwrap_or(d.fill_ratio_range.0),
                self.fill_ratio_max.unwrap_or(d.fill_ratio_range.1),
            ),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TissueCfg {
    /// `"none"` (default), `"default"` (skin/fat/muscle) or `"file"`.
    pub model: Option<String>,
    /// Layer file, relative to the spec file.
    pub file: Option<String>,
    pub face_area: Option<f64>,
    pub sections_per_layer: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SarCfg {
    /// SAR-limited transmit power, W.
    pub p_tx_max: f64,
    #[serde(default = "default_sar_limit")]
    pub sar_limit: f64,
}

fn default_sar_limit() -> f64 {
    IEEE_SAR_LIMIT_1G
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HarvesterCfg {
    pub v_rx: f64,
    pub target_v_out: f64,
    #[serde(default = "default_n_min")]
    pub n_min: u32,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default = "default_q")]
    pub q_values: Vec<f64>,
    pub max_charge_time: f64,
    pub i_load: f64,
    pub c_store: f64,
    #[serde(default = "default_vt")]
    pub v_t: f64,
    /// `"series"` (default), `"parallel"` or `"table"`.
    pub model: Option<String>,
    pub r_stage: Option<f64>,
    pub c_stage: Option<f64>,
    /// Rows of `[n, re, im]` for the table model.
    pub table: Option<Vec<[f64; 3]>>,
    /// Source impedance `[re, im]` seen by the rectifier; defaults to the
    /// RX reference impedance.
    pub source_z: Option<[f64; 2]>,
}

fn default_n_min() -> u32 {
    1
}
fn default_n_max() -> u32 {
    40
}
fn default_q() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}
fn default_vt() -> f64 {
    DEFAULT_VT
}

impl HarvesterCfg {
    pub fn model(&self) -> Result<ZinModel> {
        let d = ZinModel::default();
        let ZinModel::SeriesStack { r_stage: r0, c_stage: c0 } = d else { unreachable!() };
        let (r, c) = (self.r_stage.unwrap_or(r0), self.c_stage.unwrap_or(c0));
        match self.model.as_deref().unwrap_or("series") {
            "series" => Ok(ZinModel::SeriesStack { r_stage: r, c_stage: c }),
            "parallel" => Ok(ZinModel::ParallelStack { r_stage: r, c_stage: c }),
            "table" => {
                let rows = self.table.as_ref().ok_or_else(|| Error::InvalidInput("table model needs `table`".into()))?;
                let mut out = Vec::with_capacity(rows.len());
                for [n, re, im] in rows {
                    if !(*n >= 1.0 && n.fract() == 0.0) {
                        return Err(Error::InvalidInput(format!("stage count {n} in table is not a positive integer")));
                    }
                    out.push((*n as u32, Complex64::new(*re, *im)));
                }
                Ok(ZinModel::Table(out))
            }
            other => Err(Error::InvalidInput(format!("unknown harvester model `{other}`"))),
        }
    }

    pub fn explore(&self, f0: f64, default_source: Complex64) -> Result<DesignSpace> {
        let source = self.source_z.map_or(default_source, |[re, im]| Complex64::new(re, im));
        let c = HarvesterConstraints {
            n_min: self.n_min,
            n_max: self.n_max,
            q_values: self.q_values.clone(),
            max_charge_time: self.max_charge_time,
            tissue_z: source,
            i_load: self.i_load,
            c_store: self.c_store,
            v_t: self.v_t,
            f0,
        };
        design_space(self.v_rx, self.target_v_out, &c, &self.model()?)
    }
}

/// Parsed design specification.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DesignSpecFile {
    /// Design frequency, Hz.
    pub f0: f64,
    #[serde(default)]
    pub ports: PortsCfg,
    pub k: KSetting,
    /// Coil separation for `k = "estimate"`, m.
    pub distance: Option<f64>,
    /// Starting coupling for the estimate iteration.
    pub k_guess: Option<f64>,
    #[serde(default)]
    pub split: SplitCfg,
    /// Series resistance assumed per coil when computing the optimal
    /// inductance, ohm.
    #[serde(default = "default_r_assumed")]
    pub r_assumed: f64,
    /// Re-run the optimum with the synthesized coils' AC resistance.
    #[serde(default)]
    pub refine_resistance: bool,
    pub tx: CoilCfg,
    pub rx: CoilCfg,
    #[serde(default)]
    pub fabrication: FabCfg,
    #[serde(default)]
    pub tissue: TissueCfg,
    pub sar: Option<SarCfg>,
    pub harvester: Option<HarvesterCfg>,
}

fn default_r_assumed() -> f64 {
    0.5
}

fn toml_error(text: &str, e: &toml::de::Error) -> Error {
    let line = e.span().map_or(1, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    Error::Parse { line, message: e.message().to_string() }
}

impl DesignSpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Loads a spec and returns it with the directory relative paths resolve against.
    pub fn load(path: impl AsRef<Path>) -> Result<(Self, PathBuf)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::parse(&text)?, base))
    }

    fn ports(&self) -> Result<PortPair> {
        PortPair::new(self.ports.zp1, self.ports.zp2)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if !(self.f0 > 0.0 && self.f0.is_finite()) {
            return bad(format!("f0 must be positive, got {}", self.f0));
        }
        self.ports()?;
        match &self.k {
            KSetting::Value(k) if !(0.0..1.0).contains(k) || *k == 0.0 => return bad(format!("k must lie in (0, 1), got {k}")),
            KSetting::Keyword(w) if w != "estimate" => return bad(format!("k must be a number or \"estimate\", got `{w}`")),
            KSetting::Keyword(_) if !self.distance.is_some_and(|d| d > 0.0) => {
                return bad("k = \"estimate\" needs a positive `distance`".into())
            }
            _ => {}
        }
        if !(self.r_assumed >= 0.0 && self.r_assumed.is_finite()) {
            return bad("r_assumed must be >= 0".into());
        }
        self.split_mode()?;
        for (side, c) in [("tx", &self.tx), ("rx", &self.rx)] {
            ShapeCoefficients::from_name(&c.shape)?;
            if !(c.max_area > 0.0 && c.max_area.is_finite()) {
                return bad(format!("{side}.max_area must be positive"));
            }
        }
        match self.tissue.model.as_deref().unwrap_or("none") {
            "none" | "default" => {}
            "file" if self.tissue.file.is_some() => {}
            "file" => return bad("tissue model `file` needs `file`".into()),
            other => return bad(format!("unknown tissue model `{other}`")),
        }
        if let Some(s) = &self.sar {
            if !(s.p_tx_max >= 0.0 && s.sar_limit > 0.0) {
                return bad("sar.p_tx_max must be >= 0 and sar_limit > 0".into());
            }
        }
        if let Some(h) = &self.harvester {
            h.model()?;
        }
        Ok(())
    }

    fn split_mode(&self) -> Result<InductanceSplit> {
        match (self.split.mode.as_deref().unwrap_or("symmetric"), self.split.l1) {
            ("symmetric", _) => Ok(InductanceSplit::Symmetric),
            ("asymmetric", Some(l1)) if l1 > 0.0 && l1.is_finite() => Ok(InductanceSplit::Asymmetric { l1 }),
            ("asymmetric", _) => Err(Error::InvalidInput("asymmetric split needs a positive `split.l1`".into())),
            (other, _) => Err(Error::InvalidInput(format!("unknown split mode `{other}`"))),
        }
    }

    fn tissue_stack(&self, base: &Path) -> Result<Option<TissueStack>> {
        let face = self.tissue.face_area.unwrap_or(self.rx.max_area);
        let stack = match self.tissue.model.as_deref().unwrap_or("none") {
            "none" => return Ok(None),
            "default" => TissueStack::default_body(face)?,
            _ => {
                let rel = self.tissue.file.as_deref().unwrap_or_default();
                let path = base.join(rel);
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                parse_layer_file(&text, face)?
            }
        };
        Ok(Some(match self.tissue.sections_per_layer {
            Some(n) => stack.with_sections(n),
            None => stack,
        }))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoilDesign {
    pub target: f64,
    pub candidate: Candidate,
    pub candidates_found: usize,
    pub r_ac: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignReport {
    pub f0: f64,
    pub ports: PortPair,
    pub k: f64,
    pub k_estimated: bool,
    pub iterations: usize,
    pub r_assumed: (f64, f64),
    pub l_opt: f64,
    pub split: InductanceSplit,
    pub l_targets: (f64, f64),
    pub tx: CoilDesign,
    pub rx: CoilDesign,
    pub coils: CoilPair,
    pub f_opt_bare: f64,
    pub s_max_bare: f64,
    pub tissue: Option<TissueStack>,
    pub tissue_loss_factor: Option<f64>,
    /// S matrix of the (tissue-modified) coil pair at f0.
    pub s_coil: TwoPortMatrix,
    pub extracted: ExtractedCoils,
    pub imn: ImnSynthesis,
    pub link: LinkNetwork,
    pub matched: MatchReport,
    pub pte: f64,
    pub pte_max: PteMax,
    pub gamma: f64,
    pub sar: Option<SarBudget>,
    pub harvester: Option<DesignSpace>,
}

fn synth_side(side: &str, target: f64, cfg: &CoilCfg, fab: &FabCfg) -> Result<CoilDesign> {
    let shape = ShapeCoefficients::from_name(&cfg.shape)?;
    let constraints = fab.constraints(cfg.max_area);
    let out = synthesize(target, &constraints, &shape)?;
    let Some(best) = out.candidates.first().copied() else {
        let detail = match out.nearest_miss {
            Some(m) => format!(
                "no {side} layout within 1% of {}; nearest miss {} (n = {}, w = {}, dr = {}, r = {}, area {}{})",
                eng(target, "H"),
                eng(m.candidate.inductance, "H"),
                m.candidate.geometry.n,
                eng(m.candidate.geometry.w, "m"),
                eng(m.candidate.geometry.dr, "m"),
                eng(m.candidate.geometry.r, "m"),
                eng(m.candidate.geometry.area, "m^2"),
                if m.exceeds_area { ", exceeds area cap" } else { "" },
            ),
            None => format!("no {side} layout fits an area of {}", eng(cfg.max_area, "m^2")),
        };
        return Err(Error::Infeasible { stage: format!("coil synthesis ({side})"), detail });
    };
    Ok(CoilDesign { target, candidate: best, candidates_found: out.candidates.len(), r_ac: 0.0 })
}

/// Largest number of optimum/synthesis rounds when refining k or R.
const MAX_ROUNDS: usize = 8;
const ROUND_TOL: f64 = 1e-4;

pub fn run_design(spec: &DesignSpecFile, base_dir: &Path) -> Result<DesignReport> {
    spec.validate()?;
    let ports = spec.ports()?;
    let f0 = spec.f0;
    let split = spec.split_mode()?;
    let rho = spec.fabrication.resistivity.unwrap_or(COPPER_RESISTIVITY);
    let (mut k, k_estimated) = match spec.k {
        KSetting::Value(k) => (k, false),
        KSetting::Keyword(_) => (spec.k_guess.unwrap_or(0.1), true),
    };
    let mut r = (spec.r_assumed, spec.r_assumed);
    let iterate = k_estimated || spec.refine_resistance;

    let mut rounds = 0;
    let mut prev_l = f64::NAN;
    let (l_opt_v, l_targets, mut tx, mut rx) = loop {
        rounds += 1;
        let lo = l_opt(f0, r.0, r.1, &ports, k)?;
        let (l1, l2) = split_inductance(lo, split)?;
        let mut tx = synth_side("tx", l1, &spec.tx, &spec.fabrication)?;
        let mut rx = synth_side("rx", l2, &spec.rx, &spec.fabrication)?;
        tx.r_ac = ac_resistance(&tx.candidate.geometry, f0, rho)?;
        rx.r_ac = ac_resistance(&rx.candidate.geometry, f0, rho)?;
        let converged = ((lo - prev_l) / lo).abs() < ROUND_TOL;
        if !iterate || converged || rounds >= MAX_ROUNDS {
            break (lo, (l1, l2), tx, rx);
        }
        prev_l = lo;
        if k_estimated {
            k = estimate_k(&tx.candidate.geometry, &rx.candidate.geometry, spec.distance.unwrap_or_default())?;
            if k <= 0.0 {
                return Err(Error::Infeasible { stage: "coupling estimate".into(), detail: "coils are uncoupled at this distance".into() });
            }
        }
        if spec.refine_resistance {
            r = (tx.r_ac, rx.r_ac);
        }
    };
    // The last synthesized coils are kept even when the loop stopped on the
    // round limit.
    tx.target = l_targets.0;
    rx.target = l_targets.1;

    let coils = CoilPair::new(tx.candidate.inductance, rx.candidate.inductance, tx.r_ac, rx.r_ac, k)?;
    let f_opt_bare = f_opt(&coils, &ports)?;
    let s_max_bare = s_max(&coils, &ports)?;

    let tissue = spec.tissue_stack(base_dir)?;
    let t_bare = coil_abcd(&coils, f0)?;
    let t_mod = match &tissue {
        Some(stack) => modified_coil_abcd(&t_bare, stack, f0)?,
        None => t_bare,
    };
    let s_coil = t_mod.to_s(ports)?;
    let extracted = extract_params(&s_coil, f0)?;

    let imn = synthesize_imn(&s_coil, ports, f0)?;
    let link = match imn.solutions.first() {
        Some(sol) => assemble_link(&sol.imn, &s_coil, f0, ports)?,
        None if imn.already_matched => LinkNetwork { t_link: t_mod, f0, ports },
        None => {
            return Err(Error::Infeasible {
                stage: "imn".into(),
                detail: format!(
                    "no positive L-section reaches {} dB (targets {} / {} ohm)",
                    crate::imn::MATCH_FLOOR_DB,
                    imn.source_target,
                    imn.load_target
                ),
            })
        }
    };
    let matched = verify_match(&link)?;
    let s_link = link.s()?;
    let pte = pte_link(s_link.m21(), &ports);
    let pte_max_v = pte_max(&s_coil)?;
    let sar = match &spec.sar {
        Some(c) => Some(sar_budget(c.sar_limit, c.p_tx_max, pte.min(1.0))?),
        None => None,
    };
    let harvester = match &spec.harvester {
        Some(h) => Some(h.explore(f0, Complex64::new(ports.zp2, 0.0))?),
        None => None,
    };
    Ok(DesignReport {
        f0,
        ports,
        k,
        k_estimated,
        iterations: rounds,
        r_assumed: r,
        l_opt: l_opt_v,
        split,
        l_targets,
        tx,
        rx,
        coils,
        f_opt_bare,
        s_max_bare,
        tissue_loss_factor: tissue.as_ref().map(|t| t.loss_factor(f0)),
        tissue,
        s_coil,
        extracted,
        imn,
        link,
        matched,
        pte,
        pte_max: pte_max_v,
        gamma: gamma(&ports),
        sar,
        harvester,
    })
}

/// `value` with an SI prefix and unit, four significant digits.
pub fn eng(value: f64, unit: &str) -> String {
    if !value.is_finite() {
        return format!("{value} {unit}");
    }
    if value == 0.0 {
        return format!("0 {unit}");
    }
    const PREFIXES: [(f64, &str); 9] = [
        (1e9, "G"),
        (1e6, "M"),
        (1e3, "k"),
        (1.0, ""),
        (1e-3, "m"),
        (1e-6, "u"),
        (1e-9, "n"),
        (1e-12, "p"),
        (1e-15, "f"),
    ];
    // Area and similar compound units are printed without a prefix.
    if unit.contains('^') {
        return format!("{value:.4e} {unit}");
    }
    let a = value.abs();
    let (scale, p) = PREFIXES.iter().copied().find(|(s, _)| a >= *s * 0.999_95).unwrap_or((1e-15, "f"));
    let v = value / scale;
    let digits = if v.abs() >= 100.0 {
        1
    } else if v.abs() >= 10.0 {
        2
    } else {
        3
    };
    format!("{v:.digits$} {p}{unit}")
}

fn pct(x: f64) -> String {
    format!("{:.3} %", 100.0 * x)
}

fn dbs(x: f64) -> String {
    format!("{x:.2} dB")
}

impl DesignReport {
    /// Human-readable report followed by a `key=value` footer.
    pub fn render(&self) -> String {
        let mut o = String::new();
        let w = &mut o;
        let _ = writeln!(w, "NRIC link design report");
        let _ = writeln!(w, "=======================");
        let _ = writeln!(w, "design frequency      {}", eng(self.f0, "Hz"));
        let _ = writeln!(w, "ports                 {} / {}", eng(self.ports.zp1, "ohm"), eng(self.ports.zp2, "ohm"));
        let _ = writeln!(
            w,
            "coupling k            {:.4} (dimensionless){}",
            self.k,
            if self.k_estimated { format!(", estimated after {} rounds", self.iterations) } else { String::new() }
        );
        let _ = writeln!(w, "series R for optimum  {} / {}", eng(self.r_assumed.0, "ohm"), eng(self.r_assumed.1, "ohm"));
        let _ = writeln!(w);
        let _ = writeln!(w, "[inductance]");
        let _ = writeln!(w, "L_opt                 {}", eng(self.l_opt, "H"));
        let mode = match self.split {
            InductanceSplit::Symmetric => "symmetric",
            InductanceSplit::Asymmetric { .. } => "asymmetric",
        };
        let _ = writeln!(w, "split                 {mode}: L1 = {}, L2 = {}", eng(self.l_targets.0, "H"), eng(self.l_targets.1, "H"));
        for (name, c) in [("TX", &self.tx), ("RX", &self.rx)] {
            let g = &c.candidate.geometry;
            let _ = writeln!(w);
            let _ = writeln!(w, "[{name} coil]");
            let _ = writeln!(w, "shape                 {}", g.shape.name());
            let _ = writeln!(w, "turns                 {} turns", g.n);
            let _ = writeln!(w, "inner radius          {}", eng(g.r, "m"));
            let _ = writeln!(w, "pitch                 {}", eng(g.dr, "m"));
            let _ = writeln!(w, "trace width           {}", eng(g.w, "m"));
            let _ = writeln!(w, "trace thickness       {}", eng(g.t, "m"));
            let _ = writeln!(w, "outer dimension       {}", eng(g.outer_dimension(), "m"));
            let _ = writeln!(w, "area                  {}", eng(g.area, "m^2"));
            let _ = writeln!(w, "fill ratio            {:.4} (dimensionless)", g.phi);
            let _ = writeln!(w, "inductance            {} (target {}, error {})", eng(c.candidate.inductance, "H"), eng(c.target, "H"), pct(c.candidate.rel_error));
            let _ = writeln!(w, "AC resistance         {}", eng(c.r_ac, "ohm"));
            let _ = writeln!(w, "layouts within 1%     {} layouts", c.candidates_found);
        }
        let _ = writeln!(w);
        let _ = writeln!(w, "[bare coil pair]");
        let _ = writeln!(w, "f_opt                 {}", eng(self.f_opt_bare, "Hz"));
        let _ = writeln!(w, "peak |S21|            {:.5} (linear)", self.s_max_bare);
        let _ = writeln!(w);
        let _ = writeln!(w, "[tissue]");
        match (&self.tissue, self.tissue_loss_factor) {
            (Some(t), Some(lf)) => {
                for l in &t.layers {
                    let _ = writeln!(w, "layer                 {} {}", l.name, eng(l.thickness, "m"));
                }
                let _ = writeln!(w, "sections per layer    {} sections", t.sections_per_layer);
                let _ = writeln!(w, "loss factor           {lf:.4e} S m s^-2");
            }
            _ => {
                let _ = writeln!(w, "model                 none (air)");
            }
        }
        let _ = writeln!(w);
        let e = &self.extracted;
        let _ = writeln!(w, "[re-extracted from S at f0]");
        let _ = writeln!(w, "L1 / L2               {} / {}", eng(e.l1, "H"), eng(e.l2, "H"));
        let _ = writeln!(w, "R1 / R2               {} / {}", eng(e.r1, "ohm"), eng(e.r2, "ohm"));
        let _ = writeln!(w, "k                     {:.5} (dimensionless){}", e.k, if e.physical { "" } else { ", non-physical" });
        let _ = writeln!(w);
        let _ = writeln!(w, "[matching network]");
        if self.imn.already_matched {
            let _ = writeln!(w, "none required: ports already matched");
        } else {
            let _ = writeln!(w, "source target         {:.4} {:+.4}j ohm", self.imn.source_target.re, self.imn.source_target.im);
            let _ = writeln!(w, "load target           {:.4} {:+.4}j ohm", self.imn.load_target.re, self.imn.load_target.im);
            let _ = writeln!(w, "solutions             {} networks", self.imn.solutions.len());
            for (i, s) in self.imn.solutions.iter().enumerate() {
                let el = s.imn.elements().map(|e| format!("{} {}", e.kind.name(), eng(e.value, e.kind.unit())));
                let _ = writeln!(w, "  #{:<2} case {}  TX: {}, {}  RX: {}, {}", i + 1, s.imn.topology_case, el[0], el[1], el[2], el[3]);
            }
        }
        let _ = writeln!(w, "S11 / S22 at f0       {} / {}", dbs(self.matched.s11_db), dbs(self.matched.s22_db));
        let _ = writeln!(w, "S21 at f0             {}", dbs(self.matched.s21_db));
        let _ = writeln!(w);
        let _ = writeln!(w, "[efficiency]");
        let _ = writeln!(w, "gamma                 {:.4} (dimensionless)", self.gamma);
        let _ = writeln!(w, "PTE                   {}", pct(self.pte));
        match self.pte_max.pte_max {
            Some(p) => {
                let _ = writeln!(w, "PTE_max               {}", pct(p));
            }
            None => {
                let _ = writeln!(w, "PTE_max               undefined (K_r = {:.6}, flagged)", self.pte_max.k_r);
            }
        }
        let _ = writeln!(w, "K_r                   {:.6} (dimensionless)", self.pte_max.k_r);
        if let Some(s) = &self.sar {
            let _ = writeln!(w);
            let _ = writeln!(w, "[SAR budget]");
            let _ = writeln!(w, "SAR limit             {:.3} W/kg", s.sar_limit);
            let _ = writeln!(w, "max TX power          {}", eng(s.p_tx_max, "W"));
            let _ = writeln!(w, "max delivered power   {}", eng(s.pdl_max, "W"));
        }
        if let Some(h) = &self.harvester {
            let _ = writeln!(w);
            let _ = writeln!(w, "[harvester]");
            let _ = writeln!(w, "grid points           {} points", h.table.len());
            match &h.chosen {
                Some((spec, p)) => {
                    let _ = writeln!(w, "stages                {} stages", spec.n_stages);
                    let _ = writeln!(w, "boost Q               {:.3} (dimensionless)", spec.q_boost);
                    let _ = writeln!(w, "V_out                 {}", eng(p.v_out, "V"));
                    let _ = writeln!(w, "R_rect / C_rect       {} / {}", eng(p.r_rect, "ohm"), eng(p.c_rect, "F"));
                    let _ = writeln!(w, "charge time           {}", eng(p.charge_time, "s"));
                    let _ = writeln!(w, "match residual        {:.4} (dimensionless)", p.match_residual);
                }
                None => {
                    let _ = writeln!(w, "no feasible point");
                    if let Some(p) = h.best_output {
                        let _ = writeln!(w, "highest output        {} at {} stages, Q {:.3}", eng(p.v_out, "V"), p.n, p.q);
                    }
                    if let Some(p) = h.fastest_charge {
                        let _ = writeln!(w, "fastest charge        {} at {} stages", eng(p.charge_time, "s"), p.n);
                    }
                }
            }
        }
        let _ = writeln!(w);
        let _ = writeln!(w, "[summary]");
        for (k, v) in self.summary() {
            let _ = writeln!(w, "{k}={v}");
        }
        o
    }

    /// Machine-readable key/value pairs; units are part of the key names.
    pub fn summary(&self) -> Vec<(&'static str, String)> {
        let mut v = vec![
            ("f0_hz", format!("{:e}", self.f0)),
            ("zp1_ohm", format!("{:e}", self.ports.zp1)),
            ("zp2_ohm", format!("{:e}", self.ports.zp2)),
            ("k", format!("{:e}", self.k)),
            ("l_opt_h", format!("{:e}", self.l_opt)),
            ("l1_target_h", format!("{:e}", self.l_targets.0)),
            ("l2_target_h", format!("{:e}", self.l_targets.1)),
            ("tx_turns", self.tx.candidate.geometry.n.to_string()),
            ("tx_l_h", format!("{:e}", self.tx.candidate.inductance)),
            ("tx_r_ohm", format!("{:e}", self.tx.r_ac)),
            ("tx_area_m2", format!("{:e}", self.tx.candidate.geometry.area)),
            ("rx_turns", self.rx.candidate.geometry.n.to_string()),
            ("rx_l_h", format!("{:e}", self.rx.candidate.inductance)),
            ("rx_r_ohm", format!("{:e}", self.rx.r_ac)),
            ("rx_area_m2", format!("{:e}", self.rx.candidate.geometry.area)),
            ("f_opt_hz", format!("{:e}", self.f_opt_bare)),
            ("extracted_l1_h", format!("{:e}", self.extracted.l1)),
            ("extracted_l2_h", format!("{:e}", self.extracted.l2)),
            ("extracted_r1_ohm", format!("{:e}", self.extracted.r1)),
            ("extracted_r2_ohm", format!("{:e}", self.extracted.r2)),
            ("extracted_k", format!("{:e}", self.extracted.k)),
            ("imn_solutions", self.imn.solutions.len().to_string()),
            ("s11_db", format!("{:e}", self.matched.s11_db)),
            ("s22_db", format!("{:e}", self.matched.s22_db)),
            ("s21_db", format!("{:e}", self.matched.s21_db)),
            ("gamma", format!("{:e}", self.gamma)),
            ("pte", format!("{:e}", self.pte)),
            ("pte_max", self.pte_max.pte_max.map_or("flagged".into(), |p| format!("{p:e}"))),
            ("k_r", format!("{:e}", self.pte_max.k_r)),
        ];
        if let Some(s) = self.imn.solutions.first() {
            v.push(("imn_case", s.imn.topology_case.to_string()));
        }
        if let Some(s) = &self.sar {
            v.push(("pdl_max_w", format!("{:e}", s.pdl_max)));
        }
        if let Some((spec, _)) = self.harvester.as_ref().and_then(|h| h.chosen.as_ref()) {
            v.push(("harvester_stages", spec.n_stages.to_string()));
        }
        v
    }
}
