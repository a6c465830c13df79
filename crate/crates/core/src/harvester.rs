//! N-stage subthreshold rectifier: DC output, effective input RC and a grid
//! exploration of stage count against boost quality factor.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Thermal voltage at 310 K, V.
pub const DEFAULT_VT: f64 = 26.7e-3;
/// Off-chip boost inductor, H.
pub const BOOST_L: f64 = 6.33e-6;
/// On-chip boost capacitor, F.
pub const BOOST_C: f64 = 10e-12;

/// Above this argument the asymptotic expansion is used.
const I0_SWITCH: f64 = 15.0;

fn i0_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let (mut term, mut sum, mut k) = (1.0_f64, 1.0_f64, 0.0_f64);
    loop {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
    }
}

/// `I0(x) exp(-x) sqrt(2 pi x)` from the large-argument expansion.
fn i0_asymptotic_scaled(x: f64) -> f64 {
    let (mut term, mut sum) = (1.0_f64, 1.0_f64);
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (8.0 * k as f64 * x);
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Zeroth-order modified Bessel function of the first kind.
pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x < I0_SWITCH {
        i0_series(x)
    } else {
        i0_asymptotic_scaled(x) * x.exp() / (2.0 * PI * x).sqrt()
    }
}

/// `ln I0(x)`, finite for arguments where `I0` itself overflows.
pub fn ln_bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x < I0_SWITCH {
        i0_series(x).ln()
    } else {
        x + i0_asymptotic_scaled(x).ln() - 0.5 * (2.0 * PI * x).ln()
    }
}

/// Rectified DC output of an `n`-stage subthreshold chain.
pub fn v_out(n: u32, v_rx: f64, v_t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("stage count must be >= 1".into()));
    }
    if !(v_rx >= 0.0 && v_rx.is_finite()) {
        return Err(Error::InvalidInput(format!("v_rx must be >= 0, got {v_rx}")));
    }
    if !(v_t > 0.0 && v_t.is_finite()) {
        return Err(Error::InvalidInput(format!("v_t must be > 0, got {v_t}")));
    }
    Ok(2.0 * n as f64 * v_t * ln_bessel_i0(v_rx / v_t))
}

/// Smallest stage count reaching `target` volts, by direct inversion.
pub fn min_stages(target: f64, v_rx: f64, v_t: f64) -> Result<u32> {
    let per_stage = v_out(1, v_rx, v_t)?;
    if per_stage <= 0.0 {
        return Err(Error::Infeasible { stage: "harvester".into(), detail: "zero input amplitude".into() });
    }
    Ok(((target / per_stage).ceil().max(1.0)) as u32)
}

/// Parallel-equivalent input of the rectifier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RectifierInput {
    pub r_rect: f64,
    pub c_rect: f64,
}

impl RectifierInput {
    /// False for inductive inputs, where `c_rect` comes out negative.
    pub fn capacitive(&self) -> bool {
        self.c_rect >= 0.0
    }

    /// Impedance of the parallel RC at `f`.
    pub fn impedance(&self, f: f64) -> Complex64 {
        let y = Complex64::new(1.0 / self.r_rect, 2.0 * PI * f * self.c_rect);
        1.0 / y
    }
}

pub fn rect_input(z_in_eh: Complex64, f: f64) -> Result<RectifierInput> {
    if !(z_in_eh.re > 0.0 && z_in_eh.re.is_finite() && z_in_eh.im.is_finite()) {
        return Err(Error::InvalidInput(format!("rectifier input {z_in_eh} needs a positive real part")));
    }
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::InvalidInput(format!("frequency must be positive, got {f}")));
    }
    let mag2 = z_in_eh.norm_sqr();
    Ok(RectifierInput {
        r_rect: mag2 / z_in_eh.re,
        c_rect: -z_in_eh.im / (2.0 * PI * f * mag2),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarvesterSpec {
    pub n_stages: u32,
    pub v_t: f64,
    pub q_boost: f64,
    pub c_store: f64,
    pub f0: f64,
    pub z_in_eh: Complex64,
}

/// How the rectifier input impedance scales with stage count.
#[derive(Clone, Debug, PartialEq)]
pub enum ZinModel {
    /// Stages stacked in series at the input: `N (R_s || C_s)`, i.e.
    /// R = N R_s, C = C_s / N.
    SeriesStack { r_stage: f64, c_stage: f64 },
    /// Stages in parallel: `(R_s / N) || (N C_s)`.
    ParallelStack { r_stage: f64, c_stage: f64 },
    /// Tabulated impedance per stage count; counts missing from the table
    /// are skipped.
    Table(Vec<(u32, Complex64)>),
}

impl ZinModel {
    pub fn z_in(&self, n: u32, f: f64) -> Option<Complex64> {
        let w = 2.0 * PI * f;
        let par = |r: f64, c: f64| 1.0 / Complex64::new(1.0 / r, w * c);
        let nf = n as f64;
        match self {
            Self::SeriesStack { r_stage, c_stage } => Some(par(r_stage * nf, c_stage / nf)),
            Self::ParallelStack { r_stage, c_stage } => Some(par(r_stage / nf, c_stage * nf)),
            Self::Table(rows) => rows.iter().find(|(m, _)| *m == n).map(|(_, z)| *z),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::SeriesStack { r_stage, c_stage } | Self::ParallelStack { r_stage, c_stage } => {
                if !(*r_stage > 0.0 && *c_stage >= 0.0 && r_stage.is_finite() && c_stage.is_finite()) {
                    return Err(Error::InvalidInput("stage R must be > 0 and C >= 0".into()));
                }
            }
            Self::Table(rows) => {
                if rows.is_empty() {
                    return Err(Error::InvalidInput("impedance table is empty".into()));
                }
            }
        }
        Ok(())
    }
}

impl Default for ZinModel {
    fn default() -> Self {
        Self::SeriesStack { r_stage: 2.0e3, c_stage: 1.0e-12 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarvesterConstraints {
    pub n_min: u32,
    pub n_max: u32,
    pub q_values: Vec<f64>,
    pub max_charge_time: f64,
    /// Source impedance the rectifier should conjugate-match.
    pub tissue_z: Complex64,
    pub i_load: f64,
    pub c_store: f64,
    pub v_t: f64,
    pub f0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignPoint {
    pub n: u32,
    pub q: f64,
    pub r_rect: f64,
    pub c_rect: f64,
    pub v_out: f64,
    pub charge_time: f64,
    pub match_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignSpace {
    pub table: Vec<DesignPoint>,
    pub chosen: Option<(HarvesterSpec, DesignPoint)>,
    /// When nothing is feasible: the highest-output point and the
    /// fastest-charging point.
    pub best_output: Option<DesignPoint>,
    pub fastest_charge: Option<DesignPoint>,
}

impl DesignSpace {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,q,r_rect,c_rect,v_out,charge_time,match_residual\n");
        for p in &self.table {
            let _ = writeln!(s, "{},{},{},{},{},{},{}", p.n, p.q, p.r_rect, p.c_rect, p.v_out, p.charge_time, p.match_residual);
        }
        s
    }
}

/// Grid exploration over stage count and boost Q. Picks the smallest
/// feasible stage count, then the best conjugate-match residual, then the
/// smallest Q.
pub fn design_space(v_rx: f64, target_v_out: f64, c: &HarvesterConstraints, model: &ZinModel) -> Result<DesignSpace> {
    if c.q_values.is_empty() || c.n_min == 0 || c.n_min > c.n_max {
        return Err(Error::Infeasible { stage: "harvester".into(), detail: "empty stage or Q range".into() });
    }
    if c.q_values.iter().any(|q| !(*q >= 1.0 && q.is_finite())) {
        return Err(Error::InvalidInput("boost Q values must be >= 1".into()));
    }
    if !(c.i_load > 0.0 && c.c_store > 0.0 && c.v_t > 0.0 && c.f0 > 0.0 && c.max_charge_time > 0.0) {
        return Err(Error::InvalidInput("i_load, c_store, v_t, f0 and max_charge_time must be positive".into()));
    }
    model.validate()?;
    let grid: Vec<(u32, f64)> = (c.n_min..=c.n_max).flat_map(|n| c.q_values.iter().map(move |q| (n, *q))).collect();
    let table: Vec<DesignPoint> = grid
        .into_par_iter()
        .map(|(n, q)| -> Result<Option<DesignPoint>> {
            let Some(z) = model.z_in(n, c.f0) else { return Ok(None) };
            let rect = rect_input(z, c.f0)?;
            let zs = c.tissue_z;
            let residual = ((z - zs.conj()) / (z + zs)).norm();
            let r_out = n as f64 * c.v_t / c.i_load;
            Ok(Some(DesignPoint {
                n,
                q,
                r_rect: rect.r_rect,
                c_rect: rect.c_rect,
                v_out: v_out(n, q * v_rx, c.v_t)?,
                charge_time: 3.0 * r_out * c.c_store,
                match_residual: residual,
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let feasible = |p: &&DesignPoint| p.v_out >= target_v_out && p.charge_time <= c.max_charge_time;
    let chosen = table
        .iter()
        .filter(feasible)
        .min_by(|a, b| {
            a.n.cmp(&b.n)
                .then(a.match_residual.total_cmp(&b.match_residual))
                .then(a.q.total_cmp(&b.q))
        })
        .map(|p| {
            let spec = HarvesterSpec {
                n_stages: p.n,
                v_t: c.v_t,
                q_boost: p.q,
                c_store: c.c_store,
                f0: c.f0,
                z_in_eh: model.z_in(p.n, c.f0).unwrap_or_default(),
            };
            (spec, *p)
        });
    let (best_output, fastest_charge) = if chosen.is_some() {
        (None, None)
    } else {
        (
            table.iter().copied().max_by(|a, b| a.v_out.total_cmp(&b.v_out).then(b.n.cmp(&a.n))),
            table.iter().copied().min_by(|a, b| a.charge_time.total_cmp(&b.charge_time).then(a.n.cmp(&b.n))),
        )
    };
    Ok(DesignSpace { table, chosen, best_output, fastest_charge })
}
