//! Frequency sweeps of an analytic link or an imported table, as CSV.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::coil::{coil_abcd, CoilPair};
use crate::error::{Error, Result};
use crate::imn::{assemble_link, LSectionIMN};
use crate::link_eval::{pte_link, pte_max};
use crate::netcore::{db, PortPair, TwoPortMatrix};
use crate::tissue::{modified_coil_abcd, ImportedTable, TissueStack};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// Number of points used when the caller does not choose.
pub const DEFAULT_POINTS: usize = 1001;

pub fn frequencies(f_start: f64, f_stop: f64, points: usize, scale: Scale) -> Result<Vec<f64>> {
    if !(f_start > 0.0 && f_start < f_stop && f_stop.is_finite()) {
        return Err(Error::InvalidInput(format!("need 0 < f_start < f_stop, got {f_start}..{f_stop}")));
    }
    if points < 2 {
        return Err(Error::InvalidInput("a sweep needs at least 2 points".into()));
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let t = i as f64 / last;
            match scale {
                Scale::Linear => f_start + (f_stop - f_start) * t,
                Scale::Log => f_start * (f_stop / f_start).powf(t),
            }
        })
        .collect())
}

/// Default sweep: one decade either side of `f0`, log spaced.
pub fn default_frequencies(f0: f64) -> Result<Vec<f64>> {
    frequencies(f0 / 10.0, f0 * 10.0, DEFAULT_POINTS, Scale::Log)
}

pub enum NetworkSource {
    /// Coil pair, optionally embedded in tissue and wrapped by a fixed IMN.
    Analytic {
        coils: CoilPair,
        tissue: Option<TissueStack>,
        imn: Option<LSectionIMN>,
    },
    Imported(ImportedTable),
}

impl NetworkSource {
    pub fn network(&self, f: f64, ports: PortPair) -> Result<TwoPortMatrix> {
        match self {
            Self::Analytic { coils, tissue, imn } => {
                let mut t = coil_abcd(coils, f)?;
                if let Some(stack) = tissue {
                    t = modified_coil_abcd(&t, stack, f)?;
                }
                if let Some(imn) = imn {
                    t = assemble_link(imn, &t, f, ports)?.t_link;
                }
                t.to_s(ports)
            }
            Self::Imported(table) => table.query(f)?.to_s(ports),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub f: f64,
    pub s11_db: f64,
    pub s21_db: f64,
    pub s22_db: f64,
    pub pte: f64,
    /// `None` where the maximum is undefined (flagged data).
    pub pte_max: Option<f64>,
}

/// Evaluates `source` at every frequency; rows keep the input order.
pub fn sweep(source: &NetworkSource, freqs: &[f64], ports: PortPair) -> Result<Vec<SweepRow>> {
    freqs
        .par_iter()
        .map(|&f| {
            let s = source.network(f, ports)?;
            let pm = if s.m21().norm() > 0.0 { pte_max(&s)?.pte_max } else { None };
            Ok(SweepRow {
                f,
                s11_db: db(s.m11()),
                s21_db: db(s.m21()),
                s22_db: db(s.m22()),
                pte: pte_link(s.m21(), &ports),
                pte_max: pm,
            })
        })
        .collect()
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("f_hz,s11_db,s21_db,s22_db,pte_pct,pte_max_pct\n");
    for r in rows {
        let pm = r.pte_max.map_or(String::new(), |p| (100.0 * p).to_string());
        let _ = writeln!(s, "{},{},{},{},{},{}", r.f, r.s11_db, r.s21_db, r.s22_db, 100.0 * r.pte, pm);
    }
    s
}
