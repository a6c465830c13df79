//! Touchstone v1 two-port (`.s2p`) reading and writing.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::netcore::{PortPair, TwoPortMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataFormat {
    /// Real, imaginary.
    Ri,
    /// Magnitude, angle in degrees.
    Ma,
    /// 20 log10 magnitude, angle in degrees.
    Db,
}

impl DataFormat {
    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RI" => Some(Self::Ri),
            "MA" => Some(Self::Ma),
            "DB" => Some(Self::Db),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ri => "RI",
            Self::Ma => "MA",
            Self::Db => "DB",
        }
    }

    pub fn decode(self, a: f64, b: f64) -> Complex64 {
        match self {
            Self::Ri => Complex64::new(a, b),
            Self::Ma => Complex64::from_polar(a, b.to_radians()),
            Self::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    pub fn encode(self, z: Complex64) -> (f64, f64) {
        match self {
            Self::Ri => (z.re, z.im),
            Self::Ma => (z.norm(), z.arg().to_degrees()),
            Self::Db => (20.0 * z.norm().log10(), z.arg().to_degrees()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FreqUnit {
    fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "HZ" => Some(Self::Hz),
            "KHZ" => Some(Self::KHz),
            "MHZ" => Some(Self::MHz),
            "GHZ" => Some(Self::GHz),
            _ => None,
        }
    }

    pub fn scale(self) -> f64 {
        match self {
            Self::Hz => 1.0,
            Self::KHz => 1e3,
            Self::MHz => 1e6,
            Self::GHz => 1e9,
        }
    }
}

/// Parsed two-port file. Frequencies are stored in hertz and data as
/// complex S-parameters `[[S11, S12], [S21, S22]]`, whatever the file
/// encoding was.
#[derive(Clone, Debug, PartialEq)]
pub struct TouchstoneRecord {
    pub freqs: Vec<f64>,
    pub data: Vec<[[Complex64; 2]; 2]>,
    pub format: DataFormat,
    pub unit: FreqUnit,
    pub r_ref: f64,
}

impl TouchstoneRecord {
    pub fn from_networks(rows: &[(f64, TwoPortMatrix)], r_ref: f64) -> Result<Self> {
        let ports = PortPair::new(r_ref, r_ref)?;
        let mut freqs = Vec::with_capacity(rows.len());
        let mut data = Vec::with_capacity(rows.len());
        for (f, net) in rows {
            freqs.push(*f);
            data.push(net.to_s(ports)?.matrix());
        }
        let rec = Self { freqs, data, format: DataFormat::Ri, unit: FreqUnit::Hz, r_ref };
        rec.check_monotone()?;
        Ok(rec)
    }

    pub fn ports(&self) -> PortPair {
        PortPair { zp1: self.r_ref, zp2: self.r_ref }
    }

    pub fn to_networks(&self) -> Result<Vec<(f64, TwoPortMatrix)>> {
        let ports = PortPair::new(self.r_ref, self.r_ref)?;
        self.freqs
            .iter()
            .zip(&self.data)
            .map(|(f, m)| Ok((*f, TwoPortMatrix::s(*m, ports)?)))
            .collect()
    }

    fn check_monotone(&self) -> Result<()> {
        for (i, w) in self.freqs.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::Table { row: i + 1, message: format!("frequency {} does not increase", w[1]) });
            }
        }
        Ok(())
    }
}

/// Fields may come in any order; missing ones take the v1 defaults
/// (GHz, S, MA, 50 ohm).
fn parse_option_line(line: &str, lineno: usize) -> Result<(FreqUnit, DataFormat, f64)> {
    let err = |m: String| Error::Parse { line: lineno, message: m };
    let (mut unit, mut fmt, mut r_ref) = (FreqUnit::GHz, DataFormat::Ma, 50.0_f64);
    let mut tokens = line.trim_start_matches('#').split_whitespace();
    while let Some(tok) = tokens.next() {
        if let Some(u) = FreqUnit::parse(tok) {
            unit = u;
        } else if let Some(f) = DataFormat::parse(tok) {
            fmt = f;
        } else if tok.eq_ignore_ascii_case("S") {
        } else if tok.eq_ignore_ascii_case("R") {
            let value = tokens.next().ok_or_else(|| err("`R` needs a reference resistance".into()))?;
            r_ref = value.parse().map_err(|_| err(format!("bad reference resistance `{value}`")))?;
            if !(r_ref > 0.0 && r_ref.is_finite()) {
                return Err(err("reference resistance must be positive".into()));
            }
        } else if ["Y", "Z", "H", "G"].iter().any(|p| tok.eq_ignore_ascii_case(p)) {
            return Err(err(format!("only S parameters are supported, got `{tok}`")));
        } else {
            return Err(err(format!("unrecognised option `{tok}`")));
        }
    }
    Ok((unit, fmt, r_ref))
}

pub fn parse_touchstone(text: &str) -> Result<TouchstoneRecord> {
    let mut option: Option<(FreqUnit, DataFormat, f64)> = None;
    let mut freqs = Vec::new();
    let mut data = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if option.is_some() {
                return Err(Error::Parse { line: lineno, message: "duplicate option line".into() });
            }
            option = Some(parse_option_line(line, lineno)?);
            continue;
        }
        let Some((unit, fmt, _)) = option else {
            return Err(Error::Parse { line: lineno, message: "data before option line".into() });
        };
        let vals = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::Parse { line: lineno, message: format!("bad number `{t}`") }))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 9 {
            return Err(Error::Parse { line: lineno, message: format!("expected 9 columns, found {}", vals.len()) });
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse { line: lineno, message: "non-finite value".into() });
        }
        let f = vals[0] * unit.scale();
        if let Some(&prev) = freqs.last() {
            if f <= prev {
                return Err(Error::Parse { line: lineno, message: format!("frequency {f} Hz does not increase") });
            }
        }
        let c = |i: usize| fmt.decode(vals[i], vals[i + 1]);
        // v1 column order: S11, S21, S12, S22
        freqs.push(f);
        data.push([[c(1), c(5)], [c(3), c(7)]]);
    }
    let Some((unit, format, r_ref)) = option else {
        return Err(Error::Parse { line: text.lines().count().max(1), message: "missing option line".into() });
    };
    if freqs.is_empty() {
        return Err(Error::Parse { line: text.lines().count().max(1), message: "no data rows".into() });
    }
    Ok(TouchstoneRecord { freqs, data, format, unit, r_ref })
}

/// Always RI with frequencies in Hz; numbers use shortest round-trip form.
pub fn format_touchstone(rec: &TouchstoneRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "! two-port S-parameters");
    let _ = writeln!(s, "# HZ S RI R {}", rec.r_ref);
    for (f, m) in rec.freqs.iter().zip(&rec.data) {
        let _ = write!(s, "{f:e}");
        for z in [m[0][0], m[1][0], m[0][1], m[1][1]] {
            let _ = write!(s, " {:e} {:e}", z.re, z.im);
        }
        s.push('\n');
    }
    s
}

pub fn read_touchstone(path: impl AsRef<Path>) -> Result<TouchstoneRecord> {
    parse_touchstone(&std::fs::read_to_string(path)?)
}

pub fn write_touchstone(rec: &TouchstoneRecord, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_touchstone(rec))?;
    Ok(())
}
