use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;

use nric::coil::{f_opt, CoilPair};
use nric::design::{eng, run_design, DesignSpecFile, HarvesterCfg};
use nric::imn::synthesize_imn;
use nric::spiral::{inductance, synthesize, FabConstraints, ShapeCoefficients};
use nric::sweep::{frequencies, sweep, to_csv, NetworkSource, Scale, DEFAULT_POINTS};
use nric::tissue::{complex_permittivity, effective_conductivity, import_override, parse_layer_file, TissueStack, IMPORT_RECIPROCITY_TOL};
use nric::touchstone::{read_touchstone, write_touchstone};
use nric::{Error, PortPair, Result};

#[derive(Parser)]
#[command(name = "nric", version, about = "Inductive wireless power link design")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Assert that no randomness is used. Every command is deterministic,
    /// so this only documents intent in scripts.
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Linear,
    Log,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full design flow on a TOML spec.
    Design { spec: PathBuf },
    /// Frequency sweep of a coil pair, a designed link or an s2p file.
    Sweep(SweepArgs),
    /// Synthesize L-section matching networks at f0.
    Match(MatchArgs),
    /// Planar spiral commands.
    Coil {
        #[command(subcommand)]
        cmd: CoilCmd,
    },
    /// Tissue commands.
    Tissue {
        #[command(subcommand)]
        cmd: TissueCmd,
    },
    /// Rectifier commands.
    Harvester {
        #[command(subcommand)]
        cmd: HarvesterCmd,
    },
    /// Touchstone commands.
    S2p {
        #[command(subcommand)]
        cmd: S2pCmd,
    },
}

#[derive(Args, Clone)]
struct PairArgs {
    #[arg(long)]
    l1: Option<f64>,
    #[arg(long)]
    l2: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    r1: f64,
    #[arg(long, default_value_t = 0.5)]
    r2: f64,
    #[arg(long)]
    k: Option<f64>,
    /// Touchstone file used instead of an analytic pair.
    #[arg(long)]
    s2p: Option<PathBuf>,
    #[arg(long, default_value_t = 50.0)]
    zp1: f64,
    #[arg(long, default_value_t = 50.0)]
    zp2: f64,
}

impl PairArgs {
    fn ports(&self) -> Result<PortPair> {
        PortPair::new(self.zp1, self.zp2)
    }

    fn coils(&self) -> Result<Option<CoilPair>> {
        match (self.l1, self.l2, self.k) {
            (Some(l1), Some(l2), Some(k)) => Ok(Some(CoilPair::new(l1, l2, self.r1, self.r2, k)?)),
            (None, None, None) => Ok(None),
            _ => Err(Error::InvalidInput("--l1, --l2 and --k must be given together".into())),
        }
    }

    fn source(&self) -> Result<NetworkSource> {
        if let Some(path) = &self.s2p {
            let rec = read_touchstone(path)?;
            return Ok(NetworkSource::Imported(import_override(&rec.to_networks()?, IMPORT_RECIPROCITY_TOL)?));
        }
        match self.coils()? {
            Some(coils) => Ok(NetworkSource::Analytic { coils, tissue: None, imn: None }),
            None => Err(Error::InvalidInput("give --l1/--l2/--k, --s2p or --spec".into())),
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Sweep the matched link produced by this design spec.
    #[arg(long, conflicts_with = "s2p")]
    spec: Option<PathBuf>,
    /// Sweep the spec's coils without the matching network.
    #[arg(long, requires = "spec")]
    bare: bool,
    #[arg(long)]
    f0: Option<f64>,
    #[arg(long)]
    f_start: Option<f64>,
    #[arg(long)]
    f_stop: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum, default_value_t = ScaleArg::Log)]
    scale: ScaleArg,
}

#[derive(Args)]
struct MatchArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    f0: f64,
}

#[derive(Subcommand)]
enum CoilCmd {
    /// List spiral layouts within 1% of a target inductance.
    Synth {
        /// Target inductance, H.
        #[arg(long)]
        target: f64,
        /// Area cap, m^2.
        #[arg(long)]
        max_area: f64,
        #[arg(long, default_value = "square")]
        shape: String,
        /// Rows printed in text mode.
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
}

#[derive(Subcommand)]
enum TissueCmd {
    /// Permittivity and conductivity of each layer across frequency.
    Table {
        /// Layer file; defaults to skin/fat/muscle.
        #[arg(long)]
        layers: Option<PathBuf>,
        #[arg(long, default_value_t = 1e6)]
        f_start: f64,
        #[arg(long, default_value_t = 1e9)]
        f_stop: f64,
        #[arg(long, default_value_t = 31)]
        points: usize,
    },
}

#[derive(Subcommand)]
enum HarvesterCmd {
    /// Stage-count / boost-Q grid from a TOML file with `f0` and `[harvester]`.
    Explore { spec: PathBuf },
}

#[derive(Subcommand)]
enum S2pCmd {
    /// Rewrite a Touchstone file as RI data in Hz.
    Convert { input: PathBuf, output: PathBuf },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HarvesterFile {
    f0: f64,
    harvester: HarvesterCfg,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<String> {
    match &cli.cmd {
        Command::Design { spec } => {
            let (spec, base) = DesignSpecFile::load(spec)?;
            let report = run_design(&spec, &base)?;
            Ok(match cli.format {
                Format::Text => report.render(),
                Format::Csv => {
                    let mut s = String::from("key,value\n");
                    for (k, v) in report.summary() {
                        let _ = writeln!(s, "{k},{v}");
                    }
                    s
                }
            })
        }
        Command::Sweep(a) => {
            let (source, ports, f0) = match &a.spec {
                Some(path) => {
                    let (spec, base) = DesignSpecFile::load(path)?;
                    let r = run_design(&spec, &base)?;
                    let imn = if a.bare { None } else { r.imn.solutions.first().map(|s| s.imn) };
                    (NetworkSource::Analytic { coils: r.coils, tissue: r.tissue, imn }, r.ports, Some(r.f0))
                }
                None => {
                    let src = a.pair.source()?;
                    let f0 = match (&src, a.f0) {
                        (_, Some(f)) => Some(f),
                        (NetworkSource::Analytic { coils, .. }, None) => Some(f_opt(coils, &a.pair.ports()?)?),
                        _ => None,
                    };
                    (src, a.pair.ports()?, f0)
                }
            };
            let scale = match a.scale {
                ScaleArg::Linear => Scale::Linear,
                ScaleArg::Log => Scale::Log,
            };
            let freqs = match (&source, a.f_start, a.f_stop, f0) {
                (NetworkSource::Imported(t), None, None, _) if a.points.is_none() => t.frequencies().to_vec(),
                (_, Some(lo), Some(hi), _) => frequencies(lo, hi, a.points.unwrap_or(DEFAULT_POINTS), scale)?,
                (_, None, None, Some(f0)) => frequencies(f0 / 10.0, f0 * 10.0, a.points.unwrap_or(DEFAULT_POINTS), scale)?,
                _ => return Err(Error::InvalidInput("give both --f-start and --f-stop, or --f0".into())),
            };
            Ok(to_csv(&sweep(&source, &freqs, ports)?))
        }
        Command::Match(a) => {
            let ports = a.pair.ports()?;
            let s = a.pair.source()?.network(a.f0, ports)?;
            let syn = synthesize_imn(&s, ports, a.f0)?;
            let mut o = String::new();
            match cli.format {
                Format::Csv => {
                    o.push_str("rank,case,tx_series,tx_series_value,tx_shunt,tx_shunt_value,rx_series,rx_series_value,rx_shunt,rx_shunt_value,s11_db,s22_db,s21_db\n");
                    for (i, sol) in syn.solutions.iter().enumerate() {
                        let _ = write!(o, "{},{}", i + 1, sol.imn.topology_case);
                        for e in sol.imn.elements() {
                            let _ = write!(o, ",{},{}", e.kind.name(), e.value);
                        }
                        let _ = writeln!(o, ",{},{},{}", sol.report.s11_db, sol.report.s22_db, sol.report.s21_db);
                    }
                }
                Format::Text => {
                    if syn.already_matched {
                        o.push_str("ports already matched; no network required\n");
                    }
                    for (i, sol) in syn.solutions.iter().enumerate() {
                        let el = sol.imn.elements().map(|e| format!("{} {}", e.kind.name(), eng(e.value, e.kind.unit())));
                        let _ = writeln!(
                            o,
                            "#{:<2} case {}  TX: {}, {}  RX: {}, {}  S11 {:.1} dB  S22 {:.1} dB  S21 {:.3} dB",
                            i + 1,
                            sol.imn.topology_case,
                            el[0],
                            el[1],
                            el[2],
                            el[3],
                            sol.report.s11_db,
                            sol.report.s22_db,
                            sol.report.s21_db
                        );
                    }
                }
            }
            Ok(o)
        }
        Command::Coil { cmd: CoilCmd::Synth { target, max_area, shape, limit } } => {
            let shape = ShapeCoefficients::from_name(shape)?;
            let fab = FabConstraints::default().with_max_area(*max_area);
            let out = synthesize(*target, &fab, &shape)?;
            if out.candidates.is_empty() {
                let detail = out.nearest_miss.map_or("nothing fits the area cap".to_string(), |m| {
                    format!("nearest miss {} at {} turns", eng(m.candidate.inductance, "H"), m.candidate.geometry.n)
                });
                return Err(Error::Infeasible { stage: "coil synthesis".into(), detail });
            }
            let mut o = String::new();
            if cli.format == Format::Csv {
                o.push_str("n,r_m,dr_m,w_m,t_m,area_m2,fill_ratio,l_h,rel_error\n");
            }
            let rows = if cli.format == Format::Csv { out.candidates.len() } else { *limit };
            for c in out.candidates.iter().take(rows) {
                let g = &c.geometry;
                let l = inductance(g)?;
                if cli.format == Format::Csv {
                    let _ = writeln!(o, "{},{},{},{},{},{},{},{},{}", g.n, g.r, g.dr, g.w, g.t, g.area, g.phi, l, c.rel_error);
                } else {
                    let _ = writeln!(
                        o,
                        "n = {:>2} turns  r = {}  dr = {}  w = {}  area = {:.3e} m^2  L = {}",
                        g.n,
                        eng(g.r, "m"),
                        eng(g.dr, "m"),
                        eng(g.w, "m"),
                        g.area,
                        eng(l, "H")
                    );
                }
            }
            Ok(o)
        }
        Command::Tissue { cmd: TissueCmd::Table { layers, f_start, f_stop, points } } => {
            let stack = match layers {
                Some(p) => parse_layer_file(&read_text(p)?, 1e-4)?,
                None => TissueStack::default_body(1e-4)?,
            };
            let mut o = String::from("f_hz,layer,eps_real,eps_imag,sigma_s_per_m\n");
            for f in frequencies(*f_start, *f_stop, *points, Scale::Log)? {
                for l in &stack.layers {
                    let e = complex_permittivity(l, f);
                    let _ = writeln!(o, "{f},{},{},{},{}", l.name, e.re, e.im, effective_conductivity(l, f));
                }
            }
            Ok(o)
        }
        Command::Harvester { cmd: HarvesterCmd::Explore { spec } } => {
            let text = read_text(spec)?;
            let file: HarvesterFile = toml::from_str(&text).map_err(|e| Error::Parse {
                line: e.span().map_or(1, |s| text[..s.start.min(text.len())].matches('\n').count() + 1),
                message: e.message().to_string(),
            })?;
            let ds = file.harvester.explore(file.f0, Complex64::new(50.0, 0.0))?;
            if cli.format == Format::Csv {
                return Ok(ds.to_csv());
            }
            let mut o = String::new();
            match &ds.chosen {
                Some((s, p)) => {
                    let _ = writeln!(o, "stages        {} stages", s.n_stages);
                    let _ = writeln!(o, "boost Q       {:.3} (dimensionless)", s.q_boost);
                    let _ = writeln!(o, "V_out         {}", eng(p.v_out, "V"));
                    let _ = writeln!(o, "R_rect        {}", eng(p.r_rect, "ohm"));
                    let _ = writeln!(o, "C_rect        {}", eng(p.c_rect, "F"));
                    let _ = writeln!(o, "charge time   {}", eng(p.charge_time, "s"));
                    Ok(o)
                }
                None => {
                    let mut detail = String::from("no grid point meets both targets");
                    if let Some(p) = ds.best_output {
                        let _ = write!(detail, "; highest output {} at {} stages", eng(p.v_out, "V"), p.n);
                    }
                    if let Some(p) = ds.fastest_charge {
                        let _ = write!(detail, "; fastest charge {} at {} stages", eng(p.charge_time, "s"), p.n);
                    }
                    Err(Error::Infeasible { stage: "harvester".into(), detail })
                }
            }
        }
        Command::S2p { cmd: S2pCmd::Convert { input, output } } => {
            let rec = read_touchstone(input)?;
            write_touchstone(&rec, output)?;
            Ok(format!("wrote {} rows to {}\n", rec.freqs.len(), output.display()))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 4,
        Error::Infeasible { .. } | Error::Degenerate(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nric: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
