//! C interface to the `nric` design library.
//!
//! Every fallible call returns an [`NricStatus`]; on failure the message is
//! kept per thread and can be fetched with [`nric_last_error_message`].
//! Objects are opaque handles released with their matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nric::coil::{coil_z, extract_params, f_opt, l_opt, s21_mag, CoilPair};
use nric::harvester::{bessel_i0, v_out};
use nric::imn::{synthesize_imn, ElementType, ImnSolution};
use nric::link_eval::{gamma, pte_max, sar_constrained_pdl};
use nric::netcore::{PortPair, TwoPortMatrix};
use nric::touchstone::{read_touchstone, write_touchstone, TouchstoneRecord};
use nric::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NricStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Degenerate = 3,
    Infeasible = 4,
    Parse = 5,
    Io = 6,
    Representation = 7,
    Table = 8,
    OutOfRange = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NricComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for NricComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<NricComplex> for Complex64 {
    fn from(z: NricComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Coil parameters recovered by [`nric_extract_coils`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NricCoilParams {
    pub l1: f64,
    pub l2: f64,
    pub r1: f64,
    pub r2: f64,
    pub k: f64,
    /// Non-zero when every value lies in its physical range.
    pub physical: u8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NricElementType {
    SeriesInductor = 0,
    SeriesCapacitor = 1,
    ShuntInductor = 2,
    ShuntCapacitor = 3,
}

impl From<ElementType> for NricElementType {
    fn from(k: ElementType) -> Self {
        match k {
            ElementType::SeriesInductor => Self::SeriesInductor,
            ElementType::SeriesCapacitor => Self::SeriesCapacitor,
            ElementType::ShuntInductor => Self::ShuntInductor,
            ElementType::ShuntCapacitor => Self::ShuntCapacitor,
        }
    }
}

/// One matching network. Element order: TX series, TX shunt, RX series,
/// RX shunt. Values in henry or farad.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NricImn {
    pub topology_case: u8,
    pub kinds: [NricElementType; 4],
    pub values: [f64; 4],
    pub s21_mag: f64,
    pub s11_db: f64,
    pub s22_db: f64,
}

/// Opaque coil pair.
pub struct NricCoilPair(CoilPair);
/// Opaque S-parameter two-port.
pub struct NricTwoPort(TwoPortMatrix);
/// Opaque ranked list of matching networks.
pub struct NricImnSet(Vec<ImnSolution>);
/// Opaque Touchstone record.
pub struct NricTouchstone(TouchstoneRecord);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> NricStatus {
    match e {
        Error::Degenerate(_) => NricStatus::Degenerate,
        Error::InvalidInput(_) => NricStatus::InvalidInput,
        Error::Representation { .. } => NricStatus::Representation,
        Error::Infeasible { .. } => NricStatus::Infeasible,
        Error::Parse { .. } => NricStatus::Parse,
        Error::Table { .. } => NricStatus::Table,
        Error::Io(_) => NricStatus::Io,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Range(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NricStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            NricStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            NricStatus::NullPointer
        }
        Ok(Err(Fail::Range(msg))) => {
            set_error(msg);
            NricStatus::OutOfRange
        }
        Err(_) => {
            set_error("internal panic".into());
            NricStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Fail> {
    if p.is_null() {
        return Err(Fail::Null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Fail::Lib(Error::InvalidInput("path is not valid UTF-8".into())))
}

fn ports(zp1: f64, zp2: f64) -> Result<PortPair, Fail> {
    Ok(PortPair::new(zp1, zp2)?)
}

/// Byte length of the last error message on this thread, without the NUL.
#[no_mangle]
pub extern "C" fn nric_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to
/// `len - 1` bytes). Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn nric_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn nric_coil_pair_new(l1: f64, l2: f64, r1: f64, r2: f64, k: f64, out: *mut *mut NricCoilPair) -> NricStatus {
    guard(|| {
        let pair = CoilPair::new(l1, l2, r1, r2, k)?;
        write_out(out, Box::into_raw(Box::new(NricCoilPair(pair))), "out")
    })
}

/// # Safety
/// `pair` must be null or a handle from [`nric_coil_pair_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn nric_coil_pair_free(pair: *mut NricCoilPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Geometric-mean inductance placing the bare-link |S21| peak at `f_target`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_l_opt(f_target: f64, r1: f64, r2: f64, zp1: f64, zp2: f64, k: f64, out: *mut f64) -> NricStatus {
    guard(|| write_out(out, l_opt(f_target, r1, r2, &ports(zp1, zp2)?, k)?, "out"))
}

/// # Safety
/// `pair` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_f_opt(pair: *const NricCoilPair, zp1: f64, zp2: f64, out: *mut f64) -> NricStatus {
    guard(|| {
        let p = deref(pair, "pair")?;
        write_out(out, f_opt(&p.0, &ports(zp1, zp2)?)?, "out")
    })
}

/// # Safety
/// `pair` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_s21_mag(pair: *const NricCoilPair, zp1: f64, zp2: f64, f: f64, out: *mut f64) -> NricStatus {
    guard(|| {
        let p = deref(pair, "pair")?;
        write_out(out, s21_mag(&p.0, &ports(zp1, zp2)?, f)?, "out")
    })
}

/// S-parameters of the bare coil pair at `f`.
///
/// # Safety
/// `pair` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_coil_s_params(pair: *const NricCoilPair, f: f64, zp1: f64, zp2: f64, out: *mut *mut NricTwoPort) -> NricStatus {
    guard(|| {
        let p = deref(pair, "pair")?;
        let s = coil_z(&p.0, f)?.to_s(ports(zp1, zp2)?)?;
        write_out(out, Box::into_raw(Box::new(NricTwoPort(s))), "out")
    })
}

/// Builds a two-port from a row-major `[S11, S12, S21, S22]` array.
///
/// # Safety
/// `s` must point to four readable values; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_two_port_from_s(s: *const NricComplex, zp1: f64, zp2: f64, out: *mut *mut NricTwoPort) -> NricStatus {
    guard(|| {
        if s.is_null() {
            return Err(Fail::Null("s"));
        }
        let v = std::slice::from_raw_parts(s, 4);
        let m = [[v[0].into(), v[1].into()], [v[2].into(), v[3].into()]];
        let net = TwoPortMatrix::s(m, ports(zp1, zp2)?)?;
        write_out(out, Box::into_raw(Box::new(NricTwoPort(net))), "out")
    })
}

/// Entry `(row, col)` with zero-based indices.
///
/// # Safety
/// `tp` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_two_port_get(tp: *const NricTwoPort, row: usize, col: usize, out: *mut NricComplex) -> NricStatus {
    guard(|| {
        let t = deref(tp, "two_port")?;
        if row > 1 || col > 1 {
            return Err(Fail::Range(format!("index ({row}, {col}) outside a 2x2 matrix")));
        }
        write_out(out, t.0.matrix()[row][col].into(), "out")
    })
}

/// # Safety
/// `tp` must be null or a live handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn nric_two_port_free(tp: *mut NricTwoPort) {
    if !tp.is_null() {
        drop(Box::from_raw(tp));
    }
}

/// Maximum efficiency under simultaneous conjugate matching. Returns
/// `NRIC_STATUS_INFEASIBLE` (with `k_r` still written) when no bounded
/// maximum exists.
///
/// # Safety
/// `tp` must be a live handle; `pte`, `k_r` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_pte_max(tp: *const NricTwoPort, pte: *mut f64, k_r: *mut f64) -> NricStatus {
    guard(|| {
        let t = deref(tp, "two_port")?;
        let m = pte_max(&t.0)?;
        write_out(k_r, m.k_r, "k_r")?;
        let value = m.pte_max.ok_or_else(|| {
            Error::Infeasible { stage: "link-eval".into(), detail: format!("no bounded maximum (K = {})", m.k_r) }
        })?;
        write_out(pte, value, "pte")
    })
}

/// # Safety
/// `tp` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_extract_coils(tp: *const NricTwoPort, f: f64, out: *mut NricCoilParams) -> NricStatus {
    guard(|| {
        let t = deref(tp, "two_port")?;
        let x = extract_params(&t.0, f)?;
        write_out(out, NricCoilParams { l1: x.l1, l2: x.l2, r1: x.r1, r2: x.r2, k: x.k, physical: x.physical as u8 }, "out")
    })
}

/// Ranked matching networks for the bare pair at `f0`.
///
/// # Safety
/// `pair` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_imn_synthesize(pair: *const NricCoilPair, f0: f64, zp1: f64, zp2: f64, out: *mut *mut NricImnSet) -> NricStatus {
    guard(|| {
        let p = deref(pair, "pair")?;
        let t = nric::coil::coil_abcd(&p.0, f0)?;
        let syn = synthesize_imn(&t, ports(zp1, zp2)?, f0)?;
        write_out(out, Box::into_raw(Box::new(NricImnSet(syn.solutions))), "out")
    })
}

/// Number of networks in the set; 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nric_imn_count(set: *const NricImnSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// # Safety
/// `set` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_imn_get(set: *const NricImnSet, index: usize, out: *mut NricImn) -> NricStatus {
    guard(|| {
        let s = deref(set, "imn_set")?;
        let sol = s.0.get(index).ok_or_else(|| Fail::Range(format!("index {index} outside {} solutions", s.0.len())))?;
        let el = sol.imn.elements();
        let value = NricImn {
            topology_case: sol.imn.topology_case,
            kinds: el.map(|e| e.kind.into()),
            values: el.map(|e| e.value),
            s21_mag: sol.s21_mag,
            s11_db: sol.report.s11_db,
            s22_db: sol.report.s22_db,
        };
        write_out(out, value, "out")
    })
}

/// # Safety
/// `set` must be null or a live handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn nric_imn_free(set: *mut NricImnSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Rectified output of an `n`-stage chain.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_v_out(n: u32, v_rx: f64, v_t: f64, out: *mut f64) -> NricStatus {
    guard(|| write_out(out, v_out(n, v_rx, v_t)?, "out"))
}

/// Modified Bessel function `I0(x)`.
#[no_mangle]
pub extern "C" fn nric_bessel_i0(x: f64) -> f64 {
    bessel_i0(x)
}

/// Port-mismatch correction factor.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_gamma(zp1: f64, zp2: f64, out: *mut f64) -> NricStatus {
    guard(|| write_out(out, gamma(&ports(zp1, zp2)?), "out"))
}

/// Deliverable power when the transmitter is SAR-limited to `p_tx_max`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_sar_pdl(p_tx_max: f64, pte: f64, out: *mut f64) -> NricStatus {
    guard(|| write_out(out, sar_constrained_pdl(p_tx_max, pte)?.pdl_max, "out"))
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn nric_touchstone_read(path: *const c_char, out: *mut *mut NricTouchstone) -> NricStatus {
    guard(|| {
        let rec = read_touchstone(path_arg(path)?)?;
        write_out(out, Box::into_raw(Box::new(NricTouchstone(rec))), "out")
    })
}

/// Writes the record as RI data with frequencies in Hz.
///
/// # Safety
/// `ts` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nric_touchstone_write(ts: *const NricTouchstone, path: *const c_char) -> NricStatus {
    guard(|| {
        let t = deref(ts, "touchstone")?;
        write_touchstone(&t.0, path_arg(path)?)?;
        Ok(())
    })
}

/// Number of frequency rows; 0 for a null handle.
///
/// # Safety
/// `ts` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nric_touchstone_len(ts: *const NricTouchstone) -> usize {
    ts.as_ref().map_or(0, |t| t.0.freqs.len())
}

/// Reference resistance of the record; NaN for a null handle.
///
/// # Safety
/// `ts` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nric_touchstone_r_ref(ts: *const NricTouchstone) -> f64 {
    ts.as_ref().map_or(f64::NAN, |t| t.0.r_ref)
}

/// Row `index`: frequency in Hz and row-major `[S11, S12, S21, S22]`.
///
/// # Safety
/// `ts` must be a live handle; `freq` valid for writes; `s` valid for four writes.
#[no_mangle]
pub unsafe extern "C" fn nric_touchstone_row(ts: *const NricTouchstone, index: usize, freq: *mut f64, s: *mut NricComplex) -> NricStatus {
    guard(|| {
        let t = deref(ts, "touchstone")?;
        let n = t.0.freqs.len();
        if index >= n {
            return Err(Fail::Range(format!("row {index} outside {n} rows")));
        }
        if s.is_null() {
            return Err(Fail::Null("s"));
        }
        write_out(freq, t.0.freqs[index], "freq")?;
        let m = t.0.data[index];
        for (i, z) in [m[0][0], m[0][1], m[1][0], m[1][1]].into_iter().enumerate() {
            s.add(i).write(z.into());
        }
        Ok(())
    })
}

/// # Safety
/// `ts` must be null or a live handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn nric_touchstone_free(ts: *mut NricTouchstone) {
    if !ts.is_null() {
        drop(Box::from_raw(ts));
    }
}
