//! C ABI over the `ontic` crate.
//!
//! Every fallible call returns an [`OnticStatus`]; on failure a message is
//! kept per thread and can be copied out with
//! [`ontic_last_error_message`]. Probability tables are opaque handles owned
//! by the caller and released with [`ontic_table_free`]. Strings returned by
//! the library are released with [`ontic_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use ontic::beamsplitter::{bmap_from_tau, probability_bs, tau_from_bmap, PhotonQuery};
use ontic::sgmodel::{probability, LCondition, Mode, ModelQuery, ProbabilityTable};
use ontic::wignerqm::{wigner_d_squared, WignerQuery};
use ontic::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnticStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    RangeViolation = 4,
    NonIntegralRatio = 5,
    DegenerateNormalization = 6,
    NoGridPoint = 7,
    EnumerationLimit = 8,
    IndexOutOfRange = 9,
    Panic = 10,
}

/// Counting mode; `Default` picks plain for `two_j = 1`, interference
/// otherwise.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnticMode {
    Default = 0,
    Plain = 1,
    Interference = 2,
}

/// How `l_a1` enters; `Fixed` reads the accompanying `two_l_a1`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnticLCondition {
    SumAll = 0,
    Fixed = 1,
    PaperTuned = 2,
}

/// One outcome of a table. For beam-splitter tables `c_b2`/`d_b2` are the
/// output photon numbers; for spin tables they are `j + m_b2` and `j - m_b2`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OnticRow {
    pub two_m_b2: i32,
    pub c_b2: u32,
    pub d_b2: u32,
    pub p_model: f64,
    pub p_qm: f64,
    pub abs_delta: f64,
}

/// Opaque probability table.
pub struct OnticTable {
    inner: ProbabilityTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> OnticStatus {
    match e {
        Error::RangeViolation { .. } => OnticStatus::RangeViolation,
        Error::NonIntegralRatio { .. } => OnticStatus::NonIntegralRatio,
        Error::Domain(_) => OnticStatus::Domain,
        Error::DegenerateNormalization => OnticStatus::DegenerateNormalization,
        Error::NoGridPoint { .. } => OnticStatus::NoGridPoint,
        Error::EnumerationLimit { .. } => OnticStatus::EnumerationLimit,
        Error::LengthMismatch { .. } | Error::InvalidSequence(_) => OnticStatus::InvalidArgument,
    }
}

fn guarded<F>(f: F) -> OnticStatus
where
    F: FnOnce() -> Result<(), OnticStatus> + UnwindSafe,
{
    match catch_unwind(f) {
        Ok(Ok(())) => OnticStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            OnticStatus::Panic
        }
    }
}

fn lift<T>(r: ontic::Result<T>) -> Result<T, OnticStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), OnticStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        return Err(OnticStatus::NullPointer);
    }
    Ok(())
}

fn settings(
    mode: OnticMode,
    two_j: u32,
    l_condition: OnticLCondition,
    two_l_a1: i32,
) -> (Mode, LCondition) {
    let mode = match mode {
        OnticMode::Default => Mode::default_for(two_j),
        OnticMode::Plain => Mode::Plain,
        OnticMode::Interference => Mode::Interference,
    };
    let l = match l_condition {
        OnticLCondition::SumAll => LCondition::SumAll,
        OnticLCondition::Fixed => LCondition::Fixed(two_l_a1),
        OnticLCondition::PaperTuned => LCondition::PaperTuned,
    };
    (mode, l)
}

fn finish_table(mut table: ProbabilityTable, out: *mut *mut OnticTable) -> Result<(), OnticStatus> {
    lift(table.attach_qm_reference())?;
    let boxed = Box::new(OnticTable { inner: table });
    // SAFETY: checked non-null by the caller of this helper.
    unsafe { *out = Box::into_raw(boxed) };
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length without
/// the terminator, or 0 when there is no message.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ontic_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ontic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `P(m_b2 | n, j, m_a1, θ = π·b_map/n)` for every `m_b2`, with the Wigner
/// reference attached. On success `*out` owns a new table.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ontic_sg_probability(
    n: u32,
    two_j: u32,
    two_m_a1: i32,
    b_map: u32,
    mode: OnticMode,
    l_condition: OnticLCondition,
    two_l_a1: i32,
    out: *mut *mut OnticTable,
) -> OnticStatus {
    guarded(|| {
        non_null(out, "out")?;
        let (mode, l) = settings(mode, two_j, l_condition, two_l_a1);
        let q = lift(ModelQuery::new(n, two_j, two_m_a1, b_map))?
            .with_mode(mode)
            .with_l_condition(l);
        lift(q.validate())?;
        finish_table(lift(probability(&q))?, out)
    })
}

/// Beam-splitter output probabilities for `(c_a1, d_a1)` input photons.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ontic_bs_probability(
    n: u32,
    c_a1: u32,
    d_a1: u32,
    b_map: u32,
    mode: OnticMode,
    l_condition: OnticLCondition,
    two_l_a1: i32,
    out: *mut *mut OnticTable,
) -> OnticStatus {
    guarded(|| {
        non_null(out, "out")?;
        let (mode, l) = settings(mode, c_a1 + d_a1, l_condition, two_l_a1);
        let q = lift(PhotonQuery::new(n, c_a1, d_a1, b_map))?
            .with_mode(mode)
            .with_l_condition(l);
        let t = lift(probability_bs(&q))?;
        finish_table(t.table, out)
    })
}

/// Releases a table. Null is ignored.
///
/// # Safety
/// `table` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ontic_table_free(table: *mut OnticTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of outcomes; 0 for null.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ontic_table_len(table: *const OnticTable) -> usize {
    table.as_ref().map_or(0, |t| t.inner.rows.len())
}

/// Whether some outcome weight came out negative.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ontic_table_has_negative_weight(table: *const OnticTable) -> bool {
    table
        .as_ref()
        .is_some_and(|t| t.inner.has_negative_weight())
}

unsafe fn row_at<'a>(
    table: *const OnticTable,
    index: usize,
) -> Result<(&'a ProbabilityTable, usize), OnticStatus> {
    non_null(table, "table")?;
    let t = &(*table).inner;
    if index >= t.rows.len() {
        set_error(format!(
            "row {index} out of range for {} rows",
            t.rows.len()
        ));
        return Err(OnticStatus::IndexOutOfRange);
    }
    Ok((t, index))
}

/// Copies outcome `index` (ascending `m_b2`) into `*out`.
///
/// # Safety
/// `table` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ontic_table_row(
    table: *const OnticTable,
    index: usize,
    out: *mut OnticRow,
) -> OnticStatus {
    guarded(|| {
        non_null(out, "out")?;
        let (t, i) = row_at(table, index)?;
        let r = &t.rows[i];
        let two_j = t.query.two_j as i32;
        *out = OnticRow {
            two_m_b2: r.two_m_b2,
            c_b2: ((two_j + r.two_m_b2) / 2) as u32,
            d_b2: ((two_j - r.two_m_b2) / 2) as u32,
            p_model: r.p_model,
            p_qm: r.p_qm.unwrap_or(f64::NAN),
            abs_delta: r.abs_delta.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Exact probability of outcome `index` as `"p/q"` (or `"p"`); release the
/// string with [`ontic_string_free`].
///
/// # Safety
/// `table` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ontic_table_exact_probability(
    table: *const OnticTable,
    index: usize,
    out: *mut *mut c_char,
) -> OnticStatus {
    guarded(|| {
        non_null(out, "out")?;
        let (t, i) = row_at(table, index)?;
        let s = CString::new(t.rows[i].probability.to_string()).expect("no interior NUL");
        *out = s.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ontic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `|d^j_{m',m}(θ)|²` with doubled `j`, `m`, `m'` and `θ` in radians.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ontic_wigner_d_squared(
    two_j: u32,
    two_m: i32,
    two_mp: i32,
    theta: f64,
    out: *mut f64,
) -> OnticStatus {
    guarded(|| {
        non_null(out, "out")?;
        let q = lift(WignerQuery::new(two_j, two_m, two_mp, theta))?;
        *out = lift(wigner_d_squared(&q))?;
        Ok(())
    })
}

/// `τ = cos²(b_map·π/(2n))`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ontic_tau_from_bmap(n: u32, b_map: u32, out: *mut f64) -> OnticStatus {
    guarded(|| {
        non_null(out, "out")?;
        *out = lift(tau_from_bmap(n, b_map))?;
        Ok(())
    })
}

/// Nearest grid point to `tau` within `tolerance`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ontic_bmap_from_tau(
    n: u32,
    tau: f64,
    tolerance: f64,
    out: *mut u32,
) -> OnticStatus {
    guarded(|| {
        non_null(out, "out")?;
        *out = lift(bmap_from_tau(n, tau, tolerance))?;
        Ok(())
    })
}
