//! C ABI for the stgeo library: opaque codebook handles, status codes and
//! flat-array matrix exchange.
//!
//! Conventions: complex T×k matrices are passed as `double` arrays of
//! length 2·T·k, row-major, each entry interleaved as re, im. Every entry
//! point catches panics and reports them as a status code; the last error
//! message is thread-local and valid until the next failing call on the
//! same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use stgeo::channel::{Channel, ChannelConfig};
use stgeo::codebook::{code_stats, Codebook};
use stgeo::diversity::{chernov_bound, diversity_profile, exact_pep};
use stgeo::error::Error;
use stgeo::linalg::{haar_unitary, CMat, C64};
use stgeo::manifold::{pair_geometry, StiefelFrame};

/// Status codes returned by every stgeo call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StgeoStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidInput = 2,
    ShapeMismatch = 3,
    UnsupportedGeometry = 4,
    DegeneratePair = 5,
    DegenerateCode = 6,
    ParseError = 7,
    ValidationError = 8,
    IoError = 9,
    Utf8Error = 10,
    InternalPanic = 11,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> StgeoStatus {
    match err {
        Error::InvalidInput(_) => StgeoStatus::InvalidInput,
        Error::Shape(_) => StgeoStatus::ShapeMismatch,
        Error::UnsupportedGeometry(_) => StgeoStatus::UnsupportedGeometry,
        Error::DegeneratePair(_) => StgeoStatus::DegeneratePair,
        Error::DegenerateCode(_) => StgeoStatus::DegenerateCode,
        Error::Parse { .. } => StgeoStatus::ParseError,
        Error::Validation { .. } => StgeoStatus::ValidationError,
        Error::Io { .. } => StgeoStatus::IoError,
    }
}

fn fail(err: Error) -> StgeoStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Runs a fallible body, translating panics and errors into status codes.
fn guarded(body: impl FnOnce() -> Result<(), StgeoStatus>) -> StgeoStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => StgeoStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            StgeoStatus::InternalPanic
        }
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, StgeoStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(StgeoStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        StgeoStatus::Utf8Error
    })
}

unsafe fn matrix_from_raw(t: usize, k: usize, data: *const f64) -> Result<CMat, StgeoStatus> {
    if data.is_null() {
        set_error("null matrix argument");
        return Err(StgeoStatus::NullArgument);
    }
    let raw = std::slice::from_raw_parts(data, 2 * t * k);
    let entries = raw
        .chunks_exact(2)
        .map(|c| C64::new(c[0], c[1]))
        .collect();
    CMat::new(t, k, entries).map_err(fail)
}

unsafe fn frame_from_raw(
    t: usize,
    k: usize,
    data: *const f64,
) -> Result<StiefelFrame, StgeoStatus> {
    StiefelFrame::new(matrix_from_raw(t, k, data)?).map_err(fail)
}

fn channel_of(coherent: bool) -> Channel {
    if coherent {
        Channel::Coherent
    } else {
        Channel::Noncoherent
    }
}

/// Opaque codebook handle; create via load/parse, release via
/// `stgeo_codebook_free`.
pub struct StgeoCodebook {
    inner: Codebook,
}

/// Receiver-induced geometry of one symbol pair.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct StgeoPairGeometry {
    /// Coherent metric: Frobenius norm of the frame difference.
    pub d_coh: f64,
    /// Chordal distance (non-coherent receiver metric).
    pub d_noncoh: f64,
    /// Fiber minimum of the coherent metric over both spans.
    pub dist: f64,
    /// Fiber minimum of the diversity product.
    pub pdist: f64,
}

/// Codebook pairwise minima for one channel.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct StgeoCodeStats {
    pub min_dsum: f64,
    pub min_dprod: f64,
    pub min_div: f64,
    /// Pair attaining min_dsum.
    pub argmin_i: usize,
    pub argmin_j: usize,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn stgeo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on this thread. Valid until the next
/// failing call; never NULL.
#[no_mangle]
pub extern "C" fn stgeo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Loads a codebook JSON file. On success writes a new handle to `out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stgeo_codebook_load(
    path: *const c_char,
    out: *mut *mut StgeoCodebook,
) -> StgeoStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output argument");
            return Err(StgeoStatus::NullArgument);
        }
        let path = cstr(path)?;
        let book = Codebook::load(path).map_err(fail)?;
        *out = Box::into_raw(Box::new(StgeoCodebook { inner: book }));
        Ok(())
    })
}

/// Parses a codebook from a JSON string.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stgeo_codebook_from_json(
    json: *const c_char,
    out: *mut *mut StgeoCodebook,
) -> StgeoStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output argument");
            return Err(StgeoStatus::NullArgument);
        }
        let text = cstr(json)?;
        let book = Codebook::from_json_str(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(StgeoCodebook { inner: book }));
        Ok(())
    })
}

/// Writes a codebook to a JSON file.
///
/// # Safety
/// `book` must be a live handle from this library; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn stgeo_codebook_store(
    book: *const StgeoCodebook,
    path: *const c_char,
) -> StgeoStatus {
    guarded(|| {
        let book = book.as_ref().ok_or_else(|| {
            set_error("null codebook handle");
            StgeoStatus::NullArgument
        })?;
        let path = cstr(path)?;
        book.inner.store(path).map_err(fail)
    })
}

/// Releases a handle; NULL is ignored.
///
/// # Safety
/// `book` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stgeo_codebook_free(book: *mut StgeoCodebook) {
    if !book.is_null() {
        drop(Box::from_raw(book));
    }
}

/// Number of symbols; 0 for a NULL handle.
///
/// # Safety
/// `book` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn stgeo_codebook_size(book: *const StgeoCodebook) -> usize {
    book.as_ref().map_or(0, |b| b.inner.len())
}

/// Block length T; 0 for a NULL handle.
///
/// # Safety
/// `book` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn stgeo_codebook_block_len(book: *const StgeoCodebook) -> usize {
    book.as_ref().map_or(0, |b| b.inner.t())
}

/// Transmit antennas k; 0 for a NULL handle.
///
/// # Safety
/// `book` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn stgeo_codebook_antennas(book: *const StgeoCodebook) -> usize {
    book.as_ref().map_or(0, |b| b.inner.k())
}

/// Rate (1/T) log2 |C| in bits per channel use.
///
/// # Safety
/// `book` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stgeo_codebook_rate(
    book: *const StgeoCodebook,
    out: *mut f64,
) -> StgeoStatus {
    guarded(|| {
        let book = book.as_ref().ok_or_else(|| {
            set_error("null codebook handle");
            StgeoStatus::NullArgument
        })?;
        if out.is_null() {
            set_error("null output argument");
            return Err(StgeoStatus::NullArgument);
        }
        *out = book.inner.rate();
        Ok(())
    })
}

/// Copies symbol `index` into `out` (length 2·T·k, row-major, re/im
/// interleaved).
///
/// # Safety
/// `book` must be a live handle; `out` must hold 2·T·k doubles.
#[no_mangle]
pub unsafe extern "C" fn stgeo_codebook_symbol(
    book: *const StgeoCodebook,
    index: usize,
    out: *mut f64,
) -> StgeoStatus {
    guarded(|| {
        let book = book.as_ref().ok_or_else(|| {
            set_error("null codebook handle");
            StgeoStatus::NullArgument
        })?;
        if out.is_null() {
            set_error("null output argument");
            return Err(StgeoStatus::NullArgument);
        }
        if index >= book.inner.len() {
            return Err(fail(Error::invalid(format!(
                "symbol index {index} out of range (size {})",
                book.inner.len()
            ))));
        }
        let m = book.inner.symbols()[index].matrix();
        let dst = std::slice::from_raw_parts_mut(out, 2 * m.rows() * m.cols());
        for (slot, z) in dst.chunks_exact_mut(2).zip(m.data()) {
            slot[0] = z.re;
            slot[1] = z.im;
        }
        Ok(())
    })
}

/// Exhaustive pairwise minima of a codebook under one channel.
///
/// # Safety
/// `book` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn stgeo_code_stats(
    book: *const StgeoCodebook,
    rho: f64,
    n_r: usize,
    coherent: bool,
    out: *mut StgeoCodeStats,
) -> StgeoStatus {
    guarded(|| {
        let book = book.as_ref().ok_or_else(|| {
            set_error("null codebook handle");
            StgeoStatus::NullArgument
        })?;
        if out.is_null() {
            set_error("null output argument");
            return Err(StgeoStatus::NullArgument);
        }
        let channel = channel_of(coherent);
        let cfg = ChannelConfig::new(rho, book.inner.t(), book.inner.k(), n_r, channel)
            .map_err(fail)?;
        let stats = code_stats(&book.inner, &cfg, channel).map_err(fail)?;
        *out = StgeoCodeStats {
            min_dsum: stats.min_dsum,
            min_dprod: stats.min_dprod,
            min_div: stats.min_div,
            argmin_i: stats.argmin_dsum.0,
            argmin_j: stats.argmin_dsum.1,
        };
        Ok(())
    })
}

/// Receiver metrics and fiber minima of one pair of T×k frames.
///
/// # Safety
/// `a` and `b` must hold 2·T·k doubles each; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn stgeo_pair_geometry(
    t: usize,
    k: usize,
    a: *const f64,
    b: *const f64,
    out: *mut StgeoPairGeometry,
) -> StgeoStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output argument");
            return Err(StgeoStatus::NullArgument);
        }
        let fa = frame_from_raw(t, k, a)?;
        let fb = frame_from_raw(t, k, b)?;
        let g = pair_geometry(&fa, &fb).map_err(fail)?;
        *out = StgeoPairGeometry {
            d_coh: g.d_coh,
            d_noncoh: g.d_noncoh,
            dist: g.dist,
            pdist: g.pdist,
        };
        Ok(())
    })
}

/// Exact pairwise error probability of mistaking one frame for the other.
///
/// # Safety
/// `a` and `b` must hold 2·T·k doubles each; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn stgeo_exact_pep(
    t: usize,
    k: usize,
    a: *const f64,
    b: *const f64,
    rho: f64,
    n_r: usize,
    coherent: bool,
    out: *mut f64,
) -> StgeoStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output argument");
            return Err(StgeoStatus::NullArgument);
        }
        let fa = frame_from_raw(t, k, a)?;
        let fb = frame_from_raw(t, k, b)?;
        let channel = channel_of(coherent);
        let cfg = ChannelConfig::new(rho, t, k, n_r, channel).map_err(fail)?;
        let g = pair_geometry(&fa, &fb).map_err(fail)?;
        *out = exact_pep(&g, &cfg, channel).map_err(fail)?;
        Ok(())
    })
}

/// Chernov bound on the pairwise error probability (½ Div^{−n_r}).
///
/// # Safety
/// `a` and `b` must hold 2·T·k doubles each; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn stgeo_chernov_bound(
    t: usize,
    k: usize,
    a: *const f64,
    b: *const f64,
    rho: f64,
    n_r: usize,
    coherent: bool,
    out: *mut f64,
) -> StgeoStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output argument");
            return Err(StgeoStatus::NullArgument);
        }
        let fa = frame_from_raw(t, k, a)?;
        let fb = frame_from_raw(t, k, b)?;
        let channel = channel_of(coherent);
        let cfg = ChannelConfig::new(rho, t, k, n_r, channel).map_err(fail)?;
        let g = pair_geometry(&fa, &fb).map_err(fail)?;
        let profile = diversity_profile(&g, &cfg, channel);
        *out = chernov_bound(&profile, n_r).map_err(fail)?;
        Ok(())
    })
}

/// Haar-random n×n unitary, deterministic per seed; writes 2·n·n doubles.
///
/// # Safety
/// `out` must hold 2·n·n doubles.
#[no_mangle]
pub unsafe extern "C" fn stgeo_haar_unitary(n: usize, seed: u64, out: *mut f64) -> StgeoStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output argument");
            return Err(StgeoStatus::NullArgument);
        }
        let u = haar_unitary(n, seed).map_err(fail)?;
        let dst = std::slice::from_raw_parts_mut(out, 2 * n * n);
        for (slot, z) in dst.chunks_exact_mut(2).zip(u.data()) {
            slot[0] = z.re;
            slot[1] = z.im;
        }
        Ok(())
    })
}
