//! C interface to `socle`.
//!
//! Algebras and elements are opaque handles created by the constructors
//! below and released with the matching `*_free`. Every fallible call
//! returns a [`SocleStatus`]; on failure, [`socle_last_error`] describes
//! the error for the calling thread. Panics never cross the boundary.
//!
//! Output pointers must be valid for writes. Input arrays must hold the
//! stated number of items. Element handles are tied to the algebra they
//! were created for.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use socle::central::equivalence_harness;
use socle::instance::InstanceFile;
use socle::shoda::shoda_socle;
use socle::spectral::{rank, trace};
use socle::wedderburn::attach_decomposition;
use socle::{Algebra, Element, SocleError, Tolerance, C64};

/// Status of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SocleStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Non-convergence or a failed numeric certificate.
    Numeric = 3,
    /// The element has a nonzero trace on some minimal ideal.
    NotInCommutatorSpace = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Opaque algebra handle.
pub struct SocleAlgebra {
    inner: Algebra,
}

/// Opaque element handle.
pub struct SocleElement {
    inner: Element,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(SocleStatus, String);

impl From<SocleError> for Fail {
    fn from(e: SocleError) -> Self {
        let status = match e {
            SocleError::NotInCommutatorSpace(_) => SocleStatus::NotInCommutatorSpace,
            _ if e.is_numeric() => SocleStatus::Numeric,
            _ => SocleStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SocleStatus::NullPointer, format!("{what} is NULL"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SocleStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SocleStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            SocleStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed(alg: Algebra) -> *mut SocleAlgebra {
    Box::into_raw(Box::new(SocleAlgebra { inner: alg }))
}

/// Message of the last failed call on this thread, or NULL. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn socle_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn socle_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `M_{n_1} + ... + M_{n_k}` with default tolerances.
///
/// # Safety
/// `sizes` holds `count` values and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn socle_algebra_blocks(
    sizes: *const usize,
    count: usize,
    out: *mut *mut SocleAlgebra,
) -> SocleStatus {
    guard(|| {
        let sizes = slice(sizes, count, "sizes")?;
        let alg = Algebra::blocks(sizes, Tolerance::default())?;
        write(out, boxed(alg), "out")
    })
}

/// Algebra of a JSON instance document. Structure-constant algebras are
/// decomposed with `seed` before returning.
///
/// # Safety
/// `json` is a NUL-terminated string and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn socle_algebra_from_json(
    json: *const c_char,
    seed: u64,
    out: *mut *mut SocleAlgebra,
) -> SocleStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(SocleStatus::InvalidArgument, format!("json is not UTF-8: {e}")))?;
        let file = InstanceFile::parse(text).map_err(|e| {
            Fail(
                SocleStatus::InvalidArgument,
                format!("malformed JSON at line {} column {}: {e}", e.line(), e.column()),
            )
        })?;
        let mut alg = file.algebra(Tolerance::default())?;
        if !alg.has_iso() {
            attach_decomposition(&mut alg, seed)?;
        }
        write(out, boxed(alg), "out")
    })
}

/// # Safety
/// `alg` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn socle_algebra_free(alg: *mut SocleAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Vector-space dimension; 0 for NULL.
///
/// # Safety
/// `alg` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn socle_algebra_dim(alg: *const SocleAlgebra) -> usize {
    alg.as_ref().map_or(0, |a| a.inner.dim())
}

/// Writes the block sizes into `out` (capacity `cap`) and their number
/// into `count`. Returns `BUFFER_TOO_SMALL` with `count` set when `cap`
/// is short.
///
/// # Safety
/// `alg` is live, `out` holds `cap` slots, `count` is writable.
#[no_mangle]
pub unsafe extern "C" fn socle_algebra_block_sizes(
    alg: *const SocleAlgebra,
    out: *mut usize,
    cap: usize,
    count: *mut usize,
) -> SocleStatus {
    guard(|| {
        let sizes = borrow(alg, "alg")?.inner.block_sizes()?;
        write(count, sizes.len(), "count")?;
        if sizes.len() > cap {
            return Err(Fail(SocleStatus::BufferTooSmall, format!("need {} slots", sizes.len())));
        }
        if !sizes.is_empty() && out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(sizes.as_ptr(), out, sizes.len());
        Ok(())
    })
}

/// Element from coordinates split into real and imaginary parts. `im`
/// may be NULL for a real element.
///
/// # Safety
/// `re` (and `im` unless NULL) hold `len` values; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn socle_element_new(
    alg: *const SocleAlgebra,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut SocleElement,
) -> SocleStatus {
    guard(|| {
        let alg = &borrow(alg, "alg")?.inner;
        let re = slice(re, len, "re")?;
        let im = if im.is_null() { None } else { Some(slice(im, len, "im")?) };
        let coords = (0..len).map(|i| C64::new(re[i], im.map_or(0.0, |v| v[i]))).collect();
        let a = alg.element(coords)?;
        write(out, Box::into_raw(Box::new(SocleElement { inner: a })), "out")
    })
}

/// # Safety
/// `a` is NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn socle_element_free(a: *mut SocleElement) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Copies the coordinates of `a` into `re` and `im` (each of capacity
/// `cap`; either may be NULL).
///
/// # Safety
/// `a` is live; non-NULL buffers hold `cap` slots.
#[no_mangle]
pub unsafe extern "C" fn socle_element_coords(
    a: *const SocleElement,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
) -> SocleStatus {
    guard(|| {
        let coords = borrow(a, "element")?.inner.coords();
        if coords.len() > cap {
            return Err(Fail(SocleStatus::BufferTooSmall, format!("need {} slots", coords.len())));
        }
        for (i, z) in coords.iter().enumerate() {
            if !re.is_null() {
                re.add(i).write(z.re);
            }
            if !im.is_null() {
                im.add(i).write(z.im);
            }
        }
        Ok(())
    })
}

unsafe fn pair<'a>(alg: *const SocleAlgebra, a: *const SocleElement) -> Result<(&'a Algebra, &'a Element), Fail> {
    let alg = &borrow(alg, "alg")?.inner;
    let a = &borrow(a, "element")?.inner;
    alg.check(a)?;
    Ok((alg, a))
}

/// Spectral rank.
///
/// # Safety
/// Handles are live and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn socle_rank(alg: *const SocleAlgebra, a: *const SocleElement, out: *mut usize) -> SocleStatus {
    guard(|| {
        let (alg, a) = pair(alg, a)?;
        write(out, rank(alg, a)?, "out")
    })
}

/// Spectral trace.
///
/// # Safety
/// Handles are live and both outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn socle_trace(
    alg: *const SocleAlgebra,
    a: *const SocleElement,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SocleStatus {
    guard(|| {
        let (alg, a) = pair(alg, a)?;
        let t = trace(alg, a)?;
        write(out_re, t.re, "out_re")?;
        write(out_im, t.im, "out_im")
    })
}

/// Commutator factorization `a = xy - yx`. Returns
/// `NOT_IN_COMMUTATOR_SPACE` when some minimal ideal carries trace.
///
/// # Safety
/// Handles are live and all outputs are writable. The returned elements
/// are owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn socle_shoda(
    alg: *const SocleAlgebra,
    a: *const SocleElement,
    seed: u64,
    out_x: *mut *mut SocleElement,
    out_y: *mut *mut SocleElement,
    out_residual: *mut f64,
) -> SocleStatus {
    guard(|| {
        let (alg, a) = pair(alg, a)?;
        if out_x.is_null() || out_y.is_null() || out_residual.is_null() {
            return Err(null("output"));
        }
        let cert = shoda_socle(alg, a, seed)?;
        out_residual.write(cert.residual);
        out_x.write(Box::into_raw(Box::new(SocleElement { inner: cert.x })));
        out_y.write(Box::into_raw(Box::new(SocleElement { inner: cert.y })));
        Ok(())
    })
}

/// Whether the socle is central, and whether all central-socle
/// predicates agree as expected.
///
/// # Safety
/// `alg` is live and both outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn socle_central(
    alg: *const SocleAlgebra,
    seed: u64,
    out_central: *mut bool,
    out_consistent: *mut bool,
) -> SocleStatus {
    guard(|| {
        let report = equivalence_harness(&borrow(alg, "alg")?.inner, seed)?;
        write(out_central, report.predicates[0].value, "out_central")?;
        write(out_consistent, report.consistent, "out_consistent")
    })
}
