//! C interface to `steinlab`.
//!
//! Distributions cross the boundary as opaque `SlPmf` handles created by the
//! `sl_pmf_*` constructors and released with [`sl_pmf_free`]. Every fallible
//! call returns an [`SlStatus`]; on failure the message is kept per thread
//! and can be read with [`sl_last_error`]. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use steinlab::bounds::{
    bound_thm_i, bound_thm_ii, classic_bound, epidemic_bound, neg_assoc_bound, sampling_bound,
    BoundBreakdown,
};
use steinlab::dist::{kolmogorov_to_std_normal, tv_distance, Pmf, TruncationPolicy};
use steinlab::models::zip_pmf;
use steinlab::poincare::{poincare_bound, poincare_oracle, zip_poincare_bound};
use steinlab::Error;

/// Most terms any bound reports.
pub const SL_MAX_TERMS: usize = 5;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    ZeroMean = 3,
    GappedSupport = 4,
    CapExceeded = 5,
    Singular = 6,
    Internal = 7,
}

/// A probability mass function on `0..len`.
pub struct SlPmf(Pmf);

/// A bound with its additive terms in reporting order.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlBound {
    pub total: f64,
    pub lambda_used: f64,
    pub p_used: f64,
    /// The total exceeds 1, so the bound says nothing.
    pub vacuous: bool,
    pub n_terms: usize,
    pub terms: [f64; SL_MAX_TERMS],
}

impl From<&BoundBreakdown> for SlBound {
    fn from(b: &BoundBreakdown) -> Self {
        let mut terms = [0.0; SL_MAX_TERMS];
        for (slot, t) in terms.iter_mut().zip(&b.terms) {
            *slot = t.value;
        }
        SlBound {
            total: b.total,
            lambda_used: b.lambda_used,
            p_used: b.p_used,
            vacuous: b.vacuous,
            n_terms: b.terms.len().min(SL_MAX_TERMS),
            terms,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::InvalidParameter { .. }
        | Error::InvalidWeights(_)
        | Error::DimensionMismatch(_)
        | Error::MissingSlack => SlStatus::InvalidArgument,
        Error::ZeroMean => SlStatus::ZeroMean,
        Error::GappedSupport { .. } => SlStatus::GappedSupport,
        Error::CapExceeded { .. } => SlStatus::CapExceeded,
        Error::SingularDenominator(_) => SlStatus::Singular,
        Error::OracleUnavailable(_) | Error::Io(_) => SlStatus::Internal,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), SlStatus>) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SlStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            SlStatus::Internal
        }
    }
}

fn fail(e: Error) -> SlStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> SlStatus {
    set_error(&format!("null pointer: {what}"));
    SlStatus::NullPointer
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), SlStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn pmf_ref<'a>(p: *const SlPmf, what: &str) -> Result<&'a Pmf, SlStatus> {
    p.as_ref().map(|h| &h.0).ok_or_else(|| null(what))
}

unsafe fn emit_pmf(out: *mut *mut SlPmf, d: steinlab::Result<Pmf>) -> Result<(), SlStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    let d = d.map_err(fail)?;
    out.write(Box::into_raw(Box::new(SlPmf(d))));
    Ok(())
}

unsafe fn emit_bound(out: *mut SlBound, b: steinlab::Result<BoundBreakdown>) -> Result<(), SlStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    let b = b.map_err(fail)?;
    out.write(SlBound::from(&b));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => c"",
    };
    VERSION.as_ptr()
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a law from `len` non-negative weights.
///
/// # Safety
/// `weights` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_pmf_from_weights(
    weights: *const f64,
    len: usize,
    out: *mut *mut SlPmf,
) -> SlStatus {
    guard(|| {
        if weights.is_null() {
            return Err(null("weights"));
        }
        let w = std::slice::from_raw_parts(weights, len);
        emit_pmf(out, Pmf::from_weights(w))
    })
}

/// Poisson law truncated once the tail drops to `tail_epsilon`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_pmf_poisson(lambda: f64, tail_epsilon: f64, out: *mut *mut SlPmf) -> SlStatus {
    guard(|| {
        let policy = TruncationPolicy::new(tail_epsilon).map_err(fail)?;
        emit_pmf(out, Pmf::poisson(lambda, policy))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_pmf_binomial(n: u64, q: f64, out: *mut *mut SlPmf) -> SlStatus {
    guard(|| emit_pmf(out, Pmf::binomial(n, q)))
}

/// Zero-inflated Poisson `I_p Z`, `Z ~ Po(lambda)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_pmf_zip(p: f64, lambda: f64, tail_epsilon: f64, out: *mut *mut SlPmf) -> SlStatus {
    guard(|| {
        let policy = TruncationPolicy::new(tail_epsilon).map_err(fail)?;
        emit_pmf(out, zip_pmf(p, lambda, policy))
    })
}

/// # Safety
/// `pmf` must be a live handle or null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_pmf_size_bias(pmf: *const SlPmf, out: *mut *mut SlPmf) -> SlStatus {
    guard(|| {
        let d = pmf_ref(pmf, "pmf")?;
        emit_pmf(out, d.size_bias())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `pmf` must come from an `sl_pmf_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sl_pmf_free(pmf: *mut SlPmf) {
    if !pmf.is_null() {
        drop(Box::from_raw(pmf));
    }
}

/// Number of stored masses (support `0..len`); 0 for null.
///
/// # Safety
/// `pmf` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sl_pmf_len(pmf: *const SlPmf) -> usize {
    pmf.as_ref().map_or(0, |h| h.0.probs().len())
}

/// Tail mass dropped by truncation; NaN for null.
///
/// # Safety
/// `pmf` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sl_pmf_omitted_mass(pmf: *const SlPmf) -> f64 {
    pmf.as_ref().map_or(f64::NAN, |h| h.0.omitted_mass())
}

/// Copies the masses into `buf`, which must hold at least `sl_pmf_len`
/// doubles.
///
/// # Safety
/// `pmf` must be a live handle; `buf` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sl_pmf_probs(pmf: *const SlPmf, buf: *mut f64, cap: usize) -> SlStatus {
    guard(|| {
        let d = pmf_ref(pmf, "pmf")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let p = d.probs();
        if cap < p.len() {
            set_error(&format!("buffer holds {cap} values, need {}", p.len()));
            return Err(SlStatus::InvalidArgument);
        }
        ptr::copy_nonoverlapping(p.as_ptr(), buf, p.len());
        Ok(())
    })
}

/// # Safety
/// `pmf` must be a live handle; `mean` and `var` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_pmf_moments(pmf: *const SlPmf, mean: *mut f64, var: *mut f64) -> SlStatus {
    guard(|| {
        let (m, v) = pmf_ref(pmf, "pmf")?.moments();
        write(mean, m, "mean")?;
        write(var, v, "var")
    })
}

/// Total variation distance; `error` receives the omitted tail mass of both
/// laws, which bounds the effect of truncation.
///
/// # Safety
/// `a` and `b` must be live handles; `value` and `error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_tv_distance(
    a: *const SlPmf,
    b: *const SlPmf,
    value: *mut f64,
    error: *mut f64,
) -> SlStatus {
    guard(|| {
        let tv = tv_distance(pmf_ref(a, "a")?, pmf_ref(b, "b")?);
        write(value, tv.value, "value")?;
        write(error, tv.error, "error")
    })
}

/// Kolmogorov distance of `(Y - mu) / sigma` to the standard normal.
///
/// # Safety
/// `pmf` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_kolmogorov_to_std_normal(
    pmf: *const SlPmf,
    mu: f64,
    sigma: f64,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        let d = pmf_ref(pmf, "pmf")?;
        let v = kolmogorov_to_std_normal(d, mu, sigma).map_err(fail)?;
        write(out, v, "out")
    })
}

/// Poincaré constant on the support of the law (infinite when the support
/// has a gap).
///
/// # Safety
/// `pmf` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_poincare_oracle(pmf: *const SlPmf, out: *mut f64) -> SlStatus {
    guard(|| {
        let v = poincare_oracle(pmf_ref(pmf, "pmf")?).map_err(fail)?;
        write(out, v, "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_poincare_bound(mu: f64, p: f64, h_star: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let v = poincare_bound(mu, p, h_star).map_err(fail)?;
        write(out, v, "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_zip_poincare_bound(p: f64, lambda: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        let v = zip_poincare_bound(p, lambda).map_err(fail)?;
        write(out, v, "out")
    })
}

/// Terms: base, variance_deficit.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_classic_bound(mu: f64, var: f64, out: *mut SlBound) -> SlStatus {
    guard(|| emit_bound(out, classic_bound(mu, var)))
}

/// Terms: base, mean, coupling_penalty.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_bound_negative(mu: f64, var: f64, p: f64, lambda: f64, out: *mut SlBound) -> SlStatus {
    guard(|| emit_bound(out, bound_thm_i(mu, var, p, lambda)))
}

/// Terms: slack, size_bias_mean, coupling_penalty.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_bound_positive(
    mu: f64,
    var: f64,
    p: f64,
    lambda: f64,
    mean_z: f64,
    out: *mut SlBound,
) -> SlStatus {
    guard(|| emit_bound(out, bound_thm_ii(mu, var, p, lambda, mean_z)))
}

/// Terms: base, mean, coupling_penalty.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_neg_assoc_bound(mu: f64, var: f64, p: f64, out: *mut SlBound) -> SlStatus {
    guard(|| emit_bound(out, neg_assoc_bound(mu, var, p)))
}

/// Terms: catastrophe, variance_deficit.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_epidemic_bound(capital_lambda: f64, var_w: f64, q: f64, out: *mut SlBound) -> SlStatus {
    guard(|| emit_bound(out, epidemic_bound(capital_lambda, var_w, q)))
}

/// Bound for the sum of `m` values drawn without replacement from
/// `values[0..len]`.
///
/// # Safety
/// `values` must point to `len` readable integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_sampling_bound(
    values: *const u64,
    len: usize,
    m: usize,
    out: *mut SlBound,
) -> SlStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let v = std::slice::from_raw_parts(values, len);
        emit_bound(out, sampling_bound(v, m).map(|s| s.bound))
    })
}
