//! C ABI over the `hypercone` crate.
//!
//! Objects cross the boundary as opaque heap handles created by `hc_*_new`
//! (or a constructor) and released by the matching `hc_*_free`. Every fallible
//! call returns an [`HcStatus`]; the message of the last failure on the
//! calling thread is available from [`hc_last_error`]. Panics are caught and
//! reported as `HC_STATUS_PANIC`.
//!
//! The header `include/hypercone.h` is generated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::Vector3;

use hypercone::ball_model::{ball_distance, shadow_parameter};
use hypercone::cli::check;
use hypercone::constructions::common_complement_cone;
use hypercone::hypercone::{cone_leq, cone_leq_margin, disjoint, enclosing_cone, in_causal_completion};
use hypercone::scene::Scene;
use hypercone::{BallCone, BallPoint, Error, FourVector, Hyperboloid, Hypercone, LorentzTransform, Tolerances};

/// Status codes. Values are stable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    InvalidInput = 1,
    /// A predicate's margin fell inside the degeneracy window.
    Degenerate = 2,
    OffShell = 3,
    Numerical = 4,
    ConstructionFailure = 5,
    Admissibility = 6,
    Domain = 7,
    NoEnclosure = 8,
    NullPointer = 9,
    Panic = 10,
    /// The output buffer was too small; the required size was reported.
    BufferTooSmall = 11,
}

impl From<&Error> for HcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) => HcStatus::InvalidInput,
            Error::OffShell { .. } => HcStatus::OffShell,
            Error::Degenerate { .. } => HcStatus::Degenerate,
            Error::Numerical(_) => HcStatus::Numerical,
            Error::ConstructionFailure { .. } => HcStatus::ConstructionFailure,
            Error::Admissibility(_) => HcStatus::Admissibility,
            Error::Domain(_) => HcStatus::Domain,
            Error::NoEnclosure(_) => HcStatus::NoEnclosure,
        }
    }
}

/// A cone over a spherical cap in the ball.
pub struct HcCone {
    inner: BallCone,
}

/// A parsed and validated scene file.
pub struct HcScene {
    inner: Scene,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (HcStatus, String)>) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HcStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("panic inside the library");
            HcStatus::Panic
        }
    }
}

fn lib(e: Error) -> (HcStatus, String) {
    (HcStatus::from(&e), e.to_string())
}

fn null(what: &str) -> (HcStatus, String) {
    (HcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read<const N: usize>(p: *const f64, what: &str) -> Result<[f64; N], (HcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    let mut v = [0.0; N];
    v.copy_from_slice(std::slice::from_raw_parts(p, N));
    Ok(v)
}

unsafe fn cone<'a>(k: *const HcCone, what: &str) -> Result<&'a BallCone, (HcStatus, String)> {
    k.as_ref().map(|c| &c.inner).ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), (HcStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = v;
    Ok(())
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (HcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (HcStatus::InvalidInput, format!("{what} is not UTF-8")))
}

/// Copies `s` with a terminating NUL into `buf` of `cap` bytes. `needed`
/// receives the size including the NUL.
unsafe fn write_str(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Result<(), (HcStatus, String)> {
    let n = s.len() + 1;
    if !needed.is_null() {
        *needed = n;
    }
    if buf.is_null() || cap < n {
        return Err((HcStatus::BufferTooSmall, format!("need {n} bytes, have {cap}")));
    }
    std::ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

fn boxed(k: BallCone) -> *mut HcCone {
    Box::into_raw(Box::new(HcCone { inner: k }))
}

/// Copies the last error message of this thread into `buf`. Returns the size
/// needed including the NUL, whether or not it fit.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hc_last_error(buf: *mut c_char, cap: usize) -> usize {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    let mut needed = 0;
    let _ = write_str(&msg, buf, cap, &mut needed);
    needed
}

/// Cone with the given apex, cap axis (any nonzero length) and cap
/// half-angle in degrees.
///
/// # Safety
/// `apex` and `axis` must point to 3 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_new(
    apex: *const f64,
    axis: *const f64,
    half_angle_deg: f64,
    out: *mut *mut HcCone,
) -> HcStatus {
    guard(|| {
        let k = BallCone::from_parts(read::<3>(apex, "apex")?, read::<3>(axis, "axis")?, half_angle_deg)
            .map_err(lib)?;
        put(out, boxed(k), "out")
    })
}

/// Releases a cone. Null is ignored.
///
/// # Safety
/// `k` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_free(k: *mut HcCone) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Reads back apex, unit axis and half-angle in degrees.
///
/// # Safety
/// `apex` and `axis` must point to 3 writable doubles, `half_angle_deg` to one.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_get(
    k: *const HcCone,
    apex: *mut f64,
    axis: *mut f64,
    half_angle_deg: *mut f64,
) -> HcStatus {
    guard(|| {
        let k = cone(k, "cone")?;
        if apex.is_null() || axis.is_null() {
            return Err(null("apex or axis"));
        }
        let (a, n) = (k.apex().coords(), k.base().n());
        for i in 0..3 {
            *apex.add(i) = a[i];
            *axis.add(i) = n[i];
        }
        put(half_angle_deg, k.base().half_angle().to_degrees(), "half_angle_deg")
    })
}

/// Membership of the ball point `x` in the open cone.
///
/// # Safety
/// `x` must point to 3 doubles, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_contains(k: *const HcCone, x: *const f64, out: *mut bool) -> HcStatus {
    guard(|| {
        let k = cone(k, "cone")?;
        let x = read::<3>(x, "x")?;
        put(out, k.contains(&Vector3::from(x)), "out")
    })
}

/// `closure(K1) ⊆ closure(K2)`, with the signed margin.
///
/// # Safety
/// Handles must be valid; `out` and `margin` writable or null.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_leq(
    k1: *const HcCone,
    k2: *const HcCone,
    out: *mut bool,
    margin: *mut f64,
) -> HcStatus {
    guard(|| {
        let (a, b) = (cone(k1, "k1")?, cone(k2, "k2")?);
        if !margin.is_null() {
            *margin = cone_leq_margin(a, b);
        }
        put(out, cone_leq(a, b), "out")
    })
}

/// Whether the cones are disjoint, with the separation (or overlap) margin.
/// Returns `HC_STATUS_DEGENERATE` inside the degeneracy window.
///
/// # Safety
/// Handles must be valid; `out` and `margin` writable or null.
#[no_mangle]
pub unsafe extern "C" fn hc_cones_disjoint(
    k1: *const HcCone,
    k2: *const HcCone,
    out: *mut bool,
    margin: *mut f64,
) -> HcStatus {
    guard(|| {
        let d = disjoint(cone(k1, "k1")?, cone(k2, "k2")?).map_err(lib)?;
        if !margin.is_null() {
            *margin = d.margin();
        }
        put(out, d.is_disjoint(), "out")
    })
}

/// Image of the cone under the boost of rapidity `chi` along `dir`.
///
/// # Safety
/// `dir` must point to 3 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_cone_boost(
    k: *const HcCone,
    dir: *const f64,
    chi: f64,
    out: *mut *mut HcCone,
) -> HcStatus {
    guard(|| {
        let k = cone(k, "cone")?;
        let d = nalgebra_dir(read::<3>(dir, "dir")?)?;
        let l = LorentzTransform::boost(&d, chi).map_err(lib)?;
        put(out, boxed(k.transform(&l).map_err(lib)?), "out")
    })
}

fn nalgebra_dir(v: [f64; 3]) -> Result<Vector3<f64>, (HcStatus, String)> {
    let v = Vector3::from(v);
    v.try_normalize(0.0)
        .ok_or_else(|| (HcStatus::InvalidInput, "direction must be nonzero".into()))
}

/// A cone containing both, or `HC_STATUS_NO_ENCLOSURE`.
///
/// # Safety
/// Handles must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_enclosing_cone(
    k1: *const HcCone,
    k2: *const HcCone,
    out: *mut *mut HcCone,
) -> HcStatus {
    guard(|| {
        let e = enclosing_cone(cone(k1, "k1")?, cone(k2, "k2")?).ok_or((
            HcStatus::NoEnclosure,
            "no cone of the family contains both".to_string(),
        ))?;
        put(out, boxed(e), "out")
    })
}

/// A cone disjoint from both of two disjoint cones.
///
/// # Safety
/// Handles must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_common_complement_cone(
    k1: *const HcCone,
    k2: *const HcCone,
    out: *mut *mut HcCone,
) -> HcStatus {
    guard(|| {
        let c = common_complement_cone(cone(k1, "k1")?, cone(k2, "k2")?).map_err(lib)?;
        put(out, boxed(c), "out")
    })
}

/// Hyperbolic distance between two ball points on the shell `tau`.
///
/// # Safety
/// `u` and `v` must point to 3 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_ball_distance(u: *const f64, v: *const f64, tau: f64, out: *mut f64) -> HcStatus {
    guard(|| {
        let u = BallPoint::try_from(read::<3>(u, "u")?).map_err(lib)?;
        let v = BallPoint::try_from(read::<3>(v, "v")?).map_err(lib)?;
        let h = Hyperboloid::new(tau).map_err(lib)?;
        put(out, ball_distance(&u, &v, &h), "out")
    })
}

/// The shadow parameter `c` between the shells `sigma` and `tau`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_shadow_parameter(sigma: f64, tau: f64, out: *mut f64) -> HcStatus {
    guard(|| {
        if !(sigma > 0.0 && tau > 0.0 && sigma.is_finite() && tau.is_finite()) {
            return Err((HcStatus::InvalidInput, "shell parameters must be positive".into()));
        }
        put(out, shadow_parameter(sigma, tau), "out")
    })
}

/// Whether the event `x` lies in the causal completion of the hypercone of
/// `k` on the shell `tau`.
///
/// # Safety
/// `x` must point to 4 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_in_causal_completion(
    x: *const f64,
    tau: f64,
    k: *const HcCone,
    out: *mut bool,
) -> HcStatus {
    guard(|| {
        let x = FourVector::from(read::<4>(x, "x")?);
        let c = Hypercone::new(Hyperboloid::new(tau).map_err(lib)?, *cone(k, "cone")?);
        put(out, in_causal_completion(&x, &c).map_err(lib)?, "out")
    })
}

/// Parses a scene from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_scene_parse(json: *const c_char, out: *mut *mut HcScene) -> HcStatus {
    guard(|| {
        let s = Scene::parse(text(json, "json")?).map_err(lib)?;
        put(out, Box::into_raw(Box::new(HcScene { inner: s })), "out")
    })
}

/// Releases a scene. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hc_scene_free(s: *mut HcScene) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Copies the named cone of a scene into a new handle.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_scene_cone(s: *const HcScene, name: *const c_char, out: *mut *mut HcCone) -> HcStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("scene"))?;
        let k = s.inner.cone(text(name, "name")?).map_err(lib)?;
        put(out, boxed(*k), "out")
    })
}

/// Evaluates a query such as `"disjoint A B"` and writes the result line.
///
/// # Safety
/// `query` must be a NUL-terminated string, `buf` null or `cap` writable
/// bytes, `needed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn hc_scene_check(
    s: *const HcScene,
    query: *const c_char,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> HcStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("scene"))?;
        let line = check(&s.inner, text(query, "query")?, &Tolerances::DEFAULT).map_err(lib)?;
        write_str(&line, buf, cap, needed)
    })
}

/// Runs the self-test; `passed` receives the verdict.
///
/// # Safety
/// `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_selftest(seed: u64, budget: usize, passed: *mut bool) -> HcStatus {
    guard(|| {
        let r = hypercone::selftest::run(seed, budget, &Tolerances::DEFAULT).map_err(lib)?;
        put(passed, r.passed(), "passed")
    })
}
