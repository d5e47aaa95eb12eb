//! C ABI over `graphconc`.
//!
//! Every fallible function returns a [`GcStatus`]. On failure the message is
//! kept per thread and can be copied out with [`gc_last_error_message`].
//! Objects are opaque handles created by `*_new`/`*_parse`/`*_from_*`
//! functions and released with the matching `*_free`.
//!
//! Functions that fill a caller buffer take `(out, capacity, len)`: the
//! required length is always stored in `*len`, and nothing is written when
//! `capacity` is too small (status [`GcStatus::BufferTooSmall`]).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use graphconc::bounds::BoundRequest;
use graphconc::graph::{parse_edge_list, serialize_edge_list, Graph};
use graphconc::models::{McmcConfig, ModelSpec};
use graphconc::oracle::{
    compute_dependence_profile, exact_tail_prob, exact_theta_star, ExactDistribution,
    SupportPredicate,
};
use graphconc::rng::stream;
use graphconc::stats::{Statistic, StatisticKind};
use graphconc::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    InvalidModel = 5,
    StateSpaceTooLarge = 6,
    UndefinedDistribution = 7,
    Precondition = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Statistics that need no block structure.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcKind {
    Degree = 0,
    OutDegree = 1,
    InDegree = 2,
    Esp = 3,
    Geodesic = 4,
}

impl From<GcKind> for StatisticKind {
    fn from(k: GcKind) -> Self {
        match k {
            GcKind::Degree => StatisticKind::Degree,
            GcKind::OutDegree => StatisticKind::OutDegree,
            GcKind::InDegree => StatisticKind::InDegree,
            GcKind::Esp => StatisticKind::EdgewiseSharedPartner,
            GcKind::Geodesic => StatisticKind::GeodesicDistance,
        }
    }
}

/// Opaque graph handle.
pub struct GcGraph {
    inner: Graph,
}

/// Opaque handle to an exactly enumerated graph distribution.
pub struct GcExact {
    inner: ExactDistribution,
}

/// Scalar dependence coefficients of one statistic.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GcProfile {
    pub units: usize,
    pub bins: usize,
    pub c_n: f64,
    /// Meaningful only when `has_delta_n` is true.
    pub delta_n: f64,
    pub has_delta_n: bool,
    pub prop1_bound: f64,
    pub d_n: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GcBound {
    pub epsilon: f64,
    pub confidence: f64,
    pub vacuous: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(GcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => GcStatus::Parse,
            Error::InvalidModel(_) => GcStatus::InvalidModel,
            Error::StateSpaceTooLarge { .. } => GcStatus::StateSpaceTooLarge,
            Error::UndefinedDistribution(_) | Error::RandomBasisCount(..) => {
                GcStatus::UndefinedDistribution
            }
            Error::Precondition(_) => GcStatus::Precondition,
            _ => GcStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            GcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GcStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(GcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(GcStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Boxes `value` into `*out`, checking `out` first so nothing leaks.
unsafe fn give<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

unsafe fn fill<T: Copy>(
    src: &[T],
    out: *mut T,
    capacity: usize,
    len: *mut usize,
) -> Result<(), Fail> {
    put(len, src.len(), "len")?;
    if capacity < src.len() {
        return Err(Fail(
            GcStatus::BufferTooSmall,
            format!("buffer holds {capacity}, need {}", src.len()),
        ));
    }
    if !src.is_empty() {
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    }
    Ok(())
}

fn parse_model(json: &str) -> Result<ModelSpec, Fail> {
    serde_json::from_str(json).map_err(|e| Fail(GcStatus::Parse, format!("model JSON: {e}")))
}

fn nodes_arg(nodes: usize) -> Option<usize> {
    (nodes > 0).then_some(nodes)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `capacity > 0`). Returns the full message
/// length without the terminator, or 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be valid for `capacity` bytes, or null with `capacity == 0`.
#[no_mangle]
pub unsafe extern "C" fn gc_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let bytes = slot.as_ref().map(|c| c.as_bytes()).unwrap_or_default();
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Empty graph on `n` nodes.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_new(
    n: usize,
    directed: bool,
    out: *mut *mut GcGraph,
) -> GcStatus {
    guard(|| {
        let g = Graph::new(n, directed)?;
        give(out, GcGraph { inner: g })
    })
}

/// Parses the edge-list text format. Any blocks section is ignored.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_parse(text: *const c_char, out: *mut *mut GcGraph) -> GcStatus {
    guard(|| {
        let (g, _) = parse_edge_list(str_arg(text, "text")?)?;
        give(out, GcGraph { inner: g })
    })
}

/// # Safety
/// `g` must come from this library and not be used afterwards. Null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_free(g: *mut GcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Node count, 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_node_count(g: *const GcGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// Edge count, 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_edge_count(g: *const GcGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.edge_count())
}

/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_is_directed(g: *const GcGraph) -> bool {
    g.as_ref().is_some_and(|g| g.inner.is_directed())
}

/// False for a null handle or out-of-range nodes.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_has_edge(g: *const GcGraph, i: usize, j: usize) -> bool {
    g.as_ref()
        .is_some_and(|g| i < g.inner.n() && j < g.inner.n() && g.inner.has_edge(i, j))
}

/// Adds or removes edge `(i, j)`, 0-based.
///
/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_set_edge(
    g: *mut GcGraph,
    i: usize,
    j: usize,
    present: bool,
) -> GcStatus {
    guard(|| {
        let g = g.as_mut().ok_or_else(|| null("graph"))?;
        Ok(g.inner.set_edge(i, j, present)?)
    })
}

/// Writes the edge-list text, NUL-terminated. `*len` excludes the NUL, so
/// `capacity` must be at least `*len + 1`.
///
/// # Safety
/// `buf` must be valid for `capacity` bytes; `len` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_to_edge_list(
    g: *const GcGraph,
    buf: *mut c_char,
    capacity: usize,
    len: *mut usize,
) -> GcStatus {
    guard(|| {
        let g = handle(g, "graph")?;
        let text = CString::new(serialize_edge_list(&g.inner, None)).expect("ASCII text");
        let bytes = text.as_bytes_with_nul();
        put(len, bytes.len() - 1, "len")?;
        if capacity < bytes.len() {
            return Err(Fail(
                GcStatus::BufferTooSmall,
                format!("buffer holds {capacity} bytes, need {}", bytes.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, bytes.len());
        Ok(())
    })
}

/// Empirical distribution `s_k / M` of `kind` on `g`.
///
/// # Safety
/// `out` must be valid for `capacity` doubles; `len` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn gc_graph_distribution(
    g: *const GcGraph,
    kind: GcKind,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> GcStatus {
    guard(|| {
        let g = handle(g, "graph")?;
        let dist = Statistic::simple(kind.into())?.distribution(&g.inner)?;
        fill(&dist.values, out, capacity, len)
    })
}

/// Samples one graph from a model given as JSON. `nodes == 0` takes the
/// size from the model. MCMC models use the default study schedule.
///
/// # Safety
/// `model_json` must be a NUL-terminated string; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn gc_model_sample(
    model_json: *const c_char,
    nodes: usize,
    seed: u64,
    out: *mut *mut GcGraph,
) -> GcStatus {
    guard(|| {
        let spec = parse_model(str_arg(model_json, "model_json")?)?;
        let n = spec.resolve_nodes(nodes_arg(nodes))?;
        let g = spec.sample(Some(n), &McmcConfig::for_nodes(n), &mut stream(seed, &[]))?;
        give(out, GcGraph { inner: g })
    })
}

/// Enumerates the law of a model given as JSON. `nodes == 0` takes the
/// size from the model.
///
/// # Safety
/// `model_json` must be a NUL-terminated string; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn gc_exact_from_model(
    model_json: *const c_char,
    nodes: usize,
    out: *mut *mut GcExact,
) -> GcStatus {
    guard(|| {
        let spec = parse_model(str_arg(model_json, "model_json")?)?;
        let d = ExactDistribution::from_model(&spec, nodes_arg(nodes))?;
        give(out, GcExact { inner: d })
    })
}

/// New distribution conditioned on a support predicate (`all`, `edges=m`,
/// `max-edges=m`, `max-degree=d`).
///
/// # Safety
/// `d` must be a live handle, `predicate` a NUL-terminated string and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_exact_condition(
    d: *const GcExact,
    predicate: *const c_char,
    out: *mut *mut GcExact,
) -> GcStatus {
    guard(|| {
        let d = handle(d, "distribution")?;
        let pred: SupportPredicate = str_arg(predicate, "predicate")?.parse()?;
        let c = d.inner.condition(&pred)?;
        give(out, GcExact { inner: c })
    })
}

/// # Safety
/// `d` must come from this library and not be used afterwards. Null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn gc_exact_free(d: *mut GcExact) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of stored graphs, 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_exact_state_count(d: *const GcExact) -> usize {
    d.as_ref().map_or(0, |d| d.inner.len())
}

/// Exact `E F_N` for `kind`.
///
/// # Safety
/// `out` must be valid for `capacity` doubles; `len` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn gc_exact_theta_star(
    d: *const GcExact,
    kind: GcKind,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> GcStatus {
    guard(|| {
        let d = handle(d, "distribution")?;
        let theta = exact_theta_star(&d.inner, &Statistic::simple(kind.into())?)?;
        fill(&theta, out, capacity, len)
    })
}

/// Exact `P(|F_N - theta*|_inf >= t)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_exact_tail_prob(
    d: *const GcExact,
    kind: GcKind,
    t: f64,
    out: *mut f64,
) -> GcStatus {
    guard(|| {
        let d = handle(d, "distribution")?;
        let p = exact_tail_prob(&d.inner, &Statistic::simple(kind.into())?, t)?;
        put(out, p, "out")
    })
}

/// Exact dependence coefficients over the whole support.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_exact_profile(
    d: *const GcExact,
    kind: GcKind,
    out: *mut GcProfile,
) -> GcStatus {
    guard(|| {
        let d = handle(d, "distribution")?;
        let stat = Statistic::simple(kind.into())?;
        let p = compute_dependence_profile(&d.inner, &stat, &SupportPredicate::All)?;
        put(
            out,
            GcProfile {
                units: p.units,
                bins: p.bins,
                c_n: p.c_n,
                delta_n: p.delta_n.unwrap_or(f64::NAN),
                has_delta_n: p.delta_n.is_some(),
                prop1_bound: p.prop1_bound,
                d_n: p.d_n,
            },
            "out",
        )
    })
}

/// Evaluates a bound request given as JSON, e.g.
/// `{"bound": "Thm1-exp", "D_N": 2.5, "M": 100, "p": 4}`.
///
/// # Safety
/// `request_json` must be a NUL-terminated string; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn gc_bound_evaluate(
    request_json: *const c_char,
    out: *mut GcBound,
) -> GcStatus {
    guard(|| {
        let request: BoundRequest = serde_json::from_str(str_arg(request_json, "request_json")?)
            .map_err(|e| Fail(GcStatus::Parse, format!("bound JSON: {e}")))?;
        let r = request.evaluate()?;
        put(
            out,
            GcBound {
                epsilon: r.epsilon,
                confidence: r.confidence,
                vacuous: r.vacuous,
            },
            "out",
        )
    })
}
