//! C interface to `contmean`.
//!
//! Graphs live behind an opaque [`CmGraph`] handle that caches the distance
//! matrix. Every function returns a [`CmStatus`]; on failure a message is
//! available from [`cm_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use contmean::aggregate::{continuous_mean_with, discrete_from, wiener_from, Backend, MeanOptions};
use contmean::closed_forms::{cactus_mean, complete_uniform_mean, tree_mean};
use contmean::graph::{parse_graph, WeightedGraph};
use contmean::paths::{all_pairs_distances, DistanceMatrix};
use contmean::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidGraph = 4,
    InvalidArgument = 5,
    WrongClass = 6,
    CapExceeded = 7,
    Panic = 8,
}

/// Pair-mean engine for the generic calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmBackend {
    Spt = 0,
    Roof = 1,
}

impl From<CmBackend> for Backend {
    fn from(b: CmBackend) -> Self {
        match b {
            CmBackend::Spt => Backend::Spt,
            CmBackend::Roof => Backend::Roof,
        }
    }
}

/// Opaque graph handle.
pub struct CmGraph {
    graph: WeightedGraph,
    distances: DistanceMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> CmStatus {
    match err {
        Error::Parse { .. } => CmStatus::Parse,
        Error::Validation(_) | Error::MetricEdgeViolation { .. } | Error::EmptyEdgeSet => CmStatus::InvalidGraph,
        Error::NotATree | Error::NotACactus(_) | Error::NotUniform { .. } => CmStatus::WrongClass,
        Error::CapExceeded { .. } => CmStatus::CapExceeded,
        _ => CmStatus::InvalidArgument,
    }
}

/// Runs `op`, recording errors and converting panics.
fn guard(op: impl FnOnce() -> Result<(), (CmStatus, String)>) -> CmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(op)) {
        Ok(Ok(())) => CmStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CmStatus::Panic
        }
    }
}

fn lib(err: Error) -> (CmStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (CmStatus, String) {
    (CmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn graph_ref<'a>(g: *const CmGraph) -> Result<&'a CmGraph, (CmStatus, String)> {
    g.as_ref().ok_or_else(|| null("graph"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (CmStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Parses an edge list or JSON document into a new graph handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer. The
/// handle must be released with [`cm_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn cm_graph_from_text(text: *const c_char, out: *mut *mut CmGraph) -> CmStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("output pointer"));
        }
        out.write(ptr::null_mut());
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| (CmStatus::InvalidUtf8, e.to_string()))?;
        let graph = parse_graph(text).map_err(lib)?;
        let distances = all_pairs_distances(&graph);
        out.write(Box::into_raw(Box::new(CmGraph { graph, distances })));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `g` must come from [`cm_graph_from_text`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cm_graph_free(g: *mut CmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_graph_vertex_count(g: *const CmGraph, out: *mut usize) -> CmStatus {
    guard(|| write(out, graph_ref(g)?.graph.vertex_count()))
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_graph_edge_count(g: *const CmGraph, out: *mut usize) -> CmStatus {
    guard(|| write(out, graph_ref(g)?.graph.edge_count()))
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_continuous_mean(g: *const CmGraph, backend: CmBackend, out: *mut f64) -> CmStatus {
    guard(|| {
        let h = graph_ref(g)?;
        let r = continuous_mean_with(&h.graph, &h.distances, backend.into(), &MeanOptions::default()).map_err(lib)?;
        write(out, r.value)
    })
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_discrete_mean(g: *const CmGraph, out: *mut f64) -> CmStatus {
    guard(|| write(out, discrete_from(&graph_ref(g)?.distances)))
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_wiener_index(g: *const CmGraph, out: *mut f64) -> CmStatus {
    guard(|| write(out, wiener_from(&graph_ref(g)?.distances)))
}

/// Mean distance between the points of edges `e` and `f`.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_pair_mean(
    g: *const CmGraph,
    e: usize,
    f: usize,
    backend: CmBackend,
    out: *mut f64,
) -> CmStatus {
    guard(|| {
        let h = graph_ref(g)?;
        let m = h.graph.edge_count();
        if e >= m || f >= m {
            return Err((
                CmStatus::InvalidArgument,
                format!("edge pair ({e}, {f}) out of range for {m} edges"),
            ));
        }
        write(out, Backend::from(backend).pair_mean(&h.graph, &h.distances, e, f))
    })
}

/// Linear-time mean of a tree.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_tree_mean(g: *const CmGraph, out: *mut f64) -> CmStatus {
    guard(|| write(out, tree_mean(&graph_ref(g)?.graph).map_err(lib)?))
}

/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_cactus_mean(g: *const CmGraph, out: *mut f64) -> CmStatus {
    guard(|| write(out, cactus_mean(&graph_ref(g)?.graph).map_err(lib)?))
}

/// Mean of the complete graph on `n` vertices with every edge of `length`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cm_complete_uniform_mean(n: usize, length: f64, out: *mut f64) -> CmStatus {
    guard(|| write(out, complete_uniform_mean(n, length).map_err(lib)?))
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn cm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
