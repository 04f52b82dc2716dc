//! C ABI over `tverberg_core`.
//!
//! Every fallible call returns a [`TvStatus`]; on failure the message is
//! available from [`tv_last_error`] on the same thread. Handles are opaque
//! and owned by the caller, who releases them with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tverberg_core::geometry::PointSet;
use tverberg_core::graphs::{self, CostFunction, Edge, Matching, Tree};
use tverberg_core::io::CertificateDocument;
use tverberg_core::tverberg::{self, Classification, TverbergCertificate};
use tverberg_core::{hunt, improve, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DuplicatePoints = 3,
    Unsupported = 4,
    TooLarge = 5,
    CertificateFailure = 6,
    NoCycleFound = 7,
    IterationLimit = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvCostFunction {
    Identity = 0,
    Square = 1,
    Sqrt = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvClassification {
    Open = 0,
    ClosedBoundary = 1,
    None = 2,
}

pub struct TvPointSet(PointSet);

pub struct TvEdges(Vec<Edge>);

pub struct TvCertificate {
    doc: CertificateDocument,
    cert: TverbergCertificate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NUL removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> TvStatus {
    match err {
        Error::DuplicatePoints(..) => TvStatus::DuplicatePoints,
        Error::Unsupported(_) => TvStatus::Unsupported,
        Error::TooLarge { .. } => TvStatus::TooLarge,
        Error::CertificateFailure(_)
        | Error::NondifferentiableActive { .. }
        | Error::DegenerateMidpoint(..)
        | Error::TangentIdentity { .. } => TvStatus::CertificateFailure,
        Error::NoCycleFound(_) => TvStatus::NoCycleFound,
        Error::IterationLimit(_) => TvStatus::IterationLimit,
        _ => TvStatus::InvalidInput,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), TvStatus>) -> TvStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TvStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".to_string());
            TvStatus::Panic
        }
    }
}

fn fail(err: Error) -> TvStatus {
    let s = status_of(&err);
    set_error(err.to_string());
    s
}

fn null(what: &str) -> TvStatus {
    set_error(format!("null pointer: {what}"));
    TvStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, TvStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), TvStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn certificate(ps: &PointSet, graph: &str, edges: &[Edge], cert: TverbergCertificate) -> TvCertificate {
    TvCertificate { doc: CertificateDocument::new(ps, graph, edges, &cert), cert }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn tv_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Copies `n * dim` row-major coordinates into a new point set.
///
/// # Safety
/// `coords` must point to `n * dim` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn tv_pointset_new(
    coords: *const f64,
    n: usize,
    dim: usize,
    out: *mut *mut TvPointSet,
) -> TvStatus {
    guard(|| {
        if coords.is_null() {
            return Err(null("coords"));
        }
        let total = n.checked_mul(dim).ok_or_else(|| fail(Error::Parse("size overflow".into())))?;
        if dim == 0 {
            return Err(fail(Error::ZeroDimension));
        }
        let flat = std::slice::from_raw_parts(coords, total);
        let rows: Vec<&[f64]> = flat.chunks(dim).collect();
        let ps = PointSet::from_rows(&rows).map_err(fail)?;
        write_out(out, TvPointSet(ps))
    })
}

/// # Safety
/// `ps` must be null or a handle from [`tv_pointset_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tv_pointset_free(ps: *mut TvPointSet) {
    if !ps.is_null() {
        drop(Box::from_raw(ps));
    }
}

/// # Safety
/// `ps` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tv_pointset_len(ps: *const TvPointSet) -> usize {
    ps.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `ps` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tv_pointset_dim(ps: *const TvPointSet) -> usize {
    ps.as_ref().map_or(0, |p| p.0.dim())
}

/// Builds an edge list from `count` index pairs stored as `2 * count` values.
///
/// # Safety
/// `pairs` must point to `2 * count` readable values.
#[no_mangle]
pub unsafe extern "C" fn tv_edges_new(pairs: *const usize, count: usize, out: *mut *mut TvEdges) -> TvStatus {
    guard(|| {
        if pairs.is_null() && count > 0 {
            return Err(null("pairs"));
        }
        let flat = if count == 0 { &[][..] } else { std::slice::from_raw_parts(pairs, 2 * count) };
        let edges = flat.chunks(2).map(|c| (c[0], c[1])).collect();
        write_out(out, TvEdges(edges))
    })
}

/// # Safety
/// `edges` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tv_edges_free(edges: *mut TvEdges) {
    if !edges.is_null() {
        drop(Box::from_raw(edges));
    }
}

/// # Safety
/// `edges` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tv_edges_len(edges: *const TvEdges) -> usize {
    edges.as_ref().map_or(0, |e| e.0.len())
}

/// Endpoints of edge `k`, smaller index first.
///
/// # Safety
/// `edges` must be a live handle; `a` and `b` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tv_edges_get(edges: *const TvEdges, k: usize, a: *mut usize, b: *mut usize) -> TvStatus {
    guard(|| {
        let e = deref(edges, "edges")?;
        if a.is_null() || b.is_null() {
            return Err(null("a/b"));
        }
        let &(i, j) = e.0.get(k).ok_or_else(|| fail(Error::IndexOutOfRange { index: k, len: e.0.len() }))?;
        *a = i;
        *b = j;
        Ok(())
    })
}

/// Spanning tree maximizing the sum of `f(|a - b|)` over its edges.
///
/// # Safety
/// `ps` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tv_max_sum_tree(ps: *const TvPointSet, f: TvCostFunction, out: *mut *mut TvEdges) -> TvStatus {
    guard(|| {
        let ps = deref(ps, "ps")?;
        let f = match f {
            TvCostFunction::Identity => CostFunction::Identity,
            TvCostFunction::Square => CostFunction::Square,
            TvCostFunction::Sqrt => CostFunction::Sqrt,
        };
        let tree = graphs::max_sum_tree(&ps.0, &f).map_err(fail)?;
        write_out(out, TvEdges(tree.edges().to_vec()))
    })
}

/// Perfect matching maximizing the total edge length.
///
/// # Safety
/// `ps` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tv_max_sum_matching(ps: *const TvPointSet, out: *mut *mut TvEdges) -> TvStatus {
    guard(|| {
        let ps = deref(ps, "ps")?;
        let m = graphs::max_sum_matching(&ps.0).map_err(fail)?;
        write_out(out, TvEdges(m.edges().to_vec()))
    })
}

/// Minimizer certificate for the balls induced by `edges`.
///
/// # Safety
/// `ps` and `edges` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tv_verify(
    ps: *const TvPointSet,
    edges: *const TvEdges,
    out: *mut *mut TvCertificate,
) -> TvStatus {
    guard(|| {
        let (ps, edges) = (deref(ps, "ps")?, deref(edges, "edges")?);
        let cert = tverberg::verify_tverberg(&ps.0, &edges.0).map_err(fail)?;
        write_out(out, certificate(&ps.0, "graph", &edges.0, cert))
    })
}

/// Enclosing-ball-center certificate for a spanning tree.
///
/// # Safety
/// `ps` and `tree` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tv_tree_witness(
    ps: *const TvPointSet,
    tree: *const TvEdges,
    out: *mut *mut TvCertificate,
) -> TvStatus {
    guard(|| {
        let (ps, tree) = (deref(ps, "ps")?, deref(tree, "tree")?);
        let t = Tree::new(ps.0.len(), &tree.0).map_err(fail)?;
        let cert = tverberg::tree_witness_seb(&ps.0, &t).map_err(fail)?;
        write_out(out, certificate(&ps.0, "tree", t.edges(), cert))
    })
}

/// Improves a planar perfect matching until its open balls share a point.
/// `steps` (optional) receives the number of swaps performed.
///
/// # Safety
/// `ps` and `initial` must be live handles; `out_edges` and `out_cert` must
/// be writable; `steps` may be null.
#[no_mangle]
pub unsafe extern "C" fn tv_local_search(
    ps: *const TvPointSet,
    initial: *const TvEdges,
    max_iters: usize,
    out_edges: *mut *mut TvEdges,
    out_cert: *mut *mut TvCertificate,
    steps: *mut usize,
) -> TvStatus {
    guard(|| {
        let (ps, initial) = (deref(ps, "ps")?, deref(initial, "initial")?);
        if out_edges.is_null() || out_cert.is_null() {
            return Err(null("out"));
        }
        let m = Matching::new(ps.0.len(), &initial.0).map_err(fail)?;
        let result = improve::local_search(&ps.0, &m, max_iters).map_err(fail)?;
        if !steps.is_null() {
            *steps = result.iterations();
        }
        let edges = result.matching.edges().to_vec();
        write_out(out_cert, certificate(&ps.0, "matching", &edges, result.certificate))?;
        write_out(out_edges, TvEdges(edges))
    })
}

/// Depth of the max-sum matching divided by the minimum pairwise distance.
///
/// # Safety
/// `ps` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tv_depth_ratio(ps: *const TvPointSet, out: *mut f64) -> TvStatus {
    guard(|| {
        let ps = deref(ps, "ps")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = hunt::depth_ratio(&ps.0).map_err(fail)?;
        Ok(())
    })
}

/// # Safety
/// `cert` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tv_certificate_free(cert: *mut TvCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// # Safety
/// `cert` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tv_certificate_classification(cert: *const TvCertificate) -> TvClassification {
    match cert.as_ref().map(|c| c.cert.classification) {
        Some(Classification::Open) => TvClassification::Open,
        Some(Classification::ClosedBoundary) => TvClassification::ClosedBoundary,
        _ => TvClassification::None,
    }
}

/// Objective value at the witness; NaN for a null handle.
///
/// # Safety
/// `cert` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tv_certificate_value(cert: *const TvCertificate) -> f64 {
    cert.as_ref().map_or(f64::NAN, |c| c.cert.value)
}

/// # Safety
/// `cert` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tv_certificate_depth(cert: *const TvCertificate) -> f64 {
    cert.as_ref().map_or(f64::NAN, |c| c.cert.depth)
}

/// Copies the witness into `buf` when `len` covers it. Returns the witness
/// dimension, or 0 for a null handle.
///
/// # Safety
/// `cert` must be a live handle; `buf` must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tv_certificate_witness(cert: *const TvCertificate, buf: *mut f64, len: usize) -> usize {
    let Some(c) = cert.as_ref() else { return 0 };
    let w = c.cert.witness.coords();
    if !buf.is_null() && len >= w.len() {
        ptr::copy_nonoverlapping(w.as_ptr(), buf, w.len());
    }
    w.len()
}

/// Certificate document as JSON. Release with [`tv_string_free`].
///
/// # Safety
/// `cert` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tv_certificate_json(cert: *const TvCertificate, out: *mut *mut c_char) -> TvStatus {
    guard(|| {
        let c = deref(cert, "cert")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CString::new(c.doc.to_json()).expect("JSON has no NUL");
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
