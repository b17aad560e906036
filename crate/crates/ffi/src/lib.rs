//! C ABI over `condec`. Graphs and solutions are opaque heap handles owned
//! by the caller and released with the matching `*_free`. Every fallible
//! call returns a [`CondecStatus`]; on failure the message is kept per thread
//! and read with [`condec_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use condec::io::parse_graph;
use condec::solvers::{
    baker_solve, brute_force, dp_solve, BakerOptions, Deletion, Instance, ProblemKind, Solution,
};
use condec::treedec::{heuristic_decompose, to_nice};
use condec::{Error, Graph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    NonPlanar = 4,
    Internal = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondecProblem {
    Oct = 0,
    Eb = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondecEngine {
    Baker = 0,
    Dp = 1,
    Brute = 2,
}

/// Opaque graph handle.
pub struct CondecGraph {
    graph: Graph,
}

/// Opaque result of a solve call. A NO answer is a valid solution handle
/// with `feasible == false`.
pub struct CondecSolution {
    solution: Option<Solution>,
    pairs_tried: usize,
    max_width: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CondecStatus {
    match e {
        Error::Parse { .. } => CondecStatus::Parse,
        Error::NonPlanar => CondecStatus::NonPlanar,
        Error::Internal(_) | Error::Io(_) => CondecStatus::Internal,
        _ => CondecStatus::InvalidArgument,
    }
}

fn guard<F: FnOnce() -> Result<(), (CondecStatus, String)>>(f: F) -> CondecStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CondecStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside condec".into());
            CondecStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (CondecStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CondecStatus, String) {
    (CondecStatus::NullPointer, format!("{what} is null"))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn condec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Graph with vertices `0..n` and no edges.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn condec_graph_new(n: usize, out: *mut *mut CondecGraph) -> CondecStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let h = Box::new(CondecGraph {
            graph: Graph::with_vertices(0..n),
        });
        unsafe { *out = Box::into_raw(h) };
        Ok(())
    })
}

/// Parses the text graph format (header `n m`, edge lines, optional
/// `apex:`, `rot` and `marked_faces:` lines).
///
/// # Safety
/// `text` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn condec_graph_parse(
    text: *const c_char,
    out: *mut *mut CondecGraph,
) -> CondecStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let s = unsafe { CStr::from_ptr(text) }.to_str().map_err(|_| {
            (
                CondecStatus::InvalidArgument,
                "text is not UTF-8".to_string(),
            )
        })?;
        let gf = parse_graph(s).map_err(lib_err)?;
        unsafe { *out = Box::into_raw(Box::new(CondecGraph { graph: gf.graph })) };
        Ok(())
    })
}

/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn condec_graph_free(g: *mut CondecGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn condec_graph_add_edge(
    g: *mut CondecGraph,
    u: usize,
    v: usize,
) -> CondecStatus {
    guard(|| {
        let g = unsafe { g.as_mut() }.ok_or_else(|| null("graph"))?;
        if !g.graph.contains(u) || !g.graph.contains(v) {
            return Err((
                CondecStatus::InvalidArgument,
                format!("edge ({u}, {v}) has an unknown endpoint"),
            ));
        }
        g.graph.try_add_edge(u, v).map_err(lib_err)
    })
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn condec_graph_num_vertices(g: *const CondecGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.graph.n())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn condec_graph_num_edges(g: *const CondecGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.graph.m())
}

/// Width of the min-fill heuristic decomposition.
///
/// # Safety
/// `g` must be a live graph handle and `width` writable.
#[no_mangle]
pub unsafe extern "C" fn condec_heuristic_width(
    g: *const CondecGraph,
    width: *mut usize,
) -> CondecStatus {
    guard(|| {
        let g = unsafe { g.as_ref() }.ok_or_else(|| null("graph"))?;
        if width.is_null() {
            return Err(null("width"));
        }
        unsafe { *width = heuristic_decompose(&g.graph).width() };
        Ok(())
    })
}

/// Minimum solution of size at most `k` over all vertices (OCT) or edges
/// (EB). `threads` applies to the Baker engine; 0 picks the default.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn condec_solve(
    g: *const CondecGraph,
    problem: CondecProblem,
    k: usize,
    engine: CondecEngine,
    threads: usize,
    out: *mut *mut CondecSolution,
) -> CondecStatus {
    guard(|| {
        let g = unsafe { g.as_ref() }.ok_or_else(|| null("graph"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let problem = match problem {
            CondecProblem::Oct => ProblemKind::Oct,
            CondecProblem::Eb => ProblemKind::Eb,
        };
        let inst = Instance::new(g.graph.clone(), problem, k);
        let result = match engine {
            CondecEngine::Baker => {
                let opts = BakerOptions {
                    threads,
                    ..BakerOptions::default()
                };
                let o = baker_solve(&inst, None, opts).map_err(lib_err)?;
                CondecSolution {
                    solution: o.solution,
                    pairs_tried: o.stats.pairs_tried,
                    max_width: o.stats.max_width,
                }
            }
            CondecEngine::Dp => {
                let ntd = to_nice(&heuristic_decompose(&inst.graph)).map_err(lib_err)?;
                CondecSolution {
                    solution: dp_solve(&inst, &ntd).map_err(lib_err)?,
                    pairs_tried: 0,
                    max_width: ntd.width(),
                }
            }
            CondecEngine::Brute => CondecSolution {
                solution: brute_force(&inst),
                pairs_tried: 0,
                max_width: 0,
            },
        };
        unsafe { *out = Box::into_raw(Box::new(result)) };
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`condec_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn condec_solution_free(s: *mut CondecSolution) {
    if !s.is_null() {
        drop(unsafe { Box::from_raw(s) });
    }
}

/// # Safety
/// `s` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn condec_solution_feasible(s: *const CondecSolution) -> bool {
    unsafe { s.as_ref() }.is_some_and(|s| s.solution.is_some())
}

/// Number of deleted vertices or edges; 0 when infeasible.
///
/// # Safety
/// `s` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn condec_solution_size(s: *const CondecSolution) -> usize {
    unsafe { s.as_ref() }
        .and_then(|s| s.solution.as_ref())
        .map_or(0, |s| s.size)
}

/// # Safety
/// `s` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn condec_solution_pairs_tried(s: *const CondecSolution) -> usize {
    unsafe { s.as_ref() }.map_or(0, |s| s.pairs_tried)
}

/// # Safety
/// `s` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn condec_solution_max_width(s: *const CondecSolution) -> usize {
    unsafe { s.as_ref() }.map_or(0, |s| s.max_width)
}

/// Copies the deleted items into `buf`: vertex ids for OCT, endpoint pairs
/// `u0 v0 u1 v1 ...` for EB. `written` receives the number of values the
/// full answer needs; a short buffer gives `INVALID_ARGUMENT` with nothing
/// copied.
///
/// # Safety
/// `s` must be a live solution handle, `buf` valid for `len` writes (or null
/// with `len == 0`) and `written` writable.
#[no_mangle]
pub unsafe extern "C" fn condec_solution_items(
    s: *const CondecSolution,
    buf: *mut usize,
    len: usize,
    written: *mut usize,
) -> CondecStatus {
    guard(|| {
        let s = unsafe { s.as_ref() }.ok_or_else(|| null("solution"))?;
        if written.is_null() {
            return Err(null("written"));
        }
        let values: Vec<usize> = match s.solution.as_ref().map(|s| &s.deleted) {
            None => Vec::new(),
            Some(Deletion::Vertices(vs)) => vs.clone(),
            Some(Deletion::Edges(es)) => es.iter().flat_map(|&(u, v)| [u, v]).collect(),
        };
        unsafe { *written = values.len() };
        if values.len() > len {
            return Err((
                CondecStatus::InvalidArgument,
                format!("buffer holds {len} values, {} needed", values.len()),
            ));
        }
        if !values.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            unsafe { ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len()) };
        }
        Ok(())
    })
}
