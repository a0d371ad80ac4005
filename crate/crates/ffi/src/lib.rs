//! C interface to texttopo.
//!
//! Every fallible function returns a [`TtStatus`]; on failure a message is
//! available from [`tt_last_error`] on the same thread. Objects cross the
//! boundary as opaque handles that must be released with their `_free`
//! function. Panics never unwind into the caller; they surface as
//! `TT_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use texttopo::embed_topo::{embedding_topo_features, EmbedTopoConfig, EmbeddingMatrix, SmoothingMode};
use texttopo::ingest::{load_embeddings, tokenize, EmbeddingTable};
use texttopo::ph::{betti_at_scale, rips_persistence_with, Bar, DistanceMatrix, PersistenceDiagram, RipsOptions};
use texttopo::pipeline::{document_features, ExtractConfig, ExtractMode};
use texttopo::tfidf_topo::{tfidf_topo_features, TfidfTopoConfig, LOOP_STATS};
use texttopo::wasserstein::wasserstein;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Input violates a data invariant (asymmetric matrix, too few tokens, ...).
    Validation = 3,
    Parse = 4,
    Io = 5,
    /// Output buffer is too small; the required length has been written.
    BufferTooSmall = 6,
    Panic = 7,
}

/// Smoothing at the ends of a document.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TtSmoothing {
    Truncate = 0,
    Renormalize = 1,
}

impl From<TtSmoothing> for SmoothingMode {
    fn from(s: TtSmoothing) -> Self {
        match s {
            TtSmoothing::Truncate => SmoothingMode::Truncate,
            TtSmoothing::Renormalize => SmoothingMode::Renormalize,
        }
    }
}

/// Opaque persistence diagram.
pub struct TtDiagram {
    inner: PersistenceDiagram,
}

/// Opaque word-vector table.
pub struct TtEmbeddings {
    inner: EmbeddingTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl ToString) {
    let msg = CString::new(message.to_string().replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: TtStatus, message: impl ToString) -> TtStatus {
    set_error(message);
    status
}

fn guard(f: impl FnOnce() -> TtStatus) -> TtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(TtStatus::Panic, "internal panic"),
    }
}

/// Message describing the most recent failure on this thread, or NULL.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn tt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

unsafe fn distance_matrix(data: *const f64, n: usize) -> Result<DistanceMatrix, TtStatus> {
    if data.is_null() {
        return Err(fail(TtStatus::NullPointer, "distance data is NULL"));
    }
    let values = slice::from_raw_parts(data, n * n).to_vec();
    DistanceMatrix::new(n, values).map_err(|e| fail(TtStatus::Validation, e))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, TtStatus> {
    if s.is_null() {
        return Err(fail(TtStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(TtStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_out(values: &[f64], out: *mut f64, out_len: usize, written: *mut usize) -> TtStatus {
    if !written.is_null() {
        *written = values.len();
    }
    if out_len < values.len() {
        return fail(TtStatus::BufferTooSmall, format!("need {} values, buffer holds {out_len}", values.len()));
    }
    if out.is_null() {
        return fail(TtStatus::NullPointer, "output buffer is NULL");
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    TtStatus::Ok
}

/// Rips persistence of an `n x n` row-major distance matrix. A negative
/// `max_scale` builds the full filtration.
#[no_mangle]
pub unsafe extern "C" fn tt_diagram_compute(
    data: *const f64,
    n: usize,
    max_scale: f64,
    out: *mut *mut TtDiagram,
) -> TtStatus {
    guard(|| {
        if out.is_null() {
            return fail(TtStatus::NullPointer, "out is NULL");
        }
        let dist = match distance_matrix(data, n) {
            Ok(d) => d,
            Err(s) => return s,
        };
        let options = RipsOptions { max_scale: (max_scale >= 0.0).then_some(max_scale) };
        match rips_persistence_with(&dist, &options) {
            Ok(pd) => {
                *out = Box::into_raw(Box::new(TtDiagram { inner: pd }));
                TtStatus::Ok
            }
            Err(e) => fail(TtStatus::InvalidArgument, e),
        }
    })
}

/// Number of bars in homological dimension `dim` (0 or 1); 0 for a NULL handle.
#[no_mangle]
pub unsafe extern "C" fn tt_diagram_len(diagram: *const TtDiagram, dim: u32) -> usize {
    diagram.as_ref().map_or(0, |d| d.inner.dim(dim as usize).len())
}

/// Bar `index` of dimension `dim`. Infinite deaths are reported as `INFINITY`.
#[no_mangle]
pub unsafe extern "C" fn tt_diagram_bar(
    diagram: *const TtDiagram,
    dim: u32,
    index: usize,
    birth: *mut f64,
    death: *mut f64,
) -> TtStatus {
    let Some(d) = diagram.as_ref() else {
        return fail(TtStatus::NullPointer, "diagram is NULL");
    };
    if birth.is_null() || death.is_null() {
        return fail(TtStatus::NullPointer, "birth/death output is NULL");
    }
    match d.inner.dim(dim as usize).get(index) {
        Some(bar) => {
            *birth = bar.birth;
            *death = bar.death;
            TtStatus::Ok
        }
        None => fail(TtStatus::InvalidArgument, format!("no bar {index} in dimension {dim}")),
    }
}

#[no_mangle]
pub unsafe extern "C" fn tt_diagram_free(diagram: *mut TtDiagram) {
    if !diagram.is_null() {
        drop(Box::from_raw(diagram));
    }
}

/// Betti numbers of the Rips complex at `scale`.
#[no_mangle]
pub unsafe extern "C" fn tt_betti_at_scale(
    data: *const f64,
    n: usize,
    scale: f64,
    beta0: *mut usize,
    beta1: *mut usize,
) -> TtStatus {
    guard(|| {
        if beta0.is_null() || beta1.is_null() {
            return fail(TtStatus::NullPointer, "output is NULL");
        }
        let dist = match distance_matrix(data, n) {
            Ok(d) => d,
            Err(s) => return s,
        };
        match betti_at_scale(&dist, scale) {
            Ok((b0, b1)) => {
                *beta0 = b0;
                *beta1 = b1;
                TtStatus::Ok
            }
            Err(e) => fail(TtStatus::InvalidArgument, e),
        }
    })
}

unsafe fn bars(pairs: *const f64, count: usize) -> Result<Vec<Bar>, TtStatus> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if pairs.is_null() {
        return Err(fail(TtStatus::NullPointer, "diagram points are NULL"));
    }
    Ok(slice::from_raw_parts(pairs, 2 * count).chunks_exact(2).map(|c| Bar::new(c[0], c[1])).collect())
}

/// p-Wasserstein distance between two diagrams given as interleaved `(birth, death)` arrays.
#[no_mangle]
pub unsafe extern "C" fn tt_wasserstein(
    a: *const f64,
    a_count: usize,
    b: *const f64,
    b_count: usize,
    p: f64,
    out: *mut f64,
) -> TtStatus {
    guard(|| {
        if out.is_null() {
            return fail(TtStatus::NullPointer, "out is NULL");
        }
        let (a, b) = match (bars(a, a_count), bars(b, b_count)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match wasserstein(&a, &b, p) {
            Ok(w) => {
                *out = w;
                TtStatus::Ok
            }
            Err(e) => fail(TtStatus::InvalidArgument, e),
        }
    })
}

/// Embedding-sensitivity features of a `tokens x dims` row-major matrix.
/// Writes `2 * dims` values: dimension 0 scores, then dimension 1 scores.
#[no_mangle]
pub unsafe extern "C" fn tt_embedding_features(
    psi: *const f64,
    tokens: usize,
    dims: usize,
    smoothing: TtSmoothing,
    p: f64,
    out: *mut f64,
    out_len: usize,
    written: *mut usize,
) -> TtStatus {
    guard(|| {
        if psi.is_null() {
            return fail(TtStatus::NullPointer, "embedding matrix is NULL");
        }
        let values = slice::from_raw_parts(psi, tokens * dims).to_vec();
        let result = EmbeddingMatrix::new(tokens, dims, values)
            .and_then(|m| embedding_topo_features(&m, &EmbedTopoConfig { smoothing: smoothing.into(), p }));
        match result {
            Ok(f) => write_out(&f.to_vec(), out, out_len, written),
            Err(e) => fail(TtStatus::Validation, e),
        }
    })
}

/// TF-IDF block features of a UTF-8 text: `blocks - 1` component deaths then 5 loop statistics.
#[no_mangle]
pub unsafe extern "C" fn tt_tfidf_features(
    text: *const c_char,
    blocks: usize,
    out: *mut f64,
    out_len: usize,
    written: *mut usize,
) -> TtStatus {
    guard(|| {
        let text = match c_str(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let config = TfidfTopoConfig { blocks, stoplist: None };
        match tfidf_topo_features(&tokenize(text), &config) {
            Ok(f) => {
                debug_assert_eq!(f.len(), blocks - 1 + LOOP_STATS);
                write_out(&f.to_vec(), out, out_len, written)
            }
            Err(e) => fail(TtStatus::Validation, e),
        }
    })
}

/// Loads word vectors in word2vec text format.
#[no_mangle]
pub unsafe extern "C" fn tt_embeddings_load(path: *const c_char, out: *mut *mut TtEmbeddings) -> TtStatus {
    guard(|| {
        if out.is_null() {
            return fail(TtStatus::NullPointer, "out is NULL");
        }
        let path = match c_str(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match load_embeddings(path) {
            Ok(table) => {
                *out = Box::into_raw(Box::new(TtEmbeddings { inner: table }));
                TtStatus::Ok
            }
            Err(e) if e.is_parse_error() => fail(TtStatus::Parse, e),
            Err(e) => fail(TtStatus::Io, e),
        }
    })
}

/// Vector dimensionality of a loaded table; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn tt_embeddings_dim(table: *const TtEmbeddings) -> usize {
    table.as_ref().map_or(0, |t| t.inner.dim())
}

/// Vocabulary size of a loaded table; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn tt_embeddings_len(table: *const TtEmbeddings) -> usize {
    table.as_ref().map_or(0, |t| t.inner.len())
}

#[no_mangle]
pub unsafe extern "C" fn tt_embeddings_free(table: *mut TtEmbeddings) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Embedding features of a raw text: tokenized, looked up in `table`, then scored.
/// Writes `2 * tt_embeddings_dim(table)` values.
#[no_mangle]
pub unsafe extern "C" fn tt_text_embedding_features(
    table: *const TtEmbeddings,
    text: *const c_char,
    smoothing: TtSmoothing,
    p: f64,
    out: *mut f64,
    out_len: usize,
    written: *mut usize,
) -> TtStatus {
    guard(|| {
        let Some(table) = table.as_ref() else {
            return fail(TtStatus::NullPointer, "table is NULL");
        };
        let text = match c_str(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let config = ExtractConfig { embed: EmbedTopoConfig { smoothing: smoothing.into(), p }, ..Default::default() };
        match document_features(&tokenize(text), ExtractMode::Tp1, Some(&table.inner), &config) {
            Ok(v) => write_out(&v, out, out_len, written),
            Err(e) => fail(TtStatus::Validation, e),
        }
    })
}
