//! C ABI over `ramsey-core`.
//!
//! Structures cross the boundary as opaque `RwStructure` handles built from
//! the JSON structure format. Every call returns an `RwStatus`; on failure
//! `rw_last_error` describes it. Strings returned through out-pointers are
//! owned by the caller and released with `rw_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ramsey_core::arrows::{check_arrow, Outcome, SearchBudget};
use ramsey_core::io::{parse_structure, pi_labels, structure_doc, Document};
use ramsey_core::ordering_property::verify_op_witness;
use ramsey_core::varieties::{satisfies_identity, Identity};
use ramsey_core::{Error, LinearlyOrderedPoset, Structure};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RwStatus {
    Ok = 0,
    /// The property was checked and does not hold.
    Fails = 1,
    /// A search or enumeration bound was hit before a decision.
    Unknown = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    Parse = 5,
    Violation = 6,
    InvalidArgument = 7,
    Internal = 8,
}

/// Outcome of a `rw_check_arrow` call.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RwArrowResult {
    /// 0 holds, 1 fails, 2 unknown.
    pub outcome: c_int,
    pub a_copies: usize,
    pub b_copies: usize,
    pub nodes: u64,
}

/// Opaque parsed structure.
pub struct RwStructure {
    doc: Document,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> RwStatus {
    match e {
        Error::Format(_) | Error::Json(_) => RwStatus::Parse,
        Error::Invalid(_) | Error::NotALattice { .. } => RwStatus::Violation,
        Error::BoundExceeded { .. } | Error::Undecided(_) | Error::NotFoundWithinBound(_) => RwStatus::Unknown,
        Error::Internal(_) => RwStatus::Internal,
        _ => RwStatus::InvalidArgument,
    }
}

fn fail(e: Error) -> RwStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn guard(f: impl FnOnce() -> RwStatus) -> RwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic inside ramsey-core");
            RwStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, RwStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(RwStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        RwStatus::InvalidUtf8
    })
}

unsafe fn handle<'a>(h: *const RwStructure) -> Result<&'a RwStructure, RwStatus> {
    h.as_ref().ok_or_else(|| {
        set_error("null structure handle");
        RwStatus::NullPointer
    })
}

fn ordered(h: &RwStructure) -> Result<LinearlyOrderedPoset, RwStatus> {
    match &h.doc.structure {
        Structure::OrderedPoset(p) => Ok(p.clone()),
        other => {
            set_error(format!("expected an ordered poset, found {}", other.kind()));
            Err(RwStatus::InvalidArgument)
        }
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> RwStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            RwStatus::Ok
        }
        Err(_) => {
            set_error("output contains a NUL byte");
            RwStatus::Internal
        }
    }
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn rw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn rw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates a JSON structure document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_structure_from_json(json: *const c_char, out: *mut *mut RwStructure) -> RwStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return RwStatus::NullPointer;
        }
        let text = try_status!(read_str(json));
        match parse_structure(text) {
            Ok(doc) => {
                *out = Box::into_raw(Box::new(RwStructure { doc }));
                RwStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// `Π_n` as an ordered poset handle.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_pi(n: usize, out: *mut *mut RwStructure) -> RwStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return RwStatus::NullPointer;
        }
        match ramsey_core::pi(n) {
            Ok(p) => {
                let doc = Document {
                    structure: Structure::OrderedPoset(p),
                    labels: pi_labels(n),
                    template: None,
                };
                *out = Box::into_raw(Box::new(RwStructure { doc }));
                RwStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `h` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn rw_structure_free(h: *mut RwStructure) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of elements, or 0 for a NULL handle.
///
/// # Safety
/// `h` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn rw_structure_len(h: *const RwStructure) -> usize {
    h.as_ref().map_or(0, |h| h.doc.structure.len())
}

/// Serializes a structure back to JSON.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_structure_to_json(h: *const RwStructure, out: *mut *mut c_char) -> RwStatus {
    guard(|| {
        let h = try_status!(handle(h));
        if out.is_null() {
            set_error("null output pointer");
            return RwStatus::NullPointer;
        }
        let doc = structure_doc(&h.doc.structure, Some(&h.doc.labels), h.doc.template.as_ref());
        match serde_json::to_string(&doc) {
            Ok(s) => put_string(out, s),
            Err(e) => fail(e.into()),
        }
    })
}

/// Decides `host → (target)^pattern_k` for ordered posets. A `node_limit` of
/// 0 means the library default.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_check_arrow(
    host: *const RwStructure,
    pattern: *const RwStructure,
    target: *const RwStructure,
    colors: usize,
    node_limit: u64,
    out: *mut RwArrowResult,
) -> RwStatus {
    guard(|| {
        let (c, a, b) = (
            try_status!(ordered(try_status!(handle(host)))),
            try_status!(ordered(try_status!(handle(pattern)))),
            try_status!(ordered(try_status!(handle(target)))),
        );
        if out.is_null() {
            set_error("null output pointer");
            return RwStatus::NullPointer;
        }
        let budget = match node_limit {
            0 => SearchBudget::default(),
            n => SearchBudget::deterministic(n),
        };
        match check_arrow(&c, &a, &b, colors, &budget) {
            Ok(v) => {
                let (outcome, status) = match v.outcome {
                    Outcome::Holds => (0, RwStatus::Ok),
                    Outcome::Fails => (1, RwStatus::Fails),
                    Outcome::Unknown => (2, RwStatus::Unknown),
                };
                *out = RwArrowResult {
                    outcome,
                    a_copies: v.a_copies.len(),
                    b_copies: v.b_copy_count,
                    nodes: v.nodes,
                };
                status
            }
            Err(e) => fail(e),
        }
    })
}

/// Exhaustive ordering-property check of `witness` for `base`; both must
/// carry a single partial order. Returns `Ok`, `Fails` or `Unknown`.
///
/// # Safety
/// Handles must be live.
#[no_mangle]
pub unsafe extern "C" fn rw_verify_op_witness(
    base: *const RwStructure,
    witness: *const RwStructure,
    extension_limit: u64,
) -> RwStatus {
    guard(|| {
        let (a, b) = (try_status!(handle(base)), try_status!(handle(witness)));
        let (Some(pa), Some(pb)) = (a.doc.structure.underlying_poset(), b.doc.structure.underlying_poset()) else {
            set_error("both structures must carry one partial order");
            return RwStatus::InvalidArgument;
        };
        match verify_op_witness(&pa, &pb, extension_limit).outcome {
            Outcome::Holds => RwStatus::Ok,
            Outcome::Fails => RwStatus::Fails,
            Outcome::Unknown => {
                set_error("extension limit reached");
                RwStatus::Unknown
            }
        }
    })
}

/// Evaluates `identity` (`lhs = rhs`) on a lattice: `Ok` when it holds,
/// `Fails` otherwise.
///
/// # Safety
/// `lattice` must be live; `identity` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rw_satisfies_identity(lattice: *const RwStructure, identity: *const c_char) -> RwStatus {
    guard(|| {
        let h = try_status!(handle(lattice));
        let text = try_status!(read_str(identity));
        let Structure::Lattice(l) = &h.doc.structure else {
            set_error("expected a lattice");
            return RwStatus::InvalidArgument;
        };
        let id = match Identity::parse(text) {
            Ok(id) => id,
            Err(e) => return fail(e),
        };
        if satisfies_identity(l, &id.lhs, &id.rhs).holds() {
            RwStatus::Ok
        } else {
            RwStatus::Fails
        }
    })
}

/// Runs the command-line front end in-process. `argv[0]` is the program
/// name. The report goes to `*report` and the exit code to `*exit_code`.
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_run_cli(
    argv: *const *const c_char,
    argc: usize,
    report: *mut *mut c_char,
    exit_code: *mut c_int,
) -> RwStatus {
    guard(|| {
        if argv.is_null() || report.is_null() || exit_code.is_null() {
            set_error("null argument");
            return RwStatus::NullPointer;
        }
        let mut args = Vec::with_capacity(argc);
        for i in 0..argc {
            args.push(try_status!(read_str(*argv.add(i))).to_string());
        }
        let out = ramsey_core::cli::run(args);
        *exit_code = out.code;
        if !out.stderr.is_empty() {
            set_error(out.stderr.trim_end());
        }
        put_string(report, if out.stdout.is_empty() { out.stderr } else { out.stdout })
    })
}
