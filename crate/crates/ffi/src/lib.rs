//! C ABI over the `verify` and `dump` commands. Specs and result documents
//! are opaque handles; every call returns a [`DynhopfStatus`].

use dynhopf::run::{cmd_dump, cmd_verify, Command, DumpTarget, Outcome, RunSpec, EXIT_FAIL, EXIT_INVALID, EXIT_PASS};
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result of every call. The first three match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynhopfStatus {
    Ok = 0,
    ChecksFailed = 1,
    InvalidSpec = 2,
    NullArgument = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

/// A run specification under construction.
pub struct DynhopfSpec {
    inner: RunSpec,
}

/// A JSON report or dump.
pub struct DynhopfDocument {
    json: CString,
    exit_code: i32,
}

fn status_of(exit_code: i32) -> DynhopfStatus {
    match exit_code {
        EXIT_PASS => DynhopfStatus::Ok,
        EXIT_FAIL => DynhopfStatus::ChecksFailed,
        EXIT_INVALID => DynhopfStatus::InvalidSpec,
        _ => DynhopfStatus::Panic,
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, DynhopfStatus> {
    if s.is_null() {
        return Err(DynhopfStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| DynhopfStatus::InvalidUtf8)
}

fn guarded(f: impl FnOnce() -> Result<DynhopfStatus, DynhopfStatus>) -> DynhopfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) | Ok(Err(s)) => s,
        Err(_) => DynhopfStatus::Panic,
    }
}

unsafe fn with_spec(spec: *mut DynhopfSpec, f: impl FnOnce(&mut RunSpec) -> Result<(), DynhopfStatus>) -> DynhopfStatus {
    guarded(|| {
        let s = spec.as_mut().ok_or(DynhopfStatus::NullArgument)?;
        f(&mut s.inner)?;
        Ok(DynhopfStatus::Ok)
    })
}

fn csv(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

/// Creates a spec for `cartan` ("A1", "A2") at `ell`, with default Λ = 2,
/// seed 0, threshold 512 and all suites.
///
/// # Safety
/// `cartan` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_spec_new(cartan: *const c_char, ell: u32, out: *mut *mut DynhopfSpec) -> DynhopfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(DynhopfStatus::NullArgument);
        }
        let cartan = read_str(cartan)?.to_string();
        let spec = Box::new(DynhopfSpec { inner: RunSpec { cartan, ell, ..RunSpec::default() } });
        *out = Box::into_raw(spec);
        Ok(DynhopfStatus::Ok)
    })
}

/// # Safety
/// `spec` must come from [`dynhopf_spec_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_spec_free(spec: *mut DynhopfSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Comma-separated rationals, e.g. "2,3/2".
///
/// # Safety
/// `spec` must be a live spec and `values` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_spec_set_lambda(spec: *mut DynhopfSpec, values: *const c_char) -> DynhopfStatus {
    with_spec(spec, |s| {
        s.lambda = csv(read_str(values)?);
        Ok(())
    })
}

/// "id", "swap", "empty" or a map such as "0>1,1>0"; NULL clears it.
///
/// # Safety
/// `spec` must be a live spec; `triple` is NULL or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_spec_set_triple(spec: *mut DynhopfSpec, triple: *const c_char) -> DynhopfStatus {
    with_spec(spec, |s| {
        s.triple = if triple.is_null() { None } else { Some(read_str(triple)?.to_string()) };
        Ok(())
    })
}

/// Comma-separated suite names, or "all".
///
/// # Safety
/// `spec` must be a live spec and `suites` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_spec_set_suites(spec: *mut DynhopfSpec, suites: *const c_char) -> DynhopfStatus {
    with_spec(spec, |s| {
        s.suites = csv(read_str(suites)?);
        Ok(())
    })
}

/// # Safety
/// `spec` must be a live spec.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_spec_set_seed(spec: *mut DynhopfSpec, seed: u64) -> DynhopfStatus {
    with_spec(spec, |s| {
        s.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `spec` must be a live spec.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_spec_set_threshold(spec: *mut DynhopfSpec, threshold: usize) -> DynhopfStatus {
    with_spec(spec, |s| {
        s.threshold = threshold;
        Ok(())
    })
}

unsafe fn finish(outcome: Outcome, out: *mut *mut DynhopfDocument) -> Result<DynhopfStatus, DynhopfStatus> {
    let text = serde_json::to_string(&outcome.document).expect("JSON values serialize");
    let json = CString::new(text).map_err(|_| DynhopfStatus::Panic)?;
    *out = Box::into_raw(Box::new(DynhopfDocument { json, exit_code: outcome.exit_code }));
    Ok(status_of(outcome.exit_code))
}

/// Runs the selected suites. On return `*out` holds the report, also when
/// checks failed or the run arguments were invalid.
///
/// # Safety
/// `spec` must be a live spec and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_verify(spec: *const DynhopfSpec, out: *mut *mut DynhopfDocument) -> DynhopfStatus {
    guarded(|| {
        let s = spec.as_ref().ok_or(DynhopfStatus::NullArgument)?;
        if out.is_null() {
            return Err(DynhopfStatus::NullArgument);
        }
        *out = ptr::null_mut();
        let run = RunSpec { command: Command::Verify, ..s.inner.clone() };
        finish(cmd_verify(&run), out)
    })
}

/// Dumps "J", "curlyJ", "R_lambda", "H_structure" or "ranks".
///
/// # Safety
/// `spec` must be a live spec, `what` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_dump(spec: *const DynhopfSpec, what: *const c_char, out: *mut *mut DynhopfDocument) -> DynhopfStatus {
    guarded(|| {
        let s = spec.as_ref().ok_or(DynhopfStatus::NullArgument)?;
        if out.is_null() {
            return Err(DynhopfStatus::NullArgument);
        }
        *out = ptr::null_mut();
        let target: DumpTarget = read_str(what)?.parse().map_err(|_| DynhopfStatus::InvalidSpec)?;
        let run = RunSpec { command: Command::Dump(target), ..s.inner.clone() };
        finish(cmd_dump(&run, target), out)
    })
}

/// The document as NUL-terminated JSON, owned by `doc`.
///
/// # Safety
/// `doc` must be NULL or a live document.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_document_json(doc: *const DynhopfDocument) -> *const c_char {
    doc.as_ref().map_or(ptr::null(), |d| d.json.as_ptr())
}

/// The CLI exit code of the run that produced `doc`, or -1 for NULL.
///
/// # Safety
/// `doc` must be NULL or a live document.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_document_exit_code(doc: *const DynhopfDocument) -> i32 {
    doc.as_ref().map_or(-1, |d| d.exit_code)
}

/// # Safety
/// `doc` must come from [`dynhopf_verify`] or [`dynhopf_dump`] and not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dynhopf_document_free(doc: *mut DynhopfDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn dynhopf_status_message(status: DynhopfStatus) -> *const c_char {
    let s: &'static CStr = match status {
        DynhopfStatus::Ok => c"ok",
        DynhopfStatus::ChecksFailed => c"one or more checks failed",
        DynhopfStatus::InvalidSpec => c"invalid run specification",
        DynhopfStatus::NullArgument => c"null argument",
        DynhopfStatus::InvalidUtf8 => c"string argument is not UTF-8",
        DynhopfStatus::Panic => c"internal error",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn dynhopf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
