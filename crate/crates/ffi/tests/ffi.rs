use dynhopf_ffi::*;
use serde_json::Value;
use std::ffi::{CStr, CString};
use std::ptr;

fn spec(cartan: &str, ell: u32) -> *mut DynhopfSpec {
    let c = CString::new(cartan).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { dynhopf_spec_new(c.as_ptr(), ell, &mut out) }, DynhopfStatus::Ok);
    assert!(!out.is_null());
    out
}

fn document(doc: *mut DynhopfDocument) -> Value {
    let text = unsafe { CStr::from_ptr(dynhopf_document_json(doc)) }.to_str().unwrap().to_string();
    unsafe { dynhopf_document_free(doc) };
    serde_json::from_str(&text).unwrap()
}

#[test]
fn verify_through_handles() {
    let s = spec("A1", 3);
    let suites = CString::new("abrr,bd").unwrap();
    unsafe {
        assert_eq!(dynhopf_spec_set_suites(s, suites.as_ptr()), DynhopfStatus::Ok);
        assert_eq!(dynhopf_spec_set_seed(s, 3), DynhopfStatus::Ok);
    }
    let mut doc = ptr::null_mut();
    assert_eq!(unsafe { dynhopf_verify(s, &mut doc) }, DynhopfStatus::Ok);
    assert_eq!(unsafe { dynhopf_document_exit_code(doc) }, 0);
    let v = document(doc);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["suites"], serde_json::json!(["abrr", "bd"]));
    unsafe { dynhopf_spec_free(s) };
}

#[test]
fn invalid_spec_and_failed_checks() {
    let s = spec("A1", 4);
    let mut doc = ptr::null_mut();
    assert_eq!(unsafe { dynhopf_verify(s, &mut doc) }, DynhopfStatus::InvalidSpec);
    assert_eq!(document(doc)["status"], "invalid");
    unsafe { dynhopf_spec_free(s) };

    let s = spec("A2", 5);
    let lambda = CString::new("2,2").unwrap();
    unsafe { dynhopf_spec_set_lambda(s, lambda.as_ptr()) };
    let mut doc = ptr::null_mut();
    assert_eq!(unsafe { dynhopf_verify(s, &mut doc) }, DynhopfStatus::ChecksFailed);
    assert_eq!(unsafe { dynhopf_document_exit_code(doc) }, 1);
    unsafe { dynhopf_document_free(doc) };
    unsafe { dynhopf_spec_free(s) };
}

#[test]
fn dump_and_null_handling() {
    let s = spec("A1", 3);
    let what = CString::new("J").unwrap();
    let mut doc = ptr::null_mut();
    assert_eq!(unsafe { dynhopf_dump(s, what.as_ptr(), &mut doc) }, DynhopfStatus::Ok);
    assert_eq!(document(doc)["data"]["values"].as_array().unwrap().len(), 3);
    let bad = CString::new("nothing").unwrap();
    assert_eq!(unsafe { dynhopf_dump(s, bad.as_ptr(), &mut doc) }, DynhopfStatus::InvalidSpec);
    assert!(doc.is_null());
    unsafe {
        assert_eq!(dynhopf_dump(s, ptr::null(), &mut doc), DynhopfStatus::NullArgument);
        assert_eq!(dynhopf_verify(ptr::null(), &mut doc), DynhopfStatus::NullArgument);
        assert_eq!(dynhopf_spec_set_seed(ptr::null_mut(), 1), DynhopfStatus::NullArgument);
        assert!(dynhopf_document_json(ptr::null()).is_null());
        dynhopf_spec_free(s);
        dynhopf_spec_free(ptr::null_mut());
    }
    let msg = unsafe { CStr::from_ptr(dynhopf_status_message(DynhopfStatus::ChecksFailed)) };
    assert!(!msg.to_bytes().is_empty());
}

#[test]
fn generated_header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/dynhopf.h")).unwrap();
    for name in ["dynhopf_spec_new", "dynhopf_verify", "dynhopf_dump", "dynhopf_document_json", "dynhopf_document_free", "typedef struct DynhopfSpec DynhopfSpec", "DYNHOPF_STATUS_INVALID_SPEC"] {
        assert!(header.contains(name), "{name}");
    }
}
