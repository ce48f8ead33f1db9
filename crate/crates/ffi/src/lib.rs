//! C ABI over `ctx_core`.
//!
//! Models are opaque `CtxModel` handles released with `ctx_model_free`.
//! Functions return a `CtxStatus`; on failure `ctx_last_error` describes the
//! problem. Strings handed out by the library are owned by the caller and
//! released with `ctx_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ctx_core::analysis::Analyzer;
use ctx_core::model::EmpiricalModel;
use ctx_core::{bundle, corpus, json, logical_bell, Error};

/// Opaque model handle.
pub struct CtxModel {
    inner: EmpiricalModel,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CtxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Incompatible = 5,
    UnknownBuiltin = 6,
    WrongSemiring = 7,
    Limit = 8,
    Failed = 9,
    Panic = 10,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(error: &Error) -> CtxStatus {
    match error {
        Error::Json { .. } | Error::Format(_) | Error::FormulaParse { .. } | Error::Scenario(_) => CtxStatus::Parse,
        Error::Validation(_) => CtxStatus::Validation,
        Error::Incompatible(_) => CtxStatus::Incompatible,
        Error::UnknownBuiltin(_) => CtxStatus::UnknownBuiltin,
        Error::WrongSemiring { .. } => CtxStatus::WrongSemiring,
        Error::ColumnCap { .. } => CtxStatus::Limit,
        _ => CtxStatus::Failed,
    }
}

fn guard(f: impl FnOnce() -> Result<(), CtxStatus>) -> CtxStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CtxStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            CtxStatus::Panic
        }
    }
}

fn fail(error: Error) -> CtxStatus {
    set_error(&error.to_string());
    status_of(&error)
}

unsafe fn input<'a>(text: *const c_char) -> Result<&'a str, CtxStatus> {
    if text.is_null() {
        set_error("null string argument");
        return Err(CtxStatus::NullPointer);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        CtxStatus::InvalidUtf8
    })
}

unsafe fn model<'a>(handle: *const CtxModel) -> Result<&'a EmpiricalModel, CtxStatus> {
    handle.as_ref().map(|m| &m.inner).ok_or_else(|| {
        set_error("null model handle");
        CtxStatus::NullPointer
    })
}

unsafe fn put_model(out: *mut *mut CtxModel, m: EmpiricalModel) -> Result<(), CtxStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(CtxStatus::NullPointer);
    }
    *out = Box::into_raw(Box::new(CtxModel { inner: m }));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), CtxStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(CtxStatus::NullPointer);
    }
    *out = CString::new(s).expect("library output has no NULs").into_raw();
    Ok(())
}

/// Parses and validates a model from its JSON encoding.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_model_from_json(json: *const c_char, out: *mut *mut CtxModel) -> CtxStatus {
    guard(|| {
        let text = input(json)?;
        let m = json::model_from_str(text).map_err(fail)?;
        put_model(out, m)
    })
}

/// Builtin model by name: bell, hardy, pr, ghz, specker or liar:N.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_model_builtin(name: *const c_char, out: *mut *mut CtxModel) -> CtxStatus {
    guard(|| {
        let name = input(name)?;
        let m = corpus::builtin(name).map_err(fail)?;
        put_model(out, m)
    })
}

/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ctx_model_free(model: *mut CtxModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_model_to_json(model: *const CtxModel, out: *mut *mut c_char) -> CtxStatus {
    guard(|| put_string(out, json::model_to_string(self::model(model)?)))
}

/// Possibilistic collapse as a new handle.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_model_collapse(model: *const CtxModel, out: *mut *mut CtxModel) -> CtxStatus {
    guard(|| put_model(out, self::model(model)?.to_boolean()))
}

/// Writes 0 (non-contextual), 1 (probabilistic), 2 (possibilistic) or
/// 3 (strong) to `level`.
///
/// # Safety
/// `model` must be a live handle and `level` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_classify(model: *const CtxModel, level: *mut u8) -> CtxStatus {
    guard(|| {
        let report = Analyzer::default().classify(self::model(model)?).map_err(fail)?;
        if level.is_null() {
            set_error("null output pointer");
            return Err(CtxStatus::NullPointer);
        }
        *level = report.level();
        Ok(())
    })
}

/// Full contextuality report as JSON.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_classify_json(model: *const CtxModel, out: *mut *mut c_char) -> CtxStatus {
    guard(|| {
        let m = self::model(model)?;
        let report = Analyzer::default().classify(m).map_err(fail)?;
        put_string(out, json::to_pretty(&json::report_to_value(m, &report)))
    })
}

/// Pairwise no-signalling check as JSON; succeeds for incompatible models too.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_compatibility_json(model: *const CtxModel, out: *mut *mut c_char) -> CtxStatus {
    guard(|| {
        let m = self::model(model)?;
        put_string(out, json::to_pretty(&json::compatibility_to_value(m, &m.check_compatibility())))
    })
}

/// Logical Bell inequality for the propositions in `props` (one per line),
/// or for the canonical support family when `props` is null.
///
/// # Safety
/// `model` must be a live handle, `props` null or a NUL-terminated string,
/// and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_logical_bell_json(
    model: *const CtxModel,
    props: *const c_char,
    out: *mut *mut c_char,
) -> CtxStatus {
    guard(|| {
        let m = self::model(model)?;
        let family = if props.is_null() {
            logical_bell::canonical_support_propositions(m)
        } else {
            logical_bell::parse_propositions(m.scenario(), input(props)?)
        }
        .map_err(fail)?;
        let result = logical_bell::logical_bell(m, &family).map_err(fail)?;
        put_string(out, json::to_pretty(&json::bell_to_value(m.scenario(), &family, &result)))
    })
}

/// Bundle diagram of a rank-2 model as Graphviz DOT.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ctx_bundle_dot(model: *const CtxModel, out: *mut *mut c_char) -> CtxStatus {
    guard(|| {
        let diagram = bundle::build_bundle(self::model(model)?).map_err(fail)?;
        put_string(out, bundle::emit_dot(&diagram, &[]).map_err(fail)?)
    })
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ctx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ctx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn ctx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
