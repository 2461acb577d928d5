//! C interface to the checker and evaluator.
//!
//! A source file is loaded into an opaque [`ToresProgram`]; definitions are
//! then run by name. Every function returns a [`ToresStatus`] or a pointer
//! that is null on failure, and a message describing the last failure on
//! the calling thread is available from [`tores_last_error`]. Strings handed
//! out by the library must be released with [`tores_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tores::frontend::{check_source, parse_program, print_program, print_value, Checked, ElabOptions, Item};
use tores::machine::{is_pair_stream, on_eval_stack, Halt, IndexEnv, Machine, ValueEnv};

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToresStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The program has parse, scope, kind or type errors.
    Diagnostics = 3,
    UnknownDefinition = 4,
    NotStream = 5,
    FuelExhausted = 6,
    /// Evaluation got stuck; indicates a bug in the checker or evaluator.
    Internal = 7,
    Panic = 8,
}

/// A parsed and checked source file.
pub struct ToresProgram {
    checked: Checked,
    diagnostics_json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: ToresStatus, msg: impl Into<String>) -> ToresStatus {
    set_error(msg);
    status
}

/// Run `f`, turning a panic into [`ToresStatus::Panic`].
fn guard(f: impl FnOnce() -> ToresStatus) -> ToresStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(ToresStatus::Panic, "internal panic"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, ToresStatus> {
    if p.is_null() {
        return Err(fail(ToresStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(ToresStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread. Empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tores_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn tores_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse and check `src`. `file` names the source in diagnostics.
///
/// On `Ok` and on `Diagnostics`, `*out` receives a program to be released
/// with [`tores_program_free`]; declarations that checked remain usable.
///
/// # Safety
/// `file` and `src` must be null or NUL-terminated strings; `out` must be
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tores_program_load(
    file: *const c_char,
    src: *const c_char,
    out: *mut *mut ToresProgram,
) -> ToresStatus {
    guard(|| {
        if out.is_null() {
            return fail(ToresStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let (file, src) = match (str_arg(file, "file"), str_arg(src, "src")) {
            (Ok(f), Ok(s)) => (f, s),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        let checked = check_source(file, src, &ElabOptions::default());
        let json = serde_json::to_string(&checked.diagnostics).unwrap_or_else(|_| "[]".into());
        let ok = checked.is_ok();
        let n = checked.diagnostics.len();
        *out =
            Box::into_raw(Box::new(ToresProgram { checked, diagnostics_json: CString::new(json).unwrap_or_default() }));
        if ok {
            ToresStatus::Ok
        } else {
            fail(ToresStatus::Diagnostics, format!("{n} diagnostics"))
        }
    })
}

/// # Safety
/// `program` must be null or a pointer from [`tores_program_load`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn tores_program_free(program: *mut ToresProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Number of diagnostics reported while loading.
///
/// # Safety
/// `program` must be null or a live program.
#[no_mangle]
pub unsafe extern "C" fn tores_program_diagnostic_count(program: *const ToresProgram) -> usize {
    program.as_ref().map_or(0, |p| p.checked.diagnostics.len())
}

/// Diagnostics as a JSON array. Owned by the program; null if `program` is.
///
/// # Safety
/// `program` must be null or a live program.
#[no_mangle]
pub unsafe extern "C" fn tores_program_diagnostics_json(program: *const ToresProgram) -> *const c_char {
    program.as_ref().map_or(ptr::null(), |p| p.diagnostics_json.as_ptr())
}

/// Number of declarations that checked.
///
/// # Safety
/// `program` must be null or a live program.
#[no_mangle]
pub unsafe extern "C" fn tores_program_decl_count(program: *const ToresProgram) -> usize {
    program.as_ref().map_or(0, |p| p.checked.elaborated.items.len())
}

/// Name of the `index`-th checked declaration, or null when out of range.
/// Release with [`tores_string_free`].
///
/// # Safety
/// `program` must be null or a live program.
#[no_mangle]
pub unsafe extern "C" fn tores_program_decl_name(program: *const ToresProgram, index: usize) -> *mut c_char {
    match program.as_ref().and_then(|p| p.checked.elaborated.items.get(index)) {
        Some((name, _)) => owned(name.to_string()),
        None => {
            set_error("declaration index out of range");
            ptr::null_mut()
        }
    }
}

/// Whether the `index`-th checked declaration is a definition (1), a type
/// (0), or out of range (-1).
///
/// # Safety
/// `program` must be null or a live program.
#[no_mangle]
pub unsafe extern "C" fn tores_program_decl_is_def(program: *const ToresProgram, index: usize) -> i32 {
    match program.as_ref().and_then(|p| p.checked.elaborated.items.get(index)) {
        Some((_, Item::Def { .. })) => 1,
        Some((_, Item::Type { .. })) => 0,
        None => -1,
    }
}

enum Request {
    Value,
    Take(usize),
}

unsafe fn evaluate(
    program: *const ToresProgram,
    name: *const c_char,
    fuel: u64,
    request: Request,
    out: *mut *mut c_char,
    steps_out: *mut u64,
) -> ToresStatus {
    guard(|| {
        if out.is_null() {
            return fail(ToresStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let Some(p) = program.as_ref() else {
            return fail(ToresStatus::NullArgument, "program is null");
        };
        let name = match str_arg(name, "name") {
            Ok(n) => n,
            Err(e) => return e,
        };
        let Some((ty, body)) = p.checked.elaborated.def(name) else {
            return fail(ToresStatus::UnknownDefinition, format!("no checked definition named `{name}`"));
        };
        if matches!(request, Request::Take(_)) && !is_pair_stream(ty) {
            return fail(ToresStatus::NotStream, format!("`{name}` is not a stream of <head, tail> observations"));
        }
        let body = body.clone();
        let run = on_eval_stack(move || {
            let mut m = Machine::new(fuel);
            let r = m.eval(&body, &IndexEnv::new(), &ValueEnv::new()).and_then(|v| match request {
                Request::Value => Ok(print_value(&v)),
                Request::Take(k) => m.take(&v, k).map(|vs| {
                    serde_json::to_string(&vs.iter().map(print_value).collect::<Vec<_>>()).unwrap_or_default()
                }),
            });
            (r, m.steps())
        });
        let Some((result, steps)) = run else {
            return fail(ToresStatus::Panic, "evaluator thread failed");
        };
        if !steps_out.is_null() {
            *steps_out = steps;
        }
        match result {
            Ok(s) => {
                *out = owned(s);
                ToresStatus::Ok
            }
            Err(Halt::FuelExhausted) => {
                fail(ToresStatus::FuelExhausted, format!("`{name}` did not finish within {fuel} steps"))
            }
            Err(Halt::Internal(msg)) => fail(ToresStatus::Internal, msg),
        }
    })
}

/// Evaluate the definition `name` with at most `fuel` rule applications.
/// On success `*value_out` receives the printed value. `steps_out` may be
/// null; otherwise it receives the number of rule applications used.
///
/// # Safety
/// `program` must be null or a live program, `name` null or a
/// NUL-terminated string, `value_out` null or valid for writes, `steps_out`
/// null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tores_program_run(
    program: *const ToresProgram,
    name: *const c_char,
    fuel: u64,
    value_out: *mut *mut c_char,
    steps_out: *mut u64,
) -> ToresStatus {
    evaluate(program, name, fuel, Request::Value, value_out, steps_out)
}

/// Observe the first `count` heads of the stream `name`. On success
/// `*json_out` receives a JSON array of printed values.
///
/// # Safety
/// As for [`tores_program_run`].
#[no_mangle]
pub unsafe extern "C" fn tores_program_take(
    program: *const ToresProgram,
    name: *const c_char,
    count: usize,
    fuel: u64,
    json_out: *mut *mut c_char,
    steps_out: *mut u64,
) -> ToresStatus {
    evaluate(program, name, fuel, Request::Take(count), json_out, steps_out)
}

/// Pretty-print `src` in canonical layout.
///
/// # Safety
/// `src` must be null or a NUL-terminated string; `out` null or valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn tores_format(src: *const c_char, out: *mut *mut c_char) -> ToresStatus {
    guard(|| {
        if out.is_null() {
            return fail(ToresStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let src = match str_arg(src, "src") {
            Ok(s) => s,
            Err(e) => return e,
        };
        match parse_program(src) {
            Ok(p) => {
                *out = owned(print_program(&p));
                ToresStatus::Ok
            }
            Err(e) => fail(ToresStatus::Diagnostics, e.message),
        }
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library that has not been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn tores_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
