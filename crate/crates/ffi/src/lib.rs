//! C ABI over the scenarist engine and runner.
//!
//! Every function returns a [`ScnStatus`]. On failure a message is kept per
//! thread and can be fetched with [`scn_last_error_message`]. Strings handed
//! out by the library must be released with [`scn_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use scenarist::emobility;
use scenarist::engine::RunEnd;
use scenarist::gherkin::{generate_skeletons, parse_feature, render_skeletons};
use scenarist::runner::{run_suite, write_report, ReportFormat, RunConfig};
use scenarist::{Engine, Error, Event};

/// Result codes of every `scn_*` call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    UnknownEngine = 3,
    /// Malformed event text or feature file.
    Syntax = 4,
    /// A documented precondition was violated, e.g. a zero step budget.
    Precondition = 5,
    StepBound = 6,
    OutOfRange = 7,
    Io = 8,
    /// Any other engine or runner error.
    Failed = 9,
    Panic = 10,
}

/// How [`scn_engine_run`] stopped.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScnRunEnd {
    /// Nothing selectable and nothing pending.
    Quiescent = 0,
    /// Nothing selectable but requests pending (blocked or delegated).
    Stuck = 1,
    /// The step budget of the call ran out.
    BudgetExhausted = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScnReportFormat {
    Pretty = 0,
    JsonLines = 1,
}

/// Opaque engine handle.
pub struct ScnEngine {
    engine: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).ok());
}

fn status_of(err: &Error) -> ScnStatus {
    match err {
        Error::UnknownEngine(_) => ScnStatus::UnknownEngine,
        Error::EventSyntax { .. } | Error::FeatureSyntax { .. } | Error::TagExpression(_) => ScnStatus::Syntax,
        Error::FlexibleInjection(_) | Error::ZeroStepBudget => ScnStatus::Precondition,
        Error::StepBoundExceeded { .. } => ScnStatus::StepBound,
        Error::Io { .. } => ScnStatus::Io,
        _ => ScnStatus::Failed,
    }
}

fn fail(err: Error) -> ScnStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn guard(f: impl FnOnce() -> ScnStatus) -> ScnStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            ScnStatus::Panic
        }
    }
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, ScnStatus> {
    if s.is_null() {
        set_error(format!("{what} is null"));
        return Err(ScnStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        ScnStatus::InvalidUtf8
    })
}

fn give_string(s: String, out: *mut *mut c_char) -> ScnStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: callers check `out` for null before producing output.
            unsafe { *out = c.into_raw() };
            ScnStatus::Ok
        }
        Err(_) => {
            set_error("output contains an interior NUL byte");
            ScnStatus::Failed
        }
    }
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!(stringify!($p), " is null"));
            return ScnStatus::NullPointer;
        })+
    };
}

/// Creates an engine from a registered factory (`sos`, `rps`, `composed`, ...).
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
/// The handle written to `out` must be released with [`scn_engine_free`].
#[no_mangle]
pub unsafe extern "C" fn scn_engine_new(name: *const c_char, out: *mut *mut ScnEngine) -> ScnStatus {
    guard(|| {
        non_null!(out);
        let name = try_ffi!(read_str(name, "name"));
        let factories = emobility::engine_factories();
        let engine = match factories.get(name).and_then(|f| f()) {
            Ok(engine) => engine,
            Err(e) => return fail(e),
        };
        *out = Box::into_raw(Box::new(ScnEngine { engine }));
        ScnStatus::Ok
    })
}

/// # Safety
/// `engine` must be null or a handle from [`scn_engine_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scn_engine_free(engine: *mut ScnEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Queues an external event given in canonical form, e.g.
/// `user -> app . addTravelPreferences("Dortmund", "Paderborn")`.
///
/// # Safety
/// `engine` must be a live handle and `event` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn scn_engine_inject(engine: *mut ScnEngine, event: *const c_char) -> ScnStatus {
    guard(|| {
        non_null!(engine);
        let text = try_ffi!(read_str(event, "event"));
        let event: Event = match text.parse() {
            Ok(e) => e,
            Err(e) => return fail(e),
        };
        match (*engine).engine.inject(event) {
            Ok(()) => ScnStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Steps until nothing is selectable or `max_steps` events were selected.
/// `selected` receives the number of events selected by this call.
///
/// # Safety
/// `engine` must be a live handle; `selected` and `end` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn scn_engine_run(
    engine: *mut ScnEngine,
    max_steps: usize,
    selected: *mut usize,
    end: *mut ScnRunEnd,
) -> ScnStatus {
    guard(|| {
        non_null!(engine, selected, end);
        match (*engine).engine.run_to_quiescence(max_steps) {
            Ok(run) => {
                *selected = run.events.len();
                *end = match run.end {
                    RunEnd::Quiescent(q) if q.is_stuck() => ScnRunEnd::Stuck,
                    RunEnd::Quiescent(_) => ScnRunEnd::Quiescent,
                    RunEnd::BudgetExhausted => ScnRunEnd::BudgetExhausted,
                };
                ScnStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of events selected so far, or 0 for a null handle.
///
/// # Safety
/// `engine` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scn_engine_trace_len(engine: *const ScnEngine) -> usize {
    if engine.is_null() {
        return 0;
    }
    (*engine).engine.trace().len()
}

/// Writes the canonical form of trace event `index` to `out`.
///
/// # Safety
/// `engine` must be a live handle and `out` a valid pointer. The string must
/// be released with [`scn_string_free`].
#[no_mangle]
pub unsafe extern "C" fn scn_engine_trace_event(
    engine: *const ScnEngine,
    index: usize,
    out: *mut *mut c_char,
) -> ScnStatus {
    guard(|| {
        non_null!(engine, out);
        let trace = (*engine).engine.trace();
        match trace.get(index) {
            Some(e) => give_string(e.to_string(), out),
            None => {
                set_error(format!("index {index} out of range for trace of {}", trace.len()));
                ScnStatus::OutOfRange
            }
        }
    })
}

/// Runs the features under `path` against engine `engine_name`, filtered by
/// `tags` (may be null or empty). The rendered report goes to `report` and
/// `success` tells whether every selected scenario passed.
///
/// # Safety
/// String arguments must be valid NUL-terminated strings (`tags` may be
/// null); `report` and `success` must be valid pointers. The report must be
/// released with [`scn_string_free`].
#[no_mangle]
pub unsafe extern "C" fn scn_run_suite(
    path: *const c_char,
    engine_name: *const c_char,
    tags: *const c_char,
    format: ScnReportFormat,
    max_steps: usize,
    report: *mut *mut c_char,
    success: *mut bool,
) -> ScnStatus {
    guard(|| {
        non_null!(report, success);
        let path = try_ffi!(read_str(path, "path"));
        let engine_name = try_ffi!(read_str(engine_name, "engine_name"));
        let tags = if tags.is_null() { "" } else { try_ffi!(read_str(tags, "tags")) };
        let format = match format {
            ScnReportFormat::Pretty => ReportFormat::Pretty,
            ScnReportFormat::JsonLines => ReportFormat::JsonLines,
        };
        let config = RunConfig {
            features: vec![PathBuf::from(path)],
            tags: tags.to_string(),
            max_steps,
            trace: false,
            format,
            engine: engine_name.to_string(),
        };
        match run_suite(&config, &emobility::engine_factories(), &emobility::step_registry()) {
            Ok(r) => {
                *success = r.is_success();
                give_string(write_report(&r, format, false), report)
            }
            Err(e) => fail(e),
        }
    })
}

/// Renders step skeletons for the feature text `feature`.
///
/// # Safety
/// `feature` must be a valid NUL-terminated string and `out` a valid
/// pointer. The string must be released with [`scn_string_free`].
#[no_mangle]
pub unsafe extern "C" fn scn_generate_skeletons(feature: *const c_char, out: *mut *mut c_char) -> ScnStatus {
    guard(|| {
        non_null!(out);
        let text = try_ffi!(read_str(feature, "feature"));
        match parse_feature(text) {
            Ok(f) => give_string(render_skeletons(&generate_skeletons(&f)), out),
            Err(e) => fail(e),
        }
    })
}

/// Message of the last failed call on this thread, or null. Release with
/// [`scn_string_free`].
#[no_mangle]
pub extern "C" fn scn_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |m| m.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn scn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
