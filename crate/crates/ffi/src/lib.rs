//! C ABI over the coopsync engine.
//!
//! Every call returns a [`CoopsyncStatus`]. On anything but `Ok`, a message
//! describing the failure can be read with [`coopsync_last_error`] on the
//! same thread. Strings handed out by the library are NUL-terminated UTF-8
//! and must be released with [`coopsync_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use coopsync::context::{load_project, parse_delta};
use coopsync::metamodel::parse_domain_model;
use coopsync::server::wire::WireMessage;
use coopsync::sync::{CorrelationConfig, SyncError, Workspace, WorkspaceError};
use coopsync::transform::{parse_rules, print_rules};
use coopsync::views::{builtin_views, ElementKey};

/// Result of every exported call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoopsyncStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An input text did not parse.
    Parse = 3,
    /// An input parsed but does not conform or does not check.
    Invalid = 4,
    UnknownView = 5,
    UnknownRole = 6,
    UnknownElement = 7,
    UnknownSession = 8,
    /// The caller's graph version is not the current one.
    Stale = 9,
    /// The engine panicked; the handle should not be used again.
    Internal = 10,
}

/// Opaque engine handle.
pub struct CoopsyncWorkspace {
    inner: Workspace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CoopsyncStatus, String);

impl Failure {
    fn new(status: CoopsyncStatus, msg: impl ToString) -> Self {
        Failure(status, msg.to_string())
    }
}

impl From<SyncError> for Failure {
    fn from(e: SyncError) -> Self {
        let status = match e {
            SyncError::Stale { .. } => CoopsyncStatus::Stale,
            SyncError::UnknownElement { .. } => CoopsyncStatus::UnknownElement,
            SyncError::UnknownView(_) => CoopsyncStatus::UnknownView,
            SyncError::UnknownSession(_) => CoopsyncStatus::UnknownSession,
            SyncError::UnknownRole(_) => CoopsyncStatus::UnknownRole,
            _ => CoopsyncStatus::Invalid,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, recording its failure or panic as the last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CoopsyncStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CoopsyncStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error".into());
            CoopsyncStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(CoopsyncStatus::NullArgument, format!("`{what}` is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::new(CoopsyncStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn workspace<'a>(ws: *const CoopsyncWorkspace) -> Result<&'a Workspace, Failure> {
    ws.as_ref().map(|w| &w.inner).ok_or_else(|| Failure::new(CoopsyncStatus::NullArgument, "`workspace` is null"))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(CoopsyncStatus::NullArgument, "output pointer is null"));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure::new(CoopsyncStatus::Internal, "output contains NUL"))?;
    put(out, c.into_raw())
}

/// Builds a workspace from the texts of a domain model (`.cdm`), a project
/// (`.cpj`) and a rule file (`.cvt`), with the built-in views. A negative
/// `max_hops` keeps the default correlation depth.
///
/// # Safety
/// The text arguments must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopsync_workspace_open(
    model: *const c_char,
    project: *const c_char,
    rules: *const c_char,
    max_hops: i32,
    out: *mut *mut CoopsyncWorkspace,
) -> CoopsyncStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::new(CoopsyncStatus::NullArgument, "`out` is null"));
        }
        let dm = parse_domain_model(text(model, "model")?).map_err(|e| {
            Failure::new(CoopsyncStatus::Parse, format!("model:{}:{}: {}", e.line, e.column, e.message))
        })?;
        let g = load_project(&dm, text(project, "project")?).map_err(|e| {
            let lines: Vec<String> = e
                .diagnostics()
                .iter()
                .map(|d| format!("project:{}:{}: {}", d.pos.line, d.pos.column, d.message))
                .collect();
            let status = match e {
                coopsync::context::IngestError::Parse(_) => CoopsyncStatus::Parse,
                _ => CoopsyncStatus::Invalid,
            };
            Failure::new(status, lines.join("\n"))
        })?;
        let rs = parse_rules(text(rules, "rules")?).map_err(|e| {
            Failure::new(CoopsyncStatus::Parse, format!("rules:{}:{}: {}", e.line, e.column, e.message))
        })?;
        let mut correlation = CorrelationConfig::defaults_for(&dm);
        if max_hops >= 0 {
            correlation.max_hops = max_hops as u32;
        }
        let ws = Workspace::new(dm, g, rs, builtin_views(), correlation)
            .map_err(|e| Failure::new(CoopsyncStatus::Invalid, e))?;
        put(out, Box::into_raw(Box::new(CoopsyncWorkspace { inner: ws })))
    })
}

/// Releases a workspace. Null is ignored.
///
/// # Safety
/// `ws` must come from [`coopsync_workspace_open`] and not be used after.
#[no_mangle]
pub unsafe extern "C" fn coopsync_workspace_free(ws: *mut CoopsyncWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

/// Current graph version.
///
/// # Safety
/// `ws` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopsync_graph_version(ws: *const CoopsyncWorkspace, out: *mut u64) -> CoopsyncStatus {
    guard(|| put(out, workspace(ws)?.version()))
}

/// Content document of `view` as seen by `role`, byte-identical to the
/// `transform` command and the HTTP content endpoint.
///
/// # Safety
/// `ws` must be a live handle, `view` and `role` NUL-terminated, `out`
/// writable. The string written to `out` is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn coopsync_view_content(
    ws: *const CoopsyncWorkspace,
    view: *const c_char,
    role: *const c_char,
    out: *mut *mut c_char,
) -> CoopsyncStatus {
    guard(|| {
        let (_, doc) = workspace(ws)?.content_document(text(view, "view")?, text(role, "role")?)?;
        put_string(out, doc)
    })
}

/// Schema document of `view`.
///
/// # Safety
/// As for [`coopsync_view_content`].
#[no_mangle]
pub unsafe extern "C" fn coopsync_view_schema(
    ws: *const CoopsyncWorkspace,
    view: *const c_char,
    out: *mut *mut c_char,
) -> CoopsyncStatus {
    guard(|| {
        let view = text(view, "view")?;
        let schema =
            workspace(ws)?.schema(view).ok_or_else(|| Failure::from(SyncError::UnknownView(view.to_string())))?;
        put_string(out, schema.document.clone())
    })
}

/// Opens a session for `role` arranged over every view and writes its id.
///
/// # Safety
/// `ws` must be a live handle, `role` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopsync_session_open(
    ws: *const CoopsyncWorkspace,
    role: *const c_char,
    out: *mut u64,
) -> CoopsyncStatus {
    guard(|| {
        let w = workspace(ws)?;
        let views = w.views().iter().map(|v| v.view_id.clone()).collect();
        put(out, w.open_session(text(role, "role")?, views)?)
    })
}

/// # Safety
/// `ws` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn coopsync_session_close(ws: *const CoopsyncWorkspace, session: u64) -> CoopsyncStatus {
    guard(|| {
        workspace(ws)?.close_session(session);
        Ok(())
    })
}

/// Selects `key` (`Concept/key`) in `view` and writes the resulting
/// highlight message, encoded as on the websocket channel.
///
/// # Safety
/// `ws` must be a live handle, `view` and `key` NUL-terminated, `out`
/// writable. The string written to `out` is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn coopsync_select(
    ws: *const CoopsyncWorkspace,
    session: u64,
    view: *const c_char,
    key: *const c_char,
    graph_version: u64,
    out: *mut *mut c_char,
) -> CoopsyncStatus {
    guard(|| {
        let view = text(view, "view")?;
        let key: ElementKey =
            text(key, "key")?.parse().map_err(|e| Failure::new(CoopsyncStatus::Parse, format!("key: {e}")))?;
        let d = workspace(ws)?.select(session, view, &key, graph_version)?;
        put_string(out, WireMessage::from_directive(&d).encode())
    })
}

/// Applies a delta in project-file syntax and writes the new version.
///
/// # Safety
/// `ws` must be a live handle, `delta` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopsync_publish(
    ws: *const CoopsyncWorkspace,
    delta: *const c_char,
    out: *mut u64,
) -> CoopsyncStatus {
    guard(|| {
        let ops = parse_delta(text(delta, "delta")?).map_err(|e| {
            Failure::new(CoopsyncStatus::Parse, format!("delta:{}:{}: {}", e.line, e.column, e.message))
        })?;
        let v = workspace(ws)?.publish(&ops).map_err(|e| match e {
            WorkspaceError::Correlation(s) => Failure::from(s),
            other => Failure::new(CoopsyncStatus::Invalid, other),
        })?;
        put(out, v)
    })
}

/// Parses a rule file and writes it back in canonical layout. On a parse
/// error the last error starts with `line:column:`.
///
/// # Safety
/// `rules` must be NUL-terminated and `out` writable. The string written to
/// `out` is owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn coopsync_rules_format(rules: *const c_char, out: *mut *mut c_char) -> CoopsyncStatus {
    guard(|| {
        let rs = parse_rules(text(rules, "rules")?)
            .map_err(|e| Failure::new(CoopsyncStatus::Parse, format!("{}:{}: {}", e.line, e.column, e.message)))?;
        put_string(out, print_rules(&rs))
    })
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn coopsync_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn coopsync_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn coopsync_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
