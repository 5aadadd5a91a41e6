#![allow(dead_code)]

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use coopsync_ffi::*;

pub const MODEL: &str = include_str!("../../../core/fixtures/chantier.cdm");
pub const PROJECT: &str = include_str!("../../../core/fixtures/blenod.cpj");
pub const RULES: &str = include_str!("../../../core/fixtures/chantier.cvt");

pub fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

pub fn last_error() -> String {
    let p = coopsync_last_error();
    assert!(!p.is_null(), "no last error recorded");
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

/// Takes ownership of a library string.
pub unsafe fn take(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    coopsync_string_free(p);
    s
}

pub type Failed = (CoopsyncStatus, String);

fn check(status: CoopsyncStatus) -> Result<(), Failed> {
    match status {
        CoopsyncStatus::Ok => {
            assert!(coopsync_last_error().is_null());
            Ok(())
        }
        s => Err((s, last_error())),
    }
}

/// Owning wrapper over a workspace handle, calling only the C ABI.
pub struct Engine(pub *mut CoopsyncWorkspace);

impl Engine {
    pub fn open(model: &str, project: &str, rules: &str, max_hops: i32) -> Result<Engine, Failed> {
        let mut h = ptr::null_mut();
        let (m, p, r) = (c(model), c(project), c(rules));
        check(unsafe { coopsync_workspace_open(m.as_ptr(), p.as_ptr(), r.as_ptr(), max_hops, &mut h) })?;
        assert!(!h.is_null());
        Ok(Engine(h))
    }

    pub fn fixture() -> Engine {
        Engine::open(MODEL, PROJECT, RULES, -1).unwrap()
    }

    pub fn version(&self) -> u64 {
        let mut v = 0;
        check(unsafe { coopsync_graph_version(self.0, &mut v) }).unwrap();
        v
    }

    pub fn content(&self, view: &str, role: &str) -> Result<String, Failed> {
        let mut out = ptr::null_mut();
        let (v, r) = (c(view), c(role));
        check(unsafe { coopsync_view_content(self.0, v.as_ptr(), r.as_ptr(), &mut out) })?;
        Ok(unsafe { take(out) })
    }

    pub fn schema(&self, view: &str) -> Result<String, Failed> {
        let mut out = ptr::null_mut();
        let v = c(view);
        check(unsafe { coopsync_view_schema(self.0, v.as_ptr(), &mut out) })?;
        Ok(unsafe { take(out) })
    }

    pub fn session(&self, role: &str) -> Result<u64, Failed> {
        let mut id = 0;
        let r = c(role);
        check(unsafe { coopsync_session_open(self.0, r.as_ptr(), &mut id) })?;
        Ok(id)
    }

    pub fn close(&self, session: u64) {
        check(unsafe { coopsync_session_close(self.0, session) }).unwrap();
    }

    pub fn select(&self, session: u64, view: &str, key: &str, version: u64) -> Result<String, Failed> {
        let mut out = ptr::null_mut();
        let (v, k) = (c(view), c(key));
        check(unsafe { coopsync_select(self.0, session, v.as_ptr(), k.as_ptr(), version, &mut out) })?;
        Ok(unsafe { take(out) })
    }

    pub fn publish(&self, delta: &str) -> Result<u64, Failed> {
        let mut v = 0;
        let d = c(delta);
        check(unsafe { coopsync_publish(self.0, d.as_ptr(), &mut v) })?;
        Ok(v)
    }
}

impl Drop for Engine {
    fn drop(&mut self) {
        unsafe { coopsync_workspace_free(self.0) }
    }
}

pub fn format_rules(text: &str) -> Result<String, Failed> {
    let mut out = ptr::null_mut();
    let t = c(text);
    check(unsafe { coopsync_rules_format(t.as_ptr(), &mut out) })?;
    Ok(unsafe { take(out) })
}
