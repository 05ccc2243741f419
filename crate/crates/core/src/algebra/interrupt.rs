//! Cooperative cancellation for long exact computations.
//!
//! Hot loops call [`check`]; when the limits installed by [`with_limits`]
//! have expired, the computation unwinds back to `with_limits`, which
//! reports [`Interrupted`]. The unwind uses `resume_unwind`, so no panic
//! message is printed.

use std::cell::RefCell;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interrupted;

#[derive(Clone)]
struct Limits {
    deadline: Option<Instant>,
    cancel: Option<Arc<AtomicBool>>,
}

impl Limits {
    fn expired(&self) -> bool {
        self.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed))
            || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

thread_local! {
    static LIMITS: RefCell<Option<Limits>> = const { RefCell::new(None) };
}

/// Unwinds to the enclosing [`with_limits`] once its limits have expired.
pub fn check() {
    if LIMITS.with(|l| l.borrow().as_ref().is_some_and(Limits::expired)) {
        resume_unwind(Box::new(Interrupted));
    }
}

/// Runs `f` with a deadline and cancel flag visible to [`check`].
pub fn with_limits<T>(
    deadline: Option<Instant>,
    cancel: Option<Arc<AtomicBool>>,
    f: impl FnOnce() -> T,
) -> Result<T, Interrupted> {
    if deadline.is_none() && cancel.is_none() {
        return Ok(f());
    }
    let prev = LIMITS.with(|l| l.replace(Some(Limits { deadline, cancel })));
    let r = catch_unwind(AssertUnwindSafe(f));
    LIMITS.with(|l| *l.borrow_mut() = prev);
    match r {
        Ok(v) => Ok(v),
        Err(p) if p.is::<Interrupted>() => Err(Interrupted),
        Err(p) => resume_unwind(p),
    }
}
