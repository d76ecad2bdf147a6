//! A fixed pool of worker lanes for fork-join sweeps.
//!
//! The coordinating thread is lane 0. Every [`Lanes::run`] publishes one job,
//! runs its own share, and blocks until all helper lanes have finished theirs,
//! so each sweep ends in a barrier. Idle helpers spin briefly and then yield,
//! which keeps hand-off latency low on dedicated cores and lets oversubscribed
//! lanes make progress.

use std::cell::UnsafeCell;
use std::ops::Range;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::thread;

use crossbeam_utils::Backoff;

type Job = dyn Fn(usize) + Sync;

struct Shared {
    lanes: usize,
    epoch: AtomicU64,
    pending: AtomicUsize,
    shutdown: AtomicBool,
    poisoned: AtomicBool,
    job: UnsafeCell<Option<*const Job>>,
}

// SAFETY: `job` is written only by the coordinator while every helper is idle
// (pending == 0) and read by helpers only after observing the Release bump of
// `epoch` that follows the write.
unsafe impl Sync for Shared {}

impl Shared {
    fn helper(&self, lane: usize) {
        let mut seen = 0;
        loop {
            let backoff = Backoff::new();
            loop {
                let e = self.epoch.load(Ordering::Acquire);
                if e != seen {
                    seen = e;
                    break;
                }
                backoff.snooze();
            }
            if self.shutdown.load(Ordering::Acquire) {
                return;
            }
            // SAFETY: see the `Sync` impl; the pointee outlives this call
            // because `run` does not return before `pending` reaches zero.
            let job = unsafe { (*self.job.get()).expect("job published before epoch bump") };
            let job: &Job = unsafe { &*job };
            if catch_unwind(AssertUnwindSafe(|| job(lane))).is_err() {
                self.poisoned.store(true, Ordering::Release);
            }
            self.pending.fetch_sub(1, Ordering::Release);
        }
    }

    fn stop(&self) {
        self.shutdown.store(true, Ordering::Release);
        self.epoch.fetch_add(1, Ordering::Release);
    }
}

pub(crate) struct Lanes<'a> {
    shared: &'a Shared,
}

impl Lanes<'_> {
    pub fn count(&self) -> usize {
        self.shared.lanes
    }

    /// Runs `job(lane)` once on every lane and waits for all of them.
    pub fn run<'f>(&self, job: &'f (dyn Fn(usize) + Sync + 'f)) {
        let sh = self.shared;
        if sh.lanes == 1 {
            job(0);
            return;
        }
        // SAFETY: erases the borrow's lifetime; helpers drop their use of the
        // pointer before `pending` reaches zero, and we wait for that below.
        let ptr: *const Job =
            unsafe { std::mem::transmute::<&'f (dyn Fn(usize) + Sync + 'f), &'static Job>(job) };
        unsafe { *sh.job.get() = Some(ptr) };
        sh.pending.store(sh.lanes - 1, Ordering::Relaxed);
        sh.epoch.fetch_add(1, Ordering::Release);

        let own = catch_unwind(AssertUnwindSafe(|| job(0)));
        let backoff = Backoff::new();
        while sh.pending.load(Ordering::Acquire) != 0 {
            backoff.snooze();
        }
        if let Err(payload) = own {
            std::panic::resume_unwind(payload);
        }
        if sh.poisoned.load(Ordering::Acquire) {
            panic!("a worker lane panicked");
        }
    }
}

struct StopOnDrop<'a>(&'a Shared);

impl Drop for StopOnDrop<'_> {
    fn drop(&mut self) {
        self.0.stop();
    }
}

/// Starts `workers` lanes (the caller plus `workers - 1` helper threads) for
/// the duration of `body`.
pub(crate) fn with_lanes<R>(workers: usize, body: impl FnOnce(&Lanes<'_>) -> R) -> R {
    let shared = Shared {
        lanes: workers.max(1),
        epoch: AtomicU64::new(0),
        pending: AtomicUsize::new(0),
        shutdown: AtomicBool::new(false),
        poisoned: AtomicBool::new(false),
        job: UnsafeCell::new(None),
    };
    thread::scope(|s| {
        for lane in 1..shared.lanes {
            let sh = &shared;
            s.spawn(move || sh.helper(lane));
        }
        let _stop = StopOnDrop(&shared);
        body(&Lanes { shared: &shared })
    })
}

/// The contiguous share of `0..len` owned by `lane` out of `lanes`.
pub(crate) fn lane_range(len: usize, lanes: usize, lane: usize) -> Range<usize> {
    (len * lane / lanes)..(len * (lane + 1) / lanes)
}
