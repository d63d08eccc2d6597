//! C ABI over the risnet core library.
//!
//! Conventions: every fallible function returns a `RisnetStatus` and hands
//! results back through out-pointers. Handles are opaque; each has a
//! matching `_free` function and must not be used after freeing. On any
//! non-OK status, `risnet_last_error` returns a thread-local message
//! describing the failure. No call unwinds across the boundary.

use risnet::experiment::{assemble, AssembledScene};
use risnet::optimizer::{
    sopt_multistart, sopt_run, zopt_run, OptimizerTrace, RisLoadState, StepSchedule, StoppingRule,
};
use risnet::scene::SceneConfig;
use risnet::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RisnetStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    NumericalError = 4,
    BufferTooSmall = 5,
    InternalPanic = 6,
}

/// Which assembled matrix to copy out.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RisnetMatrixKind {
    Impedance = 0,
    Scattering = 1,
}

/// Load-optimization algorithm selector.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RisnetAlgorithm {
    /// Phase-domain first-order ascent on the scattering representation.
    PhaseAscent = 0,
    /// Reactance-domain first-order ascent on the impedance representation.
    ReactanceAscent = 1,
}

/// Opaque handle to an assembled scene (port partition plus impedance and
/// scattering matrices).
pub struct RisnetScene {
    inner: AssembledScene,
}

/// Opaque handle to one optimization run's full trace.
pub struct RisnetTrace {
    inner: OptimizerTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(e: &Error) -> RisnetStatus {
    set_error(&e.to_string());
    if e.is_config_error() {
        RisnetStatus::ConfigError
    } else {
        RisnetStatus::NumericalError
    }
}

fn guarded<F: FnOnce() -> RisnetStatus>(f: F) -> RisnetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            RisnetStatus::InternalPanic
        }
    }
}

macro_rules! nonnull {
    ($p:expr) => {
        if $p.is_null() {
            set_error(concat!(stringify!($p), " is null"));
            return RisnetStatus::NullArgument;
        }
    };
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn risnet_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Assemble a scene from a TOML config file.
///
/// # Safety
/// `path` must point to a NUL-terminated string; `out` must point to
/// writable storage for one pointer. On OK, `*out` owns the scene and must
/// be released with `risnet_scene_free`.
#[no_mangle]
pub unsafe extern "C" fn risnet_scene_load(
    path: *const c_char,
    remove_direct_link: bool,
    out: *mut *mut RisnetScene,
) -> RisnetStatus {
    guarded(|| {
        nonnull!(path);
        nonnull!(out);
        let raw = unsafe { CStr::from_ptr(path) };
        let Ok(utf8) = raw.to_str() else {
            set_error("path is not valid UTF-8");
            return RisnetStatus::InvalidArgument;
        };
        let config = match risnet::io::read_scene_config(Path::new(utf8)) {
            Ok(c) => c,
            Err(e) => return status_of(&e),
        };
        build_scene_handle(&config, remove_direct_link, out)
    })
}

/// Assemble the built-in 28 GHz reference scene with the given column
/// spacing divisor (column spacing = wavelength / q_divisor).
///
/// # Safety
/// `out` must point to writable storage for one pointer. On OK, `*out`
/// owns the scene and must be released with `risnet_scene_free`.
#[no_mangle]
pub unsafe extern "C" fn risnet_scene_reference(
    q_divisor: f64,
    remove_direct_link: bool,
    out: *mut *mut RisnetScene,
) -> RisnetStatus {
    guarded(|| {
        nonnull!(out);
        build_scene_handle(&SceneConfig::reference(q_divisor), remove_direct_link, out)
    })
}

fn build_scene_handle(
    config: &SceneConfig,
    remove_direct_link: bool,
    out: *mut *mut RisnetScene,
) -> RisnetStatus {
    match assemble(config, remove_direct_link) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(RisnetScene { inner })) };
            RisnetStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Release a scene handle. Null is a no-op.
///
/// # Safety
/// `scene` must be a pointer returned by a scene constructor that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn risnet_scene_free(scene: *mut RisnetScene) {
    if !scene.is_null() {
        drop(unsafe { Box::from_raw(scene) });
    }
}

/// Port counts of the scene's three groups.
///
/// # Safety
/// `scene` must be a live scene handle; the out-pointers must each point
/// to writable storage for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn risnet_scene_ports(
    scene: *const RisnetScene,
    out_tx: *mut usize,
    out_surface: *mut usize,
    out_rx: *mut usize,
) -> RisnetStatus {
    guarded(|| {
        nonnull!(scene);
        nonnull!(out_tx);
        nonnull!(out_surface);
        nonnull!(out_rx);
        let p = unsafe { &(*scene).inner }.partition;
        unsafe {
            *out_tx = p.n_t;
            *out_surface = p.n_s;
            *out_rx = p.n_r;
        }
        RisnetStatus::Ok
    })
}

/// Copy the assembled N x N matrix into `out` as row-major interleaved
/// re/im pairs. `len` must be exactly 2*N*N (N = total port count).
///
/// # Safety
/// `scene` must be a live scene handle; `out` must point to writable
/// storage for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn risnet_scene_matrix(
    scene: *const RisnetScene,
    kind: RisnetMatrixKind,
    out: *mut f64,
    len: usize,
) -> RisnetStatus {
    guarded(|| {
        nonnull!(scene);
        nonnull!(out);
        let inner = unsafe { &(*scene).inner };
        let m = match kind {
            RisnetMatrixKind::Impedance => inner.z.entries(),
            RisnetMatrixKind::Scattering => inner.s.entries(),
        };
        let needed = 2 * m.nrows() * m.ncols();
        if len != needed {
            set_error(&format!(
                "matrix buffer must hold {needed} doubles, got {len}"
            ));
            return RisnetStatus::BufferTooSmall;
        }
        let slice = unsafe { std::slice::from_raw_parts_mut(out, len) };
        let mut idx = 0;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                slice[idx] = m[(i, j)].re;
                slice[idx + 1] = m[(i, j)].im;
                idx += 2;
            }
        }
        RisnetStatus::Ok
    })
}

/// Run a load optimization on the scene with default step schedules.
/// `extra_starts` adds seeded random restarts (phase ascent only; pass 0
/// otherwise). Iteration budget `max_iters` must be at least 1.
///
/// # Safety
/// `scene` must be a live scene handle; `out` must point to writable
/// storage for one pointer. On OK, `*out` owns the trace and must be
/// released with `risnet_trace_free`.
#[no_mangle]
pub unsafe extern "C" fn risnet_scene_optimize(
    scene: *const RisnetScene,
    algorithm: RisnetAlgorithm,
    max_iters: usize,
    extra_starts: usize,
    seed: u64,
    out: *mut *mut RisnetTrace,
) -> RisnetStatus {
    guarded(|| {
        nonnull!(scene);
        nonnull!(out);
        if max_iters == 0 {
            set_error("max_iters must be at least 1");
            return RisnetStatus::InvalidArgument;
        }
        if algorithm == RisnetAlgorithm::ReactanceAscent && extra_starts > 0 {
            set_error("extra_starts requires the phase-ascent algorithm");
            return RisnetStatus::InvalidArgument;
        }
        let inner = unsafe { &(*scene).inner };
        let n_s = inner.partition.n_s;
        let stop = StoppingRule {
            max_iters,
            ..StoppingRule::default()
        };
        let result = match algorithm {
            RisnetAlgorithm::PhaseAscent => {
                let schedule = StepSchedule::phase_default();
                if extra_starts > 0 {
                    sopt_multistart(&inner.sb, &schedule, &stop, extra_starts, seed)
                } else {
                    sopt_run(&inner.sb, &RisLoadState::zero_phases(n_s), &schedule, &stop)
                }
            }
            RisnetAlgorithm::ReactanceAscent => zopt_run(
                &inner.zb,
                &RisLoadState::short_circuit(n_s),
                &StepSchedule::reactance_default(),
                &stop,
            ),
        };
        match result {
            Ok(trace) => {
                unsafe { *out = Box::into_raw(Box::new(RisnetTrace { inner: trace })) };
                RisnetStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Release a trace handle. Null is a no-op.
///
/// # Safety
/// `trace` must be a pointer returned by `risnet_scene_optimize` that has
/// not been freed already.
#[no_mangle]
pub unsafe extern "C" fn risnet_trace_free(trace: *mut RisnetTrace) {
    if !trace.is_null() {
        drop(unsafe { Box::from_raw(trace) });
    }
}

/// Number of recorded iterations (the initial state is iteration 0 and is
/// not counted).
///
/// # Safety
/// `trace` must be a live trace handle; `out` must point to writable
/// storage for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn risnet_trace_iterations(
    trace: *const RisnetTrace,
    out: *mut usize,
) -> RisnetStatus {
    guarded(|| {
        nonnull!(trace);
        nonnull!(out);
        unsafe { *out = (*trace).inner.iterations() };
        RisnetStatus::Ok
    })
}

/// Received power gain after the given iteration; iteration 0 is the
/// initial state.
///
/// # Safety
/// `trace` must be a live trace handle; `out` must point to writable
/// storage for one double.
#[no_mangle]
pub unsafe extern "C" fn risnet_trace_gain(
    trace: *const RisnetTrace,
    iteration: usize,
    out: *mut f64,
) -> RisnetStatus {
    guarded(|| {
        nonnull!(trace);
        nonnull!(out);
        let inner = unsafe { &(*trace).inner };
        let value = if iteration == 0 {
            inner.initial_gain
        } else if let Some(r) = inner.records.get(iteration - 1) {
            r.gain
        } else {
            set_error(&format!(
                "iteration {iteration} out of range (trace has {})",
                inner.records.len()
            ));
            return RisnetStatus::InvalidArgument;
        };
        unsafe { *out = value };
        RisnetStatus::Ok
    })
}

/// Final received power gain of the run.
///
/// # Safety
/// `trace` must be a live trace handle; `out` must point to writable
/// storage for one double.
#[no_mangle]
pub unsafe extern "C" fn risnet_trace_final_gain(
    trace: *const RisnetTrace,
    out: *mut f64,
) -> RisnetStatus {
    guarded(|| {
        nonnull!(trace);
        nonnull!(out);
        unsafe { *out = (*trace).inner.final_gain };
        RisnetStatus::Ok
    })
}

/// Number of tunable loads in the final state.
///
/// # Safety
/// `trace` must be a live trace handle; `out` must point to writable
/// storage for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn risnet_trace_phase_count(
    trace: *const RisnetTrace,
    out: *mut usize,
) -> RisnetStatus {
    guarded(|| {
        nonnull!(trace);
        nonnull!(out);
        unsafe { *out = (*trace).inner.final_state.len() };
        RisnetStatus::Ok
    })
}

/// Copy the final load phases (radians, in (-pi, pi]) into `out`. `len`
/// must equal the value from `risnet_trace_phase_count`.
///
/// # Safety
/// `trace` must be a live trace handle; `out` must point to writable
/// storage for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn risnet_trace_phases(
    trace: *const RisnetTrace,
    out: *mut f64,
    len: usize,
) -> RisnetStatus {
    guarded(|| {
        nonnull!(trace);
        nonnull!(out);
        let phases = unsafe { &(*trace).inner }.final_state.phases();
        if len != phases.len() {
            set_error(&format!(
                "phase buffer must hold {} doubles, got {len}",
                phases.len()
            ));
            return RisnetStatus::BufferTooSmall;
        }
        let slice = unsafe { std::slice::from_raw_parts_mut(out, len) };
        slice.copy_from_slice(phases);
        RisnetStatus::Ok
    })
}
