//! C ABI for the master-planning toolkit.
//!
//! Objects cross the boundary as opaque handles (`MppInstance`,
//! `MppResult`); every fallible call returns an [`MppCode`] and leaves
//! a human-readable message in a thread-local slot readable through
//! `mpp_last_error`. Strings returned through out-pointers are
//! allocated here and must be released with `mpp_string_free`.
//!
//! The generated header lives in `include/mpplan.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use mpplan::bench::Formulation;
use mpplan::data::PlanAssignment;
use mpplan::generator::{self, GenSpec};
use mpplan::solver::{solve_lp, solve_mip_with, SolveConfig};
use mpplan::validate::{self, Variant};
use mpplan::{assignment, netflow, Instance, SizeClass, SolveResult, SolveStatus};

/// Result codes for every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MppCode {
    MppOk = 0,
    MppErrNullArgument = 1,
    MppErrInvalidArgument = 2,
    MppErrUtf8 = 3,
    MppErrData = 4,
    MppErrSolve = 5,
    MppErrNoSolution = 6,
    MppErrPanic = 7,
}

/// Solver outcome, mirrored as a stable C enum.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MppStatus {
    MppStatusOptimal = 0,
    MppStatusFeasible = 1,
    MppStatusInfeasible = 2,
    MppStatusUnbounded = 3,
    MppStatusTimeLimit = 4,
    MppStatusNoSolution = 5,
    MppStatusNumericalFailure = 6,
}

/// An immutable master-planning instance.
pub struct MppInstance {
    inner: Instance,
}

/// A finished solve: status, bounds and (for integer runs) the plan.
pub struct MppResult {
    result: SolveResult,
    plan: Option<PlanAssignment>,
    variant: Variant,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: impl std::fmt::Display) {
    let text = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn guard<F: FnOnce() -> MppCode>(f: F) -> MppCode {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            MppCode::MppErrPanic
        }
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, MppCode> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(MppCode::MppErrNullArgument);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        MppCode::MppErrUtf8
    })
}

fn give_string(text: String, out: *mut *mut c_char) -> MppCode {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(_) => {
            set_error("string contains a NUL byte");
            return MppCode::MppErrInvalidArgument;
        }
    };
    unsafe { *out = c.into_raw() };
    MppCode::MppOk
}

/// Last error message for this thread; valid until the next failing
/// call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn mpp_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a string returned by this library. Null is accepted.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn mpp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parses an instance from JSON text.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn mpp_instance_from_json(
    json: *const c_char,
    out: *mut *mut MppInstance,
) -> MppCode {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return MppCode::MppErrNullArgument;
        }
        let text = match unsafe { cstr(json) } {
            Ok(t) => t,
            Err(code) => return code,
        };
        let file = match serde_json::from_str(text) {
            Ok(f) => f,
            Err(e) => {
                set_error(e);
                return MppCode::MppErrData;
            }
        };
        match Instance::from_file(file) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(MppInstance { inner })) };
                MppCode::MppOk
            }
            Err(e) => {
                set_error(e);
                MppCode::MppErrData
            }
        }
    })
}

/// Loads an instance from a JSON file on disk.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn mpp_instance_load(
    path: *const c_char,
    out: *mut *mut MppInstance,
) -> MppCode {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return MppCode::MppErrNullArgument;
        }
        let path = match unsafe { cstr(path) } {
            Ok(t) => t,
            Err(code) => return code,
        };
        match Instance::load_json(path) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(MppInstance { inner })) };
                MppCode::MppOk
            }
            Err(e) => {
                set_error(e);
                MppCode::MppErrData
            }
        }
    })
}

/// Generates a benchmark instance on a built-in synthetic vessel.
/// `size_class` is 'S', 'M' or 'L'.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mpp_instance_generate(
    size_class: c_char,
    num_ports: u32,
    rob_fraction: f64,
    utilization: f64,
    seed: u64,
    out: *mut *mut MppInstance,
) -> MppCode {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return MppCode::MppErrNullArgument;
        }
        let class = match size_class as u8 as char {
            'S' | 's' => SizeClass::S,
            'M' | 'm' => SizeClass::M,
            'L' | 'l' => SizeClass::L,
            other => {
                set_error(format!("unknown size class `{other}`"));
                return MppCode::MppErrInvalidArgument;
            }
        };
        let vessel = generator::synthetic_vessel(class);
        let spec = GenSpec {
            vessel_class: class,
            num_ports,
            rob_fraction,
            utilization,
            seed,
        };
        match generator::generate(&spec, &vessel) {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(MppInstance { inner })) };
                MppCode::MppOk
            }
            Err(e) => {
                set_error(e);
                MppCode::MppErrData
            }
        }
    })
}

/// Frees an instance handle. Null is accepted.
///
/// # Safety
/// `inst` must be a live handle from this library, freed only once.
#[no_mangle]
pub unsafe extern "C" fn mpp_instance_free(inst: *mut MppInstance) {
    if !inst.is_null() {
        drop(unsafe { Box::from_raw(inst) });
    }
}

/// Serialises the instance back to JSON (free with `mpp_string_free`).
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mpp_instance_to_json(
    inst: *const MppInstance,
    out: *mut *mut c_char,
) -> MppCode {
    guard(|| {
        if inst.is_null() || out.is_null() {
            set_error("null argument");
            return MppCode::MppErrNullArgument;
        }
        let inst = unsafe { &*inst };
        match inst.inner.to_json() {
            Ok(json) => give_string(json, out),
            Err(e) => {
                set_error(e);
                MppCode::MppErrData
            }
        }
    })
}

/// Number of ports in the rotation.
///
/// # Safety
/// `inst` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpp_instance_num_ports(inst: *const MppInstance) -> u32 {
    if inst.is_null() {
        return 0;
    }
    unsafe { &*inst }.inner.num_ports
}

/// Total container count across loadlist and release cargo.
///
/// # Safety
/// `inst` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpp_instance_total_containers(inst: *const MppInstance) -> u64 {
    if inst.is_null() {
        return 0;
    }
    unsafe { &*inst }.inner.total_containers()
}

/// Builds and solves a formulation. `formulation`: 0 assignment,
/// 1 network-flow. `variant`: 0 full, 1 reduced. Relaxed solves drop
/// integrality and return no plan.
///
/// # Safety
/// `inst` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mpp_solve(
    inst: *const MppInstance,
    formulation: i32,
    variant: i32,
    relaxed: bool,
    time_limit_s: f64,
    out: *mut *mut MppResult,
) -> MppCode {
    guard(|| {
        if inst.is_null() || out.is_null() {
            set_error("null argument");
            return MppCode::MppErrNullArgument;
        }
        let inst = &unsafe { &*inst }.inner;
        let formulation = match formulation {
            0 => Formulation::Assignment,
            1 => Formulation::NetFlow,
            other => {
                set_error(format!("unknown formulation code {other}"));
                return MppCode::MppErrInvalidArgument;
            }
        };
        let variant = match variant {
            0 => Variant::Full,
            1 => Variant::Reduced,
            other => {
                set_error(format!("unknown variant code {other}"));
                return MppCode::MppErrInvalidArgument;
            }
        };
        if formulation == Formulation::NetFlow && variant == Variant::Full {
            set_error("the network-flow formulation has no full (stability) variant");
            return MppCode::MppErrInvalidArgument;
        }
        let cfg = SolveConfig::with_time_limit(time_limit_s);
        if let Err(e) = cfg.validate() {
            set_error(e);
            return MppCode::MppErrInvalidArgument;
        }

        let solved: Result<(SolveResult, Option<PlanAssignment>), String> = (|| {
            match formulation {
                Formulation::Assignment => {
                    let (model, index) = assignment::build(inst, variant, &Default::default())
                        .map_err(|e| e.to_string())?;
                    if relaxed {
                        let r = solve_lp(&model.relax(), &cfg).map_err(|e| e.to_string())?;
                        Ok((r, None))
                    } else {
                        let heur = assignment::primal_heuristic(inst, &index);
                        let r = solve_mip_with(&model, &cfg, Some(&heur))
                            .map_err(|e| e.to_string())?;
                        let plan = r
                            .solution
                            .as_ref()
                            .and_then(|sol| index.extract_plan(sol, 1e-6).ok());
                        Ok((r, plan))
                    }
                }
                Formulation::NetFlow => {
                    let (_, model, index) = netflow::build(inst).map_err(|e| e.to_string())?;
                    if relaxed {
                        let r = solve_lp(&model.relax(), &cfg).map_err(|e| e.to_string())?;
                        Ok((r, None))
                    } else {
                        let heur = netflow::primal_heuristic(inst, &index);
                        let r = solve_mip_with(&model, &cfg, Some(&heur))
                            .map_err(|e| e.to_string())?;
                        let plan = r
                            .solution
                            .as_ref()
                            .and_then(|sol| index.extract_plan(sol, 1e-6).ok());
                        Ok((r, plan))
                    }
                }
            }
        })();

        match solved {
            Ok((result, plan)) => {
                unsafe {
                    *out = Box::into_raw(Box::new(MppResult {
                        result,
                        plan,
                        variant,
                    }))
                };
                MppCode::MppOk
            }
            Err(e) => {
                set_error(e);
                MppCode::MppErrSolve
            }
        }
    })
}

/// Frees a result handle. Null is accepted.
///
/// # Safety
/// `result` must be a live handle from this library, freed only once.
#[no_mangle]
pub unsafe extern "C" fn mpp_result_free(result: *mut MppResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpp_result_status(result: *const MppResult) -> MppStatus {
    if result.is_null() {
        return MppStatus::MppStatusNoSolution;
    }
    match unsafe { &*result }.result.status {
        SolveStatus::Optimal => MppStatus::MppStatusOptimal,
        SolveStatus::Feasible => MppStatus::MppStatusFeasible,
        SolveStatus::Infeasible => MppStatus::MppStatusInfeasible,
        SolveStatus::Unbounded => MppStatus::MppStatusUnbounded,
        SolveStatus::TimeLimit => MppStatus::MppStatusTimeLimit,
        SolveStatus::NoSolution => MppStatus::MppStatusNoSolution,
        SolveStatus::NumericalFailure => MppStatus::MppStatusNumericalFailure,
    }
}

/// Objective of the returned solution, NaN when there is none.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpp_result_objective(result: *const MppResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    unsafe { &*result }.result.objective.unwrap_or(f64::NAN)
}

/// Best proven lower bound (minimisation).
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpp_result_best_bound(result: *const MppResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    unsafe { &*result }.result.best_bound
}

/// Relative MIP gap, NaN when unavailable.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpp_result_gap(result: *const MppResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    unsafe { &*result }.result.mip_gap.unwrap_or(f64::NAN)
}

/// Wall-clock seconds spent solving.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpp_result_wall_time(result: *const MppResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    unsafe { &*result }.result.wall_time_s
}

/// Branch-and-bound node count.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mpp_result_nodes(result: *const MppResult) -> u64 {
    if result.is_null() {
        return 0;
    }
    unsafe { &*result }.result.node_count
}

/// The extracted integral plan as JSON (free with `mpp_string_free`).
/// Fails with `MppErrNoSolution` for relaxed or unsolved runs.
///
/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mpp_result_plan_json(
    result: *const MppResult,
    out: *mut *mut c_char,
) -> MppCode {
    guard(|| {
        if result.is_null() || out.is_null() {
            set_error("null argument");
            return MppCode::MppErrNullArgument;
        }
        let result = unsafe { &*result };
        match &result.plan {
            Some(plan) => match plan.to_json() {
                Ok(json) => give_string(json, out),
                Err(e) => {
                    set_error(e);
                    MppCode::MppErrData
                }
            },
            None => {
                set_error("no integral plan available");
                MppCode::MppErrNoSolution
            }
        }
    })
}

/// Re-checks the plan of `result` against `inst` with the independent
/// validator, writing the report JSON (free with `mpp_string_free`)
/// and the feasibility verdict.
///
/// # Safety
/// Handles must be live; `report_out` and `feasible_out` must be valid
/// pointers.
#[no_mangle]
pub unsafe extern "C" fn mpp_result_validate(
    inst: *const MppInstance,
    result: *const MppResult,
    tol: f64,
    report_out: *mut *mut c_char,
    feasible_out: *mut bool,
) -> MppCode {
    guard(|| {
        if inst.is_null() || result.is_null() || report_out.is_null() || feasible_out.is_null() {
            set_error("null argument");
            return MppCode::MppErrNullArgument;
        }
        let inst = &unsafe { &*inst }.inner;
        let result = unsafe { &*result };
        let Some(plan) = &result.plan else {
            set_error("no integral plan available");
            return MppCode::MppErrNoSolution;
        };
        match validate::validate(inst, plan, result.variant, tol) {
            Ok(report) => {
                unsafe { *feasible_out = report.feasible };
                give_string(report.to_json(), report_out)
            }
            Err(e) => {
                set_error(e);
                MppCode::MppErrData
            }
        }
    })
}
