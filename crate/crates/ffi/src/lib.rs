//! C interface to `rydberg-core`.
//!
//! Every function returns a [`RydbergStatus`]; results go through out-pointers.
//! On failure, [`rydberg_last_error`] copies a message describing the most
//! recent error raised on the calling thread. Ensembles and exact Hamiltonians
//! are opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use rydberg_core::analysis::{fit_power_law, fit_saturation};
use rydberg_core::cloud::{partition_superatoms, BlockadeModel, CloudSpec, PartitionOptions, SuperatomEnsemble};
use rydberg_core::exact::{
    build_hamiltonian_with_caps, evolve, AtomPositions, BasisCaps, BasisKind, Hamiltonian, HamiltonianSpec,
    QuantumState, Trajectory,
};
use rydberg_core::physics::{
    blockade_radius_collective, blockade_radius_simple, convert_c6_atomic_units, two_photon_rabi, TwoPhotonInputs,
};
use rydberg_core::superatom::{simulate_cloud, ExcitationCurve};
use rydberg_core::{Error, PhysicalParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RydbergStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Resource cap (basis size, grid cells) exceeded.
    Size = 3,
    NonConvergence = 4,
    DegenerateData = 5,
    EmptyEnsemble = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RydbergModel {
    Simple = 0,
    Collective = 1,
}

/// Physical parameters, SI units; `omega0` in rad/s and `c6` in J·m⁶.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RydbergParams {
    pub omega0: f64,
    pub c6: f64,
    pub gamma_dephase: f64,
    pub kappa: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RydbergFit {
    pub n_sat: f64,
    pub rate: f64,
    pub n_sat_err: f64,
    pub rate_err: f64,
    pub residual_rms: f64,
    pub iterations: u32,
    pub converged: bool,
    pub n_sat_identifiable: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RydbergPowerLaw {
    pub exponent: f64,
    pub prefactor: f64,
    pub std_error: f64,
}

/// Opaque superatom ensemble.
pub struct RydbergEnsemble(SuperatomEnsemble);

/// Opaque exact Hamiltonian.
pub struct RydbergExact(Hamiltonian);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(e: &Error) -> RydbergStatus {
    match e {
        Error::Size { .. } => RydbergStatus::Size,
        Error::NonConvergence { .. } => RydbergStatus::NonConvergence,
        Error::DegenerateData(_) => RydbergStatus::DegenerateData,
        Error::EmptyEnsemble => RydbergStatus::EmptyEnsemble,
        _ => RydbergStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RydbergStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            RydbergStatus::Ok
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed as `{name}`"));
            RydbergStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            RydbergStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn input<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn array<'a, T>(p: *const T, len: usize, name: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn array_mut<'a, T>(p: *mut T, len: usize, name: &'static str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

fn params_of(p: &RydbergParams) -> Result<PhysicalParams, Failure> {
    let params = PhysicalParams {
        omega0: p.omega0,
        c6: p.c6,
        gamma_dephase: p.gamma_dephase,
        kappa: p.kappa,
    };
    params.validate()?;
    Ok(params)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rydberg_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parameters with `γ = 0` and `κ = 1`.
#[no_mangle]
pub extern "C" fn rydberg_params_default(omega0: f64, c6: f64) -> RydbergParams {
    RydbergParams {
        omega0,
        c6,
        gamma_dephase: 0.0,
        kappa: 1.0,
    }
}

/// `Ω₁Ω₂/(2Δ)`, all in rad/s.
///
/// # Safety
/// `result` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rydberg_two_photon_rabi(omega1: f64, omega2: f64, delta: f64, result: *mut f64) -> RydbergStatus {
    guard(|| {
        *out(result, "result")? = two_photon_rabi(TwoPhotonInputs { omega1, omega2, delta })?;
        Ok(())
    })
}

/// Converts a `C₆` in atomic units to J·m⁶ (magnitude).
///
/// # Safety
/// `result` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn rydberg_convert_c6_au(c6_au: f64, result: *mut f64) -> RydbergStatus {
    guard(|| {
        *out(result, "result")? = convert_c6_atomic_units(c6_au)?;
        Ok(())
    })
}

/// # Safety
/// `params` must be null or point to a valid struct; `radius` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rydberg_blockade_radius_simple(params: *const RydbergParams, radius: *mut f64) -> RydbergStatus {
    guard(|| {
        let p = params_of(input(params, "params")?)?;
        *out(radius, "radius")? = blockade_radius_simple(&p);
        Ok(())
    })
}

/// Self-consistent radius and atom number for the collective linewidth.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn rydberg_blockade_radius_collective(
    params: *const RydbergParams,
    local_density: f64,
    radius: *mut f64,
    n_atoms: *mut f64,
) -> RydbergStatus {
    guard(|| {
        let p = params_of(input(params, "params")?)?;
        let b = blockade_radius_collective(&p, local_density)?;
        *out(radius, "radius")? = b.radius;
        *out(n_atoms, "n_atoms")? = b.n_atoms;
        Ok(())
    })
}

/// Partitions a Gaussian cloud of `n_atoms` with widths `sigma[3]` (m).
/// On success `*ensemble` owns a new handle.
///
/// # Safety
/// `sigma` must point to 3 doubles; other pointers null or valid.
#[no_mangle]
pub unsafe extern "C" fn rydberg_ensemble_partition(
    n_atoms: f64,
    sigma: *const f64,
    params: *const RydbergParams,
    model: RydbergModel,
    n_min: f64,
    ensemble: *mut *mut RydbergEnsemble,
) -> RydbergStatus {
    guard(|| {
        let s = array(sigma, 3, "sigma")?;
        let p = params_of(input(params, "params")?)?;
        let slot = out(ensemble, "ensemble")?;
        let spec = CloudSpec::new(n_atoms, [s[0], s[1], s[2]])?;
        let model = match model {
            RydbergModel::Simple => BlockadeModel::Simple,
            RydbergModel::Collective => BlockadeModel::Collective,
        };
        let opts = PartitionOptions {
            n_min,
            ..PartitionOptions::default()
        };
        let ens = partition_superatoms(&spec, &p, model, &opts)?;
        *slot = Box::into_raw(Box::new(RydbergEnsemble(ens)));
        Ok(())
    })
}

/// # Safety
/// `ensemble` must be null or a handle from `rydberg_ensemble_partition`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rydberg_ensemble_free(ensemble: *mut RydbergEnsemble) {
    if !ensemble.is_null() {
        drop(Box::from_raw(ensemble));
    }
}

/// Number of entries, total superatoms `Σw` and covered atoms `Σw·N`.
///
/// # Safety
/// `ensemble` must be a live handle; out-pointers null or valid.
#[no_mangle]
pub unsafe extern "C" fn rydberg_ensemble_summary(
    ensemble: *const RydbergEnsemble,
    entries: *mut usize,
    superatoms: *mut f64,
    atoms_covered: *mut f64,
) -> RydbergStatus {
    guard(|| {
        let e = &input(ensemble, "ensemble")?.0;
        *out(entries, "entries")? = e.entries.len();
        *out(superatoms, "superatoms")? = e.superatom_count();
        *out(atoms_covered, "atoms_covered")? = e.total_atoms_covered;
        Ok(())
    })
}

/// Rydberg number of the ensemble at each of `len` times, written to `values`.
///
/// # Safety
/// `times` and `values` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rydberg_ensemble_simulate(
    ensemble: *const RydbergEnsemble,
    params: *const RydbergParams,
    times: *const f64,
    len: usize,
    values: *mut f64,
) -> RydbergStatus {
    guard(|| {
        let e = &input(ensemble, "ensemble")?.0;
        let p = params_of(input(params, "params")?)?;
        let grid = array(times, len, "times")?;
        let dst = array_mut(values, len, "values")?;
        let curve = simulate_cloud(e, &p, grid)?;
        dst.copy_from_slice(&curve.values);
        Ok(())
    })
}

/// Fits `N_sat(1 − e^{−Rt/N_sat})`. A fit that stops at the iteration limit
/// still fills `fit` and returns `NonConvergence`.
///
/// # Safety
/// `times` and `values` must each hold `len` doubles; `fit` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rydberg_fit_saturation(
    times: *const f64,
    values: *const f64,
    len: usize,
    fit: *mut RydbergFit,
) -> RydbergStatus {
    guard(|| {
        let t = array(times, len, "times")?;
        let v = array(values, len, "values")?;
        let dst = out(fit, "fit")?;
        let curve = ExcitationCurve::new(t.to_vec(), v.to_vec())?;
        let f = fit_saturation(&curve)?;
        *dst = RydbergFit {
            n_sat: f.n_sat,
            rate: f.rate,
            n_sat_err: f.n_sat_err,
            rate_err: f.rate_err,
            residual_rms: f.residual_rms,
            iterations: u32::try_from(f.iterations).unwrap_or(u32::MAX),
            converged: f.converged,
            n_sat_identifiable: f.n_sat_identifiable,
        };
        if !f.converged {
            return Err(Error::NonConvergence { count: 1 }.into());
        }
        Ok(())
    })
}

/// Ordinary least squares of `ln y` on `ln x`.
///
/// # Safety
/// `xs` and `ys` must each hold `len` doubles; `fit` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rydberg_fit_power_law(
    xs: *const f64,
    ys: *const f64,
    len: usize,
    fit: *mut RydbergPowerLaw,
) -> RydbergStatus {
    guard(|| {
        let x = array(xs, len, "xs")?;
        let y = array(ys, len, "ys")?;
        let dst = out(fit, "fit")?;
        let pts: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
        let f = fit_power_law(&pts)?;
        *dst = RydbergPowerLaw {
            exponent: f.exponent,
            prefactor: f.prefactor,
            std_error: f.std_error,
        };
        Ok(())
    })
}

/// Builds the exact Hamiltonian of `count` atoms at `positions` (`3·count`
/// doubles, m, row-major). With `restricted`, pairs closer than
/// `restricted_radius` (or the simple blockade radius when it is ≤ 0) are
/// never both excited. Default basis caps apply.
///
/// # Safety
/// `positions` must hold `3·count` doubles; `exact` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rydberg_exact_new(
    positions: *const f64,
    count: usize,
    params: *const RydbergParams,
    restricted: bool,
    restricted_radius: f64,
    exact: *mut *mut RydbergExact,
) -> RydbergStatus {
    guard(|| {
        let coords = array(positions, 3 * count, "positions")?;
        let p = params_of(input(params, "params")?)?;
        let slot = out(exact, "exact")?;
        let pos = AtomPositions::new(coords.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect())?;
        let kind = if restricted {
            let radius = if restricted_radius > 0.0 {
                restricted_radius
            } else {
                blockade_radius_simple(&p)
            };
            BasisKind::Restricted { radius }
        } else {
            BasisKind::Full
        };
        let spec = HamiltonianSpec::new(pos, p.omega0, p.c6);
        let h = build_hamiltonian_with_caps(&spec, kind, BasisCaps::default())?;
        *slot = Box::into_raw(Box::new(RydbergExact(h)));
        Ok(())
    })
}

/// # Safety
/// `exact` must be null or a handle from `rydberg_exact_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rydberg_exact_free(exact: *mut RydbergExact) {
    if !exact.is_null() {
        drop(Box::from_raw(exact));
    }
}

/// Dimension of the Hilbert-space basis.
///
/// # Safety
/// `exact` must be a live handle; `dim` null or writable.
#[no_mangle]
pub unsafe extern "C" fn rydberg_exact_dim(exact: *const RydbergExact, dim: *mut usize) -> RydbergStatus {
    guard(|| {
        *out(dim, "dim")? = input(exact, "exact")?.0.dim();
        Ok(())
    })
}

/// Evolves the all-ground state over `len` ascending times and writes
/// `⟨N_R⟩` and the W-state fidelity at each. `w_fidelity` may be null.
///
/// # Safety
/// `times` and `n_rydberg` (and `w_fidelity` if not null) must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rydberg_exact_evolve(
    exact: *const RydbergExact,
    times: *const f64,
    len: usize,
    n_rydberg: *mut f64,
    w_fidelity: *mut f64,
) -> RydbergStatus {
    guard(|| {
        let h = &input(exact, "exact")?.0;
        let grid = array(times, len, "times")?;
        let n_out = array_mut(n_rydberg, len, "n_rydberg")?;
        let states = evolve(h, &QuantumState::ground(h.basis()), grid)?;
        let traj = Trajectory::from_states(grid, &states)?;
        n_out.copy_from_slice(&traj.n_rydberg);
        if !w_fidelity.is_null() {
            array_mut(w_fidelity, len, "w_fidelity")?.copy_from_slice(&traj.w_fidelity);
        }
        Ok(())
    })
}
