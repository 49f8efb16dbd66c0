//! Time propagation of `i dψ/dt = (H/ħ) ψ`.
//!
//! Two propagators share one entry point. Small bases are diagonalised once
//! (`H` is real symmetric), which is exact for any interaction stiffness.
//! Larger bases use a short-iterative Lanczos scheme that only needs the
//! matrix-free `apply`; each step builds one Krylov space and then picks the
//! largest sub-step whose a-posteriori error estimate is below tolerance.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::hamiltonian::Hamiltonian;
use super::state::{same_basis, QuantumState};
use crate::error::{Error, Result};
use crate::grid::validate_time_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagatorKind {
    /// Dense diagonalisation up to `dense_max_dim`, Lanczos above.
    Auto,
    Eigen,
    Krylov,
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub method: PropagatorKind,
    pub dense_max_dim: usize,
    /// Maximum Krylov dimension per step.
    pub krylov_dim: usize,
    /// Local error bound per Lanczos step (state-norm units).
    pub tolerance: f64,
    /// Upper bound on a single Lanczos step, s.
    pub max_step: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            method: PropagatorKind::Auto,
            dense_max_dim: 1024,
            krylov_dim: 30,
            tolerance: 1e-13,
            max_step: None,
        }
    }
}

/// Propagate `psi0` from `t = 0` and return the state at every grid time.
pub fn evolve(h: &Hamiltonian, psi0: &QuantumState, time_grid: &[f64]) -> Result<Vec<QuantumState>> {
    evolve_with(h, psi0, time_grid, &EvolveOptions::default())
}

pub fn evolve_with(
    h: &Hamiltonian,
    psi0: &QuantumState,
    time_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<QuantumState>> {
    if !same_basis(h.basis(), psi0.basis()) {
        return Err(Error::BasisMismatch);
    }
    validate_time_grid(time_grid)?;
    let use_eigen = match opts.method {
        PropagatorKind::Eigen => true,
        PropagatorKind::Krylov => false,
        PropagatorKind::Auto => h.dim() <= opts.dense_max_dim,
    };
    let amps = if use_eigen {
        eigen_propagate(h, psi0.amplitudes(), time_grid)
    } else {
        krylov_propagate(h, psi0.amplitudes(), time_grid, opts)?
    };
    amps.into_iter()
        .map(|a| QuantumState::from_amplitudes(h.basis(), a))
        .collect()
}

fn split(v: &[Complex64]) -> (DVector<f64>, DVector<f64>) {
    (
        DVector::from_iterator(v.len(), v.iter().map(|c| c.re)),
        DVector::from_iterator(v.len(), v.iter().map(|c| c.im)),
    )
}

fn eigen_propagate(h: &Hamiltonian, psi0: &[Complex64], grid: &[f64]) -> Vec<Vec<Complex64>> {
    let eig = SymmetricEigen::new(h.to_dense());
    let q = &eig.eigenvectors;
    let (re, im) = split(psi0);
    let c_re = q.tr_mul(&re);
    let c_im = q.tr_mul(&im);
    grid.iter()
        .map(|&t| {
            let mut y_re = DVector::zeros(c_re.len());
            let mut y_im = DVector::zeros(c_re.len());
            for k in 0..c_re.len() {
                let phase = Complex64::from_polar(1.0, -eig.eigenvalues[k] * t);
                let y = phase * Complex64::new(c_re[k], c_im[k]);
                y_re[k] = y.re;
                y_im[k] = y.im;
            }
            let out_re = q * y_re;
            let out_im = q * y_im;
            out_re
                .iter()
                .zip(out_im.iter())
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect()
        })
        .collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lanczos basis and the eigen-decomposition of its tridiagonal projection.
struct KrylovSpace {
    vectors: Vec<Vec<Complex64>>,
    theta: DVector<f64>,
    s: DMatrix<f64>,
    /// Residual coupling out of the space; zero on lucky breakdown.
    beta_out: f64,
}

impl KrylovSpace {
    fn build(h: &Hamiltonian, start: &[Complex64], max_dim: usize) -> Self {
        let n = start.len();
        let dim_cap = max_dim.min(n).max(1);
        let scale = norm(start);
        let mut vectors: Vec<Vec<Complex64>> = vec![start.iter().map(|c| c / scale).collect()];
        let mut alpha = Vec::with_capacity(dim_cap);
        let mut beta: Vec<f64> = Vec::with_capacity(dim_cap);
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        let mut beta_out = 0.0;
        loop {
            let j = vectors.len() - 1;
            h.apply(&vectors[j], &mut w);
            let a = dot(&vectors[j], &w).re;
            alpha.push(a);
            // Full re-orthogonalisation, applied twice.
            for _ in 0..2 {
                for v in &vectors {
                    let c = dot(v, &w);
                    for (wi, vi) in w.iter_mut().zip(v) {
                        *wi -= c * vi;
                    }
                }
            }
            let b = norm(&w);
            let h_scale = alpha.iter().map(|x| x.abs()).fold(0.0, f64::max)
                + beta.iter().cloned().fold(0.0, f64::max)
                + f64::MIN_POSITIVE;
            if b <= 1e-14 * h_scale {
                break;
            }
            if vectors.len() == dim_cap {
                beta_out = b;
                break;
            }
            beta.push(b);
            vectors.push(w.iter().map(|c| c / b).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        KrylovSpace {
            vectors,
            theta: eig.eigenvalues,
            s: eig.eigenvectors,
            beta_out,
        }
    }

    /// Coefficients of `exp(-i T dt) e₁` in the Lanczos basis.
    fn coefficients(&self, dt: f64) -> Vec<Complex64> {
        let k = self.theta.len();
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|l| Complex64::from_polar(self.s[(i, l)] * self.s[(0, l)], -self.theta[l] * dt))
                    .sum()
            })
            .collect()
    }

    /// Residual bound `dt·β_out·|cₘ|` on the truncation error of one step.
    fn error_estimate(&self, coeffs: &[Complex64], dt: f64) -> f64 {
        dt * self.beta_out * coeffs.last().map_or(0.0, |c| c.norm())
    }
}

fn krylov_propagate(
    h: &Hamiltonian,
    psi0: &[Complex64],
    grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<Vec<Complex64>>> {
    if !(opts.tolerance > 0.0) {
        return Err(Error::invalid("tolerance", "must be > 0"));
    }
    let max_step = opts.max_step.unwrap_or(f64::INFINITY);
    if !(max_step > 0.0) {
        return Err(Error::invalid("max_step", "must be > 0"));
    }
    let mut psi = psi0.to_vec();
    let mut t = 0.0;
    let mut suggested = f64::INFINITY;
    let mut out = Vec::with_capacity(grid.len());
    for &target in grid {
        while target - t > 0.0 {
            let scale = norm(&psi);
            let space = KrylovSpace::build(h, &psi, opts.krylov_dim);
            let mut dt = (target - t).min(max_step).min(suggested);
            let mut coeffs = space.coefficients(dt);
            let mut halved = false;
            while space.error_estimate(&coeffs, dt) * scale > opts.tolerance {
                dt *= 0.5;
                halved = true;
                coeffs = space.coefficients(dt);
                if dt < 1e-300 {
                    return Err(Error::invalid("tolerance", "Lanczos step size collapsed"));
                }
            }
            let mut next = vec![Complex64::new(0.0, 0.0); psi.len()];
            for (c, v) in coeffs.iter().zip(&space.vectors) {
                let c = c * scale;
                for (o, vi) in next.iter_mut().zip(v) {
                    *o += c * vi;
                }
            }
            psi = next;
            // Snap onto the output time when the remaining gap is rounding noise.
            t = if target - (t + dt) <= 1e-15 * target.abs() { target } else { t + dt };
            suggested = if halved { dt } else { dt * 2.0 };
        }
        out.push(psi.clone());
    }
    Ok(out)
}
