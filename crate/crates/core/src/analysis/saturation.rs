//! Least-squares fit of `N_R(τ) = N_sat·(1 − e^{−Rτ/N_sat})`.
//!
//! Levenberg–Marquardt on `(ln N_sat, ln R)`: positivity is built in and the
//! fit is equivariant under rescaling of the data.

use crate::error::{Error, Result};
use crate::superatom::ExcitationCurve;

const MAX_ITERATIONS: usize = 200;
const STEP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationFit {
    pub n_sat: f64,
    /// Initial slope, 1/s.
    pub rate: f64,
    pub n_sat_err: f64,
    pub rate_err: f64,
    /// `√(SSR/n)` in units of the data.
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
    /// False when the data do not reach far enough into saturation to pin
    /// `N_sat` (relative error above 50%, or less than 10% of the way to
    /// saturation by the last sample).
    pub n_sat_identifiable: bool,
}

/// `N_sat·(1 − e^{−Rτ/N_sat})`.
pub fn saturation_model(n_sat: f64, rate: f64, tau: f64) -> f64 {
    -n_sat * (-rate * tau / n_sat).exp_m1()
}

struct Problem<'a> {
    t: &'a [f64],
    y: &'a [f64],
}

impl Problem<'_> {
    fn ssr(&self, theta: [f64; 2]) -> f64 {
        let (n, r) = (theta[0].exp(), theta[1].exp());
        self.t
            .iter()
            .zip(self.y)
            .map(|(&t, &y)| (y - saturation_model(n, r, t)).powi(2))
            .sum()
    }

    /// Normal matrix `JᵀJ` and gradient `Jᵀr` with respect to the log-parameters.
    fn normal_equations(&self, theta: [f64; 2]) -> ([[f64; 2]; 2], [f64; 2]) {
        let (n, r) = (theta[0].exp(), theta[1].exp());
        let mut a = [[0.0; 2]; 2];
        let mut g = [0.0; 2];
        for (&t, &y) in self.t.iter().zip(self.y) {
            let u = r * t / n;
            let e = (-u).exp();
            let one_minus = -(-u).exp_m1();
            let j = [n * (one_minus - u * e), r * t * e];
            let res = y - n * one_minus;
            for p in 0..2 {
                g[p] += j[p] * res;
                for q in 0..2 {
                    a[p][q] += j[p] * j[q];
                }
            }
        }
        (a, g)
    }
}

fn solve2(m: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !(det.is_finite() && det.abs() > 0.0) {
        return None;
    }
    Some([
        (b[0] * m[1][1] - m[0][1] * b[1]) / det,
        (m[0][0] * b[1] - m[1][0] * b[0]) / det,
    ])
}

fn inverse2(m: [[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    // Relative singularity test: det against the product of the diagonal.
    if !(det.is_finite() && det > 1e-14 * m[0][0] * m[1][1]) {
        return None;
    }
    Some([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

pub fn fit_saturation(curve: &ExcitationCurve) -> Result<SaturationFit> {
    if curve.len() < 4 {
        return Err(Error::DegenerateData(format!(
            "need at least 4 points, got {}",
            curve.len()
        )));
    }
    if curve.times.iter().chain(&curve.values).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateData("non-finite sample".into()));
    }
    let mut order: Vec<usize> = (0..curve.len()).collect();
    order.sort_by(|&a, &b| curve.times[a].total_cmp(&curve.times[b]));
    let t: Vec<f64> = order.iter().map(|&i| curve.times[i]).collect();
    let y: Vec<f64> = order.iter().map(|&i| curve.values[i]).collect();
    let y_max = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(y_max > 0.0) {
        return Err(Error::DegenerateData("no strictly positive value".into()));
    }
    let t_span = t[t.len() - 1] - t[0];
    if !(t_span > 0.0) {
        return Err(Error::DegenerateData("all samples at one time".into()));
    }

    let k = (t.len() / 4).max(1);
    let secant = (y[k] - y[0]) / (t[k] - t[0]);
    let n0 = y_max;
    let r0 = if secant.is_finite() && secant > 0.0 {
        secant
    } else {
        y_max / t[t.len() - 1].max(t_span)
    };

    let problem = Problem { t: &t, y: &y };
    let mut theta = [n0.ln(), r0.ln()];
    let mut ssr = problem.ssr(theta);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (a, g) = problem.normal_equations(theta);
        let mut stepped = false;
        // Inner loop: raise damping until the step reduces the residual.
        for _ in 0..60 {
            let damped = [
                [a[0][0] * (1.0 + lambda), a[0][1]],
                [a[1][0], a[1][1] * (1.0 + lambda)],
            ];
            let Some(delta) = solve2(damped, g) else {
                lambda *= 10.0;
                continue;
            };
            let size = delta[0].abs().max(delta[1].abs());
            let trial = [theta[0] + delta[0], theta[1] + delta[1]];
            let trial_ssr = problem.ssr(trial);
            if trial_ssr.is_finite() && trial_ssr < ssr {
                theta = trial;
                ssr = trial_ssr;
                lambda = (lambda / 10.0).max(1e-12);
                stepped = true;
                if size < STEP_TOLERANCE {
                    converged = true;
                }
                break;
            }
            if size < STEP_TOLERANCE {
                // No downhill step at this resolution: stationary point.
                converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if converged || !stepped {
            break;
        }
    }

    let (n_sat, rate) = (theta[0].exp(), theta[1].exp());
    let n = t.len();
    let dof = (n - 2) as f64;
    let s2 = ssr / dof;
    let (a, _) = problem.normal_equations(theta);
    let (n_sat_err, rate_err) = match inverse2(a) {
        Some(cov) => (
            n_sat * (s2 * cov[0][0]).max(0.0).sqrt(),
            rate * (s2 * cov[1][1]).max(0.0).sqrt(),
        ),
        None => (f64::INFINITY, f64::INFINITY),
    };
    let saturation_reached = rate * t[n - 1] / n_sat;
    let n_sat_identifiable = n_sat_err.is_finite() && n_sat_err <= 0.5 * n_sat && saturation_reached >= 0.1;
    Ok(SaturationFit {
        n_sat,
        rate,
        n_sat_err,
        rate_err,
        residual_rms: (ssr / n as f64).sqrt(),
        converged,
        iterations,
        n_sat_identifiable,
    })
}
