//! Ordinary least squares in log-log space.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Slope standard error; infinite with only two points.
    pub std_error: f64,
    pub n_points: usize,
}

/// One fitted exponent of a joint regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent {
    pub value: f64,
    pub std_error: f64,
    pub n_points: usize,
}

/// Result of regressing `ln y` on several `ln xₖ` at once. An entry of
/// `exponents` is an error when its regressor does not vary.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPowerLaw {
    pub prefactor: f64,
    pub exponents: Vec<std::result::Result<Exponent, String>>,
    pub residual_rms: f64,
}

fn log_positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v.ln())
    } else {
        Err(Error::Domain(format!("{name} = {v} is not a positive finite number")))
    }
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let rows: Vec<[f64; 1]> = points.iter().map(|p| [p.0]).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let joint = fit_joint_power_law(&rows, &ys)?;
    match joint.exponents[0] {
        Ok(e) => Ok(PowerLawFit {
            exponent: e.value,
            prefactor: joint.prefactor,
            std_error: e.std_error,
            n_points: e.n_points,
        }),
        Err(ref msg) => Err(Error::Rank(msg.clone())),
    }
}

/// `y = A·Πₖ xₖ^{eₖ}` by least squares on logarithms. Regressors with fewer
/// than two distinct values are dropped and reported as rank-deficient; the
/// rest are still fitted.
pub fn fit_joint_power_law<const K: usize>(xs: &[[f64; K]], ys: &[f64]) -> Result<JointPowerLaw> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidParameter {
            name: "points".into(),
            reason: format!("{} regressor rows but {} responses", xs.len(), ys.len()),
        });
    }
    let n = ys.len();
    let mut lx = vec![[0.0; K]; n];
    let mut ly = vec![0.0; n];
    for i in 0..n {
        for k in 0..K {
            lx[i][k] = log_positive("x", xs[i][k])?;
        }
        ly[i] = log_positive("y", ys[i])?;
    }
    let varies: Vec<bool> = (0..K)
        .map(|k| lx.iter().any(|row| row[k] != lx.first().map_or(0.0, |r0| r0[k])))
        .collect();
    let active: Vec<usize> = (0..K).filter(|&k| varies[k]).collect();
    if n < active.len() + 1 || active.is_empty() {
        let msg = if n < 2 {
            format!("need at least 2 points, got {n}")
        } else {
            "regressor takes a single value".to_string()
        };
        if active.is_empty() {
            return Err(Error::Rank(msg));
        }
        return Err(Error::Rank(format!("{n} points cannot determine {} exponents", active.len())));
    }

    // Centre each column so the intercept decouples and conditioning is good.
    let mean_y = ly.iter().sum::<f64>() / n as f64;
    let means: Vec<f64> = active
        .iter()
        .map(|&k| lx.iter().map(|r| r[k]).sum::<f64>() / n as f64)
        .collect();
    let p = active.len();
    let x = DMatrix::from_fn(n, p, |i, j| lx[i][active[j]] - means[j]);
    let y = DVector::from_fn(n, |i, _| ly[i] - mean_y);
    let xtx = x.tr_mul(&x);
    let xty = x.tr_mul(&y);
    let diag_scale = (0..p).map(|j| xtx[(j, j)]).product::<f64>();
    let Some(inv) = xtx.clone().try_inverse().filter(|_| xtx.determinant() > 1e-12 * diag_scale) else {
        return Err(Error::Rank("regressors are collinear".into()));
    };
    let beta = &inv * xty;
    let resid = &y - &x * &beta;
    let ssr = resid.norm_squared();
    let dof = n as isize - p as isize - 1;
    let s2 = if dof > 0 { ssr / dof as f64 } else { f64::NAN };
    let intercept = mean_y - (0..p).map(|j| beta[j] * means[j]).sum::<f64>();

    let mut exponents = Vec::with_capacity(K);
    let mut j = 0;
    for (k, &v) in varies.iter().enumerate() {
        if v {
            let std_error = if dof > 0 { (s2 * inv[(j, j)]).max(0.0).sqrt() } else { f64::INFINITY };
            exponents.push(Ok(Exponent {
                value: beta[j],
                std_error,
                n_points: n,
            }));
            j += 1;
        } else {
            exponents.push(Err(format!("regressor {k} takes a single value")));
        }
    }
    Ok(JointPowerLaw {
        prefactor: intercept.exp(),
        exponents,
        residual_rms: (ssr / n as f64).sqrt(),
    })
}
