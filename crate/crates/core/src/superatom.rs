//! Independent superatoms oscillating at `√N·Ω₀`, summed over an ensemble.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::cloud::SuperatomEnsemble;
use crate::error::{Error, Result};
use crate::grid::validate_time_grid as check_grid;
use crate::physics::PhysicalParams;

/// Rydberg number versus excitation time.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Generating parameters, echoed into manifests.
    pub metadata: BTreeMap<String, String>,
}

impl ExcitationCurve {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        Ok(ExcitationCurve {
            times,
            values,
            metadata: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `t_s,n_rydberg`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,n_rydberg\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            let _ = writeln!(out, "{t},{v}");
        }
        out
    }

    /// Parse a two-column `t_s,n_rydberg` CSV. Extra columns are ignored.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
        if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
            return Err(Error::Parse {
                line: 1,
                column: None,
                msg: "missing header `t_s,n_rydberg`".into(),
            });
        }
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (Some(ti), Some(vi)) = (col("t_s"), col("n_rydberg")) else {
            return Err(Error::Parse {
                line: 1,
                column: None,
                msg: format!("header must contain t_s and n_rydberg, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        };
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let line = row + 2;
            let record = record.map_err(|e| csv_error(e, line))?;
            let field = |idx: usize| -> Result<f64> {
                let raw = record.get(idx).ok_or_else(|| Error::Parse {
                    line,
                    column: Some(idx + 1),
                    msg: "missing field".into(),
                })?;
                raw.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    column: Some(idx + 1),
                    msg: format!("`{raw}`: {e}"),
                })
            };
            times.push(field(ti)?);
            values.push(field(vi)?);
        }
        if times.is_empty() {
            return Err(Error::Parse {
                line: 2,
                column: None,
                msg: "no data rows".into(),
            });
        }
        Self::new(times, values)
    }
}

fn csv_error(e: csv::Error, fallback_line: usize) -> Error {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback_line);
    Error::Parse {
        line,
        column: None,
        msg: e.to_string(),
    }
}

/// Excited fraction of one superatom of `n_per` atoms after time `t`.
///
/// Undamped: `sin²(√N·Ω₀t/2)`. With dephasing rate γ:
/// `(1 − e^{−γt}·cos(√N·Ω₀t))/2`.
pub fn superatom_population(n_per: f64, omega0: f64, t: f64, gamma: f64) -> f64 {
    let phase = n_per.sqrt() * omega0 * t;
    if gamma == 0.0 {
        (0.5 * phase).sin().powi(2)
    } else {
        0.5 * (1.0 - (-gamma * t).exp() * phase.cos())
    }
}

/// `N_R(t) = Σᵢ wᵢ·fᵢ(t)` on the given grid.
pub fn simulate_cloud(
    ensemble: &SuperatomEnsemble,
    params: &PhysicalParams,
    time_grid: &[f64],
) -> Result<ExcitationCurve> {
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    params.validate()?;
    check_grid(time_grid)?;
    let omega = params.omega0;
    let gamma = params.gamma_dephase;
    // Each time point sums entries in a fixed order, so the result does not
    // depend on the thread count.
    let values: Vec<f64> = time_grid
        .par_iter()
        .map(|&t| {
            ensemble
                .entries
                .iter()
                .map(|e| e.weight * superatom_population(e.n_per, omega, t, gamma))
                .sum()
        })
        .collect();
    let mut curve = ExcitationCurve::new(time_grid.to_vec(), values)?;
    curve.metadata.insert("omega0_radps".into(), omega.to_string());
    curve.metadata.insert("gamma_per_s".into(), gamma.to_string());
    curve.metadata.insert("superatoms".into(), ensemble.superatom_count().to_string());
    curve.metadata.insert("entries".into(), ensemble.entries.len().to_string());
    curve.metadata.insert("cloud_atoms".into(), ensemble.cloud_atoms.to_string());
    Ok(curve)
}

/// Rabi oscillation of `n_atoms` independent atoms, `N·sin²(Ω₀t/2)`.
pub fn noninteracting_reference(n_atoms: f64, omega0: f64, time_grid: &[f64]) -> Result<ExcitationCurve> {
    crate::physics::positive("n_atoms", n_atoms)?;
    check_grid(time_grid)?;
    let values = time_grid
        .iter()
        .map(|&t| n_atoms * (0.5 * omega0 * t).sin().powi(2))
        .collect();
    let mut curve = ExcitationCurve::new(time_grid.to_vec(), values)?;
    curve.metadata.insert("reference".into(), "noninteracting".into());
    curve.metadata.insert("n_atoms".into(), n_atoms.to_string());
    Ok(curve)
}

/// First time the blockaded curve drops below `(1 − threshold)` of the
/// reference, linearly interpolated between grid points. `None` when it never
/// does within the grid.
pub fn crossover_time(
    curve: &ExcitationCurve,
    reference: &ExcitationCurve,
    threshold: f64,
) -> Result<Option<f64>> {
    if curve.times != reference.times {
        return Err(Error::InvalidGrid("curve and reference must share the time grid".into()));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid("threshold", "must lie in (0, 1)"));
    }
    let gap = |i: usize| curve.values[i] - (1.0 - threshold) * reference.values[i];
    for i in 0..curve.len() {
        if reference.values[i] > 0.0 && gap(i) < 0.0 {
            if i == 0 {
                return Ok(Some(curve.times[0]));
            }
            let (g0, g1) = (gap(i - 1), gap(i));
            let (t0, t1) = (curve.times[i - 1], curve.times[i]);
            let t = if g0 > 0.0 { t0 + (t1 - t0) * g0 / (g0 - g1) } else { t1 };
            return Ok(Some(t));
        }
    }
    Ok(None)
}
