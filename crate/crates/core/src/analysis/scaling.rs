//! Sweeps over peak density and single-atom Rabi frequency, followed by joint
//! power-law regressions `R ∝ n^a·Ω₀^b` and `N_sat ∝ n^c·Ω₀^d`.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::power_law::{fit_joint_power_law, Exponent};
use super::saturation::{fit_saturation, SaturationFit};
use crate::cloud::{partition_superatoms, BlockadeModel, CloudSpec, PartitionOptions};
use crate::error::{Error, Result};
use crate::grid::validate_time_grid;
use crate::physics::PhysicalParams;
use crate::superatom::simulate_cloud;

/// Everything `scaling_experiment` needs besides the base cloud and parameters.
#[derive(Debug, Clone)]
pub struct ScalingSetup {
    /// Peak densities, m⁻³.
    pub densities: Vec<f64>,
    /// Single-atom Rabi frequencies, rad/s.
    pub omegas: Vec<f64>,
    pub model: BlockadeModel,
    pub time_grid: Vec<f64>,
    pub partition: PartitionOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n_peak: f64,
    pub omega0: f64,
    /// Atoms in the rescaled cloud.
    pub n_atoms: f64,
    pub superatoms: f64,
    pub fit: Option<SaturationFit>,
    /// Why the point has no usable fit.
    pub note: Option<String>,
}

impl SweepRow {
    pub fn converged(&self) -> bool {
        self.fit.is_some_and(|f| f.converged)
    }

    /// Mean atoms per superatom implied by the fit, `N_g/N_sat`.
    pub fn mean_occupancy(&self) -> Option<f64> {
        self.fit.map(|f| self.n_atoms / f.n_sat)
    }
}

/// A regression exponent, or the reason it could not be determined.
pub type ExponentEstimate = std::result::Result<Exponent, String>;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingExponents {
    /// `R ∝ n^a`.
    pub a: ExponentEstimate,
    /// `R ∝ Ω₀^b`.
    pub b: ExponentEstimate,
    /// `N_sat ∝ n^c`.
    pub c: ExponentEstimate,
    /// `N_sat ∝ Ω₀^d`.
    pub d: ExponentEstimate,
}

impl ScalingExponents {
    fn all(error: &str) -> Self {
        let e = Err(error.to_string());
        ScalingExponents {
            a: e.clone(),
            b: e.clone(),
            c: e.clone(),
            d: e,
        }
    }

    pub fn named(&self) -> [(&'static str, &ExponentEstimate); 4] {
        [("a", &self.a), ("b", &self.b), ("c", &self.c), ("d", &self.d)]
    }

    /// `name,value,std_error,n_points`; undetermined exponents are written as
    /// `NaN` with zero points.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,value,std_error,n_points\n");
        for (name, e) in self.named() {
            match e {
                Ok(x) => {
                    let _ = writeln!(out, "{name},{},{},{}", x.value, x.std_error, x.n_points);
                }
                Err(_) => {
                    let _ = writeln!(out, "{name},NaN,NaN,0");
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub rows: Vec<SweepRow>,
    pub exponents: ScalingExponents,
    /// Indices into `rows` left out of the regressions.
    pub excluded: Vec<usize>,
    pub warnings: Vec<String>,
}

impl ScalingReport {
    pub fn non_converged(&self) -> usize {
        self.rows.iter().filter(|r| !r.converged()).count()
    }

    /// `n_peak_m3,omega0_radps,n_sat,n_sat_err,R_per_s,R_err,converged`.
    pub fn sweep_csv(&self) -> String {
        let mut out = String::from("n_peak_m3,omega0_radps,n_sat,n_sat_err,R_per_s,R_err,converged\n");
        for r in &self.rows {
            let f = r.fit.unwrap_or(SaturationFit {
                n_sat: f64::NAN,
                rate: f64::NAN,
                n_sat_err: f64::NAN,
                rate_err: f64::NAN,
                residual_rms: f64::NAN,
                converged: false,
                iterations: 0,
                n_sat_identifiable: false,
            });
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.n_peak, r.omega0, f.n_sat, f.n_sat_err, f.rate, f.rate_err, f.converged
            );
        }
        out
    }
}

fn grid_warnings(name: &str, grid: &[f64], warnings: &mut Vec<String>) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} grid is empty")));
    }
    for &v in grid {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidGrid(format!("{name} grid value {v} is not positive")));
        }
    }
    let lo = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().cloned().fold(0.0, f64::max);
    if grid.len() < 3 {
        warnings.push(format!("{name} grid has {} points; at least 3 recommended", grid.len()));
    }
    if hi / lo < 5.0 {
        warnings.push(format!("{name} grid spans a factor {:.3}; at least 5 recommended", hi / lo));
    }
    Ok(())
}

fn run_point(
    cloud: &CloudSpec,
    params: &PhysicalParams,
    setup: &ScalingSetup,
    n_peak: f64,
    omega0: f64,
) -> Result<SweepRow> {
    let cloud = cloud.with_peak_density(n_peak)?;
    let params = params.with_omega0(omega0)?;
    let mut row = SweepRow {
        n_peak,
        omega0,
        n_atoms: cloud.n_atoms,
        superatoms: 0.0,
        fit: None,
        note: None,
    };
    let ensemble = partition_superatoms(&cloud, &params, setup.model, &setup.partition)?;
    if ensemble.is_empty() {
        row.note = Some("empty ensemble".into());
        return Ok(row);
    }
    row.superatoms = ensemble.superatom_count();
    let curve = simulate_cloud(&ensemble, &params, &setup.time_grid)?;
    match fit_saturation(&curve) {
        Ok(fit) => {
            if !fit.converged {
                row.note = Some(format!("fit did not converge in {} iterations", fit.iterations));
            }
            row.fit = Some(fit);
        }
        Err(Error::DegenerateData(msg)) => row.note = Some(msg),
        Err(e) => return Err(e),
    }
    Ok(row)
}

fn regress(points: &[([f64; 2], f64)]) -> (ExponentEstimate, ExponentEstimate) {
    let xs: Vec<[f64; 2]> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    match fit_joint_power_law(&xs, &ys) {
        Ok(joint) => (joint.exponents[0].clone(), joint.exponents[1].clone()),
        Err(e) => (Err(e.to_string()), Err(e.to_string())),
    }
}

/// Runs every `(n, Ω₀)` point (in parallel, gathered in grid order) and
/// regresses the converged fits.
pub fn scaling_experiment(
    cloud_base: &CloudSpec,
    params_base: &PhysicalParams,
    setup: &ScalingSetup,
) -> Result<ScalingReport> {
    cloud_base.validate()?;
    params_base.validate()?;
    validate_time_grid(&setup.time_grid)?;
    let mut warnings = Vec::new();
    grid_warnings("density", &setup.densities, &mut warnings)?;
    grid_warnings("omega", &setup.omegas, &mut warnings)?;

    let pairs: Vec<(f64, f64)> = setup
        .densities
        .iter()
        .flat_map(|&n| setup.omegas.iter().map(move |&w| (n, w)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(n, w)| run_point(cloud_base, params_base, setup, n, w))
        .collect::<Result<Vec<_>>>()?;

    let mut excluded = Vec::new();
    let mut r_points = Vec::new();
    let mut n_points = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        match row.fit {
            Some(f) if f.converged => {
                r_points.push(([row.n_peak, row.omega0], f.rate));
                n_points.push(([row.n_peak, row.omega0], f.n_sat));
            }
            _ => {
                warnings.push(format!(
                    "point n={} omega0={} excluded: {}",
                    row.n_peak,
                    row.omega0,
                    row.note.as_deref().unwrap_or("no fit")
                ));
                excluded.push(i);
            }
        }
    }
    let exponents = if r_points.is_empty() {
        ScalingExponents::all("no converged sweep points")
    } else {
        let (a, b) = regress(&r_points);
        let (c, d) = regress(&n_points);
        ScalingExponents { a, b, c, d }
    };
    Ok(ScalingReport {
        rows,
        exponents,
        excluded,
        warnings,
    })
}
