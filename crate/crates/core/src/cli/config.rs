//! TOML run configuration. Every key has a default; unknown keys are rejected.
//!
//! ```toml
//! seed = 7
//! model = "collective"
//!
//! [physics]
//! omega0_hz = 210e3     # Ω₀/2π
//! c6_au = 1.7e19
//!
//! [cloud]
//! n_atoms = 1.5e7
//! peak_density_m3 = 8.2e19
//!
//! [time]
//! stop = 20e-6
//! points = 201
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cloud::{BlockadeModel, CloudSpec, PartitionOptions};
use crate::error::{Error, Result};
use crate::grid::{linspace, validate_time_grid};
use crate::physics::{convert_c6_atomic_units, hz_to_angular, PhysicalParams};

fn config_err(key: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn finite_positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(key, format!("must be a positive finite number, got {v}")))
    }
}

fn default_model() -> BlockadeModel {
    BlockadeModel::Collective
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_model")]
    pub model: BlockadeModel,
    /// Worker threads; 0 lets the runtime decide. Outputs do not depend on it.
    #[serde(default)]
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub cloud: CloudConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub exact: ExactConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub fit: FitConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            model: default_model(),
            threads: 0,
            out: None,
            physics: PhysicsConfig::default(),
            cloud: CloudConfig::default(),
            time: TimeConfig::default(),
            exact: ExactConfig::default(),
            scaling: ScalingConfig::default(),
            fit: FitConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    /// Single-atom Rabi frequency Ω₀/2π, Hz.
    pub omega0_hz: f64,
    /// `C₆` in atomic units; the sign is ignored.
    pub c6_au: f64,
    pub gamma_per_s: f64,
    pub kappa: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig {
            omega0_hz: 210e3,
            c6_au: 1.7e19,
            gamma_per_s: 0.0,
            kappa: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CloudConfig {
    pub n_atoms: f64,
    /// Isotropic cloud with this peak density, m⁻³. Ignored when `sigma_m` is set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_density_m3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_m: Option<[f64; 3]>,
    pub n_min: f64,
    pub extent_sigmas: f64,
    pub max_cells: usize,
}

impl Default for CloudConfig {
    fn default() -> Self {
        CloudConfig {
            n_atoms: 1.5e7,
            peak_density_m3: None,
            sigma_m: None,
            n_min: 1.0,
            extent_sigmas: 5.0,
            max_cells: 10_000_000,
        }
    }
}

/// Either explicit `values` or `points` evenly spaced samples on `[start, stop]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            start: 0.0,
            stop: 20e-6,
            points: 201,
            values: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisChoice {
    Full,
    Restricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Auto,
    Eigen,
    Krylov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExactConfig {
    /// Whitespace-separated `x y z` table in metres.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positions: Option<PathBuf>,
    /// Sample this many atoms from `[cloud]` instead of reading `positions`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    pub basis: BasisChoice,
    /// Restriction radius; defaults to the single-atom blockade radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restricted_radius_m: Option<f64>,
    pub detuning_hz: f64,
    pub method: MethodChoice,
    pub max_full_atoms: usize,
    pub max_restricted_atoms: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            positions: None,
            count: None,
            basis: BasisChoice::Restricted,
            restricted_radius_m: None,
            detuning_hz: 0.0,
            method: MethodChoice::Auto,
            max_full_atoms: 14,
            max_restricted_atoms: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub densities_m3: Vec<f64>,
    /// Ω₀/2π values, Hz.
    pub omegas_hz: Vec<f64>,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            densities_m3: crate::grid::geomspace(2.8e18, 8.2e19, 4),
            omegas_hz: crate::grid::geomspace(42e3, 210e3, 4),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<PathBuf>,
}

/// Manifest layout: run metadata and digests around the resolved config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestFile {
    pub manifest: ManifestInfo,
    pub inputs: std::collections::BTreeMap<String, String>,
    pub outputs: std::collections::BTreeMap<String, String>,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestInfo {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub duration_s: f64,
}

fn toml_error(e: toml::de::Error) -> Error {
    let msg = e.message().to_string();
    // Unknown or mistyped keys are reported by name inside backticks.
    let key = msg
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<document>".to_string());
    let msg = match e.span() {
        Some(span) => format!("{msg} (byte {})", span.start),
        None => msg,
    };
    Error::Config { key, msg }
}

impl RunConfig {
    /// Parse a config file or a manifest written by a previous run.
    pub fn from_toml(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(toml_error)?;
        if table.contains_key("manifest") {
            let m: ManifestFile = toml::from_str(text).map_err(toml_error)?;
            Ok(m.config)
        } else {
            toml::from_str(text).map_err(toml_error)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.anchor_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    /// Make relative input paths absolute with respect to `base`, so a
    /// manifest stays valid wherever it is re-run from.
    pub fn anchor_paths(&mut self, base: &Path) {
        let anchor = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    let joined = base.join(&*path);
                    *path = std::path::absolute(&joined).unwrap_or(joined);
                }
            }
        };
        anchor(&mut self.exact.positions);
        anchor(&mut self.fit.curve);
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serialises")
    }

    pub fn params(&self) -> Result<PhysicalParams> {
        let p = &self.physics;
        let omega0 = hz_to_angular(finite_positive("physics.omega0_hz", p.omega0_hz)?);
        if !(p.c6_au != 0.0 && p.c6_au.is_finite()) {
            return Err(config_err("physics.c6_au", "must be a non-zero finite number"));
        }
        let c6 = convert_c6_atomic_units(p.c6_au)?;
        if !(p.gamma_per_s >= 0.0 && p.gamma_per_s.is_finite()) {
            return Err(config_err("physics.gamma_per_s", "must be ≥ 0"));
        }
        finite_positive("physics.kappa", p.kappa)?;
        PhysicalParams::new(omega0, c6)?
            .with_gamma(p.gamma_per_s)?
            .with_kappa(p.kappa)
    }

    pub fn cloud_spec(&self) -> Result<CloudSpec> {
        let c = &self.cloud;
        let n_atoms = finite_positive("cloud.n_atoms", c.n_atoms)?;
        match (c.sigma_m, c.peak_density_m3) {
            (Some(sigma), _) => {
                for (axis, s) in ["x", "y", "z"].iter().zip(sigma) {
                    finite_positive(&format!("cloud.sigma_m[{axis}]"), s)?;
                }
                CloudSpec::new(n_atoms, sigma)
            }
            (None, peak) => {
                let peak = finite_positive("cloud.peak_density_m3", peak.unwrap_or(8.2e19))?;
                CloudSpec::isotropic_with_peak(n_atoms, peak)
            }
        }
    }

    pub fn partition_options(&self) -> Result<PartitionOptions> {
        let c = &self.cloud;
        if !(c.n_min >= 0.0 && c.n_min.is_finite()) {
            return Err(config_err("cloud.n_min", "must be ≥ 0"));
        }
        finite_positive("cloud.extent_sigmas", c.extent_sigmas)?;
        if c.max_cells == 0 {
            return Err(config_err("cloud.max_cells", "must be ≥ 1"));
        }
        Ok(PartitionOptions {
            n_min: c.n_min,
            extent_sigmas: c.extent_sigmas,
            max_cells: c.max_cells,
        })
    }

    pub fn time_grid(&self) -> Result<Vec<f64>> {
        let t = &self.time;
        let grid = match &t.values {
            Some(v) => v.clone(),
            None => {
                if t.points == 0 {
                    return Err(config_err("time.points", "must be ≥ 1"));
                }
                if !(t.start >= 0.0 && t.start.is_finite()) {
                    return Err(config_err("time.start", "must be ≥ 0"));
                }
                if !(t.stop.is_finite() && (t.stop > t.start || (t.points == 1 && t.stop == t.start))) {
                    return Err(config_err("time.stop", "must exceed time.start"));
                }
                linspace(t.start, t.stop, t.points)
            }
        };
        validate_time_grid(&grid).map_err(|e| config_err("time.values", e.to_string()))?;
        Ok(grid)
    }

    /// Sweep grids with Ω₀ converted to rad/s.
    pub fn sweep_grids(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let s = &self.scaling;
        if s.densities_m3.is_empty() {
            return Err(config_err("scaling.densities_m3", "must not be empty"));
        }
        if s.omegas_hz.is_empty() {
            return Err(config_err("scaling.omegas_hz", "must not be empty"));
        }
        for &n in &s.densities_m3 {
            finite_positive("scaling.densities_m3", n)?;
        }
        let mut omegas = Vec::with_capacity(s.omegas_hz.len());
        for &f in &s.omegas_hz {
            omegas.push(hz_to_angular(finite_positive("scaling.omegas_hz", f)?));
        }
        Ok((s.densities_m3.clone(), omegas))
    }

    /// Check every section up front, before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.cloud_spec()?;
        self.partition_options()?;
        self.time_grid()?;
        self.sweep_grids()?;
        let e = &self.exact;
        if let Some(r) = e.restricted_radius_m {
            finite_positive("exact.restricted_radius_m", r)?;
        }
        if !e.detuning_hz.is_finite() {
            return Err(config_err("exact.detuning_hz", "must be finite"));
        }
        if e.count == Some(0) {
            return Err(config_err("exact.count", "must be ≥ 1"));
        }
        Ok(())
    }
}
