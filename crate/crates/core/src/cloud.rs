//! Gaussian ground-state cloud and its partition into superatoms.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{AtomPositions, Vec3};
use crate::physics::{
    blockade_radius_collective, blockade_radius_simple, positive, sphere_volume, PhysicalParams,
};

/// Gaussian cloud of `n_atoms` with per-axis 1/√e radii `sigma` (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudSpec {
    pub n_atoms: f64,
    pub sigma: Vec3,
}

impl CloudSpec {
    pub fn new(n_atoms: f64, sigma: Vec3) -> Result<Self> {
        let spec = CloudSpec { n_atoms, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        positive("n_atoms", self.n_atoms)?;
        for (axis, s) in ["sigma.x", "sigma.y", "sigma.z"].iter().zip(self.sigma) {
            positive(axis, s)?;
        }
        Ok(())
    }

    /// Isotropic cloud with the given atom number and peak density.
    pub fn isotropic_with_peak(n_atoms: f64, peak_density: f64) -> Result<Self> {
        positive("n_atoms", n_atoms)?;
        positive("peak_density", peak_density)?;
        let s = (n_atoms / (peak_density * (2.0 * PI).powf(1.5))).cbrt();
        Self::new(n_atoms, [s; 3])
    }

    /// Same shape, atom number rescaled to reach `peak_density`.
    pub fn with_peak_density(&self, peak_density: f64) -> Result<Self> {
        positive("peak_density", peak_density)?;
        Self::new(self.n_atoms * peak_density / peak_density_of(self), self.sigma)
    }
}

fn peak_density_of(spec: &CloudSpec) -> f64 {
    spec.n_atoms / ((2.0 * PI).powf(1.5) * spec.sigma[0] * spec.sigma[1] * spec.sigma[2])
}

/// `N_g/((2π)^{3/2} σx σy σz)`, atoms per m³.
pub fn peak_density(spec: &CloudSpec) -> f64 {
    peak_density_of(spec)
}

pub fn density_at(spec: &CloudSpec, point: Vec3) -> f64 {
    let q: f64 = (0..3).map(|k| (point[k] / spec.sigma[k]).powi(2)).sum();
    peak_density_of(spec) * (-0.5 * q).exp()
}

/// `count` independent draws from the cloud's Gaussian; deterministic in
/// `(spec, count, seed)`.
pub fn sample_positions(spec: &CloudSpec, count: usize, seed: u64) -> Result<AtomPositions> {
    if count == 0 {
        return Err(Error::invalid("count", "must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec3> = (0..count)
        .map(|_| {
            let mut p = [0.0; 3];
            for (k, c) in p.iter_mut().enumerate() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *c = z * spec.sigma[k];
            }
            p
        })
        .collect();
    AtomPositions::new(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockadeModel {
    /// One global radius set by `ħΩ₀` at peak density; every cell is one superatom.
    Simple,
    /// Local radius set by the collective linewidth `ħ√N·Ω₀`.
    Collective,
}

impl FromStr for BlockadeModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(BlockadeModel::Simple),
            "collective" => Ok(BlockadeModel::Collective),
            other => Err(Error::invalid("model", format!("expected simple|collective, got `{other}`"))),
        }
    }
}

impl std::fmt::Display for BlockadeModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BlockadeModel::Simple => "simple",
            BlockadeModel::Collective => "collective",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionOptions {
    /// Entries with fewer atoms per superatom are dropped.
    pub n_min: f64,
    /// Grid half-extent in units of σ per axis.
    pub extent_sigmas: f64,
    pub max_cells: usize,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions {
            n_min: 1.0,
            extent_sigmas: 5.0,
            max_cells: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperatomEntry {
    /// Atoms per superatom.
    pub n_per: f64,
    /// Number of such superatoms (fractional allowed).
    pub weight: f64,
    pub center: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperatomEnsemble {
    pub entries: Vec<SuperatomEntry>,
    /// `Σ wᵢ·Nᵢ`.
    pub total_atoms_covered: f64,
    /// Atom number of the cloud the ensemble was built from.
    pub cloud_atoms: f64,
    /// Side of a grid cell, m.
    pub cell_side: f64,
}

impl SuperatomEnsemble {
    /// Build from explicit entries (for example a single superatom of known size).
    pub fn from_entries(entries: Vec<SuperatomEntry>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if !(e.n_per.is_finite() && e.n_per >= 0.0) {
                return Err(Error::invalid(format!("entries[{i}].n_per"), "must be finite and >= 0"));
            }
            positive(&format!("entries[{i}].weight"), e.weight)?;
        }
        let total = entries.iter().map(|e| e.weight * e.n_per).sum();
        Ok(SuperatomEnsemble {
            entries,
            total_atoms_covered: total,
            cloud_atoms: total,
            cell_side: f64::NAN,
        })
    }

    /// `Σ wᵢ`, the number of superatoms.
    pub fn superatom_count(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    pub fn max_n_per(&self) -> f64 {
        self.entries.iter().map(|e| e.n_per).fold(0.0, f64::max)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `x_m,y_m,z_m,n_per,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_m,y_m,z_m,n_per,weight\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                e.center[0], e.center[1], e.center[2], e.n_per, e.weight
            );
        }
        out
    }
}

/// Fraction of a unit normal between `a` and `b` (in units of σ), evaluated
/// on the tail side that avoids cancellation.
fn normal_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        0.5 * (libm::erfc(a * FRAC_1_SQRT_2) - libm::erfc(b * FRAC_1_SQRT_2))
    } else if b <= 0.0 {
        0.5 * (libm::erfc(-b * FRAC_1_SQRT_2) - libm::erfc(-a * FRAC_1_SQRT_2))
    } else {
        0.5 * (libm::erf(b * FRAC_1_SQRT_2) - libm::erf(a * FRAC_1_SQRT_2))
    }
}

struct Axis {
    centers: Vec<f64>,
    mass: Vec<f64>,
}

fn axis_cells(sigma: f64, side: f64, extent: f64) -> Axis {
    let count = ((2.0 * extent * sigma / side).ceil() as usize).max(1);
    let start = -(count as f64) * side / 2.0;
    let edges: Vec<f64> = (0..=count).map(|k| start + k as f64 * side).collect();
    Axis {
        centers: edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(),
        mass: edges
            .windows(2)
            .map(|w| normal_mass(w[0] / sigma, w[1] / sigma))
            .collect(),
    }
}

/// Tile the cloud with cubic cells of blockade-sphere volume and turn each
/// cell into superatoms.
///
/// The cell side is `(4π/3)^{1/3}·r_b` with `r_b` the model's radius at peak
/// density (κ already included). Cell atom counts are exact Gaussian
/// integrals over the cell.
pub fn partition_superatoms(
    spec: &CloudSpec,
    params: &PhysicalParams,
    model: BlockadeModel,
    opts: &PartitionOptions,
) -> Result<SuperatomEnsemble> {
    spec.validate()?;
    params.validate()?;
    if !(opts.n_min.is_finite() && opts.n_min >= 0.0) {
        return Err(Error::invalid("n_min", "must be finite and >= 0"));
    }
    positive("extent_sigmas", opts.extent_sigmas)?;
    let n0 = peak_density(spec);
    let r_peak = match model {
        BlockadeModel::Simple => blockade_radius_simple(params),
        BlockadeModel::Collective => blockade_radius_collective(params, n0)?.radius,
    };
    let side = sphere_volume(r_peak).cbrt();
    let axes: Vec<Axis> = (0..3)
        .map(|k| {
            let cells = (2.0 * opts.extent_sigmas * spec.sigma[k] / side).ceil();
            if cells > opts.max_cells as f64 {
                return Err(cells_error(cells, opts.max_cells));
            }
            Ok(axis_cells(spec.sigma[k], side, opts.extent_sigmas))
        })
        .collect::<Result<_>>()?;
    let total_cells = axes.iter().map(|a| a.centers.len() as f64).product::<f64>();
    if total_cells > opts.max_cells as f64 {
        return Err(cells_error(total_cells, opts.max_cells));
    }

    let (ax, ay, az) = (&axes[0], &axes[1], &axes[2]);
    let slabs: Vec<Vec<SuperatomEntry>> = (0..ax.centers.len())
        .into_par_iter()
        .map(|i| {
            let mut slab = Vec::new();
            for j in 0..ay.centers.len() {
                for k in 0..az.centers.len() {
                    let atoms = spec.n_atoms * ax.mass[i] * ay.mass[j] * az.mass[k];
                    if !(atoms > 0.0) {
                        continue;
                    }
                    let center = [ax.centers[i], ay.centers[j], az.centers[k]];
                    let (n_per, weight) = match model {
                        BlockadeModel::Simple => (atoms, 1.0),
                        BlockadeModel::Collective => {
                            let local = density_at(spec, center);
                            match blockade_radius_collective(params, local) {
                                Ok(cb) if cb.n_atoms > 0.0 => (cb.n_atoms, atoms / cb.n_atoms),
                                _ => continue,
                            }
                        }
                    };
                    if n_per < opts.n_min || !(weight > 0.0) || !weight.is_finite() {
                        continue;
                    }
                    slab.push(SuperatomEntry {
                        n_per,
                        weight,
                        center,
                    });
                }
            }
            slab
        })
        .collect();
    let entries: Vec<SuperatomEntry> = slabs.into_iter().flatten().collect();
    let total = entries.iter().map(|e| e.weight * e.n_per).sum();
    Ok(SuperatomEnsemble {
        entries,
        total_atoms_covered: total,
        cloud_atoms: spec.n_atoms,
        cell_side: side,
    })
}

fn cells_error(cells: f64, limit: usize) -> Error {
    Error::Size {
        what: "partition grid cell count".into(),
        requested: if cells >= usize::MAX as f64 { usize::MAX } else { cells as usize },
        limit,
    }
}
