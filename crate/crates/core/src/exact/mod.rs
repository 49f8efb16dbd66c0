//! Exact dynamics of a handful of frozen two-level atoms with pairwise van der
//! Waals interaction.
//!
//! `H/ħ = (Ω₀/2) Σᵢ σˣᵢ + δ Σᵢ nᵢ + Σᵢ<ⱼ (C₆/ħr⁶ᵢⱼ) nᵢnⱼ` on either the full
//! 2^M product basis or the blockade-restricted basis in which no two atoms
//! closer than a chosen radius are simultaneously excited.

mod basis;
mod hamiltonian;
mod positions;
mod propagate;
mod state;

use std::fmt::Write as _;

pub use basis::{enumerate_restricted_basis, Basis, BasisCaps, BasisKind, BasisState};
pub use hamiltonian::{build_hamiltonian, build_hamiltonian_with_caps, Hamiltonian, HamiltonianSpec};
pub use positions::{AtomPositions, Vec3};
pub use propagate::{evolve, evolve_with, EvolveOptions, PropagatorKind};
pub use state::{rydberg_number, w_state_fidelity, QuantumState};

use crate::error::{Error, Result};

/// Observables along an exact trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub n_rydberg: Vec<f64>,
    pub w_fidelity: Vec<f64>,
}

impl Trajectory {
    pub fn from_states(times: &[f64], states: &[QuantumState]) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::InvalidGrid("one state per grid time expected".into()));
        }
        Ok(Trajectory {
            times: times.to_vec(),
            n_rydberg: states.iter().map(rydberg_number).collect(),
            w_fidelity: states.iter().map(w_state_fidelity).collect(),
        })
    }

    /// `t_s,n_rydberg,w_fidelity`, shortest round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,n_rydberg,w_fidelity\n");
        for i in 0..self.times.len() {
            let _ = writeln!(out, "{},{},{}", self.times[i], self.n_rydberg[i], self.w_fidelity[i]);
        }
        out
    }
}

/// Build, propagate from the ground state and record observables.
pub fn simulate(
    spec: &HamiltonianSpec,
    kind: BasisKind,
    time_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    let h = build_hamiltonian(spec, kind)?;
    let psi0 = QuantumState::ground(h.basis());
    let states = evolve_with(&h, &psi0, time_grid, opts)?;
    Trajectory::from_states(time_grid, &states)
}
