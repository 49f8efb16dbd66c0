use std::sync::Arc;

use num_complex::Complex64;

use super::basis::{Basis, BasisState};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct QuantumState {
    basis: Arc<Basis>,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// All atoms in |g⟩.
    pub fn ground(basis: &Arc<Basis>) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        QuantumState {
            basis: Arc::clone(basis),
            amplitudes,
        }
    }

    /// The symmetric single excitation `(1/√M) Σᵢ |g…eᵢ…g⟩`.
    pub fn w_state(basis: &Arc<Basis>) -> Self {
        let m = basis.n_atoms();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        let a = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
        for i in 0..m {
            let idx = basis.index_of(BasisState(1 << i)).expect("singles are always in the basis");
            amplitudes[idx] = a;
        }
        QuantumState {
            basis: Arc::clone(basis),
            amplitudes,
        }
    }

    pub fn from_amplitudes(basis: &Arc<Basis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::BasisMismatch);
        }
        Ok(QuantumState {
            basis: Arc::clone(basis),
            amplitudes,
        })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(Error::BasisMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

pub(crate) fn same_basis(a: &Arc<Basis>, b: &Arc<Basis>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Expected number of Rydberg excitations, `Σ |c_s|²·popcount(s)`.
pub fn rydberg_number(psi: &QuantumState) -> f64 {
    psi.amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| a.norm_sqr() * psi.basis.state(i).excitations() as f64)
        .sum()
}

/// Squared overlap with the symmetric singly-excited state.
pub fn w_state_fidelity(psi: &QuantumState) -> f64 {
    let m = psi.basis.n_atoms();
    let overlap: Complex64 = (0..m)
        .filter_map(|i| psi.basis.index_of(BasisState(1 << i)))
        .map(|idx| psi.amplitudes[idx])
        .sum();
    (overlap.norm_sqr() / m as f64).min(1.0)
}
