use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::{Basis, BasisCaps, BasisKind, BasisState};
use super::positions::{distance, AtomPositions};
use crate::error::{Error, Result};
use crate::physics::{constants::HBAR, positive};

/// Frozen atoms driven resonantly (up to `detuning`) and coupled pairwise by
/// `C₆/r⁶` in their Rydberg states.
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    pub positions: AtomPositions,
    /// Rabi frequency, rad/s.
    pub omega0: f64,
    /// Interaction magnitude, J·m⁶. Zero switches interactions off.
    pub c6: f64,
    /// Two-photon detuning δ, rad/s.
    pub detuning: f64,
}

impl HamiltonianSpec {
    pub fn new(positions: AtomPositions, omega0: f64, c6: f64) -> Self {
        HamiltonianSpec {
            positions,
            omega0,
            c6,
            detuning: 0.0,
        }
    }

    /// Pair interaction `C₆/r⁶` in units of `ħΩ₀`.
    pub fn interaction_over_rabi(&self, i: usize, j: usize) -> f64 {
        let p = self.positions.as_slice();
        self.c6 / distance(&p[i], &p[j]).powi(6) / (HBAR * self.omega0)
    }
}

/// `H/ħ` in rad/s, stored matrix-free: a diagonal plus uniform `Ω₀/2`
/// couplings between basis states that differ in one atom.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    basis: Arc<Basis>,
    diag: Vec<f64>,
    half_rabi: f64,
    /// CSR adjacency for restricted bases; the full basis flips bits on the fly.
    offsets: Vec<usize>,
    neighbours: Vec<u32>,
}

const PAR_THRESHOLD: usize = 4096;

pub fn build_hamiltonian(spec: &HamiltonianSpec, kind: BasisKind) -> Result<Hamiltonian> {
    build_hamiltonian_with_caps(spec, kind, BasisCaps::default())
}

pub fn build_hamiltonian_with_caps(
    spec: &HamiltonianSpec,
    kind: BasisKind,
    caps: BasisCaps,
) -> Result<Hamiltonian> {
    positive("omega0", spec.omega0)?;
    if !(spec.c6.is_finite() && spec.c6 >= 0.0) {
        return Err(Error::invalid("c6", "must be finite and >= 0"));
    }
    if !spec.detuning.is_finite() {
        return Err(Error::invalid("detuning", "must be finite"));
    }
    let basis = Arc::new(Basis::new(&spec.positions, kind, caps)?);
    let m = basis.n_atoms();
    let p = spec.positions.as_slice();

    let mut pair = vec![0.0; m * m];
    for i in 0..m {
        for j in i + 1..m {
            let v = spec.c6 / HBAR / distance(&p[i], &p[j]).powi(6);
            pair[i * m + j] = v;
            pair[j * m + i] = v;
        }
    }

    let diag: Vec<f64> = (0..basis.dim())
        .into_par_iter()
        .map(|idx| {
            let s = basis.state(idx);
            let mut e = spec.detuning * s.excitations() as f64;
            let mut bits = s.0;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let mut rest = bits;
                while rest != 0 {
                    let j = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    e += pair[i * m + j];
                }
            }
            e
        })
        .collect();

    let (offsets, neighbours) = match kind {
        BasisKind::Full => (Vec::new(), Vec::new()),
        BasisKind::Restricted { .. } => {
            let mut offsets = Vec::with_capacity(basis.dim() + 1);
            let mut neighbours = Vec::new();
            offsets.push(0);
            for s in basis.iter() {
                for atom in 0..m {
                    if s.is_excited(atom) || basis.can_excite(s, atom) {
                        let t = BasisState(s.0 ^ 1 << atom);
                        let j = basis.index_of(t).expect("flip stays in basis");
                        neighbours.push(j as u32);
                    }
                }
                offsets.push(neighbours.len());
            }
            (offsets, neighbours)
        }
    };

    Ok(Hamiltonian {
        basis,
        diag,
        half_rabi: 0.5 * spec.omega0,
        offsets,
        neighbours,
    })
}

impl Hamiltonian {
    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Diagonal element in rad/s.
    pub fn diagonal(&self, index: usize) -> f64 {
        self.diag[index]
    }

    pub fn coupling(&self) -> f64 {
        self.half_rabi
    }

    /// Indices coupled to `index` by a single flip.
    pub fn neighbours(&self, index: usize) -> Vec<usize> {
        match self.basis.kind() {
            BasisKind::Full => (0..self.basis.n_atoms()).map(|a| index ^ 1 << a).collect(),
            BasisKind::Restricted { .. } => self.neighbours[self.offsets[index]..self.offsets[index + 1]]
                .iter()
                .map(|&j| j as usize)
                .collect(),
        }
    }

    fn row(&self, i: usize, psi: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        match self.basis.kind() {
            BasisKind::Full => {
                for a in 0..self.basis.n_atoms() {
                    acc += psi[i ^ 1 << a];
                }
            }
            BasisKind::Restricted { .. } => {
                for &j in &self.neighbours[self.offsets[i]..self.offsets[i + 1]] {
                    acc += psi[j as usize];
                }
            }
        }
        psi[i] * self.diag[i] + acc * self.half_rabi
    }

    /// `out = (H/ħ)·psi`.
    pub fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(psi.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        if self.dim() >= PAR_THRESHOLD {
            out.par_iter_mut()
                .enumerate()
                .for_each(|(i, o)| *o = self.row(i, psi));
        } else {
            for (i, o) in out.iter_mut().enumerate() {
                *o = self.row(i, psi);
            }
        }
    }

    /// Every stored coupling has its transpose partner.
    pub fn is_symmetric(&self) -> bool {
        (0..self.dim()).all(|i| {
            self.neighbours(i)
                .into_iter()
                .all(|j| self.neighbours(j).contains(&i))
        })
    }

    /// Dense real symmetric matrix of `H/ħ`.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for j in self.neighbours(i) {
                m[(i, j)] = self.half_rabi;
            }
        }
        m
    }
}
