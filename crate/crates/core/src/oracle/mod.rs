//! Classical references: dense Hamiltonians, exact propagators, the Slater
//! antisymmetrizer and the map from particle registers to occupations.
//!
//! Everything here is deliberately naive. The fermionic operators are
//! assembled factor by factor from their Jordan-Wigner tensor form rather
//! than through [`crate::sq::jw_parity`], so a sign bug in the simulator
//! cannot hide in the reference.

mod fermion;
mod first;
mod slater;

pub use fermion::{
    annihilation, build_sq_hamiltonian, hopping_term_matrix, hubbard_operator, number_operator, FermionOp, Ladder,
};
pub use first::{build_fq_hamiltonian, kinetic_split, single_particle_kinetic, transposition_matrix, MAX_FQ_DIM};
pub use slater::{antisymmetric_sector_basis, fq_to_sq, slater_antisymmetrize, slater_state, SlaterMap};

use crate::error::{Error, Result};
use crate::layout::{BasisString, RegisterLayout};
use crate::state::{Backend, QuantumState};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

pub type DenseMatrix = DMatrix<C64>;
pub type DenseVector = DVector<C64>;

/// Largest mode count for a dense second-quantized Hamiltonian.
pub const MAX_SQ_MODES: usize = 12;

/// Tolerance on ‖H − H†‖ (max entry) for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest |H_ij − conj(H_ji)|.
pub fn hermiticity_defect(h: &DenseMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..h.nrows() {
        for j in i..h.ncols() {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry of |U†U − I|.
pub fn unitarity_defect(u: &DenseMatrix) -> f64 {
    let p = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - C64::new(id, 0.0)).norm());
        }
    }
    worst
}

/// Spectral decomposition H = V·diag(λ)·V† of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: DenseMatrix,
}

impl HermitianEigen {
    pub fn new(h: &DenseMatrix) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::invalid(format!("{}×{} matrix is not square", h.nrows(), h.ncols())));
        }
        let defect = hermiticity_defect(h);
        if defect > HERMITIAN_TOL {
            return Err(Error::NonHermitian(defect));
        }
        let eig = nalgebra::SymmetricEigen::new(h.clone());
        Ok(HermitianEigen { values: eig.eigenvalues, vectors: eig.eigenvectors })
    }

    /// Eigenvalues in ascending order.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.values.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// exp(−iHt).
    pub fn propagator(&self, t: f64) -> DenseMatrix {
        let phases = DVector::from_iterator(self.values.len(), self.values.iter().map(|&l| C64::new(0.0, -l * t).exp()));
        let scaled = DenseMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, j| self.vectors[(i, j)] * phases[j]);
        scaled * self.vectors.adjoint()
    }

    /// exp(−iHt)·v without forming the propagator.
    pub fn propagate(&self, t: f64, v: &DenseVector) -> Result<DenseVector> {
        if v.len() != self.vectors.nrows() {
            return Err(Error::WidthMismatch { expected: self.vectors.nrows(), got: v.len() });
        }
        let mut coeffs = self.vectors.adjoint() * v;
        for (c, &l) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= C64::new(0.0, -l * t).exp();
        }
        Ok(&self.vectors * coeffs)
    }
}

/// The submatrix on the given basis indices.
pub fn restrict(h: &DenseMatrix, indices: &[usize]) -> DenseMatrix {
    DenseMatrix::from_fn(indices.len(), indices.len(), |i, j| h[(indices[i], indices[j])])
}

/// Occupation strings of `modes` modes with exactly `n` bits set.
pub fn number_sector(modes: usize, n: usize) -> Vec<usize> {
    (0..1usize << modes).filter(|b| b.count_ones() as usize == n).collect()
}

/// exp(−iHt)·v by eigendecomposition.
pub fn expm_propagate(h: &DenseMatrix, t: f64, v: &DenseVector) -> Result<DenseVector> {
    HermitianEigen::new(h)?.propagate(t, v)
}

/// Amplitudes of `state` indexed by basis value.
pub fn state_to_vector(state: &QuantumState) -> Result<DenseVector> {
    Ok(DVector::from_vec(state.to_dense_vec()?))
}

/// Inverse of [`state_to_vector`]; entries exactly zero are dropped.
pub fn vector_to_state(layout: RegisterLayout, v: &DenseVector, backend: Backend) -> Result<QuantumState> {
    if v.len() != 1usize << layout.width() {
        return Err(Error::WidthMismatch { expected: 1 << layout.width(), got: v.len() });
    }
    let amps = v
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != C64::new(0.0, 0.0))
        .map(|(i, a)| (BasisString(i as u64), *a));
    QuantumState::from_amplitudes(layout, amps, backend)
}
