use ndarray::{Array1, Array2};

use super::linalg::{self, CMatrix, C64};
use crate::error::{Error, Result};
use crate::tol;

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Array1<C64>,
}

impl PureState {
    /// Accepts amplitudes whose squared norm is within `10 * tol::NORM` of one,
    /// renormalizing the residual drift.
    pub fn new(amplitudes: Array1<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension("empty state vector".into()));
        }
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > tol::RENORM_FACTOR * tol::NORM {
            return Err(Error::InvalidState(format!("squared norm {norm2} is not 1")));
        }
        Ok(Self::normalized_unchecked(amplitudes))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(amplitudes: Array1<C64>) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self::normalized_unchecked(amplitudes))
    }

    fn normalized_unchecked(amplitudes: Array1<C64>) -> Self {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Self { amplitudes: amplitudes.mapv(|z| z / norm) }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidDimension(format!("basis index {index} >= dimension {dim}")));
        }
        let mut v = Array1::zeros(dim);
        v[index] = linalg::ONE;
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Array1<C64> {
        self.amplitudes
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityOp {
        let n = self.dim();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityOp { matrix: m }
    }

    pub fn expectation(&self, op: &CMatrix) -> C64 {
        let v = op.dot(&self.amplitudes);
        self.amplitudes.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    matrix: CMatrix,
}

impl DensityOp {
    /// Validates all three invariants, including positivity through a full
    /// eigendecomposition. Drift below ten times the tolerance is repaired.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self::repaired(matrix)?;
        let (vals, _) = linalg::hermitian_eigh(&rho.matrix)?;
        if let Some(min) = vals.iter().cloned().reduce(f64::min) {
            if min < -tol::PSD {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(rho)
    }

    /// Checks Hermiticity and trace only. Used for states produced by exact
    /// unitary maps of valid states, where positivity is inherited.
    pub(crate) fn repaired(matrix: CMatrix) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c || r == 0 {
            return Err(Error::Shape(format!("density operator must be square, got {r}x{c}")));
        }
        if !linalg::all_finite(&matrix) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > tol::RENORM_FACTOR * tol::HERM {
            return Err(Error::NotHermitian { defect });
        }
        let mut m = linalg::hermitize(&matrix);
        let tr = linalg::trace(&m).re;
        if (tr - 1.0).abs() > tol::RENORM_FACTOR * tol::TRACE {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        m.mapv_inplace(|z| z / tr);
        Ok(Self { matrix: m })
    }

    /// Diagonal state from a probability vector; renormalized to trace one.
    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDimension("empty probability vector".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidState("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("probabilities sum to zero".into()));
        }
        let diag: Array1<C64> = probs.iter().map(|p| C64::new(p / total, 0.0)).collect();
        Ok(Self { matrix: Array2::from_diag(&diag) })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::from_diagonal(&vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn expectation(&self, op: &CMatrix) -> C64 {
        // Tr(ρ A) = Σ_ij ρ_ij A_ji
        let n = self.dim();
        let mut acc = linalg::ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[[i, j]] * op[[j, i]];
            }
        }
        acc
    }

    /// Diagonal entries as probabilities when the operator is diagonal.
    pub fn diagonal_probabilities(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.matrix[[i, j]] != linalg::ZERO {
                    return None;
                }
            }
        }
        Some((0..n).map(|i| self.matrix[[i, i]].re).collect())
    }

    /// Trace distance ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &DensityOp) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape("trace distance between different dimensions".into()));
        }
        let diff = &self.matrix - &other.matrix;
        Ok(0.5 * linalg::trace_norm_hermitian(&diff)?)
    }

    /// Ensemble decomposition into orthonormal pure components with weights,
    /// dropping components below `cutoff`.
    pub fn spectral_ensemble(&self, cutoff: f64) -> Result<Vec<(f64, Array1<C64>)>> {
        if let Some(probs) = self.diagonal_probabilities() {
            return Ok(probs
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > cutoff)
                .map(|(i, p)| {
                    let mut v = Array1::zeros(self.dim());
                    v[i] = linalg::ONE;
                    (*p, v)
                })
                .collect());
        }
        let (vals, vecs) = linalg::hermitian_eigh(&self.matrix)?;
        Ok(vals
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > cutoff)
            .map(|(i, p)| (*p, vecs.column(i).to_owned()))
            .collect())
    }
}

/// A state that is either pure or mixed; the dense representation used by the
/// generic Fock-space operations.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityOp),
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(p) => p.dim(),
            QuantumState::Mixed(m) => m.dim(),
        }
    }

    pub fn to_density(&self) -> DensityOp {
        match self {
            QuantumState::Pure(p) => p.to_density(),
            QuantumState::Mixed(m) => m.clone(),
        }
    }

    pub fn purity(&self) -> f64 {
        match self {
            QuantumState::Pure(_) => 1.0,
            QuantumState::Mixed(m) => m.purity(),
        }
    }
}
