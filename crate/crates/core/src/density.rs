//! Density matrices with optional qubit/cavity split metadata.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigenvalues, hermiticity_error, outer, trace, trace_product, CMatrix, CVector};
use crate::operators::{
    partial_trace_matrix, partial_transpose_matrix, Basis, Bipartition, OperatorMatrix, Subsystem,
};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue a valid state may carry.
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    basis: Basis,
    parts: Option<Bipartition>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix, basis: Basis, parts: Option<Bipartition>) -> Result<Self> {
        let rho = Self::checked_shape(matrix, basis, parts)?;
        rho.validate()?;
        Ok(rho)
    }

    fn checked_shape(matrix: CMatrix, basis: Basis, parts: Option<Bipartition>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if let Some(p) = parts {
            if p.dim() != matrix.nrows() {
                return Err(Error::DimensionMismatch {
                    expected: p.dim(),
                    found: matrix.nrows(),
                });
            }
        }
        Ok(Self { matrix, basis, parts })
    }

    /// `|ψ⟩⟨ψ|`; `psi` must be normalized to within 1e-8.
    pub fn pure(psi: &CVector, basis: Basis, parts: Option<Bipartition>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidState(format!("state vector norm {norm} is not 1")));
        }
        let unit = psi.unscale(norm);
        Self::checked_shape(outer(&unit, &unit), basis, parts)
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix, basis: Basis, parts: Option<Bipartition>) -> Self {
        Self { matrix, basis, parts }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermiticity_error(&self.matrix);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (max |ρ - ρ†| = {herm:e})")));
        }
        let tr = trace(&self.matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn parts(&self) -> Option<Bipartition> {
        self.parts
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix).re
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn as_operator(&self) -> OperatorMatrix {
        OperatorMatrix::from_parts(self.matrix.clone(), self.basis)
    }

    /// `U ρ U†`, relabelled as `basis`. With `U` the eigenvector matrix of a
    /// Hamiltonian this maps dressed-basis states back to the bare basis.
    pub fn rotated(&self, u: &CMatrix, basis: Basis) -> Self {
        Self {
            matrix: u * &self.matrix * u.adjoint(),
            basis,
            parts: self.parts,
        }
    }

    /// `U† ρ U`: bare-basis state expressed in the eigenbasis `u`.
    pub fn to_eigenbasis(&self, u: &CMatrix, basis: Basis) -> Self {
        Self {
            matrix: u.adjoint() * &self.matrix * u,
            basis,
            parts: self.parts,
        }
    }

    pub fn partial_trace(&self, keep: Subsystem) -> Result<Self> {
        let parts = self.parts.ok_or(Error::MissingSubsystems)?;
        Ok(Self::from_matrix_unchecked(
            partial_trace_matrix(&self.matrix, parts, keep),
            self.basis,
            None,
        ))
    }

    pub fn partial_transpose(&self, on: Subsystem) -> Result<OperatorMatrix> {
        let parts = self.parts.ok_or(Error::MissingSubsystems)?;
        Ok(OperatorMatrix::from_parts(
            partial_transpose_matrix(&self.matrix, parts, on),
            self.basis,
        ))
    }

    /// Mixture `(1 - w) self + w other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                left: self.basis,
                right: other.basis,
            });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * c(1.0 - w) + &other.matrix * c(w),
            basis: self.basis,
            parts: self.parts,
        })
    }
}
