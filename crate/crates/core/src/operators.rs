//! Bare operators on the truncated qubit ⊗ cavity space and the tensor
//! primitives built on them.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::density::DensityMatrix;
use crate::error::{invalid, Error, Result};
use crate::math::sqrt;
use crate::linalg::{c, hermiticity_error, kron, max_abs_diff, CMatrix, CVector};
use crate::Complex64;

/// Highest Fock state kept in the cavity basis `{|0⟩, …, |n_max⟩}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub const DEFAULT_N_MAX: usize = 50;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(invalid("n_max", "must be at least 1"));
        }
        Ok(Self(n_max))
    }

    pub fn n_max(self) -> usize {
        self.0
    }

    /// Cavity dimension `n_max + 1`.
    pub fn dim(self) -> usize {
        self.0 + 1
    }

    /// Joint dimension `2 (n_max + 1)`.
    pub fn joint_dim(self) -> usize {
        2 * self.dim()
    }

    pub fn parts(self) -> Bipartition {
        Bipartition {
            qubit: 2,
            cavity: self.dim(),
        }
    }
}

impl Default for FockCutoff {
    fn default() -> Self {
        Self(Self::DEFAULT_N_MAX)
    }
}

/// Tolerance on `ω_c ω_q = 1` for constrained parameter sets.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Frequencies of the Rabi Hamiltonian (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega_c: f64,
    pub omega_q: f64,
    pub g: f64,
}

impl ModelParams {
    pub fn new(omega_c: f64, omega_q: f64, g: f64) -> Result<Self> {
        if !(omega_c.is_finite() && omega_c > 0.0) {
            return Err(invalid("omega_c", format!("must be positive and finite, got {omega_c}")));
        }
        if !(omega_q.is_finite() && omega_q > 0.0) {
            return Err(invalid("omega_q", format!("must be positive and finite, got {omega_q}")));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(invalid("g", format!("must be non-negative and finite, got {g}")));
        }
        Ok(Self { omega_c, omega_q, g })
    }

    /// Parameters on the `ω_c ω_q = 1` line.
    pub fn constrained(omega_c: f64, g: f64) -> Result<Self> {
        if !(omega_c.is_finite() && omega_c > 0.0) {
            return Err(invalid("omega_c", format!("must be positive and finite, got {omega_c}")));
        }
        Self::new(omega_c, 1.0 / omega_c, g)
    }

    pub fn satisfies_constraint(&self) -> bool {
        (self.omega_c * self.omega_q - 1.0).abs() <= CONSTRAINT_TOL
    }

    pub fn with_coupling(self, g: f64) -> Result<Self> {
        Self::new(self.omega_c, self.omega_q, g)
    }

    /// `√(ω_c ω_q) / 2`.
    pub fn critical_coupling(&self) -> f64 {
        sqrt(self.omega_c * self.omega_q) / 2.0
    }
}

/// Which eigenbasis an operator's entries refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Product basis `|q⟩ ⊗ |n⟩` (or a single-subsystem Fock/qubit basis).
    Bare,
    /// Energy-ordered eigenbasis of a Hamiltonian.
    Dressed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    Qubit,
    Cavity,
}

/// Dimensions of the two factors of a joint qubit ⊗ cavity space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bipartition {
    pub qubit: usize,
    pub cavity: usize,
}

impl Bipartition {
    pub fn dim(self) -> usize {
        self.qubit * self.cavity
    }

    pub fn index(self, q: usize, n: usize) -> usize {
        q * self.cavity + n
    }
}

/// A square complex matrix tagged with the basis its entries live in.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    matrix: CMatrix,
    basis: Basis,
}

impl OperatorMatrix {
    pub fn new(matrix: CMatrix, basis: Basis) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(Self { matrix, basis })
    }

    pub(crate) fn from_parts(matrix: CMatrix, basis: Basis) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix, basis }
    }

    pub fn identity(dim: usize, basis: Basis) -> Self {
        Self::from_parts(CMatrix::identity(dim, dim), basis)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.matrix.adjoint(), self.basis)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_parts(&self.matrix * factor, self.basis)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
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
        Ok(())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        self.check_compatible(rhs)?;
        Ok(Self::from_parts(&self.matrix * &rhs.matrix, self.basis))
    }

    pub fn plus(&self, rhs: &Self) -> Result<Self> {
        self.check_compatible(rhs)?;
        Ok(Self::from_parts(&self.matrix + &rhs.matrix, self.basis))
    }

    pub fn minus(&self, rhs: &Self) -> Result<Self> {
        self.check_compatible(rhs)?;
        Ok(Self::from_parts(&self.matrix - &rhs.matrix, self.basis))
    }

    /// `[self, rhs]`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.check_compatible(rhs)?;
        let ab = &self.matrix * &rhs.matrix;
        let ba = &rhs.matrix * &self.matrix;
        Ok(Self::from_parts(ab - ba, self.basis))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(max_abs_diff(&self.matrix, &other.matrix))
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn max_abs(&self) -> f64 {
        crate::linalg::max_abs(&self.matrix)
    }

    /// Similarity transform `U† A U` into the basis whose vectors are the
    /// columns of `u`.
    pub fn to_eigenbasis(&self, u: &CMatrix, basis: Basis) -> Self {
        Self::from_parts(u.adjoint() * &self.matrix * u, basis)
    }
}

/// Cavity lowering operator, `⟨n−1| a |n⟩ = √n`.
pub fn annihilation(cutoff: FockCutoff) -> OperatorMatrix {
    let d = cutoff.dim();
    let mut m = CMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = c(sqrt(n as f64));
    }
    OperatorMatrix::from_parts(m, Basis::Bare)
}

pub fn creation(cutoff: FockCutoff) -> OperatorMatrix {
    annihilation(cutoff).adjoint()
}

/// `a†a` on the cavity.
pub fn number_operator(cutoff: FockCutoff) -> OperatorMatrix {
    let d = cutoff.dim();
    OperatorMatrix::from_parts(
        CMatrix::from_diagonal(&CVector::from_fn(d, |n, _| c(n as f64))),
        Basis::Bare,
    )
}

/// Pauli operators in the `[|e⟩, |g⟩]` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitOperators {
    pub sigma_z: OperatorMatrix,
    /// `|e⟩⟨g|`
    pub sigma_plus: OperatorMatrix,
    /// `|g⟩⟨e|`
    pub sigma_minus: OperatorMatrix,
}

pub fn qubit_operators() -> QubitOperators {
    let z = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    let plus = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    QubitOperators {
        sigma_z: OperatorMatrix::from_parts(z, Basis::Bare),
        sigma_minus: OperatorMatrix::from_parts(plus.adjoint(), Basis::Bare),
        sigma_plus: OperatorMatrix::from_parts(plus, Basis::Bare),
    }
}

/// Kronecker product `a ⊗ b` with `a` as the leading (qubit) factor.
pub fn tensor_product(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    if a.basis != b.basis {
        return Err(Error::BasisMismatch {
            left: a.basis,
            right: b.basis,
        });
    }
    Ok(OperatorMatrix::from_parts(kron(&a.matrix, &b.matrix), a.basis))
}

/// Lifts a cavity operator to `I₂ ⊗ op`.
pub fn on_cavity(op: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::from_parts(kron(&CMatrix::identity(2, 2), &op.matrix), op.basis)
}

/// Lifts a qubit operator to `op ⊗ I_c`.
pub fn on_qubit(op: &OperatorMatrix, cutoff: FockCutoff) -> OperatorMatrix {
    let d = cutoff.dim();
    OperatorMatrix::from_parts(kron(&op.matrix, &CMatrix::identity(d, d)), op.basis)
}

/// `ω_c a†a + (ω_q/2) σ_z + g (a + a†)(σ₋ + σ₊)` on qubit ⊗ cavity.
///
/// Assembled entrywise; the result is real symmetric.
pub fn build_hamiltonian(p: &ModelParams, cutoff: FockCutoff) -> OperatorMatrix {
    let parts = cutoff.parts();
    let dim = parts.dim();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    // q = 0 is |e⟩, q = 1 is |g⟩.
    for q in 0..2 {
        let sz = if q == 0 { 1.0 } else { -1.0 };
        for n in 0..parts.cavity {
            let i = parts.index(q, n);
            h[(i, i)] = p.omega_c * n as f64 + 0.5 * p.omega_q * sz;
        }
    }
    // g √(n+1) couples |q, n⟩ ↔ |1−q, n+1⟩ for both qubit states.
    for n in 0..parts.cavity - 1 {
        let amp = p.g * sqrt((n + 1) as f64);
        for q in 0..2 {
            let i = parts.index(q, n);
            let j = parts.index(1 - q, n + 1);
            h[(i, j)] = amp;
            h[(j, i)] = amp;
        }
    }
    OperatorMatrix::from_parts(h.map(c), Basis::Bare)
}

/// `σ_z ⊗ (−1)^{a†a}`, diagonal with entries ±1.
pub fn parity_operator(cutoff: FockCutoff) -> OperatorMatrix {
    let diag = parity_diagonal(cutoff);
    let diag = CVector::from_iterator(diag.len(), diag.iter().map(|&s| c(s)));
    OperatorMatrix::from_parts(CMatrix::from_diagonal(&diag), Basis::Bare)
}

/// Diagonal of the parity operator in the bare basis.
pub fn parity_diagonal(cutoff: FockCutoff) -> Vec<f64> {
    let parts = cutoff.parts();
    let mut out = Vec::with_capacity(parts.dim());
    for q in 0..2 {
        let sz = if q == 0 { 1.0 } else { -1.0 };
        for n in 0..parts.cavity {
            out.push(if n % 2 == 0 { sz } else { -sz });
        }
    }
    out
}

pub(crate) fn partial_trace_matrix(m: &CMatrix, parts: Bipartition, keep: Subsystem) -> CMatrix {
    match keep {
        Subsystem::Cavity => CMatrix::from_fn(parts.cavity, parts.cavity, |n, k| {
            (0..parts.qubit)
                .map(|q| m[(parts.index(q, n), parts.index(q, k))])
                .sum()
        }),
        Subsystem::Qubit => CMatrix::from_fn(parts.qubit, parts.qubit, |q, r| {
            (0..parts.cavity)
                .map(|n| m[(parts.index(q, n), parts.index(r, n))])
                .sum()
        }),
    }
}

pub(crate) fn partial_transpose_matrix(m: &CMatrix, parts: Bipartition, on: Subsystem) -> CMatrix {
    let dim = parts.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for q in 0..parts.qubit {
        for r in 0..parts.qubit {
            for n in 0..parts.cavity {
                for k in 0..parts.cavity {
                    let (src_row, src_col) = match on {
                        Subsystem::Qubit => (parts.index(r, n), parts.index(q, k)),
                        Subsystem::Cavity => (parts.index(q, k), parts.index(r, n)),
                    };
                    out[(parts.index(q, n), parts.index(r, k))] = m[(src_row, src_col)];
                }
            }
        }
    }
    out
}

/// Reduced state of `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    let parts = rho.parts().ok_or(Error::MissingSubsystems)?;
    let reduced = partial_trace_matrix(rho.matrix(), parts, keep);
    Ok(DensityMatrix::from_matrix_unchecked(reduced, rho.basis(), None))
}

/// Transpose of the `on` factor. The result may have negative eigenvalues,
/// so it is returned as a plain operator.
pub fn partial_transpose(rho: &DensityMatrix, on: Subsystem) -> Result<OperatorMatrix> {
    let parts = rho.parts().ok_or(Error::MissingSubsystems)?;
    Ok(OperatorMatrix::from_parts(
        partial_transpose_matrix(rho.matrix(), parts, on),
        rho.basis(),
    ))
}
