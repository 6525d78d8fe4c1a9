//! Eigendecomposition of the Rabi Hamiltonian and the dressed
//! positive/negative-frequency operators derived from it.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::math::sqrt;
use crate::linalg::{c, hermitian_eigen, CMatrix, CVector};
use crate::operators::{
    annihilation, build_hamiltonian, on_cavity, on_qubit, parity_diagonal, qubit_operators, Basis,
    FockCutoff, ModelParams, OperatorMatrix,
};

/// Levels closer than this are treated as one degenerate cluster when
/// ordering eigenpairs.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Transitions with `ω_k - ω_j` below this carry no positive-frequency
/// component and no dissipative rate.
pub const QUASI_DEGENERATE_GAP: f64 = 1e-9;

const HERMITIAN_INPUT_TOL: f64 = 1e-10;

/// Ascending spectrum with eigenvectors as columns.
///
/// Each eigenvector's largest-magnitude component is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    energies: Vec<f64>,
    states: CMatrix,
    basis: Basis,
    parities: Option<Vec<f64>>,
}

impl EigenSystem {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Column `k` is `|k⟩` expanded in the basis of the diagonalized operator.
    pub fn states(&self) -> &CMatrix {
        &self.states
    }

    /// Basis the eigenvectors are expressed in.
    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn state(&self, k: usize) -> CVector {
        self.states.column(k).into_owned()
    }

    pub fn ground_state(&self) -> CVector {
        self.state(0)
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Parity eigenvalue of level `k` when the system was diagonalized
    /// sector by sector.
    pub fn parity(&self, k: usize) -> Option<f64> {
        self.parities.as_ref().map(|p| p[k])
    }

    /// `V† A V` for a bare-basis operator.
    pub fn to_dressed(&self, op: &OperatorMatrix) -> Result<OperatorMatrix> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        if op.basis() != self.basis {
            return Err(Error::BasisMismatch {
                left: self.basis,
                right: op.basis(),
            });
        }
        Ok(op.to_eigenbasis(&self.states, Basis::Dressed))
    }
}

fn fix_phase(v: &mut nalgebra::DVectorViewMut<'_, crate::Complex64>) {
    let max = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    if max == 0.0 {
        return;
    }
    // First component within rounding of the maximum, so that near-ties
    // resolve the same way on every platform.
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

fn check_hermitian(h: &OperatorMatrix) -> Result<()> {
    let deviation = h.hermiticity_error();
    if deviation > HERMITIAN_INPUT_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian operator.
pub fn diagonalize(h: &OperatorMatrix) -> Result<EigenSystem> {
    check_hermitian(h)?;
    let eig = hermitian_eigen(h.matrix());
    let mut states = eig.vectors;
    for k in 0..states.ncols() {
        fix_phase(&mut states.column_mut(k));
    }
    Ok(EigenSystem {
        energies: eig.values,
        states,
        basis: h.basis(),
        parities: None,
    })
}

/// Diagonalizes `h` separately in each sector of a diagonal ±1 symmetry
/// that commutes with it. Every eigenvector is then an exact symmetry
/// eigenstate, and levels within [`DEGENERACY_TOL`] are ordered with the
/// `+1` sector first.
pub fn diagonalize_with_parity(h: &OperatorMatrix, parity: &[f64]) -> Result<EigenSystem> {
    check_hermitian(h)?;
    let dim = h.dim();
    if parity.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: parity.len(),
        });
    }
    if parity.iter().any(|&s| s != 1.0 && s != -1.0) {
        return Err(invalid("parity", "entries must be ±1"));
    }
    let m = h.matrix();
    for i in 0..dim {
        for j in 0..dim {
            if parity[i] != parity[j] && m[(i, j)].norm() > 1e-12 {
                return Err(invalid(
                    "parity",
                    format!("does not commute with the operator (entry ({i}, {j}))"),
                ));
            }
        }
    }

    let mut levels: Vec<(f64, f64, CVector)> = Vec::with_capacity(dim);
    for sector in [1.0, -1.0] {
        let idx: Vec<usize> = (0..dim).filter(|&i| parity[i] == sector).collect();
        if idx.is_empty() {
            continue;
        }
        let block = CMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])]);
        let eig = hermitian_eigen(&block);
        for (k, &e) in eig.values.iter().enumerate() {
            let mut v = CVector::zeros(dim);
            for (a, &i) in idx.iter().enumerate() {
                v[i] = eig.vectors[(a, k)];
            }
            levels.push((e, sector, v));
        }
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Within clusters of (numerically) degenerate levels put parity +1 first.
    let mut start = 0;
    while start < levels.len() {
        let mut end = start + 1;
        while end < levels.len() && levels[end].0 - levels[end - 1].0 <= DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            let cluster = &mut levels[start..end];
            let energies: Vec<f64> = cluster.iter().map(|l| l.0).collect();
            cluster.sort_by(|a, b| b.1.total_cmp(&a.1));
            // Keep the reported energies ascending.
            for (l, e) in cluster.iter_mut().zip(energies) {
                l.0 = e;
            }
        }
        start = end;
    }

    let mut states = CMatrix::zeros(dim, dim);
    let mut energies = Vec::with_capacity(dim);
    let mut parities = Vec::with_capacity(dim);
    for (k, (e, s, v)) in levels.into_iter().enumerate() {
        states.set_column(k, &v);
        fix_phase(&mut states.column_mut(k));
        energies.push(e);
        parities.push(s);
    }
    Ok(EigenSystem {
        energies,
        states,
        basis: h.basis(),
        parities: Some(parities),
    })
}

/// Spectrum of the Rabi Hamiltonian, resolved by Z₂ parity.
pub fn rabi_eigensystem(p: &ModelParams, cutoff: FockCutoff) -> EigenSystem {
    let h = build_hamiltonian(p, cutoff);
    diagonalize_with_parity(&h, &parity_diagonal(cutoff))
        .expect("Rabi Hamiltonian is Hermitian and parity symmetric")
}

/// `ω₁ - ω₀`.
pub fn energy_gap(es: &EigenSystem) -> f64 {
    match es.energies() {
        [e0, e1, ..] => (e1 - e0).max(0.0),
        _ => 0.0,
    }
}

/// `√(ω_c ω_q) / 2`.
pub fn critical_coupling(omega_c: f64, omega_q: f64) -> Result<f64> {
    if !(omega_c > 0.0 && omega_c.is_finite()) {
        return Err(invalid("omega_c", format!("must be positive, got {omega_c}")));
    }
    if !(omega_q > 0.0 && omega_q.is_finite()) {
        return Err(invalid("omega_q", format!("must be positive, got {omega_q}")));
    }
    Ok(sqrt(omega_c * omega_q) / 2.0)
}

/// Splits a bare Hermitian operator into its positive-frequency part
/// `X⁺ = Σ_{j, k>j} X_jk |j⟩⟨k|` and `X⁻ = (X⁺)†` in the dressed basis.
///
/// Pairs whose energy splitting is below [`QUASI_DEGENERATE_GAP`] have no
/// definite frequency sign and are left out of both.
pub fn dressed_frequency_operators(
    es: &EigenSystem,
    bare_x: &OperatorMatrix,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let dressed = es.to_dressed(bare_x)?;
    let x = dressed.matrix();
    let e = es.energies();
    let dim = es.dim();
    let plus = DMatrix::from_fn(dim, dim, |j, k| {
        if k > j && e[k] - e[j] > QUASI_DEGENERATE_GAP {
            x[(j, k)]
        } else {
            c(0.0)
        }
    });
    let minus = plus.adjoint();
    Ok((
        OperatorMatrix::from_parts(plus, Basis::Dressed),
        OperatorMatrix::from_parts(minus, Basis::Dressed),
    ))
}

/// Dressed cavity (`X±`, from `a + a†`) and qubit (`S±`, from `σ₋ + σ₊`)
/// frequency operators on the joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedOperators {
    pub x_plus: OperatorMatrix,
    pub x_minus: OperatorMatrix,
    pub s_plus: OperatorMatrix,
    pub s_minus: OperatorMatrix,
}

impl DressedOperators {
    pub fn new(es: &EigenSystem, cutoff: FockCutoff) -> Result<Self> {
        let a = annihilation(cutoff);
        let x = on_cavity(&a.plus(&a.adjoint())?);
        let q = qubit_operators();
        let sx = on_qubit(&q.sigma_minus.plus(&q.sigma_plus)?, cutoff);
        let (x_plus, x_minus) = dressed_frequency_operators(es, &x)?;
        let (s_plus, s_minus) = dressed_frequency_operators(es, &sx)?;
        Ok(Self {
            x_plus,
            x_minus,
            s_plus,
            s_minus,
        })
    }

    /// `X⁻X⁺`, the dressed photon-number operator.
    pub fn photon_number(&self) -> OperatorMatrix {
        OperatorMatrix::from_parts(self.x_minus.matrix() * self.x_plus.matrix(), Basis::Dressed)
    }
}
