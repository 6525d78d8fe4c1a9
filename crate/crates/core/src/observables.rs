//! Scalar and phase-space diagnostics of qubit ⊗ cavity states.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigen, hermitian_eigenvalues, trace_product, CMatrix};
use crate::math::{atan2, exp, ln, sqrt};
use crate::operators::{annihilation, Basis, FockCutoff, OperatorMatrix, Subsystem};
use crate::spectrum::DressedOperators;
use crate::Complex64;

/// Eigenvalues below this are dropped from entropy and Fisher-information
/// sums.
pub const SPECTRAL_CUTOFF: f64 = 1e-12;

const IMAG_WARN_TOL: f64 = 1e-8;

fn check_operator(rho: &DensityMatrix, op: &OperatorMatrix) -> Result<()> {
    if rho.basis() != op.basis() {
        return Err(Error::BasisMismatch {
            left: rho.basis(),
            right: op.basis(),
        });
    }
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: op.dim(),
        });
    }
    Ok(())
}

/// `Tr[ρ O]` for an arbitrary (not necessarily Hermitian) operator.
pub fn expectation_complex(rho: &DensityMatrix, op: &OperatorMatrix) -> Result<Complex64> {
    check_operator(rho, op)?;
    Ok(trace_product(rho.matrix(), op.matrix()))
}

/// `Re Tr[ρ O]`. Logs a warning when `O` is Hermitian yet the trace has a
/// sizeable imaginary part.
pub fn expectation(rho: &DensityMatrix, op: &OperatorMatrix) -> Result<f64> {
    let value = expectation_complex(rho, op)?;
    if value.im.abs() > IMAG_WARN_TOL && op.is_hermitian(1e-10) {
        log::warn!("Hermitian expectation has imaginary part {:e}", value.im);
    }
    Ok(value.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `(a + a†)/√2`
    QuadratureX,
    /// `a†a`
    Number,
    Custom,
}

/// Phase-shift generator `G` for `ρ(θ) = e^{iθG} ρ e^{-iθG}` on the cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct QfiGenerator {
    kind: GeneratorKind,
    matrix: OperatorMatrix,
}

impl QfiGenerator {
    pub fn quadrature_x(cutoff: FockCutoff) -> Self {
        let a = annihilation(cutoff);
        let x = a
            .plus(&a.adjoint())
            .expect("same basis")
            .scale(c(core::f64::consts::FRAC_1_SQRT_2));
        Self {
            kind: GeneratorKind::QuadratureX,
            matrix: x,
        }
    }

    pub fn number(cutoff: FockCutoff) -> Self {
        Self {
            kind: GeneratorKind::Number,
            matrix: crate::operators::number_operator(cutoff),
        }
    }

    pub fn custom(op: OperatorMatrix) -> Result<Self> {
        let deviation = op.hermiticity_error();
        if deviation > 1e-10 {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            kind: GeneratorKind::Custom,
            matrix: op,
        })
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn operator(&self) -> &OperatorMatrix {
        &self.matrix
    }
}

/// Quantum Fisher information of `ρ_c` for the unitary family generated by
/// `G`, from the spectral decomposition `ρ_c = Σ p_n |ψ_n⟩⟨ψ_n|`:
///
/// `F = 4 Σ_n p_n (ΔG)²_n − Σ_{m≠n} 8 p_m p_n / (p_m + p_n) |⟨ψ_m|G|ψ_n⟩|²`.
pub fn quantum_fisher_information(rho_c: &DensityMatrix, generator: &QfiGenerator) -> Result<f64> {
    let g = generator.operator();
    check_operator(rho_c, g)?;
    let eig = hermitian_eigen(rho_c.matrix());
    let psi = &eig.vectors;
    // G in the eigenbasis of ρ; its column norms give ⟨ψ_n|G²|ψ_n⟩.
    let g_eig = psi.adjoint() * g.matrix() * psi;
    let p = &eig.values;
    let kept: Vec<usize> = (0..p.len()).filter(|&n| p[n] > SPECTRAL_CUTOFF).collect();

    let mut variance_term = 0.0;
    for &n in &kept {
        let g2: f64 = g_eig.column(n).iter().map(|z| z.norm_sqr()).sum();
        let mean = g_eig[(n, n)].re;
        variance_term += p[n] * (g2 - mean * mean);
    }
    let mut correction = 0.0;
    for &m in &kept {
        for &n in &kept {
            if m != n {
                correction += 8.0 * p[m] * p[n] / (p[m] + p[n]) * g_eig[(m, n)].norm_sqr();
            }
        }
    }
    Ok((4.0 * variance_term - correction).max(0.0))
}

/// `Σ |λ|` over the negative eigenvalues of the partial transpose taken on
/// the qubit.
pub fn negativity_witness(rho: &DensityMatrix) -> Result<f64> {
    let pt = rho.partial_transpose(Subsystem::Qubit)?;
    Ok(hermitian_eigenvalues(pt.matrix())
        .into_iter()
        .filter(|&l| l < 0.0)
        .map(|l| -l)
        .sum())
}

/// `-Σ λ ln λ` over eigenvalues above [`SPECTRAL_CUTOFF`].
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > SPECTRAL_CUTOFF)
        .map(|&l| -l * ln(l))
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

/// `S_qubit + S_cavity − S_joint`.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let s_q = von_neumann_entropy(&rho.partial_trace(Subsystem::Qubit)?);
    let s_c = von_neumann_entropy(&rho.partial_trace(Subsystem::Cavity)?);
    Ok(s_q + s_c - von_neumann_entropy(rho))
}

/// `V(θ) = A + B cos 2θ + C sin 2θ` for the dressed quadrature
/// `X(θ) = (X⁻ e^{iθ} + X⁺ e^{-iθ}) / √2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureVariance {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub v_min: f64,
    /// Minimizing angle in `[0, π)`.
    pub theta_min: f64,
}

impl QuadratureVariance {
    pub fn at(&self, theta: f64) -> f64 {
        let (s, co) = crate::math::sin_cos(2.0 * theta);
        self.a + self.b * co + self.c * s
    }
}

/// Operator products needed for the quadrature variance, precomputed so that
/// repeated evaluations cost only traces.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureOperators {
    plus: CMatrix,
    minus_plus: CMatrix,
    plus_minus: CMatrix,
    minus_sq: CMatrix,
}

impl QuadratureOperators {
    pub fn new(d: &DressedOperators) -> Self {
        let xp = d.x_plus.matrix();
        let xm = d.x_minus.matrix();
        Self {
            plus: xp.clone(),
            minus_plus: xm * xp,
            plus_minus: xp * xm,
            minus_sq: xm * xm,
        }
    }

    /// Minimum over θ of `⟨X(θ)²⟩ − ⟨X(θ)⟩²` for a dressed-basis state.
    pub fn min_variance(&self, rho: &DensityMatrix) -> Result<QuadratureVariance> {
        if rho.basis() != Basis::Dressed {
            return Err(Error::BasisMismatch {
                left: rho.basis(),
                right: Basis::Dressed,
            });
        }
        if rho.dim() != self.plus.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.plus.nrows(),
                found: rho.dim(),
            });
        }
        let r = rho.matrix();
        let m = trace_product(r, &self.plus);
        let minus_plus = trace_product(r, &self.minus_plus).re;
        let plus_minus = trace_product(r, &self.plus_minus).re;
        let minus_sq = trace_product(r, &self.minus_sq);
        // ⟨X⁻⟩ = ⟨X⁺⟩*, so the e^{2iθ} coefficient is ⟨X⁻²⟩ − ⟨X⁻⟩².
        let k = minus_sq - m.conj() * m.conj();
        let a = 0.5 * (minus_plus + plus_minus) - m.norm_sqr();
        let b = k.re;
        let cc = -k.im;
        let amp = sqrt(b * b + cc * cc);
        let theta = (0.5 * (atan2(cc, b) + core::f64::consts::PI)).rem_euclid(core::f64::consts::PI);
        Ok(QuadratureVariance {
            a,
            b,
            c: cc,
            v_min: a - amp,
            theta_min: theta,
        })
    }
}

/// Minimum over θ of the variance of the dressed cavity quadrature.
pub fn min_quadrature_variance(rho: &DensityMatrix, d: &DressedOperators) -> Result<QuadratureVariance> {
    QuadratureOperators::new(d).min_variance(rho)
}

/// Wigner function sampled on a rectangular `(x, p)` grid.
///
/// `values[(i, j)] = W(x_i, p_j)` with `∫∫ W dx dp = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub values: DMatrix<f64>,
    /// Set when the state's mean photon number puts its support past the
    /// grid edge.
    pub exceeds_grid: bool,
}

impl WignerGrid {
    fn spacing(v: &[f64]) -> f64 {
        if v.len() < 2 {
            1.0
        } else {
            (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64
        }
    }

    /// Riemann sum of `W dx dp`.
    pub fn integral(&self) -> f64 {
        self.values.sum() * Self::spacing(&self.x_values) * Self::spacing(&self.p_values)
    }

    /// `∫ W(x, p) dp` at each `x`.
    pub fn x_marginal(&self) -> Vec<f64> {
        let dp = Self::spacing(&self.p_values);
        self.values.row_iter().map(|row| row.sum() * dp).collect()
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }
}

/// `W(x, p) = (1/π) Tr[ρ D(α) Π D†(α)]` with `α = (x + ip)/√2`.
///
/// The Fock matrix elements of the displaced parity are evaluated in closed
/// form through a Laguerre recurrence, so the displacement itself is not
/// truncated.
pub fn wigner_at(rho_c: &CMatrix, x: f64, p: f64) -> f64 {
    let n = rho_c.nrows();
    let alpha = Complex64::new(x, p) * core::f64::consts::FRAC_1_SQRT_2;
    let two_alpha = alpha * 2.0;
    let s = 4.0 * alpha.norm_sqr();
    let mut total = 0.0;
    let mut lead = c(exp(-0.5 * s));
    let mut u = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            lead *= two_alpha / sqrt(k as f64);
        }
        // u[j] = e^{-s/2} √(j!/(j+k)!) (2α)^k L_j^{(k)}(s)
        u.clear();
        u.push(lead);
        let kf = k as f64;
        if n - k > 1 {
            u.push(lead * ((1.0 + kf - s) / sqrt(1.0 + kf)));
        }
        for j in 1..n - k - 1 {
            let jf = j as f64;
            let next = (u[j] * (2.0 * jf + 1.0 + kf - s) - u[j - 1] * sqrt(jf * (jf + kf)))
                / sqrt((jf + 1.0) * (jf + 1.0 + kf));
            u.push(next);
        }
        let mut band = 0.0;
        for (j, &uj) in u.iter().enumerate() {
            // ⟨j+k| D Π D† |j⟩ = (−1)^j u_j, paired with ρ_{j, j+k}.
            let term = (rho_c[(j, j + k)] * uj).re;
            band += if j % 2 == 0 { term } else { -term };
        }
        total += if k == 0 { band } else { 2.0 * band };
    }
    total / core::f64::consts::PI
}

/// Wigner function of a cavity state on the outer-product grid `x × p`.
pub fn wigner_function(rho_c: &DensityMatrix, x: &[f64], p: &[f64]) -> Result<WignerGrid> {
    if rho_c.parts().is_some() {
        return Err(Error::InvalidState(
            "Wigner function needs a cavity-only state; trace out the qubit first".into(),
        ));
    }
    let m = rho_c.matrix();
    let mut values = DMatrix::zeros(x.len(), p.len());
    for (i, &xi) in x.iter().enumerate() {
        for (j, &pj) in p.iter().enumerate() {
            values[(i, j)] = wigner_at(m, xi, pj);
        }
    }
    let nbar: f64 = (0..m.nrows()).map(|k| k as f64 * m[(k, k)].re).sum();
    let reach = sqrt(2.0 * nbar + 1.0) + 3.0;
    let edge = |v: &[f64]| v.iter().fold(0.0f64, |acc, z| acc.max(z.abs()));
    let exceeds_grid = reach > edge(x).min(edge(p));
    if exceeds_grid {
        log::warn!("state support (~{reach:.2}) extends past the Wigner grid edge");
    }
    Ok(WignerGrid {
        x_values: x.to_vec(),
        p_values: p.to_vec(),
        values,
        exceeds_grid,
    })
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![start],
        _ => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
