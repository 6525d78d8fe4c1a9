//! Independent reference implementations shared by the integration tests.
//! Everything here works on plain dense matrices with textbook formulas and
//! does not call into the crate's spectral routines.
#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::RngExt;
use proptest::test_runner::{RngAlgorithm, TestRng};
use rabi_core::linalg::{CMatrix, CVector};
use rabi_core::Complex64;

pub fn rng(seed: u8) -> TestRng {
    TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32])
}

fn uniform(rng: &mut TestRng) -> f64 {
    2.0 * rng.random::<f64>() - 1.0
}

pub fn random_matrix(rng: &mut TestRng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| Complex64::new(uniform(rng), uniform(rng)))
}

pub fn random_hermitian(rng: &mut TestRng, d: usize) -> CMatrix {
    let a = random_matrix(rng, d);
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `G G† + floor·I`, normalized. Full rank whenever `floor > 0`.
pub fn random_density(rng: &mut TestRng, d: usize, floor: f64) -> CMatrix {
    let g = random_matrix(rng, d);
    let m = &g * g.adjoint() + CMatrix::identity(d, d) * Complex64::new(floor, 0.0);
    let tr = m.trace();
    m / tr
}

pub fn random_pure(rng: &mut TestRng, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| Complex64::new(uniform(rng), uniform(rng)));
    let n = v.norm();
    v.unscale(n)
}

/// Eigenvalues of a Hermitian matrix via the real symmetric embedding
/// `[[A, −B], [B, A]]`, whose spectrum is that of `A + iB` with every
/// eigenvalue doubled.
pub fn hermitian_spectrum(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    let mut big = DMatrix::<f64>::zeros(2 * d, 2 * d);
    big.view_mut((0, 0), (d, d)).copy_from(&re);
    big.view_mut((d, d), (d, d)).copy_from(&re);
    big.view_mut((0, d), (d, d)).copy_from(&(-&im));
    big.view_mut((d, 0), (d, d)).copy_from(&im);
    let big = (&big + big.transpose()) * 0.5;
    let mut vals: Vec<f64> = big.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals.into_iter().step_by(2).collect()
}

/// Fisher information from the symmetric logarithmic derivative:
/// solve `ρL + Lρ = 2 ∂ρ` with `∂ρ = i[G, ρ]` by vectorization, then
/// `F = Tr[ρ L²]`.
pub fn qfi_sld(rho: &CMatrix, g: &CMatrix) -> f64 {
    let d = rho.nrows();
    let i = Complex64::new(0.0, 1.0);
    let drho = (g * rho - rho * g) * i;
    let id = CMatrix::identity(d, d);
    let sylvester = id.kronecker(rho) + rho.transpose().kronecker(&id);
    let rhs = CVector::from_iterator(d * d, drho.iter().map(|z| z * 2.0));
    let vec_l = sylvester.lu().solve(&rhs).expect("full-rank state");
    let l = CMatrix::from_column_slice(d, d, vec_l.as_slice());
    (rho * &l * &l).trace().re
}

/// `ρ^{T_A}` for a `dA ⊗ dB` state, transposing the first factor.
pub fn partial_transpose_first(rho: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da * db, da * db, |r, c| {
        let (a, b) = (r / db, r % db);
        let (a2, b2) = (c / db, c % db);
        rho[(a2 * db + b, a * db + b2)]
    })
}

/// Annihilation operator on `n` Fock levels.
pub fn destroy(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |r, c| {
        if c == r + 1 {
            Complex64::new((c as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `W(x, p) = (1/π) Tr[ρ D(α) Π D(α)†]` with `D` from a dense matrix
/// exponential in an enlarged space of `n + pad` levels.
pub fn wigner_by_expm(rho: &CMatrix, x: f64, p: f64, pad: usize) -> f64 {
    let n = rho.nrows();
    let big = n + pad;
    let alpha = Complex64::new(x, p) / 2f64.sqrt();
    let a = destroy(big);
    let gen = a.adjoint() * alpha - &a * alpha.conj();
    let disp = expm(&gen);
    let parity = CMatrix::from_diagonal(&CVector::from_fn(big, |k, _| {
        Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    }));
    let kernel = &disp * parity * disp.adjoint();
    let mut total = Complex64::new(0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            total += rho[(r, c)] * kernel[(c, r)];
        }
    }
    total.re / std::f64::consts::PI
}

/// Scaling-and-squaring Taylor exponential.
pub fn expm(m: &CMatrix) -> CMatrix {
    let d = m.nrows();
    let norm = m.iter().map(|z| z.norm()).fold(0.0, f64::max) * d as f64;
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let scaled = m * Complex64::new(0.5f64.powi(squarings), 0.0);
    let mut term = CMatrix::identity(d, d);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Coherent state `|β⟩` on `n` levels.
pub fn coherent(beta: Complex64, n: usize) -> CVector {
    let mut v = CVector::zeros(n);
    let mut amp = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for k in 0..n {
        if k > 0 {
            amp *= beta / (k as f64).sqrt();
        }
        v[k] = amp;
    }
    v
}
