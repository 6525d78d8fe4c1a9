//! Dressed-basis thermal master equation, sudden-quench driver and
//! Loschmidt return rate.
//!
//! In the eigenbasis `{|k⟩}` of the post-quench Hamiltonian every dissipator
//! is built from `|j⟩⟨k|` jumps, so the generator acts on populations as a
//! rate equation and damps each coherence `ρ_mn` at `(Λ_m + Λ_n)/2`, where
//! `Λ_k` is the total escape rate of level `k`. That structure makes one
//! right-hand-side evaluation `O(d²)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::density::DensityMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg::{c, hermitian_eigen, hermitian_eigenvalues, reconstruct, trace, CMatrix, CVector};
use crate::math::{exp_m1, ln, sin_cos, sqrt};
use crate::observables::{
    entropy_of_spectrum, negativity_witness, quantum_fisher_information, von_neumann_entropy,
    wigner_function, QfiGenerator, QuadratureOperators, WignerGrid,
};
use crate::operators::{annihilation, on_cavity, on_qubit, qubit_operators, Basis, FockCutoff, ModelParams, OperatorMatrix, Subsystem};
use crate::spectrum::{rabi_eigensystem, DressedOperators, EigenSystem, QUASI_DEGENERATE_GAP};
use crate::Complex64;

/// Bose–Einstein occupation `1 / (e^{Δ/T} − 1)`; exactly zero at `T = 0`.
pub fn thermal_occupation(delta: f64, temperature: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", format!("transition frequency must be positive, got {delta}")));
    }
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(invalid("temperature", format!("must be non-negative, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / exp_m1(delta / temperature))
}

/// Damping rates and temperature of the cavity and qubit baths (`k_B = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub gamma_c: f64,
    pub gamma_q: f64,
    pub temperature: f64,
    /// Frequency that normalizes `Δ_kj` in the rate law.
    pub omega_0: f64,
}

impl BathSpec {
    pub fn new(gamma_c: f64, gamma_q: f64, temperature: f64, omega_0: f64) -> Result<Self> {
        let bath = Self {
            gamma_c,
            gamma_q,
            temperature,
            omega_0,
        };
        bath.validate()?;
        Ok(bath)
    }

    /// `γ_c = γ_q = 0.01 ω_c`, `T = 0`, `ω_0 = ω_c`.
    pub fn default_for(model: &ModelParams) -> Self {
        Self {
            gamma_c: 0.01 * model.omega_c,
            gamma_q: 0.01 * model.omega_c,
            temperature: 0.0,
            omega_0: model.omega_c,
        }
    }

    pub fn with_temperature(self, temperature: f64) -> Result<Self> {
        Self::new(self.gamma_c, self.gamma_q, temperature, self.omega_0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_c >= 0.0 && self.gamma_c.is_finite()) {
            return Err(invalid("gamma_c", format!("must be non-negative, got {}", self.gamma_c)));
        }
        if !(self.gamma_q >= 0.0 && self.gamma_q.is_finite()) {
            return Err(invalid("gamma_q", format!("must be non-negative, got {}", self.gamma_q)));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(invalid("temperature", format!("must be non-negative, got {}", self.temperature)));
        }
        if !(self.omega_0 > 0.0 && self.omega_0.is_finite()) {
            return Err(invalid("omega_0", format!("must be positive, got {}", self.omega_0)));
        }
        Ok(())
    }
}

/// `Γ^{jk} = γ (Δ_kj / ω_0) |C_jk|²` with `C_jk = −i ⟨j|(x − x†)|k⟩`, stored at
/// `(j, k)` for `k > j`. Quasi-degenerate pairs get zero.
pub fn relaxation_coefficients(
    es: &EigenSystem,
    bare_x: &OperatorMatrix,
    gamma: f64,
    omega_0: f64,
) -> Result<DMatrix<f64>> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(invalid("gamma", format!("must be non-negative, got {gamma}")));
    }
    if !(omega_0 > 0.0 && omega_0.is_finite()) {
        return Err(invalid("omega_0", format!("must be positive, got {omega_0}")));
    }
    let antisym = bare_x.minus(&bare_x.adjoint())?;
    let coupling = es.to_dressed(&antisym)?;
    let m = coupling.matrix();
    let e = es.energies();
    let dim = es.dim();
    Ok(DMatrix::from_fn(dim, dim, |j, k| {
        let delta = e[k] - e[j];
        if k > j && delta > QUASI_DEGENERATE_GAP {
            // |−i z|² = |z|²
            gamma * (delta / omega_0) * m[(j, k)].norm_sqr()
        } else {
            0.0
        }
    }))
}

/// Per-channel relaxation coefficients for the cavity (`x = a`) and the
/// qubit (`x = σ₋`).
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationRates {
    pub cavity: DMatrix<f64>,
    pub qubit: DMatrix<f64>,
}

impl RelaxationRates {
    pub fn new(es: &EigenSystem, cutoff: FockCutoff, bath: &BathSpec) -> Result<Self> {
        bath.validate()?;
        let a = on_cavity(&annihilation(cutoff));
        let sm = on_qubit(&qubit_operators().sigma_minus, cutoff);
        Ok(Self {
            cavity: relaxation_coefficients(es, &a, bath.gamma_c, bath.omega_0)?,
            qubit: relaxation_coefficients(es, &sm, bath.gamma_q, bath.omega_0)?,
        })
    }
}

/// Master-equation generator in the dressed basis of a Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedLiouvillian {
    energies: Vec<f64>,
    /// `transfer[(from, to)]`: incoherent rate `from → to`.
    transfer: DMatrix<f64>,
    /// Total escape rate `Λ_k = Σ_j transfer[(k, j)]`.
    escape: Vec<f64>,
}

impl DressedLiouvillian {
    /// Each channel adds decay `k → j` at `Γ^{jk}(1 + n̄)` and excitation
    /// `j → k` at `Γ^{jk} n̄`, with `n̄ = n̄(ω_k − ω_j, T)`.
    pub fn new(es: &EigenSystem, rates: &RelaxationRates, temperature: f64) -> Result<Self> {
        let dim = es.dim();
        for r in [&rates.cavity, &rates.qubit] {
            if r.nrows() != dim || r.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.nrows(),
                });
            }
        }
        let e = es.energies();
        let mut transfer = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            for k in j + 1..dim {
                let gamma = rates.cavity[(j, k)] + rates.qubit[(j, k)];
                if gamma == 0.0 {
                    continue;
                }
                let nbar = thermal_occupation(e[k] - e[j], temperature)?;
                transfer[(k, j)] += gamma * (1.0 + nbar);
                transfer[(j, k)] += gamma * nbar;
            }
        }
        let escape = (0..dim).map(|k| transfer.row(k).sum()).collect();
        Ok(Self {
            energies: e.to_vec(),
            transfer,
            escape,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn transfer_rates(&self) -> &DMatrix<f64> {
        &self.transfer
    }

    /// Dissipative part only; this is the full generator in the frame
    /// rotating with the (diagonal) Hamiltonian.
    pub fn dissipator_into(&self, rho: &CMatrix, out: &mut CMatrix) {
        let dim = self.dim();
        for n in 0..dim {
            for m in 0..dim {
                out[(m, n)] = rho[(m, n)] * (-0.5 * (self.escape[m] + self.escape[n]));
            }
        }
        for m in 0..dim {
            let gain: f64 = (0..dim).map(|k| self.transfer[(k, m)] * rho[(k, k)].re).sum();
            out[(m, m)] += c(gain);
        }
    }

    /// `i[ρ, H] + Σ_x L_x ρ` in the dressed basis.
    pub fn rhs_into(&self, rho: &CMatrix, out: &mut CMatrix) {
        self.dissipator_into(rho, out);
        let e = &self.energies;
        let dim = self.dim();
        for n in 0..dim {
            for m in 0..dim {
                out[(m, n)] += rho[(m, n)] * Complex64::new(0.0, e[n] - e[m]);
            }
        }
    }

    pub fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        self.rhs_into(rho, &mut out);
        out
    }
}

/// `dρ/dt` for a dressed-basis state.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    es: &EigenSystem,
    rates: &RelaxationRates,
    temperature: f64,
) -> Result<CMatrix> {
    if rho.basis() != Basis::Dressed {
        return Err(Error::BasisMismatch {
            left: rho.basis(),
            right: Basis::Dressed,
        });
    }
    if rho.dim() != es.dim() {
        return Err(Error::DimensionMismatch {
            expected: es.dim(),
            found: rho.dim(),
        });
    }
    Ok(DressedLiouvillian::new(es, rates, temperature)?.rhs(rho.matrix()))
}

/// Which form of the equation the Runge–Kutta stepper integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// Rotating with the dressed Hamiltonian: the coherent phases are applied
    /// exactly and RK4 only sees the dissipator.
    #[default]
    Interaction,
    /// The full right-hand side, coherent term included.
    Lab,
}

/// Fixed-step schedule: `steps` RK4 steps of size `dt`, with the state
/// reported after every step listed in `record_steps` (0 is the initial
/// state).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
    pub record_steps: Vec<usize>,
}

impl TimeGrid {
    /// Records every `stride` steps, always including the first and last.
    pub fn uniform(t_max: f64, dt: f64, stride: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        if !(t_max >= dt && t_max.is_finite()) {
            return Err(invalid("t_max", format!("must be at least dt, got {t_max}")));
        }
        if stride == 0 {
            return Err(invalid("record_stride", "must be at least 1"));
        }
        let steps = (t_max / dt).round() as usize;
        let mut record_steps: Vec<usize> = (0..=steps).step_by(stride).collect();
        if record_steps.last() != Some(&steps) {
            record_steps.push(steps);
        }
        Ok(Self {
            dt,
            steps,
            record_steps,
        })
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    pub fn step_of(&self, t: f64) -> usize {
        ((t / self.dt).round().max(0.0) as usize).min(self.steps)
    }

    fn add_record(&mut self, step: usize) {
        if let Err(pos) = self.record_steps.binary_search(&step) {
            self.record_steps.insert(pos, step);
        }
    }
}

/// Largest tolerated `|Tr ρ − 1|` at a recorded time.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-8;
/// States with an eigenvalue below `-POSITIVITY_LIMIT` abort the run.
pub const POSITIVITY_LIMIT: f64 = 1e-6;
/// Eigenvalues below `-CLIP_THRESHOLD` are clipped to zero.
pub const CLIP_THRESHOLD: f64 = 1e-10;

/// A recorded state together with its spectrum.
#[derive(Debug)]
pub struct Snapshot<'a> {
    pub step: usize,
    pub time: f64,
    /// Dressed-basis state (lab frame).
    pub rho: &'a DensityMatrix,
    /// Ascending eigenvalues of `rho` after any clipping.
    pub spectrum: &'a [f64],
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvolutionStats {
    pub steps: usize,
    pub records: usize,
    pub clip_events: usize,
    pub max_trace_drift: f64,
    /// Most negative eigenvalue seen before clipping.
    pub min_eigenvalue: f64,
    pub max_hermiticity_error: f64,
}

/// Integrates the master equation from `rho0` (dressed basis) with
/// classical fourth-order Runge–Kutta, calling `observe` at each recorded
/// step. Recorded states are checked for trace drift and positivity; small
/// negative eigenvalues are clipped, the state renormalized, and the
/// integration continues from the repaired state.
pub fn evolve<F>(
    rho0: &DensityMatrix,
    generator: &DressedLiouvillian,
    grid: &TimeGrid,
    frame: Frame,
    mut observe: F,
) -> Result<EvolutionStats>
where
    F: FnMut(&Snapshot<'_>) -> Result<()>,
{
    if rho0.basis() != Basis::Dressed {
        return Err(Error::BasisMismatch {
            left: rho0.basis(),
            right: Basis::Dressed,
        });
    }
    let dim = generator.dim();
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho0.dim(),
        });
    }
    let parts = rho0.parts();
    let energies = generator.energies();
    let dt = grid.dt;

    let rhs = |state: &CMatrix, out: &mut CMatrix| match frame {
        Frame::Interaction => generator.dissipator_into(state, out),
        Frame::Lab => generator.rhs_into(state, out),
    };
    // e^{-iHt} ρ e^{iHt} from the rotating-frame state, and back.
    let phases = |t: f64| -> Vec<Complex64> {
        energies
            .iter()
            .map(|&e| {
                let (s, co) = sin_cos(-e * t);
                Complex64::new(co, s)
            })
            .collect()
    };
    let to_lab = |state: &CMatrix, t: f64| -> CMatrix {
        match frame {
            Frame::Lab => state.clone(),
            Frame::Interaction => {
                let ph = phases(t);
                CMatrix::from_fn(dim, dim, |m, n| ph[m] * state[(m, n)] * ph[n].conj())
            }
        }
    };
    let from_lab = |rho: &CMatrix, t: f64| -> CMatrix {
        match frame {
            Frame::Lab => rho.clone(),
            Frame::Interaction => {
                let ph = phases(t);
                CMatrix::from_fn(dim, dim, |m, n| ph[m].conj() * rho[(m, n)] * ph[n])
            }
        }
    };

    let mut stats = EvolutionStats {
        min_eigenvalue: f64::INFINITY,
        ..EvolutionStats::default()
    };
    let mut state = rho0.matrix().clone();
    let mut k1 = CMatrix::zeros(dim, dim);
    let mut k2 = CMatrix::zeros(dim, dim);
    let mut k3 = CMatrix::zeros(dim, dim);
    let mut k4 = CMatrix::zeros(dim, dim);
    let mut tmp = CMatrix::zeros(dim, dim);
    let mut next_record = 0;

    for step in 0..=grid.steps {
        if next_record < grid.record_steps.len() && grid.record_steps[next_record] == step {
            next_record += 1;
            let t = grid.time(step);
            let mut lab = to_lab(&state, t);
            let drift = (trace(&lab) - c(1.0)).norm();
            stats.max_trace_drift = stats.max_trace_drift.max(drift);
            if drift > TRACE_DRIFT_LIMIT {
                return Err(Error::TraceDrift { time: t, drift });
            }
            stats.max_hermiticity_error =
                stats.max_hermiticity_error.max(crate::linalg::hermiticity_error(&lab));
            let mut spectrum = hermitian_eigenvalues(&lab);
            let min = spectrum[0];
            stats.min_eigenvalue = stats.min_eigenvalue.min(min);
            if min < -POSITIVITY_LIMIT {
                return Err(Error::PositivityLost {
                    time: t,
                    min_eigenvalue: min,
                });
            }
            if min < -CLIP_THRESHOLD {
                let eig = hermitian_eigen(&lab);
                let clipped: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0)).collect();
                let norm: f64 = clipped.iter().sum();
                let clipped: Vec<f64> = clipped.iter().map(|l| l / norm).collect();
                lab = reconstruct(&clipped, &eig.vectors);
                state = from_lab(&lab, t);
                spectrum = clipped;
                stats.clip_events += 1;
            }
            let rho = DensityMatrix::from_matrix_unchecked(lab, Basis::Dressed, parts);
            observe(&Snapshot {
                step,
                time: t,
                rho: &rho,
                spectrum: &spectrum,
            })?;
            stats.records += 1;
        }
        if step == grid.steps {
            break;
        }

        rhs(&state, &mut k1);
        add_scaled(&mut tmp, &state, 0.5 * dt, &k1);
        rhs(&tmp, &mut k2);
        add_scaled(&mut tmp, &state, 0.5 * dt, &k2);
        rhs(&tmp, &mut k3);
        add_scaled(&mut tmp, &state, dt, &k3);
        rhs(&tmp, &mut k4);
        let h6 = dt / 6.0;
        for i in 0..state.len() {
            state[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * h6;
        }
        stats.steps += 1;
    }
    Ok(stats)
}

/// `out = base + h k`
fn add_scaled(out: &mut CMatrix, base: &CMatrix, h: f64, k: &CMatrix) {
    for i in 0..out.len() {
        out[i] = base[i] + k[i] * h;
    }
}

/// Recorded states of a short run, for small systems and tests.
pub fn evolve_collect(
    rho0: &DensityMatrix,
    generator: &DressedLiouvillian,
    grid: &TimeGrid,
    frame: Frame,
) -> Result<(Vec<(f64, DensityMatrix)>, EvolutionStats)> {
    let mut out = Vec::new();
    let stats = evolve(rho0, generator, grid, frame, |snap| {
        out.push((snap.time, snap.rho.clone()));
        Ok(())
    })?;
    Ok((out, stats))
}

/// Smallest Loschmidt overlap before taking the logarithm.
pub const OVERLAP_FLOOR: f64 = 1e-300;

/// `f = −ln G` with `G = √⟨ψ₀|ρ|ψ₀⟩`, which equals `|⟨ψ₀|ψ(t)⟩|` for pure
/// states. `psi0` and `rho` must share a basis.
pub fn return_rate(psi0: &CVector, rho: &DensityMatrix) -> Result<f64> {
    if psi0.len() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: psi0.len(),
        });
    }
    let overlap = (psi0.adjoint() * rho.matrix() * psi0)[(0, 0)].re;
    let g = sqrt(overlap.max(0.0)).max(OVERLAP_FLOOR);
    Ok(-ln(g))
}

/// Quantities tracked along a quench.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Observable {
    ReturnRate,
    /// `⟨X⁻X⁺⟩`
    Occupation,
    Qfi,
    Negativity,
    MutualInformation,
    MinVariance,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::ReturnRate,
        Observable::Occupation,
        Observable::Qfi,
        Observable::Negativity,
        Observable::MutualInformation,
        Observable::MinVariance,
    ];

    /// Column name used in output files.
    pub fn name(self) -> &'static str {
        match self {
            Observable::ReturnRate => "f",
            Observable::Occupation => "occupation",
            Observable::Qfi => "qfi",
            Observable::Negativity => "negativity",
            Observable::MutualInformation => "mutual_info",
            Observable::MinVariance => "min_variance",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == name)
    }
}

/// Sudden change of the coupling `g0 → g′` followed by open evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchProtocol {
    pub g0: f64,
    pub g_prime: f64,
    pub t_max: f64,
    pub dt: f64,
    pub record_stride: usize,
    pub observables: Vec<Observable>,
    /// Times at which the cavity Wigner function is sampled.
    pub snapshot_times: Vec<f64>,
    pub wigner_x: Vec<f64>,
    pub wigner_p: Vec<f64>,
    pub frame: Frame,
}

impl QuenchProtocol {
    pub const DEFAULT_T_MAX: f64 = 100.0;
    pub const DEFAULT_DT: f64 = 0.01;
    pub const DEFAULT_STRIDE: usize = 10;
    pub const DEFAULT_STEP_UP: f64 = 0.3;

    pub fn new(g0: f64, g_prime: f64) -> Self {
        Self {
            g0,
            g_prime,
            t_max: Self::DEFAULT_T_MAX,
            dt: Self::DEFAULT_DT,
            record_stride: Self::DEFAULT_STRIDE,
            observables: Observable::ALL.to_vec(),
            snapshot_times: Vec::new(),
            wigner_x: Vec::new(),
            wigner_p: Vec::new(),
            frame: Frame::default(),
        }
    }

    /// `g0 → g0 + 0.3`.
    pub fn step_up(g0: f64) -> Self {
        Self::new(g0, g0 + Self::DEFAULT_STEP_UP)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g0 >= 0.0 && self.g0.is_finite()) {
            return Err(invalid("g0", format!("must be non-negative, got {}", self.g0)));
        }
        if !(self.g_prime >= 0.0 && self.g_prime.is_finite()) {
            return Err(invalid("g_prime", format!("must be non-negative, got {}", self.g_prime)));
        }
        TimeGrid::uniform(self.t_max, self.dt, self.record_stride)?;
        if let Some(t) = self
            .snapshot_times
            .iter()
            .find(|t| !(**t >= 0.0 && **t <= self.t_max))
        {
            return Err(invalid("snapshot_times", format!("{t} is outside [0, t_max]")));
        }
        if !self.snapshot_times.is_empty() && (self.wigner_x.is_empty() || self.wigner_p.is_empty()) {
            return Err(invalid("wigner grid", "snapshots need non-empty x and p axes"));
        }
        Ok(())
    }
}

/// Time series of a quench.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchResult {
    pub times: Vec<f64>,
    pub series: BTreeMap<Observable, Vec<f64>>,
    pub wigner_snapshots: Vec<(f64, WignerGrid)>,
    pub stats: EvolutionStats,
}

impl QuenchResult {
    pub fn series(&self, obs: Observable) -> Option<&[f64]> {
        self.series.get(&obs).map(Vec::as_slice)
    }
}

/// Starts from the ground state of `H(g0)` and evolves under `H(g′)` with
/// dissipators built in the dressed basis of `H(g′)`. The coupling stored in
/// `model` is ignored; only its frequencies are used.
pub fn run_quench(
    model: &ModelParams,
    cutoff: FockCutoff,
    protocol: &QuenchProtocol,
    bath: &BathSpec,
) -> Result<QuenchResult> {
    protocol.validate()?;
    bath.validate()?;
    let pre = model.with_coupling(protocol.g0)?;
    let post = model.with_coupling(protocol.g_prime)?;
    let parts = cutoff.parts();

    let es0 = rabi_eigensystem(&pre, cutoff);
    let es = rabi_eigensystem(&post, cutoff);
    let u = es.states();
    let psi0 = u.adjoint() * es0.ground_state();
    let rho0 = DensityMatrix::pure(&psi0, Basis::Dressed, Some(parts))?;

    let rates = RelaxationRates::new(&es, cutoff, bath)?;
    let generator = DressedLiouvillian::new(&es, &rates, bath.temperature)?;
    let dressed = DressedOperators::new(&es, cutoff)?;
    let quadrature = QuadratureOperators::new(&dressed);
    let photon_number = dressed.photon_number();
    let qfi_generator = QfiGenerator::quadrature_x(cutoff);

    let mut grid = TimeGrid::uniform(protocol.t_max, protocol.dt, protocol.record_stride)?;
    let series_steps = grid.record_steps.clone();
    let snapshot_steps: Vec<usize> = protocol.snapshot_times.iter().map(|&t| grid.step_of(t)).collect();
    for &s in &snapshot_steps {
        grid.add_record(s);
    }

    let wants = |o: Observable| protocol.observables.contains(&o);
    let needs_bare = wants(Observable::Qfi) || wants(Observable::Negativity) || wants(Observable::MutualInformation);

    let mut times = Vec::with_capacity(series_steps.len());
    let mut series: BTreeMap<Observable, Vec<f64>> = protocol
        .observables
        .iter()
        .map(|&o| (o, Vec::with_capacity(series_steps.len())))
        .collect();
    let mut wigner_snapshots = Vec::new();

    let stats = evolve(&rho0, &generator, &grid, protocol.frame, |snap| {
        let in_series = series_steps.binary_search(&snap.step).is_ok();
        let snapshot = snapshot_steps.contains(&snap.step);
        let rho = snap.rho;
        let bare = if (in_series && needs_bare) || snapshot {
            Some(rho.rotated(u, Basis::Bare))
        } else {
            None
        };
        let cavity = match &bare {
            Some(b) => Some(b.partial_trace(Subsystem::Cavity)?),
            None => None,
        };
        if in_series {
            times.push(snap.time);
            for (&obs, values) in series.iter_mut() {
                let v = match obs {
                    Observable::ReturnRate => return_rate(&psi0, rho)?,
                    Observable::Occupation => crate::linalg::trace_product(rho.matrix(), photon_number.matrix()).re,
                    Observable::MinVariance => quadrature.min_variance(rho)?.v_min,
                    Observable::Qfi => quantum_fisher_information(cavity.as_ref().expect("bare state"), &qfi_generator)?,
                    Observable::Negativity => negativity_witness(bare.as_ref().expect("bare state"))?,
                    Observable::MutualInformation => {
                        let b = bare.as_ref().expect("bare state");
                        let s_q = von_neumann_entropy(&b.partial_trace(Subsystem::Qubit)?);
                        let s_c = von_neumann_entropy(cavity.as_ref().expect("bare state"));
                        s_q + s_c - entropy_of_spectrum(snap.spectrum)
                    }
                };
                values.push(v);
            }
        }
        if snapshot {
            let w = wigner_function(cavity.as_ref().expect("bare state"), &protocol.wigner_x, &protocol.wigner_p)?;
            wigner_snapshots.push((snap.time, w));
        }
        Ok(())
    })?;

    Ok(QuenchResult {
        times,
        series,
        wigner_snapshots,
        stats,
    })
}

/// Indices `i` where `f` has a kink-like local maximum: the discrete second
/// difference at `i` is negative, both neighbours are positive, and its
/// magnitude exceeds `factor` times the median `|second difference|`.
pub fn detect_cusps(f: &[f64], factor: f64) -> Vec<usize> {
    if f.len() < 5 {
        return Vec::new();
    }
    let d2: Vec<f64> = f.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
    let mut mags: Vec<f64> = d2.iter().map(|x| x.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let median = mags[mags.len() / 2];
    (1..d2.len() - 1)
        .filter(|&i| d2[i] < 0.0 && d2[i - 1] > 0.0 && d2[i + 1] > 0.0 && -d2[i] > factor * median)
        .map(|i| i + 1)
        .collect()
}
