//! Ground-state landscapes over the `(g, ω_c)` plane.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;

use crate::density::DensityMatrix;
use crate::error::{invalid, Error, Result};
use crate::observables::{
    linspace, min_quadrature_variance, mutual_information, negativity_witness, quantum_fisher_information,
    QfiGenerator,
};
use crate::operators::{Basis, FockCutoff, ModelParams, Subsystem};
use crate::spectrum::{energy_gap, rabi_eigensystem, DressedOperators};

/// Ground-state quantity shown in one landscape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantity {
    Gap,
    /// Bare photon number `⟨a†a⟩`.
    Occupation,
    Qfi,
    Negativity,
    MutualInfo,
    MinVariance,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::Gap,
        Quantity::Occupation,
        Quantity::Qfi,
        Quantity::Negativity,
        Quantity::MutualInfo,
        Quantity::MinVariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Gap => "gap",
            Quantity::Occupation => "occupation",
            Quantity::Qfi => "qfi",
            Quantity::Negativity => "negativity",
            Quantity::MutualInfo => "mutual_info",
            Quantity::MinVariance => "min_variance",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.name() == name)
    }
}

/// How the qubit frequency follows the cavity frequency across a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QubitFrequency {
    /// `ω_q = 1/ω_c`, which pins the critical coupling at 0.5.
    Reciprocal,
    Fixed(f64),
}

impl QubitFrequency {
    pub fn at(self, omega_c: f64) -> f64 {
        match self {
            QubitFrequency::Reciprocal => 1.0 / omega_c,
            QubitFrequency::Fixed(w) => w,
        }
    }
}

/// Fock levels whose population is checked for truncation.
pub const TOP_LEVELS: usize = 5;
/// Largest tolerated ground-state population in the top Fock levels.
pub const TOP_POPULATION_LIMIT: f64 = 1e-6;
/// Largest tolerated mean-field occupation as a fraction of `n_max`.
pub const MEAN_FIELD_FRACTION: f64 = 0.6;

/// Why a point is not trusted.
#[derive(Debug, Clone, PartialEq)]
pub enum PointFlag {
    TopLevelPopulation(f64),
    MeanFieldOccupation(f64),
    Failed(String),
}

impl fmt::Display for PointFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointFlag::TopLevelPopulation(p) => write!(f, "top-{TOP_LEVELS}-level population {p:.3e}"),
            PointFlag::MeanFieldOccupation(n) => write!(f, "mean-field occupation {n:.2} near cutoff"),
            PointFlag::Failed(reason) => write!(f, "failed: {reason}"),
        }
    }
}

/// Values at one grid point. Quantities not requested are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub g: f64,
    pub omega_c: f64,
    pub omega_q: f64,
    pub values: BTreeMap<Quantity, f64>,
    pub flags: Vec<PointFlag>,
}

impl PointRecord {
    pub fn converged(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn value(&self, q: Quantity) -> Option<f64> {
        self.values.get(&q).copied()
    }

    /// Flag reasons joined with `"; "`.
    pub fn flag_summary(&self) -> String {
        let parts: Vec<String> = self.flags.iter().map(|f| format!("{f}")).collect();
        parts.join("; ")
    }
}

/// `(g²/ω_c²)(1 − g_c⁴/g⁴)` above the critical coupling, zero below.
pub fn mean_field_occupation(model: &ModelParams) -> f64 {
    let gc = model.critical_coupling();
    let g = model.g;
    if g <= gc {
        return 0.0;
    }
    let r = gc / g;
    (g * g) / (model.omega_c * model.omega_c) * (1.0 - r * r * r * r)
}

/// Diagonalizes `H` and evaluates `quantities` in its ground state.
pub fn compute_point(model: &ModelParams, cutoff: FockCutoff, quantities: &[Quantity]) -> Result<PointRecord> {
    let es = rabi_eigensystem(model, cutoff);
    let psi = es.ground_state();
    let parts = cutoff.parts();
    let levels = parts.cavity;

    let mut fock = alloc::vec![0.0; levels];
    for q in 0..parts.qubit {
        for (n, p) in fock.iter_mut().enumerate() {
            *p += psi[parts.index(q, n)].norm_sqr();
        }
    }
    let mut flags = Vec::new();
    let top: f64 = fock[levels.saturating_sub(TOP_LEVELS)..].iter().sum();
    if top > TOP_POPULATION_LIMIT {
        flags.push(PointFlag::TopLevelPopulation(top));
    }
    let mf = mean_field_occupation(model);
    if mf > MEAN_FIELD_FRACTION * cutoff.n_max() as f64 {
        flags.push(PointFlag::MeanFieldOccupation(mf));
    }

    let needs_state = quantities.iter().any(|q| !matches!(q, Quantity::Gap | Quantity::Occupation));
    let rho = if needs_state {
        Some(DensityMatrix::pure(&psi, Basis::Bare, Some(parts))?)
    } else {
        None
    };
    let state = || rho.as_ref().expect("ground state");

    let mut values = BTreeMap::new();
    for &q in quantities {
        let v = match q {
            Quantity::Gap => energy_gap(&es),
            Quantity::Occupation => fock.iter().enumerate().map(|(n, p)| n as f64 * p).sum(),
            Quantity::Qfi => {
                let rho_c = state().partial_trace(Subsystem::Cavity)?;
                quantum_fisher_information(&rho_c, &QfiGenerator::quadrature_x(cutoff))?
            }
            Quantity::Negativity => negativity_witness(state())?,
            Quantity::MutualInfo => mutual_information(state())?,
            Quantity::MinVariance => {
                let dressed = DressedOperators::new(&es, cutoff)?;
                let mut ground = crate::linalg::CVector::zeros(es.dim());
                ground[0] = crate::linalg::c(1.0);
                let rho_d = DensityMatrix::pure(&ground, Basis::Dressed, Some(parts))?;
                min_quadrature_variance(&rho_d, &dressed)?.v_min
            }
        };
        values.insert(q, v);
    }
    Ok(PointRecord {
        g: model.g,
        omega_c: model.omega_c,
        omega_q: model.omega_q,
        values,
        flags,
    })
}

/// Grid and settings of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub g_values: Vec<f64>,
    pub omega_c_values: Vec<f64>,
    pub qubit_frequency: QubitFrequency,
    pub cutoff: FockCutoff,
    pub quantities: Vec<Quantity>,
}

impl Default for SweepSpec {
    /// 40 couplings in `[0, 1]` by 20 cavity frequencies in `[0.02, 0.5]`.
    fn default() -> Self {
        Self {
            g_values: linspace(0.0, 1.0, 40),
            omega_c_values: linspace(0.02, 0.5, 20),
            qubit_frequency: QubitFrequency::Reciprocal,
            cutoff: FockCutoff::default(),
            quantities: Quantity::ALL.to_vec(),
        }
    }
}

/// One cell of the sweep: indices into the axes and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub i: usize,
    pub j: usize,
    pub model: ModelParams,
}

fn check_axis(name: &'static str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid(name, "must not be empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid(name, "must be finite"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(name, "must be strictly increasing"));
    }
    Ok(())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        check_axis("g_values", &self.g_values)?;
        check_axis("omega_c_values", &self.omega_c_values)?;
        if self.g_values[0] < 0.0 {
            return Err(invalid("g_values", "must be non-negative"));
        }
        if self.omega_c_values[0] <= 0.0 {
            return Err(invalid("omega_c_values", "must be positive"));
        }
        if let QubitFrequency::Fixed(w) = self.qubit_frequency {
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid("omega_q", format!("must be positive, got {w}")));
            }
        }
        if self.quantities.is_empty() {
            return Err(invalid("quantities", "must not be empty"));
        }
        Ok(())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.g_values.len(), self.omega_c_values.len())
    }

    /// All cells in row-major order (`g` outer).
    pub fn points(&self) -> Result<Vec<GridPoint>> {
        self.validate()?;
        let mut out = Vec::with_capacity(self.g_values.len() * self.omega_c_values.len());
        for (i, &g) in self.g_values.iter().enumerate() {
            for (j, &wc) in self.omega_c_values.iter().enumerate() {
                out.push(GridPoint {
                    i,
                    j,
                    model: ModelParams::new(wc, self.qubit_frequency.at(wc), g)?,
                });
            }
        }
        Ok(out)
    }

    /// Evaluates one cell, turning a failure into a flagged record.
    pub fn evaluate(&self, point: &GridPoint) -> PointRecord {
        compute_point(&point.model, self.cutoff, &self.quantities).unwrap_or_else(|e| PointRecord {
            g: point.model.g,
            omega_c: point.model.omega_c,
            omega_q: point.model.omega_q,
            values: self.quantities.iter().map(|&q| (q, f64::NAN)).collect(),
            flags: alloc::vec![PointFlag::Failed(format!("{e}"))],
        })
    }

    /// Builds the grid from records computed in any order.
    pub fn assemble(&self, records: Vec<(GridPoint, PointRecord)>) -> Result<PhaseDiagramGrid> {
        let (rows, cols) = self.shape();
        if records.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: records.len(),
            });
        }
        let mut slots: Vec<Option<PointRecord>> = alloc::vec![None; rows * cols];
        for (p, r) in records {
            if p.i >= rows || p.j >= cols || slots[p.i * cols + p.j].is_some() {
                return Err(invalid("records", format!("bad or duplicate cell ({}, {})", p.i, p.j)));
            }
            slots[p.i * cols + p.j] = Some(r);
        }
        let records: Vec<PointRecord> = slots.into_iter().map(|r| r.expect("every cell filled")).collect();
        let maps = self
            .quantities
            .iter()
            .map(|&q| {
                let m = DMatrix::from_fn(rows, cols, |i, j| records[i * cols + j].value(q).unwrap_or(f64::NAN));
                (q, m)
            })
            .collect();
        Ok(PhaseDiagramGrid {
            g_values: self.g_values.clone(),
            omega_c_values: self.omega_c_values.clone(),
            maps,
            records,
        })
    }
}

/// Landscapes indexed `[(g index, ω_c index)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagramGrid {
    pub g_values: Vec<f64>,
    pub omega_c_values: Vec<f64>,
    pub maps: BTreeMap<Quantity, DMatrix<f64>>,
    /// Row-major, `g` outer.
    pub records: Vec<PointRecord>,
}

impl PhaseDiagramGrid {
    pub fn map(&self, q: Quantity) -> Option<&DMatrix<f64>> {
        self.maps.get(&q)
    }

    pub fn record(&self, i: usize, j: usize) -> &PointRecord {
        &self.records[i * self.omega_c_values.len() + j]
    }

    pub fn flagged(&self) -> impl Iterator<Item = &PointRecord> {
        self.records.iter().filter(|r| !r.converged())
    }
}

/// Evaluates every cell sequentially. Failing cells are flagged, not fatal.
pub fn run_sweep(spec: &SweepSpec) -> Result<PhaseDiagramGrid> {
    let points = spec.points()?;
    let records = points.into_iter().map(|p| {
        let r = spec.evaluate(&p);
        (p, r)
    });
    let grid = spec.assemble(records.collect())?;
    let flagged = grid.flagged().count();
    if flagged > 0 {
        log::warn!("{flagged} of {} points flagged for truncation", grid.records.len());
    }
    Ok(grid)
}
