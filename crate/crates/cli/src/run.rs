use std::path::{Path, PathBuf};

use log::{info, warn};
use rabi_core::dynamics::{run_quench, BathSpec, QuenchProtocol};
use rabi_core::observables::wigner_function;
use rabi_core::phase_diagram::{compute_point, PhaseDiagramGrid, Quantity, SweepSpec};
use rabi_core::spectrum::rabi_eigensystem;
use rabi_core::{Basis, DensityMatrix, FockCutoff, ModelParams, Subsystem};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{parse_config, snapshot_label, ConfigError, Mode, Plan, RunConfig};
use crate::output::{self, OutputError, Staging};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("computation failed: {0}")]
    Compute(#[from] rabi_core::Error),
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunError {
    /// 2 for problems with the configuration, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

pub struct RunOptions {
    /// Overrides the configuration's `output_dir`.
    pub output: Option<PathBuf>,
    pub workers: usize,
}

pub fn output_dir(config: &RunConfig, options: &RunOptions) -> PathBuf {
    options
        .output
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Runs a resolved configuration and returns the files written.
pub fn execute(config: &RunConfig, options: &RunOptions) -> Result<Vec<PathBuf>, RunError> {
    let plan = config.plan()?;
    let dest = output_dir(config, options);
    let mut staging = Staging::new(&dest)?;
    let diagnostics = match plan {
        Plan::PhaseDiagram(spec) => {
            let grid = sweep(&spec, options.workers)?;
            staging.phase_diagram(&grid)?;
            phase_diagram_diagnostics(&grid)
        }
        Plan::Quench {
            model,
            cutoff,
            protocol,
            bath,
        } => quench(&mut staging, &model, cutoff, &protocol, &bath)?,
        Plan::GroundState {
            model,
            cutoff,
            quantities,
        } => ground_state(&mut staging, &model, cutoff, &quantities)?,
        Plan::Wigner { model, cutoff, x, p } => {
            let es = rabi_eigensystem(&model, cutoff);
            let rho = DensityMatrix::pure(&es.ground_state(), Basis::Bare, Some(cutoff.parts()))?;
            let grid = wigner_function(&rho.partial_trace(Subsystem::Cavity)?, &x, &p)?;
            staging.wigner(output::WIGNER_FILE, &grid)?;
            json!({ "exceeds_grid": grid.exceeds_grid })
        }
    };
    let metadata = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": config.settings_json(),
        "diagnostics": diagnostics,
    });
    staging.json(output::METADATA_FILE, &metadata)?;
    let files = staging.commit()?;
    for f in &files {
        info!("wrote {}", f.display());
    }
    Ok(files)
}

fn sweep(spec: &SweepSpec, workers: usize) -> Result<PhaseDiagramGrid, RunError> {
    let points = spec.points()?;
    let (rows, cols) = spec.shape();
    info!("sweeping {rows} x {cols} points on {workers} worker(s)");
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let records = pool.install(|| points.par_iter().map(|p| (*p, spec.evaluate(p))).collect());
    let grid = spec.assemble(records)?;
    let flagged = grid.flagged().count();
    if flagged > 0 {
        warn!("{flagged} of {} points flagged as unconverged", rows * cols);
    }
    Ok(grid)
}

fn phase_diagram_diagnostics(grid: &PhaseDiagramGrid) -> Value {
    let failed = grid
        .records
        .iter()
        .filter(|r| r.values.values().any(|v| v.is_nan()))
        .count();
    json!({
        "points": grid.records.len(),
        "flagged": grid.flagged().count(),
        "failed": failed,
    })
}

fn quench(
    staging: &mut Staging,
    model: &ModelParams,
    cutoff: FockCutoff,
    protocol: &QuenchProtocol,
    bath: &BathSpec,
) -> Result<Value, RunError> {
    info!(
        "quench g {} -> {} over t = {} (dt {}, n_max {})",
        protocol.g0,
        protocol.g_prime,
        protocol.t_max,
        protocol.dt,
        cutoff.n_max()
    );
    let result = run_quench(model, cutoff, protocol, bath)?;
    staging.quench(&result)?;
    let mut snapshots = Map::new();
    for (t, grid) in &result.wigner_snapshots {
        let label = snapshot_label(*t);
        staging.wigner(&output::wigner_snapshot_file(&label), grid)?;
        snapshots.insert(label, json!({ "exceeds_grid": grid.exceeds_grid }));
    }
    let s = &result.stats;
    if s.clip_events > 0 {
        warn!("{} records needed eigenvalue clipping", s.clip_events);
    }
    Ok(json!({
        "steps": s.steps,
        "records": s.records,
        "clip_events": s.clip_events,
        "max_trace_drift": s.max_trace_drift,
        "min_eigenvalue": s.min_eigenvalue,
        "max_hermiticity_error": s.max_hermiticity_error,
        "snapshots": snapshots,
    }))
}

fn ground_state(
    staging: &mut Staging,
    model: &ModelParams,
    cutoff: FockCutoff,
    quantities: &[Quantity],
) -> Result<Value, RunError> {
    let energy = rabi_eigensystem(model, cutoff).ground_energy();
    let record = compute_point(model, cutoff, quantities)?;
    if !record.converged() {
        warn!("point not converged: {}", record.flag_summary());
    }
    staging.ground_state(&record, energy)?;
    Ok(json!({ "converged": record.converged() }))
}

/// Reads and resolves a configuration file.
pub fn load_config(path: &Path, mode: Option<Mode>) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Unreadable(format!("{}: {e}", path.display())))?;
    Ok(parse_config(&text, mode)?)
}
