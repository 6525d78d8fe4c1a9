//! Output files and their frozen layouts.
//!
//! Files are written into a staging directory next to the destination and
//! only moved into place once every file of the run has been produced.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rabi_core::dynamics::{Observable, QuenchResult};
use rabi_core::observables::WignerGrid;
use rabi_core::phase_diagram::{PhaseDiagramGrid, PointRecord, Quantity};
use serde_json::Value;
use tempfile::TempDir;

pub const PHASE_DIAGRAM_FILE: &str = "phase_diagram.csv";
pub const QUENCH_FILE: &str = "quench.csv";
pub const GROUND_STATE_FILE: &str = "ground_state.csv";
pub const WIGNER_FILE: &str = "wigner.csv";
pub const METADATA_FILE: &str = "metadata.json";

pub const PHASE_DIAGRAM_HEADER: [&str; 11] = [
    "g",
    "omega_c",
    "omega_q",
    "gap",
    "occupation",
    "qfi",
    "negativity",
    "mutual_info",
    "min_variance",
    "converged",
    "flag",
];

pub const GROUND_STATE_HEADER: [&str; 12] = [
    "g",
    "omega_c",
    "omega_q",
    "ground_energy",
    "gap",
    "occupation",
    "qfi",
    "negativity",
    "mutual_info",
    "min_variance",
    "converged",
    "flag",
];

pub const QUENCH_HEADER: [&str; 7] = ["t", "f", "occupation", "qfi", "negativity", "mutual_info", "min_variance"];

pub const WIGNER_HEADER: [&str; 3] = ["x", "p", "W"];

/// Column order of the quantity columns in the point files.
const QUANTITY_COLUMNS: [Quantity; 6] = [
    Quantity::Gap,
    Quantity::Occupation,
    Quantity::Qfi,
    Quantity::Negativity,
    Quantity::MutualInfo,
    Quantity::MinVariance,
];

const OBSERVABLE_COLUMNS: [Observable; 6] = [
    Observable::ReturnRate,
    Observable::Occupation,
    Observable::Qfi,
    Observable::Negativity,
    Observable::MutualInformation,
    Observable::MinVariance,
];

pub fn wigner_snapshot_file(label: &str) -> String {
    format!("wigner_t{label}.csv")
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Shortest text that parses back to the same `f64`. Plain notation for
/// `1e-5 ≤ |x| < 1e16`, exponent notation otherwise; `NaN` for NaN.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x.is_nan() {
        "NaN".into()
    } else if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn optional(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Destination directory plus a staging area that vanishes unless
/// [`Staging::commit`] succeeds.
pub struct Staging {
    dest: PathBuf,
    created_dest: bool,
    dir: Option<TempDir>,
    files: Vec<String>,
}

impl Staging {
    pub fn new(dest: &Path) -> Result<Self, OutputError> {
        let created_dest = !dest.exists();
        fs::create_dir_all(dest).map_err(io_err(dest))?;
        let dir = tempfile::Builder::new()
            .prefix(".rabi-staging-")
            .tempdir_in(dest)
            .map_err(io_err(dest))?;
        Ok(Self {
            dest: dest.to_path_buf(),
            created_dest,
            dir: Some(dir),
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.as_ref().expect("staging dir present").path().join(name)
    }

    fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), OutputError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let path = self.path(name);
        let csv_err = |source| OutputError::Csv {
            path: path.clone(),
            source,
        };
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            let row: Vec<String> = row.into_iter().collect();
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(io_err(&path))
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<(), OutputError> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
        text.push('\n');
        fs::write(&path, text).map_err(io_err(&path))
    }

    pub fn phase_diagram(&mut self, grid: &PhaseDiagramGrid) -> Result<(), OutputError> {
        self.csv(PHASE_DIAGRAM_FILE, &PHASE_DIAGRAM_HEADER, grid.records.iter().map(|r| point_row(r, None)))
    }

    pub fn ground_state(&mut self, record: &PointRecord, ground_energy: f64) -> Result<(), OutputError> {
        self.csv(GROUND_STATE_FILE, &GROUND_STATE_HEADER, [point_row(record, Some(ground_energy))])
    }

    pub fn quench(&mut self, result: &QuenchResult) -> Result<(), OutputError> {
        let rows = result.times.iter().enumerate().map(|(k, &t)| {
            let mut row = vec![format_float(t)];
            row.extend(
                OBSERVABLE_COLUMNS
                    .iter()
                    .map(|&o| optional(result.series(o).map(|s| s[k]))),
            );
            row
        });
        self.csv(QUENCH_FILE, &QUENCH_HEADER, rows)
    }

    pub fn wigner(&mut self, name: &str, grid: &WignerGrid) -> Result<(), OutputError> {
        let rows = grid.x_values.iter().enumerate().flat_map(|(i, &x)| {
            grid.p_values
                .iter()
                .enumerate()
                .map(move |(j, &p)| vec![format_float(x), format_float(p), format_float(grid.values[(i, j)])])
        });
        self.csv(name, &WIGNER_HEADER, rows)
    }

    /// Moves every staged file into the destination.
    pub fn commit(mut self) -> Result<Vec<PathBuf>, OutputError> {
        let dir = self.dir.take().expect("staging dir present");
        let mut moved = Vec::with_capacity(self.files.len());
        for name in &self.files {
            let to = self.dest.join(name);
            fs::rename(dir.path().join(name), &to).map_err(io_err(&to))?;
            moved.push(to);
        }
        dir.close().map_err(io_err(&self.dest))?;
        self.created_dest = false;
        Ok(moved)
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if let Some(dir) = self.dir.take() {
            let _ = dir.close();
        }
        if self.created_dest {
            // only succeeds when nothing else was put there meanwhile
            let _ = fs::remove_dir(&self.dest);
        }
    }
}

fn point_row(r: &PointRecord, ground_energy: Option<f64>) -> Vec<String> {
    let mut row = vec![format_float(r.g), format_float(r.omega_c), format_float(r.omega_q)];
    if let Some(e) = ground_energy {
        row.push(format_float(e));
    }
    row.extend(QUANTITY_COLUMNS.iter().map(|&q| optional(r.value(q))));
    row.push(r.converged().to_string());
    row.push(r.flag_summary());
    row
}
