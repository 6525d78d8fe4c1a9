//! Run configuration.
//!
//! A configuration is one flat JSON object. Which keys are accepted depends
//! on the mode; unknown keys are rejected. Every optional key has a default,
//! and [`parse_config`] returns the fully-resolved document, which
//! serializes back to an equivalent JSON object.

use std::fmt;
use std::path::PathBuf;

use rabi_core::dynamics::{BathSpec, Frame, Observable, QuenchProtocol};
use rabi_core::observables::linspace;
use rabi_core::phase_diagram::{Quantity, QubitFrequency, SweepSpec};
use rabi_core::{FockCutoff, ModelParams};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const DEFAULT_OMEGA_C: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    PhaseDiagram,
    Quench,
    GroundState,
    Wigner,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::PhaseDiagram, Mode::Quench, Mode::GroundState, Mode::Wigner];

    pub fn name(self) -> &'static str {
        match self {
            Mode::PhaseDiagram => "phase-diagram",
            Mode::Quench => "quench",
            Mode::GroundState => "ground-state",
            Mode::Wigner => "wigner",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    /// Keys without a default.
    pub fn required(self) -> &'static [&'static str] {
        match self {
            Mode::PhaseDiagram => &[],
            Mode::Quench => &["g0"],
            Mode::GroundState | Mode::Wigner => &["g"],
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Unreadable(String),
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("missing required field(s): {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("config is for mode `{found}` but `{expected}` was requested")]
    ModeMismatch { expected: Mode, found: Mode },
    #[error("invalid physical parameters: {0}")]
    Physics(String),
}

impl ConfigError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<rabi_core::Error> for ConfigError {
    fn from(e: rabi_core::Error) -> Self {
        ConfigError::Physics(e.to_string())
    }
}

/// Either an explicit list or `points` evenly spaced values from `start`
/// to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range(AxisRange),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Axis {
    pub fn range(start: f64, stop: f64, points: usize) -> Self {
        Axis::Range(AxisRange { start, stop, points })
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Values(v) => v.clone(),
            Axis::Range(r) => linspace(r.start, r.stop, r.points),
        }
    }

    fn check(&self, path: &str) -> Result<(), ConfigError> {
        let v = self.values();
        if v.is_empty() {
            return Err(ConfigError::schema(path, "axis must contain at least one point"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(ConfigError::schema(path, "axis values must be finite"));
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::schema(path, "axis values must be strictly increasing"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reciprocal {
    #[serde(rename = "reciprocal")]
    Reciprocal,
}

/// `"reciprocal"` for `ω_q = 1/ω_c`, or a fixed frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QubitFrequencySetting {
    Reciprocal(Reciprocal),
    Fixed(f64),
}

impl QubitFrequencySetting {
    fn to_core(self) -> QubitFrequency {
        match self {
            QubitFrequencySetting::Reciprocal(_) => QubitFrequency::Reciprocal,
            QubitFrequencySetting::Fixed(w) => QubitFrequency::Fixed(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameSetting {
    Interaction,
    Lab,
}

/// Keys of `phase-diagram` mode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub g_values: Option<Axis>,
    pub omega_c_values: Option<Axis>,
    pub omega_q: Option<QubitFrequencySetting>,
    pub n_max: Option<usize>,
    pub quantities: Option<Vec<String>>,
}

/// Keys of `quench` mode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchConfig {
    pub omega_c: Option<f64>,
    pub omega_q: Option<f64>,
    pub n_max: Option<usize>,
    pub gamma_c: Option<f64>,
    pub gamma_q: Option<f64>,
    pub temperature: Option<f64>,
    pub omega_0: Option<f64>,
    pub g0: Option<f64>,
    pub g_prime: Option<f64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub record_stride: Option<usize>,
    pub observables: Option<Vec<String>>,
    pub snapshot_times: Option<Vec<f64>>,
    pub wigner_x: Option<Axis>,
    pub wigner_p: Option<Axis>,
    pub frame: Option<FrameSetting>,
}

/// Keys of `ground-state` mode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub omega_c: Option<f64>,
    pub omega_q: Option<f64>,
    pub n_max: Option<usize>,
    pub g: Option<f64>,
    pub quantities: Option<Vec<String>>,
}

/// Keys of `wigner` mode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerConfig {
    pub omega_c: Option<f64>,
    pub omega_q: Option<f64>,
    pub n_max: Option<usize>,
    pub g: Option<f64>,
    pub x: Option<Axis>,
    pub p: Option<Axis>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModeConfig {
    PhaseDiagram(SweepConfig),
    Quench(QuenchConfig),
    GroundState(PointConfig),
    Wigner(WignerConfig),
}

/// A resolved configuration: every optional key holds its effective value.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub settings: ModeConfig,
    pub output_dir: Option<PathBuf>,
}

/// Core-library inputs built from a resolved configuration.
#[derive(Debug, Clone)]
pub enum Plan {
    PhaseDiagram(SweepSpec),
    Quench {
        model: ModelParams,
        cutoff: FockCutoff,
        protocol: QuenchProtocol,
        bath: BathSpec,
    },
    GroundState {
        model: ModelParams,
        cutoff: FockCutoff,
        quantities: Vec<Quantity>,
    },
    Wigner {
        model: ModelParams,
        cutoff: FockCutoff,
        x: Vec<f64>,
        p: Vec<f64>,
    },
}

/// Time label used in snapshot file names.
pub fn snapshot_label(t: f64) -> String {
    format!("{t:.2}")
}

fn default_wigner_axis() -> Axis {
    Axis::range(-8.0, 8.0, 161)
}

fn names<T>(
    key: &str,
    given: &Option<Vec<String>>,
    all: &[T],
    name: fn(&T) -> &'static str,
    parse: fn(&str) -> Option<T>,
) -> Result<(Vec<String>, Vec<T>), ConfigError>
where
    T: Copy + PartialEq,
{
    let list = match given {
        Some(v) => v.clone(),
        None => all.iter().map(|x| name(x).to_string()).collect(),
    };
    let mut parsed = Vec::with_capacity(list.len());
    for (i, n) in list.iter().enumerate() {
        let item = parse(n).ok_or_else(|| {
            let known: Vec<&str> = all.iter().map(name).collect();
            ConfigError::schema(format!("{key}[{i}]"), format!("unknown name `{n}`; expected one of {}", known.join(", ")))
        })?;
        if parsed.contains(&item) {
            return Err(ConfigError::schema(format!("{key}[{i}]"), format!("`{n}` listed twice")));
        }
        parsed.push(item);
    }
    if parsed.is_empty() {
        return Err(ConfigError::schema(key, "must name at least one entry"));
    }
    Ok((list, parsed))
}

fn cutoff(n_max: usize) -> Result<FockCutoff, ConfigError> {
    Ok(FockCutoff::new(n_max)?)
}

fn point_model(omega_c: Option<f64>, omega_q: Option<f64>, g: f64) -> Result<(f64, f64, ModelParams), ConfigError> {
    let wc = omega_c.unwrap_or(DEFAULT_OMEGA_C);
    if !(wc > 0.0 && wc.is_finite()) {
        return Err(ConfigError::Physics(format!("omega_c must be positive, got {wc}")));
    }
    let wq = omega_q.unwrap_or(1.0 / wc);
    Ok((wc, wq, ModelParams::new(wc, wq, g)?))
}

impl SweepConfig {
    fn resolve(&self) -> Result<(Self, Plan), ConfigError> {
        let defaults = SweepSpec::default();
        let g_values = self.g_values.clone().unwrap_or_else(|| Axis::range(0.0, 1.0, 40));
        let omega_c_values = self.omega_c_values.clone().unwrap_or_else(|| Axis::range(0.02, 0.5, 20));
        g_values.check("g_values")?;
        omega_c_values.check("omega_c_values")?;
        let omega_q = self
            .omega_q
            .unwrap_or(QubitFrequencySetting::Reciprocal(Reciprocal::Reciprocal));
        let n_max = self.n_max.unwrap_or(defaults.cutoff.n_max());
        let (quantity_names, quantities) =
            names("quantities", &self.quantities, &Quantity::ALL, |q| q.name(), Quantity::from_name)?;
        let spec = SweepSpec {
            g_values: g_values.values(),
            omega_c_values: omega_c_values.values(),
            qubit_frequency: omega_q.to_core(),
            cutoff: cutoff(n_max)?,
            quantities,
        };
        spec.validate()?;
        spec.points()?;
        let resolved = SweepConfig {
            g_values: Some(g_values),
            omega_c_values: Some(omega_c_values),
            omega_q: Some(omega_q),
            n_max: Some(n_max),
            quantities: Some(quantity_names),
        };
        Ok((resolved, Plan::PhaseDiagram(spec)))
    }
}

impl QuenchConfig {
    fn resolve(&self) -> Result<(Self, Plan), ConfigError> {
        let g0 = self.g0.ok_or_else(|| ConfigError::Missing(vec!["g0".into()]))?;
        let (omega_c, omega_q, model) = point_model(self.omega_c, self.omega_q, g0)?;
        let n_max = self.n_max.unwrap_or(FockCutoff::DEFAULT_N_MAX);
        let defaults = BathSpec::default_for(&model);
        let bath = BathSpec::new(
            self.gamma_c.unwrap_or(defaults.gamma_c),
            self.gamma_q.unwrap_or(defaults.gamma_q),
            self.temperature.unwrap_or(defaults.temperature),
            self.omega_0.unwrap_or(defaults.omega_0),
        )?;
        let (observable_names, observables) =
            names("observables", &self.observables, &Observable::ALL, |o| o.name(), Observable::from_name)?;
        let wigner_x = self.wigner_x.clone().unwrap_or_else(default_wigner_axis);
        let wigner_p = self.wigner_p.clone().unwrap_or_else(default_wigner_axis);
        wigner_x.check("wigner_x")?;
        wigner_p.check("wigner_p")?;
        let frame = self.frame.unwrap_or(FrameSetting::Interaction);
        let mut protocol = QuenchProtocol::step_up(g0);
        if let Some(g) = self.g_prime {
            protocol.g_prime = g;
        }
        protocol.t_max = self.t_max.unwrap_or(protocol.t_max);
        protocol.dt = self.dt.unwrap_or(protocol.dt);
        protocol.record_stride = self.record_stride.unwrap_or(protocol.record_stride);
        protocol.observables = observables;
        protocol.snapshot_times = self.snapshot_times.clone().unwrap_or_default();
        protocol.wigner_x = wigner_x.values();
        protocol.wigner_p = wigner_p.values();
        protocol.frame = match frame {
            FrameSetting::Interaction => Frame::Interaction,
            FrameSetting::Lab => Frame::Lab,
        };
        protocol.validate()?;
        model.with_coupling(protocol.g_prime)?;
        let mut labels: Vec<String> = protocol.snapshot_times.iter().map(|&t| snapshot_label(t)).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(ConfigError::schema("snapshot_times", format!("two snapshots share the label t={}", w[0])));
        }
        let resolved = QuenchConfig {
            omega_c: Some(omega_c),
            omega_q: Some(omega_q),
            n_max: Some(n_max),
            gamma_c: Some(bath.gamma_c),
            gamma_q: Some(bath.gamma_q),
            temperature: Some(bath.temperature),
            omega_0: Some(bath.omega_0),
            g0: Some(g0),
            g_prime: Some(protocol.g_prime),
            t_max: Some(protocol.t_max),
            dt: Some(protocol.dt),
            record_stride: Some(protocol.record_stride),
            observables: Some(observable_names),
            snapshot_times: Some(protocol.snapshot_times.clone()),
            wigner_x: Some(wigner_x),
            wigner_p: Some(wigner_p),
            frame: Some(frame),
        };
        let plan = Plan::Quench {
            model,
            cutoff: cutoff(n_max)?,
            protocol,
            bath,
        };
        Ok((resolved, plan))
    }
}

impl PointConfig {
    fn resolve(&self) -> Result<(Self, Plan), ConfigError> {
        let g = self.g.ok_or_else(|| ConfigError::Missing(vec!["g".into()]))?;
        let (omega_c, omega_q, model) = point_model(self.omega_c, self.omega_q, g)?;
        let n_max = self.n_max.unwrap_or(FockCutoff::DEFAULT_N_MAX);
        let (quantity_names, quantities) =
            names("quantities", &self.quantities, &Quantity::ALL, |q| q.name(), Quantity::from_name)?;
        let resolved = PointConfig {
            omega_c: Some(omega_c),
            omega_q: Some(omega_q),
            n_max: Some(n_max),
            g: Some(g),
            quantities: Some(quantity_names),
        };
        let plan = Plan::GroundState {
            model,
            cutoff: cutoff(n_max)?,
            quantities,
        };
        Ok((resolved, plan))
    }
}

impl WignerConfig {
    fn resolve(&self) -> Result<(Self, Plan), ConfigError> {
        let g = self.g.ok_or_else(|| ConfigError::Missing(vec!["g".into()]))?;
        let (omega_c, omega_q, model) = point_model(self.omega_c, self.omega_q, g)?;
        let n_max = self.n_max.unwrap_or(FockCutoff::DEFAULT_N_MAX);
        let x = self.x.clone().unwrap_or_else(default_wigner_axis);
        let p = self.p.clone().unwrap_or_else(default_wigner_axis);
        x.check("x")?;
        p.check("p")?;
        let plan = Plan::Wigner {
            model,
            cutoff: cutoff(n_max)?,
            x: x.values(),
            p: p.values(),
        };
        let resolved = WignerConfig {
            omega_c: Some(omega_c),
            omega_q: Some(omega_q),
            n_max: Some(n_max),
            g: Some(g),
            x: Some(x),
            p: Some(p),
        };
        Ok((resolved, plan))
    }
}

impl ModeConfig {
    pub fn mode(&self) -> Mode {
        match self {
            ModeConfig::PhaseDiagram(_) => Mode::PhaseDiagram,
            ModeConfig::Quench(_) => Mode::Quench,
            ModeConfig::GroundState(_) => Mode::GroundState,
            ModeConfig::Wigner(_) => Mode::Wigner,
        }
    }

    fn resolve(&self) -> Result<(Self, Plan), ConfigError> {
        Ok(match self {
            ModeConfig::PhaseDiagram(c) => {
                let (c, p) = c.resolve()?;
                (ModeConfig::PhaseDiagram(c), p)
            }
            ModeConfig::Quench(c) => {
                let (c, p) = c.resolve()?;
                (ModeConfig::Quench(c), p)
            }
            ModeConfig::GroundState(c) => {
                let (c, p) = c.resolve()?;
                (ModeConfig::GroundState(c), p)
            }
            ModeConfig::Wigner(c) => {
                let (c, p) = c.resolve()?;
                (ModeConfig::Wigner(c), p)
            }
        })
    }

    fn to_value(&self) -> Value {
        let v = match self {
            ModeConfig::PhaseDiagram(c) => serde_json::to_value(c),
            ModeConfig::Quench(c) => serde_json::to_value(c),
            ModeConfig::GroundState(c) => serde_json::to_value(c),
            ModeConfig::Wigner(c) => serde_json::to_value(c),
        };
        v.expect("config structs serialize")
    }
}

impl RunConfig {
    pub fn mode(&self) -> Mode {
        self.settings.mode()
    }

    /// Builds the core-library inputs. Only fails on configurations that did
    /// not come from [`parse_config`].
    pub fn plan(&self) -> Result<Plan, ConfigError> {
        Ok(self.settings.resolve()?.1)
    }

    /// Mode and resolved settings, without the output directory.
    pub fn settings_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("mode".into(), Value::String(self.mode().name().into()));
        if let Value::Object(fields) = self.settings.to_value() {
            map.extend(fields);
        }
        Value::Object(map)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.settings_json();
        if let (Some(dir), Value::Object(map)) = (&self.output_dir, &mut v) {
            map.insert("output_dir".into(), Value::String(dir.to_string_lossy().into_owned()));
        }
        v
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize")
    }
}

fn decode<T: DeserializeOwned>(value: Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Schema {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

/// Parses and resolves a configuration document. `mode` comes from the
/// command line; a `"mode"` key in the document must agree with it, and is
/// required when `mode` is `None`.
pub fn parse_config(text: &str, mode: Option<Mode>) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(mut map) = value else {
        return Err(ConfigError::schema(".", "expected a JSON object"));
    };

    let declared = match map.remove("mode") {
        None => None,
        Some(Value::String(s)) => Some(Mode::from_name(&s).ok_or_else(|| {
            let known: Vec<&str> = Mode::ALL.iter().map(|m| m.name()).collect();
            ConfigError::schema("mode", format!("unknown mode `{s}`; expected one of {}", known.join(", ")))
        })?),
        Some(_) => return Err(ConfigError::schema("mode", "expected a string")),
    };
    let mode = match (mode, declared) {
        (Some(expected), Some(found)) if expected != found => {
            return Err(ConfigError::ModeMismatch { expected, found })
        }
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => return Err(ConfigError::Missing(vec!["mode".into()])),
    };
    let output_dir = match map.remove("output_dir") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err(ConfigError::schema("output_dir", "expected a string")),
    };

    let missing: Vec<String> = mode
        .required()
        .iter()
        .filter(|k| map.get(**k).is_none_or(Value::is_null))
        .map(|k| k.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ConfigError::Missing(missing));
    }

    let body = Value::Object(map);
    let settings = match mode {
        Mode::PhaseDiagram => ModeConfig::PhaseDiagram(decode(body)?),
        Mode::Quench => ModeConfig::Quench(decode(body)?),
        Mode::GroundState => ModeConfig::GroundState(decode(body)?),
        Mode::Wigner => ModeConfig::Wigner(decode(body)?),
    };
    let (settings, _) = settings.resolve()?;
    Ok(RunConfig { settings, output_dir })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_quench_gets_defaults() {
        let cfg = parse_config(r#"{"g0": 0.35}"#, Some(Mode::Quench)).unwrap();
        let ModeConfig::Quench(q) = &cfg.settings else { panic!() };
        assert_eq!(q.g_prime, Some(0.35 + 0.3));
        assert_eq!(q.omega_c, Some(0.1));
        assert_eq!(q.omega_q, Some(10.0));
        assert_eq!(q.gamma_c, Some(0.001));
        assert_eq!(q.gamma_q, Some(0.001));
        assert_eq!(q.temperature, Some(0.0));
        assert_eq!(q.n_max, Some(50));
        assert_eq!(q.dt, Some(0.01));
        assert_eq!(q.t_max, Some(100.0));
    }

    #[test]
    fn empty_document_lists_required_fields() {
        let err = parse_config("{}", Some(Mode::Quench)).unwrap_err();
        assert!(matches!(&err, ConfigError::Missing(f) if f == &["g0"]), "{err}");
        assert!(err.to_string().contains("g0"));
        let err = parse_config("{}", None).unwrap_err();
        assert!(err.to_string().contains("mode"));
        assert!(parse_config("{}", Some(Mode::PhaseDiagram)).is_ok());
    }

    #[test]
    fn negative_temperature_is_a_physics_error() {
        let err = parse_config(r#"{"g0": 0.35, "temperature": -1}"#, Some(Mode::Quench)).unwrap_err();
        assert!(matches!(err, ConfigError::Physics(_)), "{err}");
    }

    #[test]
    fn syntax_and_schema_errors_are_distinct() {
        let err = parse_config("{\n  \"g0\": 0.35,\n}", Some(Mode::Quench)).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 3, .. }), "{err}");
        let err = parse_config(r#"{"g0": 0.35, "gamma": 1}"#, Some(Mode::Quench)).unwrap_err();
        assert!(matches!(err, ConfigError::Schema { .. }), "{err}");
        let err = parse_config(r#"{"g0": "big"}"#, Some(Mode::Quench)).unwrap_err();
        assert!(matches!(&err, ConfigError::Schema { path, .. } if path == "g0"), "{err}");
        let err = parse_config(r#"{"g0": 0.3, "observables": ["f", "spin"]}"#, Some(Mode::Quench)).unwrap_err();
        assert!(matches!(&err, ConfigError::Schema { path, .. } if path == "observables[1]"), "{err}");
        let err = parse_config(r#"{"g_values": {"start": 0, "stop": 1}}"#, Some(Mode::PhaseDiagram)).unwrap_err();
        assert!(matches!(err, ConfigError::Schema { .. }), "{err}");
    }

    #[test]
    fn keys_of_other_modes_are_rejected() {
        assert!(parse_config(r#"{"g": 0.3, "g0": 0.3}"#, Some(Mode::GroundState)).is_err());
        assert!(parse_config(r#"{"g0": 0.3, "n_max": 10, "x": [0]}"#, Some(Mode::Quench)).is_err());
    }

    #[test]
    fn mode_key_must_match() {
        let err = parse_config(r#"{"mode": "wigner", "g": 0.3}"#, Some(Mode::GroundState)).unwrap_err();
        assert!(matches!(err, ConfigError::ModeMismatch { .. }));
        let cfg = parse_config(r#"{"mode": "wigner", "g": 0.3}"#, None).unwrap();
        assert_eq!(cfg.mode(), Mode::Wigner);
    }

    #[test]
    fn resolved_config_round_trips() {
        let docs = [
            (Mode::Quench, r#"{"g0": 0.35, "snapshot_times": [10, 35], "output_dir": "out"}"#),
            (Mode::PhaseDiagram, r#"{"g_values": [0.1, 0.2], "omega_q": 2.0, "quantities": ["gap"]}"#),
            (Mode::PhaseDiagram, "{}"),
            (Mode::GroundState, r#"{"g": 0.7, "n_max": 80}"#),
            (Mode::Wigner, r#"{"g": 0.7, "x": {"start": -1, "stop": 1, "points": 3}}"#),
        ];
        for (mode, doc) in docs {
            let cfg = parse_config(doc, Some(mode)).unwrap();
            let again = parse_config(&cfg.to_json_string(), None).unwrap();
            assert_eq!(again, cfg);
        }
    }

    #[test]
    fn sweep_axes_must_increase() {
        let err = parse_config(r#"{"g_values": [0.2, 0.1]}"#, Some(Mode::PhaseDiagram)).unwrap_err();
        assert!(err.to_string().contains("g_values"));
        let err = parse_config(r#"{"omega_c_values": [0.0, 0.1]}"#, Some(Mode::PhaseDiagram)).unwrap_err();
        assert!(matches!(err, ConfigError::Physics(_)), "{err}");
    }
}
