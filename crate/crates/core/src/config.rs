//! Declarative run configuration (TOML) with `section.key=value` overrides.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::checkpoint::read_checkpoint;
use crate::error::{HmhdError, Result};
use crate::grid::{Grid, DEFAULT_DEALIAS_FRACTION};
use crate::initial_data::{make_theorem2_data, random_divfree_field, AnnulusDataParams};
use crate::linear_flows::LinearFlowPair;
use crate::solver::{ExponentConfig, RunOptions, SimState, StepControl, StepMode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    pub box_length: f64,
    pub dealias: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 32, box_length: 2.0 * PI, dealias: DEFAULT_DEALIAS_FRACTION }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    SmallRandom,
    Theorem2,
    Checkpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub kind: DataKind,
    pub epsilon: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// `‖u₀₁‖_{H^s}`; the whole of `u₀` for `small_random`.
    pub u01_norm: f64,
    pub b01_norm: f64,
    pub seed: u64,
    pub path: Option<PathBuf>,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            kind: DataKind::SmallRandom,
            epsilon: 1.0 / 16.0,
            alpha1: 1.0,
            alpha2: 1.0,
            u01_norm: 0.005,
            b01_norm: 0.005,
            seed: 0,
            path: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlConfig {
    /// Fixed step, or the upper bound in adaptive mode.
    pub dt: f64,
    pub cfl_safety: f64,
    pub mode: StepMode,
    pub t_end: f64,
    pub diagnostics_every: u64,
    pub checkpoint_every: u64,
    pub hall_enabled: bool,
    pub nonlinear_enabled: bool,
}

impl Default for ControlConfig {
    fn default() -> Self {
        ControlConfig {
            dt: 0.01,
            cfl_safety: 0.3,
            mode: StepMode::Fixed,
            t_end: 1.0,
            diagnostics_every: 10,
            checkpoint_every: 0,
            hall_enabled: true,
            nonlinear_enabled: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub prefix: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: PathBuf::from("out"), prefix: "run".into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub exponents: ExponentConfig,
    pub data: DataConfig,
    pub control: ControlConfig,
    pub output: OutputConfig,
}

/// Splits `section.key=value` and parses the value as a TOML literal, falling
/// back to a bare string.
fn parse_override(spec: &str) -> Result<(Vec<String>, toml::Value)> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| HmhdError::Config(format!("override {spec:?} is not of the form section.key=value")))?;
    let path: Vec<String> = key.trim().split('.').map(str::to_string).collect();
    if path.len() != 2 || path.iter().any(|p| p.is_empty()) {
        return Err(HmhdError::Config(format!("override key {key:?} must be section.key")));
    }
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    Ok((path, value))
}

impl RunConfig {
    /// Parses TOML text, applies overrides and validates the result.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<RunConfig> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| HmhdError::Config(e.to_string()))?;
        for spec in overrides {
            let (path, value) = parse_override(spec)?;
            let section = table
                .entry(path[0].clone())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                .as_table_mut()
                .ok_or_else(|| HmhdError::Config(format!("{} is not a section", path[0])))?;
            section.insert(path[1].clone(), value);
        }
        let config: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| HmhdError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path, overrides: &[String]) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.make_grid()?;
        self.exponents.validate()?;
        self.step_control().validate()?;
        let c = &self.control;
        if !(c.t_end > 0.0 && c.t_end.is_finite()) {
            return Err(HmhdError::Config(format!("control.t_end must be positive, got {}", c.t_end)));
        }
        if c.diagnostics_every == 0 {
            return Err(HmhdError::Config("control.diagnostics_every must be at least 1".into()));
        }
        let d = &self.data;
        for (name, v) in [("data.u01_norm", d.u01_norm), ("data.b01_norm", d.b01_norm)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(HmhdError::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        match d.kind {
            DataKind::Theorem2 => self.annulus_params().validate().map_err(|e| HmhdError::Config(e.to_string()))?,
            DataKind::Checkpoint if d.path.is_none() => {
                return Err(HmhdError::Config("data.path is required for kind = checkpoint".into()));
            }
            _ => {}
        }
        if self.output.prefix.is_empty() {
            return Err(HmhdError::Config("output.prefix must not be empty".into()));
        }
        Ok(())
    }

    pub fn make_grid(&self) -> Result<Arc<Grid>> {
        Grid::new(self.grid.n, self.grid.box_length, self.grid.dealias)
    }

    pub fn annulus_params(&self) -> AnnulusDataParams {
        AnnulusDataParams {
            epsilon: self.data.epsilon,
            alpha1: self.data.alpha1,
            alpha2: self.data.alpha2,
            seed: self.data.seed,
            s: self.exponents.s,
            ..Default::default()
        }
    }

    pub fn step_control(&self) -> StepControl {
        let c = &self.control;
        StepControl {
            dt: c.dt,
            dt_max: c.dt,
            cfl_safety: c.cfl_safety,
            mode: c.mode,
            nonlinear_enabled: c.nonlinear_enabled,
            hall_enabled: c.hall_enabled,
        }
    }

    /// Builds the initial state, and for `theorem2` data the linear flow the
    /// perturbation columns are measured against.
    pub fn initial_state(&self) -> Result<(SimState, Option<LinearFlowPair>)> {
        let d = &self.data;
        let s = self.exponents.s;
        match d.kind {
            DataKind::SmallRandom => {
                let grid = self.make_grid()?;
                let u = random_divfree_field(&grid, s, d.u01_norm, 2.0, d.seed)?;
                let b = random_divfree_field(&grid, s, d.b01_norm, 2.0, d.seed.wrapping_add(1))?;
                Ok((SimState::new(u, b, self.exponents, f64::INFINITY)?, None))
            }
            DataKind::Theorem2 => {
                let grid = self.make_grid()?;
                let data = make_theorem2_data(&grid, &self.annulus_params(), d.u01_norm, d.b01_norm)?;
                let flow = LinearFlowPair::new(data.v0, d.alpha1, d.alpha2, self.exponents.alpha)?;
                Ok((SimState::new(data.u0, data.b0, self.exponents, f64::INFINITY)?, Some(flow)))
            }
            DataKind::Checkpoint => {
                let path = d.path.as_ref().expect("validated");
                let mut state = read_checkpoint(path)?;
                state.exponents = self.exponents;
                Ok((state, None))
            }
        }
    }

    pub fn run_options(&self, flow: Option<LinearFlowPair>) -> RunOptions {
        RunOptions {
            checkpoint_every: self.control.checkpoint_every,
            checkpoint_dir: Some(self.output.directory.clone()),
            checkpoint_prefix: self.output.prefix.clone(),
            flow,
            config: self.to_json(),
        }
    }
}
