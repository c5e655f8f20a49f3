//! Run configuration read from a sectioned TOML file.
//!
//! Every section and key is optional; omitted keys take the default shown in
//! the echoed configuration of each report. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::integrator::{BeamSystem, SimConfig, StateVector};
use crate::model::{validate_params, FieldSpec, InitialData, PhysicalParams, SourceKind, SourceModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Domain {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub cells: usize,
}

impl Default for Domain {
    fn default() -> Self {
        Self { length: 1.0, cells: 128 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0, gamma: 0.0, lambda1: 0.0, lambda2: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Source {
    pub kind: SourceKind,
    pub a: f64,
    pub eta: f64,
    /// Overrides the growth constant; filled in from `a` and `eta` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<[f64; 4]>,
    /// Which of `d`, `exponents` were filled in rather than given.
    #[serde(skip)]
    derived: (bool, bool),
}

impl Default for Source {
    fn default() -> Self {
        Self { kind: SourceKind::Null, a: 1.0, eta: 4.0, d: None, exponents: None, derived: (false, false) }
    }
}

/// One initial field: a preset, inline values, or a file of
/// whitespace-separated nodal values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldInput {
    #[default]
    Zero,
    Sine {
        amplitude: f64,
        #[serde(default = "one")]
        mode: usize,
    },
    Values {
        values: Vec<f64>,
    },
    File {
        path: PathBuf,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Initial {
    pub v0: FieldInput,
    pub v1: FieldInput,
    pub p0: FieldInput,
    pub p1: FieldInput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
    /// Write every `stride`-th recorded sample to the CSV.
    pub stride: usize,
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), stride: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Certificate {
    pub lambda_cert: f64,
}

impl Default for Certificate {
    fn default() -> Self {
        Self { lambda_cert: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub domain: Domain,
    pub physics: Physics,
    pub source: Source,
    pub initial: Initial,
    pub time: SimConfig,
    pub output: Output,
    pub certificate: Certificate,
}

impl Config {
    /// Parses and validates `text`; relative file paths resolve against `base`.
    pub fn from_str_in(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.resolve(base)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_str_in(&text, base).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Loads array files into inline values, fills derived source
    /// constants and makes the output directory absolute relative to `base`.
    fn resolve(&mut self, base: &Path) -> Result<()> {
        for (name, field) in [
            ("v0", &mut self.initial.v0),
            ("v1", &mut self.initial.v1),
            ("p0", &mut self.initial.p0),
            ("p1", &mut self.initial.p1),
        ] {
            if let FieldInput::File { path } = field {
                let full = base.join(&*path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|source| Error::Io { path: full.display().to_string(), source })?;
                let values = text
                    .split_whitespace()
                    .map(|w| w.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Config(format!("initial.{name}: {}: {e}", full.display())))?;
                *field = FieldInput::Values { values };
            }
        }
        self.source.derived = (self.source.d.is_none(), self.source.exponents.is_none());
        self.fill_growth();
        if self.output.dir.is_relative() {
            self.output.dir = base.join(&self.output.dir);
        }
        Ok(())
    }

    fn fill_growth(&mut self) {
        let model = self.source_model_unresolved();
        self.source.d.get_or_insert(model.d);
        self.source.exponents.get_or_insert(model.exponents);
    }

    /// Recomputes the growth data that was derived from `a` and `eta`, after
    /// either has changed.
    pub fn refresh_growth(&mut self) {
        let (d, e) = self.source.derived;
        if d {
            self.source.d = None;
        }
        if e {
            self.source.exponents = None;
        }
        self.fill_growth();
    }

    fn source_model_unresolved(&self) -> SourceModel {
        match self.source.kind {
            SourceKind::PowerDifference => SourceModel::power_difference(self.source.a, self.source.eta),
            SourceKind::Null => SourceModel::null(self.source.eta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        Grid::new(self.domain.length, self.domain.cells)?;
        validate_params(&self.params(), &self.source_model()).into_result()?;
        self.time.validate()?;
        if self.output.stride == 0 {
            return Err(Error::Config("output.stride must be >= 1".into()));
        }
        if !(self.certificate.lambda_cert > 0.0) {
            return Err(Error::Config("certificate.lambda_cert must be > 0".into()));
        }
        self.initial_state()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.domain.length, self.domain.cells)
    }

    pub fn params(&self) -> PhysicalParams {
        let p = &self.physics;
        PhysicalParams::new(p.alpha, p.beta, p.gamma, p.lambda1, p.lambda2)
    }

    pub fn source_model(&self) -> SourceModel {
        let base = self.source_model_unresolved();
        match (self.source.d, self.source.exponents) {
            (None, None) => base,
            (d, e) => base.with_growth(d.unwrap_or(base.d), e.unwrap_or(base.exponents)),
        }
    }

    pub fn system(&self) -> Result<BeamSystem> {
        Ok(BeamSystem::new(self.grid()?, self.params(), self.source_model()))
    }

    pub fn initial_data(&self) -> Result<InitialData> {
        let conv = |f: &FieldInput| match f {
            FieldInput::Zero => Ok(FieldSpec::Zero),
            FieldInput::Sine { amplitude, mode } => Ok(FieldSpec::Sine { amplitude: *amplitude, mode: *mode }),
            FieldInput::Values { values } => Ok(FieldSpec::Values { values: values.clone() }),
            FieldInput::File { path } => Err(Error::Config(format!("unresolved file {}", path.display()))),
        };
        let i = &self.initial;
        Ok(InitialData { v0: conv(&i.v0)?, v1: conv(&i.v1)?, p0: conv(&i.p0)?, p1: conv(&i.p1)? })
    }

    pub fn initial_state(&self) -> Result<StateVector> {
        self.initial_data()?.to_state(&self.grid()?)
    }

    /// Resolved configuration as TOML.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
