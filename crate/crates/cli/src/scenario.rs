//! Scenario files: what to run, on which model and profile, and where the
//! artifacts go.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use shockcost_core::{FluxModel, PiecewiseConstantProfile};

use crate::dto::{ModelSpec, ProfileDto, SolutionDto};
use crate::error::{CliError, CliResult};

pub const QUAD_TOL_ENV: &str = "SHOCKCOST_QUAD_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Evolve,
    SplitEvolve,
    Absorber,
    Connect,
    Quasipotential,
    Cost,
    Reverse,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::SplitEvolve => "split-evolve",
            Command::Absorber => "absorber",
            Command::Connect => "connect",
            Command::Quasipotential => "quasipotential",
            Command::Cost => "cost",
            Command::Reverse => "reverse",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ProfileSource {
    Inline(ProfileDto),
    File(ProfileFile),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub file: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub svg: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub quad_tol: Option<f64>,
    /// Residual allowed by the weak-solution check.
    pub weak_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub command: Option<Command>,
    pub model: Option<ModelSpec>,
    pub profile: Option<ProfileSource>,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Directory of the scenario file; relative paths resolve against it.
    #[serde(skip)]
    pub base: PathBuf,
}

pub const DEFAULT_WEAK_TOL: f64 = 1e-12;

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::validation(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Scenario {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::validation(format!("cannot read scenario {}: {e}", path.display()))
        })?;
        let mut sc = Scenario::parse(&text)?;
        sc.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(sc)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let sc: Scenario = serde_json::from_str(text)?;
        if let Some(t) = sc.tolerances.quad_tol {
            positive("tolerances.quad_tol", t)?;
        }
        if let Some(t) = sc.tolerances.weak_tol {
            positive("tolerances.weak_tol", t)?;
        }
        if let Some(t) = sc.model.as_ref().and_then(|m| m.quad_tol) {
            positive("model.quad_tol", t)?;
        }
        Ok(sc)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    /// Command-specific parameters; a missing `params` reads as `{}`.
    pub fn params<T: DeserializeOwned>(&self) -> CliResult<T> {
        let v = match &self.params {
            serde_json::Value::Null => serde_json::Value::Object(Default::default()),
            v => v.clone(),
        };
        serde_json::from_value(v).map_err(|e| CliError::validation(format!("params: {e}")))
    }

    pub fn weak_tol(&self) -> f64 {
        self.tolerances.weak_tol.unwrap_or(DEFAULT_WEAK_TOL)
    }

    /// The effective model spec: the environment variable beats
    /// `tolerances.quad_tol`, which beats `model.quad_tol`.
    pub fn model_spec(&self, fallback: Option<&ModelSpec>) -> CliResult<ModelSpec> {
        let mut spec = self
            .model
            .clone()
            .or_else(|| fallback.cloned())
            .ok_or_else(|| CliError::validation("scenario has no model"))?;
        if let Some(t) = self.tolerances.quad_tol {
            spec.quad_tol = Some(t);
        }
        if let Some(t) = quad_tol_from_env()? {
            spec.quad_tol = Some(t);
        }
        Ok(spec)
    }

    pub fn model(&self) -> CliResult<(ModelSpec, FluxModel)> {
        let spec = self.model_spec(None)?;
        let model = spec.build()?;
        Ok((spec, model))
    }

    pub fn profile(&self) -> CliResult<PiecewiseConstantProfile> {
        let dto = match &self.profile {
            None => return Err(CliError::validation("scenario has no profile")),
            Some(ProfileSource::Inline(p)) => p.clone(),
            Some(ProfileSource::File(f)) => read_json(&self.resolve(&f.file))?,
        };
        dto.build()
    }

    /// Reads a solution written by this tool, either bare or inside a
    /// results file.
    pub fn solution_file(&self, p: &Path) -> CliResult<SolutionDto> {
        let mut v: serde_json::Value = read_json(&self.resolve(p))?;
        if let Some(inner) = v.get_mut("solution") {
            v = inner.take();
        }
        serde_json::from_value(v).map_err(|e| CliError::validation(format!("solution file: {e}")))
    }
}

fn quad_tol_from_env() -> CliResult<Option<f64>> {
    match std::env::var(QUAD_TOL_ENV) {
        Ok(s) => {
            let t: f64 = s
                .trim()
                .parse()
                .map_err(|_| CliError::validation(format!("{QUAD_TOL_ENV}: not a number: {s:?}")))?;
            positive(QUAD_TOL_ENV, t).map(Some)
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::validation(format!("{QUAD_TOL_ENV}: {e}"))),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inline_profile() {
        let sc = Scenario::parse(
            r#"{"command": "split-evolve", "model": {"builtin": "cubic"},
                "profile": {"breakpoints": [0, 0.5], "values": [0.2, -0.2]},
                "params": {"t_bar": 1}}"#,
        )
        .unwrap();
        assert_eq!(sc.command, Some(Command::SplitEvolve));
        assert_eq!(sc.profile().unwrap().values(), &[0.2, -0.2]);
        assert_eq!(sc.weak_tol(), DEFAULT_WEAK_TOL);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_tolerances() {
        assert!(Scenario::parse(r#"{"modle": {}}"#).is_err());
        assert!(Scenario::parse(r#"{"tolerances": {"quad_tol": -1}}"#).is_err());
        assert!(Scenario::parse(r#"{"output": {"svg": true, "colour": "red"}}"#).is_err());
        let sc = Scenario::parse(r#"{"profile": {"file": "missing.json"}}"#).unwrap();
        assert!(matches!(sc.profile(), Err(CliError::Validation(_))));
    }

    #[test]
    fn builtins_and_polynomials() {
        let spec: ModelSpec = serde_json::from_str(r#"{"flux": {"poly": [0, -1, 0, 1]}}"#).unwrap();
        let m = spec.build().unwrap();
        assert_eq!(m.f(0.5), FluxModel::cubic().f(0.5));
        let bad: ModelSpec = serde_json::from_str(r#"{"builtin": "quartic"}"#).unwrap();
        assert!(bad.build().is_err());
    }
}
