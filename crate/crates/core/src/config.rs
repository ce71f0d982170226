//! JSON run configuration shared by the command-line subcommands.

use crate::eos::{EosError, EosSpec, FermiEosParams, PowerSeriesOmega, DEFAULT_DELTA_OMEGA};
use crate::integrate::StepControl;
use crate::model::{ModelInput, SolveOptions};
use crate::units::UnitSystem;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config schema error: {0}")]
    Schema(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Equation of state block. `omega_coeffs` lists `c₁, c₂, …` of
/// `Ω(ζ) = 1 + c₁ζ + c₂ζ² + …`; empty means `Ω ≡ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum EosConfig {
    Polytrope {
        #[serde(rename = "A")]
        a: f64,
        gamma: f64,
        #[serde(default)]
        omega_coeffs: Vec<f64>,
        #[serde(default)]
        delta_omega: Option<f64>,
    },
    Fermi {
        #[serde(rename = "K")]
        k: f64,
        /// Number of Taylor terms of `Ω`.
        #[serde(default = "default_fermi_order")]
        order: usize,
        #[serde(default)]
        delta_omega: Option<f64>,
    },
}

fn default_fermi_order() -> usize {
    8
}

impl EosConfig {
    /// The EOS with `c` taken from the unit system.
    pub fn build(&self, units: UnitSystem) -> Result<EosSpec, EosError> {
        let c = units.constants().c;
        match self {
            EosConfig::Polytrope {
                a,
                gamma,
                omega_coeffs,
                delta_omega,
            } => {
                let eos = if omega_coeffs.is_empty() {
                    EosSpec::polytrope(*a, *gamma, c)?
                } else {
                    EosSpec::new(*a, *gamma, c, Arc::new(PowerSeriesOmega::from_tail(omega_coeffs)))?
                };
                eos.with_delta_omega(delta_omega.unwrap_or(DEFAULT_DELTA_OMEGA))
            }
            EosConfig::Fermi { k, order, delta_omega } => {
                FermiEosParams::new(*k, c)?.to_eos(*order, delta_omega.unwrap_or(DEFAULT_DELTA_OMEGA))
            }
        }
    }
}

/// Central condition: exactly one of `rho_c`, `u_c`, or the pair
/// `alpha`/`beta` (which fixes Λ as well).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub rho_c: Option<f64>,
    pub u_c: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    #[serde(rename = "Lambda", default)]
    pub lambda: f64,
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaneEmdenConfig {
    pub mu: Vec<f64>,
    #[serde(default = "default_le_lambda")]
    pub lambda: Vec<f64>,
    #[serde(default = "default_le_cap")]
    pub r_cap: f64,
}

fn default_le_lambda() -> Vec<f64> {
    vec![0.0]
}

fn default_le_cap() -> f64 {
    1e4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default)]
    pub format: OutputFormat,
    pub out: Option<String>,
    pub jobs: Option<usize>,
    pub eos: Option<EosConfig>,
    pub model: Option<ModelConfig>,
    pub sweep: Option<SweepConfig>,
    pub lane_emden: Option<LaneEmdenConfig>,
    #[serde(default)]
    pub tolerances: StepControl,
    #[serde(default)]
    pub options: SolveOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            units: UnitSystem::default(),
            format: OutputFormat::default(),
            out: None,
            jobs: None,
            eos: None,
            model: None,
            sweep: None,
            lane_emden: None,
            tolerances: StepControl::default(),
            options: SolveOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))?;
        cfg.tolerances.validate().map_err(ConfigError::Invalid)?;
        if cfg.jobs == Some(0) {
            return Err(ConfigError::Invalid("jobs must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn eos(&self) -> Result<EosSpec, ConfigError> {
        self.eos
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("missing 'eos' block".into()))?
            .build(self.units)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn model_input(&self) -> Result<ModelInput, ConfigError> {
        let m = self
            .model
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("missing 'model' block".into()))?;
        let eos = self.eos()?;
        let k = self.units.constants();
        let input = match (m.rho_c, m.u_c, m.alpha, m.beta) {
            (Some(rho), None, None, None) => ModelInput::from_density(rho, m.lambda, eos, k),
            (None, Some(u), None, None) => ModelInput::from_enthalpy(u, m.lambda, eos, k),
            (None, None, Some(a), Some(b)) => {
                if m.lambda != 0.0 {
                    return Err(ConfigError::Invalid("'Lambda' is fixed by 'beta'; give only one".into()));
                }
                ModelInput::from_scaled(a, b, eos, k).map_err(|e| ConfigError::Invalid(e.to_string()))?
            }
            _ => {
                return Err(ConfigError::Invalid(
                    "model needs exactly one of 'rho_c', 'u_c' or the pair 'alpha'/'beta'".into(),
                ))
            }
        };
        let input = input.with_ctrl(self.tolerances).with_options(self.options);
        Ok(match m.r_max {
            Some(r) => input.with_r_max(r),
            None => input,
        })
    }

    pub fn sweep(&self) -> Result<&SweepConfig, ConfigError> {
        self.sweep
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("missing 'sweep' block".into()))
    }

    pub fn lane_emden(&self) -> Result<&LaneEmdenConfig, ConfigError> {
        self.lane_emden
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("missing 'lane_emden' block".into()))
    }
}
