//! Experiment configuration: one flat JSON document per experiment.
//!
//! Every key is optional; missing values fall back to the medium-instance
//! presets. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use gantry_ga::{Algorithm, GaParams, ProblemSpec, ScoreTable};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Per-algorithm overrides of the shared GA settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoOverrides {
    pub n_ini: Option<usize>,
    pub n_max: Option<usize>,
    pub r_s: Option<f64>,
    pub r_c: Option<f64>,
    pub r_m: Option<f64>,
    pub r_r: Option<f64>,
    pub g_max: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_g: usize,
    pub n_p: usize,
    pub n_t: usize,
    pub r_s: f64,
    pub r_c: f64,
    pub r_m: f64,
    pub r_r: f64,
    pub g_max: usize,
    pub seed: u64,
    pub classical: AlgoOverrides,
    pub quantum: AlgoOverrides,
    pub scores: ScoreTable,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = GaParams::medium_classical();
        let q = GaParams::medium_quantum();
        Self {
            n_g: 3,
            n_p: 12,
            n_t: 108,
            r_s: c.r_s,
            r_c: c.r_c,
            r_m: c.r_m,
            r_r: c.r_r,
            g_max: c.g_max,
            seed: c.seed,
            classical: AlgoOverrides {
                n_ini: Some(c.n_ini),
                n_max: Some(c.n_max),
                ..Default::default()
            },
            quantum: AlgoOverrides {
                n_ini: Some(q.n_ini),
                n_max: Some(q.n_max),
                ..Default::default()
            },
            scores: ScoreTable::default(),
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Parses and validates; serde diagnostics carry line and column.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.spec()?;
        self.scores.validate()?;
        for alg in [Algorithm::Classical, Algorithm::Quantum] {
            self.params(alg).validate().map_err(|e| {
                CliError::Config(format!("{alg}: {e}"))
            })?;
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<ProblemSpec, CliError> {
        Ok(ProblemSpec::new(self.n_g, self.n_p, self.n_t)?)
    }

    /// Shared settings with the algorithm's overrides applied.
    pub fn params(&self, alg: Algorithm) -> GaParams {
        let o = match alg {
            Algorithm::Classical => &self.classical,
            Algorithm::Quantum => &self.quantum,
        };
        let preset = match alg {
            Algorithm::Classical => GaParams::medium_classical(),
            Algorithm::Quantum => GaParams::medium_quantum(),
        };
        GaParams {
            r_s: o.r_s.unwrap_or(self.r_s),
            r_c: o.r_c.unwrap_or(self.r_c),
            r_m: o.r_m.unwrap_or(self.r_m),
            r_r: o.r_r.unwrap_or(self.r_r),
            n_ini: o.n_ini.unwrap_or(preset.n_ini),
            n_max: o.n_max.unwrap_or(preset.n_max),
            g_max: o.g_max.unwrap_or(self.g_max),
            seed: self.seed,
        }
    }
}
