//! Run configuration: one JSON document, every field defaulted.

use std::path::{Path, PathBuf};

use nsfwave_core::gas::ContactBranch;
use nsfwave_core::solver::{Perturbation, SolverConfig};
use nsfwave_core::{GasParams, PrimState, WaveStrengths};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub h: f64,
    /// Both ends must be given to override the automatic domain.
    pub xi_min: Option<f64>,
    pub xi_max: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            h: 0.1,
            xi_min: None,
            xi_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSpec {
    pub rarefaction_times: Vec<f64>,
    pub rarefaction_points: usize,
    pub contact_half_width: f64,
    pub contact_points: usize,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self {
            rarefaction_times: vec![0.0, 10.0, 100.0],
            rarefaction_points: 2001,
            contact_half_width: 20.0,
            contact_points: 4001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub gas: GasParams,
    pub plus_state: PrimState,
    pub strengths: WaveStrengths,
    pub contact_branch: ContactBranch,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub perturbation: Perturbation,
    pub profile: ProfileSpec,
    pub seed: u64,
    /// Demand the Poincare inequality the wrong way round (the suite must then fail).
    pub reversed_poincare: bool,
    /// Overridden by `--out`; not part of the hash.
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gas: GasParams::baseline(),
            plus_state: PrimState::new(1.0, 0.0, 1.0),
            strengths: WaveStrengths::new(0.1, 0.1, 0.1),
            contact_branch: ContactBranch::default(),
            grid: GridSpec::default(),
            solver: SolverConfig::default(),
            perturbation: Perturbation::default(),
            profile: ProfileSpec::default(),
            seed: 42,
            reversed_poincare: false,
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let cfg: RunConfig = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        let e = |x: nsfwave_core::NsfError| x.to_string();
        self.gas.validate().map_err(e)?;
        self.plus_state.validate().map_err(e)?;
        self.strengths.validate().map_err(e)?;
        self.solver.validate().map_err(e)?;
        self.perturbation.validate().map_err(e)?;
        if !(self.grid.h > 0.0 && self.grid.h.is_finite()) {
            return Err(format!("grid.h = {} must be positive", self.grid.h));
        }
        match (self.grid.xi_min, self.grid.xi_max) {
            (None, None) => {}
            (Some(a), Some(b)) if a < b => {}
            (Some(_), Some(_)) => return Err("grid.xi_min must be below grid.xi_max".into()),
            _ => return Err("grid.xi_min and grid.xi_max go together".into()),
        }
        let p = &self.profile;
        if p.rarefaction_points < 2 || p.contact_points < 5 || !p.contact_half_width.is_finite() || p.contact_half_width <= 0.0 {
            return Err("profile sampling too coarse".into());
        }
        if p.rarefaction_times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err("profile.rarefaction_times must be finite and nonnegative".into());
        }
        Ok(())
    }

    /// Canonical JSON (sorted keys, output directory dropped).
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        serde_json::to_value(&c).expect("config serializes").to_string()
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
