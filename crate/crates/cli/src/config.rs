use serde::{Deserialize, Serialize};

use ncjulia::derivative::Ladder;
use ncjulia::domain::DEFAULT_RADIAL_STEPS;
use ncjulia::numerics::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Largest accepted `‖M*M − I‖` for colligations and `δ(T)`.
    pub isometry: f64,
    /// Model identity and range residuals.
    pub residual: f64,
    /// Relative singular-value cutoff for ranks and kernels.
    pub rank: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            isometry: 1e-8,
            residual: 1e-9,
            rank: 1e-10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    /// Instances drawn by `fuzz`.
    pub fuzz: usize,
    /// Interior points per `bpoint` report.
    pub julia: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            fuzz: 1000,
            julia: 100,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LadderConfig {
    /// Derivative ladder.
    pub t0: f64,
    pub steps: usize,
    pub t_min: f64,
    /// Radial sequences `r = 1 − 2^{−k}`.
    pub radial_steps: usize,
    /// Ray sequences `T + tK`.
    pub ray_t0: f64,
    pub ray_steps: usize,
}

impl Default for LadderConfig {
    fn default() -> Self {
        let l = Ladder::default();
        Self {
            t0: l.t0,
            steps: l.steps,
            t_min: l.t_min,
            radial_steps: DEFAULT_RADIAL_STEPS,
            ray_t0: 0.5,
            ray_steps: DEFAULT_RADIAL_STEPS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tolerances: ToleranceConfig,
    pub seed: u64,
    pub samples: SampleConfig,
    pub ladder: LadderConfig,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerances: ToleranceConfig::default(),
            seed: 0,
            samples: SampleConfig::default(),
            ladder: LadderConfig::default(),
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        let t = &self.tolerances;
        for (name, v) in [
            ("isometry", t.isometry),
            ("residual", t.residual),
            ("rank", t.rank),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerance `{name}` must be positive, got {v}"));
            }
        }
        if self.samples.fuzz == 0 || self.samples.julia == 0 {
            return Err("sample counts must be at least 1".into());
        }
        let l = &self.ladder;
        if !(l.t0 > 0.0 && l.t_min > 0.0 && l.ray_t0 > 0.0) {
            return Err("ladder steps must be positive".into());
        }
        if l.steps < 2 || l.radial_steps < 2 || l.ray_steps < 2 {
            return Err("ladders need at least 2 steps".into());
        }
        Ok(())
    }

    pub fn numerics(&self) -> Tolerances {
        Tolerances {
            consistency: self.tolerances.isometry,
            rank: self.tolerances.rank,
            ..Tolerances::default()
        }
    }

    pub fn derivative_ladder(&self) -> Ladder {
        Ladder {
            t0: self.ladder.t0,
            steps: self.ladder.steps,
            t_min: self.ladder.t_min,
        }
    }
}
