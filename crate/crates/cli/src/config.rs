//! Run configuration: a TOML file mirroring the command-line flags. Flags win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::report::Format;

/// Per-family tolerances. Every check compares its largest residual against one of these.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Exact algebra (Clifford relations, eigenvalues).
    pub algebraic: f64,
    /// Riemann symmetries and first Bianchi.
    pub symmetry: f64,
    /// `|∇ω|² = ½|∇J|²`.
    pub ratio: f64,
    /// Pointwise curvature identities from order-2 jets.
    pub pointwise: f64,
    /// Identities needing order-3 jets or several derived tensors.
    pub derived: f64,
    /// Spinor and spin^c connection identities.
    pub spinor: f64,
    /// Allowed negative part of a nonnegative quantity.
    pub slack: f64,
    /// Relative tolerance of integrated mass comparisons.
    pub mass: f64,
    /// Mass scale below which `mass` is applied as an absolute tolerance.
    pub mass_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { algebraic: 1e-12, symmetry: 1e-9, ratio: 1e-10, pointwise: 1e-8, derived: 1e-7, spinor: 1e-6, slack: 1e-9, mass: 0.01, mass_floor: 0.2 }
    }
}

impl Tolerances {
    /// Sets one family by name.
    pub fn set(&mut self, family: &str, value: f64) -> Result<(), CliError> {
        let slot = match family {
            "algebraic" => &mut self.algebraic,
            "symmetry" => &mut self.symmetry,
            "ratio" => &mut self.ratio,
            "pointwise" => &mut self.pointwise,
            "derived" => &mut self.derived,
            "spinor" => &mut self.spinor,
            "slack" => &mut self.slack,
            "mass" => &mut self.mass,
            "mass_floor" => &mut self.mass_floor,
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown tolerance family `{family}`; valid: algebraic, symmetry, ratio, pointwise, derived, spinor, slack, mass, mass_floor"
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    /// Absolute tolerance for a mass-scale comparison.
    pub fn mass_abs(&self, scale: f64) -> f64 {
        self.mass * scale.abs().max(self.mass_floor)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let all = [self.algebraic, self.symmetry, self.ratio, self.pointwise, self.derived, self.spinor, self.slack, self.mass, self.mass_floor];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(CliError::Usage("tolerances must be positive".into()))
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `catalog-list`, `curvature`, `verify-identities`, `verify-curvature`, `mass`,
    /// `mass-formula`, `blair` or `penrose`.
    pub command: Option<String>,
    pub metric: Option<String>,
    pub params: BTreeMap<String, f64>,
    pub point: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub degree: Option<usize>,
    pub rmax: Option<f64>,
    pub method: Option<String>,
    pub tolerances: Option<Tolerances>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub timings: Option<bool>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        let mut params = base.params;
        params.extend(self.params);
        RunConfig {
            command: self.command.or(base.command),
            metric: self.metric.or(base.metric),
            params,
            point: self.point.or(base.point),
            seed: self.seed.or(base.seed),
            samples: self.samples.or(base.samples),
            radii: self.radii.or(base.radii),
            degree: self.degree.or(base.degree),
            rmax: self.rmax.or(base.rmax),
            method: self.method.or(base.method),
            tolerances: self.tolerances.or(base.tolerances),
            format: self.format.or(base.format),
            output: self.output.or(base.output),
            timings: self.timings.or(base.timings),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = &self.tolerances {
            t.validate()?;
        }
        if let Some(r) = &self.radii {
            if r.windows(2).any(|w| w[1] <= w[0]) || r.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(CliError::Usage("radii must be positive and strictly increasing".into()));
            }
        }
        Ok(())
    }

    pub fn metric_name(&self) -> Result<&str, CliError> {
        self.metric.as_deref().ok_or_else(|| CliError::Usage("--metric is required".into()))
    }

    pub fn param_list(&self) -> Vec<(String, f64)> {
        self.params.iter().map(|(k, v)| (k.clone(), *v)).collect()
    }
}
