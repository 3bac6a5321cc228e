//! TOML run configuration.
//!
//! Every key has a default, so an empty file is a valid configuration.
//! Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use nls_core::evolution::EvolveControls;
use nls_core::groundstate::ShootingOptions;
use nls_core::params_well::derive_exponents;
use nls_core::spectral::GridSpec;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Groundstate,
    Classify,
    Evolve,
    Sweep,
    Virial,
    GronwallSelftest,
    CutoffSelftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// `λ^{N/2} Q(λx)`.
    #[serde(rename = "scaledQ")]
    ScaledQ,
    /// `λ^{2/(p-1)} Q(λx)`.
    #[serde(rename = "scaledQ-natural")]
    ScaledQNatural,
    #[serde(rename = "gaussian")]
    Gaussian,
    #[serde(rename = "file")]
    File,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "scaledQ" => Ok(Family::ScaledQ),
            "scaledQ-natural" => Ok(Family::ScaledQNatural),
            "gaussian" => Ok(Family::Gaussian),
            "file" => Ok(Family::File),
            other => Err(format!(
                "unknown family `{other}` (scaledQ, scaledQ-natural, gaussian, file)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub extent: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            extent: 10.0,
            points: 4096,
        }
    }
}

/// Time-stepping controls. Same fields as [`EvolveControls`], with
/// defaults suited to the 1D, p = 7 dichotomy runs; a partial `[controls]`
/// table falls back to these, not to the library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlsConfig {
    pub dt: f64,
    pub t_end: f64,
    pub checkpoint_every: usize,
    pub blowup_gradient_factor: f64,
    pub resolution_fraction: f64,
    /// Upper bound on `|u|^{p-1} dt` per substep; absent means no substeps.
    pub max_phase_per_step: Option<f64>,
}

impl Default for ControlsConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            t_end: 5.0,
            checkpoint_every: 100,
            blowup_gradient_factor: 10.0,
            resolution_fraction: 1e-3,
            max_phase_per_step: Some(0.01),
        }
    }
}

impl From<ControlsConfig> for EvolveControls {
    fn from(c: ControlsConfig) -> Self {
        EvolveControls {
            dt: c.dt,
            t_end: c.t_end,
            checkpoint_every: c.checkpoint_every,
            blowup_gradient_factor: c.blowup_gradient_factor,
            resolution_fraction: c.resolution_fraction,
            max_phase_per_step: c.max_phase_per_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialData {
    pub family: Family,
    pub lambda: f64,
    /// Gaussian amplitude.
    pub amplitude: f64,
    /// Gaussian width `w` in `e^{-|x|²/w²}`.
    pub width: f64,
    /// Gaussian carrier wave vector (missing components are 0).
    pub velocity: Vec<f64>,
    /// Field file for `family = "file"`.
    pub path: Option<PathBuf>,
}

impl Default for InitialData {
    fn default() -> Self {
        Self {
            family: Family::ScaledQ,
            lambda: 0.9,
            amplitude: 0.5,
            width: 1.0,
            velocity: Vec::new(),
            path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub lambdas: Vec<f64>,
    /// Evenly spaced values, appended after `lambdas`.
    pub range: Option<LambdaRange>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![0.5, 0.7, 0.9, 1.1, 1.3, 1.5],
            range: None,
        }
    }
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        let mut out = self.lambdas.clone();
        if let Some(r) = self.range {
            match r.count {
                0 => {}
                1 => out.push(r.start),
                n => out.extend(
                    (0..n).map(|i| r.start + (r.stop - r.start) * i as f64 / (n - 1) as f64),
                ),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VirialConfig {
    /// Localization radius; when absent, `radius_factor` times the RMS
    /// radius of the initial data.
    pub radius: Option<f64>,
    pub radius_factor: f64,
}

impl Default for VirialConfig {
    fn default() -> Self {
        Self {
            radius: None,
            radius_factor: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Pohozaev,
    Gn,
    Cutoff,
    Gronwall,
    Conservation,
    VirialFd,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Pohozaev,
        Suite::Gn,
        Suite::Cutoff,
        Suite::Gronwall,
        Suite::Conservation,
        Suite::VirialFd,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Pohozaev => "pohozaev",
            Suite::Gn => "gn",
            Suite::Cutoff => "cutoff",
            Suite::Gronwall => "gronwall",
            Suite::Conservation => "conservation",
            Suite::VirialFd => "virial-fd",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelftestConfig {
    pub suites: Vec<Suite>,
    pub gronwall_instances: usize,
    pub cutoff_fields: usize,
    pub gn_fields: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            gronwall_instances: 100,
            cutoff_fields: 200,
            gn_fields: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub dim: usize,
    pub p: f64,
    /// Coefficient of the power term: 1 is the focusing equation, 0 the
    /// free Schrödinger flow.
    pub coupling: f64,
    /// Experiment run when no subcommand is given.
    pub experiment: Experiment,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads for sweeps; 0 lets the pool decide.
    pub jobs: usize,
    pub grid: GridConfig,
    pub controls: ControlsConfig,
    pub initial: InitialData,
    pub sweep: SweepConfig,
    pub shooting: ShootingOptions,
    pub virial: VirialConfig,
    pub selftest: SelftestConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            p: 7.0,
            coupling: 1.0,
            experiment: Experiment::Classify,
            seed: 0,
            output_dir: PathBuf::from("atlas-out"),
            jobs: 0,
            grid: GridConfig::default(),
            controls: ControlsConfig::default(),
            initial: InitialData::default(),
            sweep: SweepConfig::default(),
            shooting: ShootingOptions::default(),
            virial: VirialConfig::default(),
            selftest: SelftestConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::Config(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn evolve_controls(&self) -> EvolveControls {
        self.controls.into()
    }

    pub fn grid_spec(&self) -> Result<GridSpec, Failure> {
        GridSpec::new(self.dim, self.grid.extent, self.grid.points).map_err(Failure::from)
    }

    /// Checks everything that does not need a solver.
    pub fn validate(&self) -> Result<(), Failure> {
        derive_exponents(self.dim, self.p)?;
        self.grid_spec()?;
        self.evolve_controls().validate()?;
        if !self.coupling.is_finite() {
            return Err(Failure::Config("coupling must be finite".into()));
        }
        if self.initial.velocity.len() > 3 {
            return Err(Failure::Config(
                "velocity has more than 3 components".into(),
            ));
        }
        if !(self.initial.lambda > 0.0) {
            return Err(Failure::Config(format!(
                "lambda must be positive, got {}",
                self.initial.lambda
            )));
        }
        if self.sweep.values().iter().any(|l| !(*l > 0.0)) {
            return Err(Failure::Config("sweep values must be positive".into()));
        }
        Ok(())
    }
}
