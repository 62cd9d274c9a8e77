use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::flow::FlowControls;
use crate::geometry::StaticTriple;
use crate::grid::RadialGrid;
use crate::solutions::{self, PerturbationSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Flow,
    Expand,
    Residual,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<RadialGrid, CliError> {
        RadialGrid::new(self.r_min, self.r_max, self.count).map_err(CliError::from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Ads,
    SchwarzschildAds,
    Perturbed,
}

/// Radial coordinate of the Schwarzschild-AdS fixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    #[default]
    AreaRadius,
    Geodesic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: InitialKind,
    #[serde(default)]
    pub mass: Option<f64>,
    /// Sweep over several masses; one output per entry, in this order.
    #[serde(default)]
    pub masses: Option<Vec<f64>>,
    #[serde(default)]
    pub chart: Chart,
    #[serde(default)]
    pub perturbation: Option<PerturbationSpec>,
}

impl InitialConfig {
    pub fn masses(&self) -> Vec<f64> {
        match (&self.masses, self.mass) {
            (Some(ms), _) => ms.clone(),
            (None, Some(m)) => vec![m],
            (None, None) => vec![0.0],
        }
    }

    /// Builds the fixture for one mass. `perturbed` perturbs AdS, or
    /// Schwarzschild-AdS when a positive mass is given.
    pub fn build(&self, n: usize, grid: RadialGrid, mass: f64) -> Result<StaticTriple, CliError> {
        let vacuum = |mass: f64| -> Result<StaticTriple, CliError> {
            let t = match (mass == 0.0, self.chart) {
                (true, _) => solutions::ads(n, grid)?,
                (false, Chart::AreaRadius) => solutions::schwarzschild_ads(n, mass, grid)?,
                (false, Chart::Geodesic) => solutions::schwarzschild_ads_geodesic(n, mass, grid)?,
            };
            Ok(t)
        };
        match self.kind {
            InitialKind::Ads => {
                if mass != 0.0 {
                    return Err(CliError::Config("initial.kind = ads takes no mass".into()));
                }
                vacuum(0.0)
            }
            InitialKind::SchwarzschildAds => {
                if self.mass.is_none() && self.masses.is_none() {
                    return Err(CliError::Config("initial.mass is required for schwarzschild_ads".into()));
                }
                vacuum(mass)
            }
            InitialKind::Perturbed => {
                let p = self.perturbation.as_ref().ok_or_else(|| {
                    CliError::Config("initial.perturbation is required for perturbed".into())
                })?;
                Ok(solutions::perturb(&vacuum(mass)?, p)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionConfig {
    pub scal: f64,
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    /// Keep every k-th monitor sample in flow output (the last one is always kept).
    #[serde(default = "OutputConfig::default_every")]
    pub every: usize,
}

impl OutputConfig {
    fn default_every() -> usize {
        1
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: None,
            format: None,
            every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    pub n: usize,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub initial: Option<InitialConfig>,
    #[serde(default)]
    pub flow: Option<FlowControls>,
    #[serde(default)]
    pub expansion: Option<ExpansionConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn grid(&self) -> Result<RadialGrid, CliError> {
        self.grid
            .as_ref()
            .ok_or_else(|| CliError::Config("missing field `grid`".into()))?
            .build()
    }

    pub fn initial(&self) -> Result<&InitialConfig, CliError> {
        self.initial
            .as_ref()
            .ok_or_else(|| CliError::Config("missing field `initial`".into()))
    }

    /// Checks that the fields the command needs are present and valid.
    pub fn validate(&self, command: Command) -> Result<(), CliError> {
        if let Some(c) = self.command {
            if c != command {
                return Err(CliError::Config(format!(
                    "config is for `{c:?}` but `{command:?}` was requested"
                )));
            }
        }
        if self.n < 3 {
            return Err(crate::Error::Dimension(self.n).into());
        }
        if self.output.every == 0 {
            return Err(CliError::Config("output.every must be positive".into()));
        }
        match command {
            Command::Flow => {
                self.grid()?;
                self.initial()?;
                self.flow
                    .as_ref()
                    .ok_or_else(|| CliError::Config("missing field `flow`".into()))?
                    .validate()?;
            }
            Command::Residual | Command::Verify => {
                self.grid()?;
                self.initial()?;
            }
            Command::Expand => {
                if self.expansion.is_none() {
                    return Err(CliError::Config("missing field `expansion`".into()));
                }
            }
        }
        Ok(())
    }
}
