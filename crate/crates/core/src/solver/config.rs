use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::materials::{MaterialError, MaterialModel};

/// Snapshot spacing of the published data set, s.
pub const SNAPSHOT_DT: f64 = 2.5e-12;
/// Pixel size of the published data set, m.
pub const CELL_SIZE: f64 = 1.1719e-9;
pub const GRID_NX: usize = 128;
pub const GRID_NY: usize = 256;
/// Initial pore diameter, m.
pub const PORE_DIAMETER: f64 = 50e-9;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config value {key}: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error(transparent)]
    Material(#[from] MaterialError),
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, reason: reason.into() }
}

/// Domain boundary condition for the hydrodynamic update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Rigid reflecting wall: mirrored ghost with the normal velocity negated.
    Wall,
    /// Copy of the edge cell.
    ZeroGradient,
    /// Copy of the edge cell while flow leaves the domain, mirror image while
    /// it would enter, so nothing flows in.
    Outflow,
    /// Wrap to the opposite side.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConductionIntegrator {
    Euler,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    pub nx: usize,
    pub ny: usize,
    /// Cell size, m.
    pub dx: f64,
    /// Impact speed toward the wall at y = 0, m/s.
    pub impact_velocity: f64,
    /// Initial temperature of the material block, K.
    pub initial_temperature: f64,
    /// Pore diameter, m. Zero disables the pore.
    pub pore_diameter: f64,
    /// Pore centre `[x, y]`, m. Defaults to the horizontal centre at half the block height.
    pub pore_center: Option<[f64; 2]>,
    /// Block height as a fraction of the domain height; vacuum fills the rest.
    pub block_height_fraction: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            nx: GRID_NX,
            ny: GRID_NY,
            dx: CELL_SIZE,
            impact_velocity: 1800.0,
            initial_temperature: 298.0,
            pore_diameter: PORE_DIAMETER,
            pore_center: None,
            block_height_fraction: 0.85,
        }
    }
}

impl Geometry {
    pub fn width(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn height(&self) -> f64 {
        self.ny as f64 * self.dx
    }

    pub fn block_height(&self) -> f64 {
        self.block_height_fraction * self.height()
    }

    pub fn pore_center(&self) -> [f64; 2] {
        self.pore_center.unwrap_or([0.5 * self.width(), 0.5 * self.block_height()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub cfl: f64,
    /// Deviatoric strength (stress predictor and radial return).
    pub strength: bool,
    /// Minmod-limited linear reconstruction in the flux.
    pub second_order: bool,
    pub conduction: ConductionIntegrator,
    /// Energy bookkeeping audit after every step.
    pub audit: bool,
    pub boundary_west: Boundary,
    pub boundary_east: Boundary,
    pub boundary_south: Boundary,
    pub boundary_north: Boundary,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            strength: true,
            second_order: false,
            conduction: ConductionIntegrator::Euler,
            audit: false,
            boundary_west: Boundary::Outflow,
            boundary_east: Boundary::Outflow,
            boundary_south: Boundary::Wall,
            boundary_north: Boundary::Outflow,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSettings {
    /// Snapshot spacing, s.
    pub snapshot_dt: f64,
    /// Snapshots after the initial frame.
    pub n_snapshots: usize,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self { snapshot_dt: SNAPSHOT_DT, n_snapshots: 50 }
    }
}

impl OutputSettings {
    pub fn t_end(&self) -> f64 {
        self.n_snapshots as f64 * self.snapshot_dt
    }
}

/// Everything needed to reproduce one simulation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialModel,
    pub geometry: Geometry,
    pub solver: SolverSettings,
    pub output: OutputSettings,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn with_impact_velocity(mut self, v0: f64) -> Self {
        self.geometry.impact_velocity = v0;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.material.validate()?;
        let g = &self.geometry;
        if g.nx == 0 || g.ny == 0 {
            return Err(invalid("geometry.nx/ny", "grid needs at least one cell per axis"));
        }
        if !(g.dx.is_finite() && g.dx > 0.0) {
            return Err(invalid("geometry.dx", format!("{} must be positive", g.dx)));
        }
        if !(g.impact_velocity.is_finite() && g.impact_velocity >= 0.0) {
            return Err(invalid("geometry.impact_velocity", format!("{} must be >= 0", g.impact_velocity)));
        }
        if !(g.initial_temperature.is_finite() && g.initial_temperature > 0.0) {
            return Err(invalid("geometry.initial_temperature", format!("{} must be > 0", g.initial_temperature)));
        }
        if !(g.block_height_fraction > 0.0 && g.block_height_fraction <= 1.0) {
            return Err(invalid("geometry.block_height_fraction", "must lie in (0, 1]"));
        }
        if !(g.pore_diameter.is_finite() && g.pore_diameter >= 0.0) {
            return Err(invalid("geometry.pore_diameter", "must be >= 0"));
        }
        if g.pore_diameter > 0.0 {
            let [xc, yc] = g.pore_center();
            let r = 0.5 * g.pore_diameter;
            let inside = xc - r > 0.0 && xc + r < g.width() && yc - r > 0.0 && yc + r < g.block_height();
            if !inside {
                return Err(invalid("geometry.pore_center", "pore must lie strictly inside the material block"));
            }
        }
        let s = &self.solver;
        if !(s.cfl > 0.0 && s.cfl < 1.0) {
            return Err(invalid("solver.cfl", format!("{} must lie in (0, 1)", s.cfl)));
        }
        let periodic_x = [s.boundary_west, s.boundary_east].map(|b| b == Boundary::Periodic);
        let periodic_y = [s.boundary_south, s.boundary_north].map(|b| b == Boundary::Periodic);
        if periodic_x[0] != periodic_x[1] || periodic_y[0] != periodic_y[1] {
            return Err(invalid("solver.boundary", "periodic boundaries must be paired on opposite sides"));
        }
        let o = &self.output;
        if !(o.snapshot_dt.is_finite() && o.snapshot_dt > 0.0) {
            return Err(invalid("output.snapshot_dt", "must be positive"));
        }
        Ok(())
    }
}
