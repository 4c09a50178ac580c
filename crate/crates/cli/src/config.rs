//! TOML run configurations. Every struct rejects unknown keys and every
//! load path validates ranges and referenced files before any computation
//! starts.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use roofopt_core::elasticity::MaterialModel;
use roofopt_core::functional::FunctionalWeights;
use roofopt_core::geometry::{ConeSampling, Polygon};
use roofopt_core::mesh::{read_mesh, Mesh};
use roofopt_core::shapeopt::{AdmissibleClassConfig, RoofShape};

use crate::CliError;

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn ensure(cond: bool, message: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(message.to_string()))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum GeometryConfig {
    Roof {
        /// Lower-curve knot heights over uniform knots.
        theta: Vec<f64>,
        /// Footprint interval `[x0, x1]`.
        footprint: [f64; 2],
        volume: f64,
        resolution: f64,
    },
    Mesh {
        path: PathBuf,
    },
}

impl GeometryConfig {
    pub fn validate(&self, base: &Path) -> Result<(), CliError> {
        match self {
            GeometryConfig::Roof {
                theta,
                footprint,
                volume,
                resolution,
            } => {
                ensure(theta.len() >= 2, "geometry.theta needs at least two knots")?;
                ensure(footprint[1] > footprint[0], "geometry.footprint must be increasing")?;
                ensure(*volume > 0.0, "geometry.volume must be positive")?;
                ensure(*resolution > 0.0, "geometry.resolution must be positive")?;
            }
            GeometryConfig::Mesh { path } => {
                let resolved = resolve(base, path);
                ensure(
                    resolved.is_file(),
                    &format!("geometry.path does not exist: {}", resolved.display()),
                )?;
            }
        }
        Ok(())
    }

    pub fn build_mesh(&self, base: &Path) -> Result<Mesh, CliError> {
        match self {
            GeometryConfig::Roof {
                theta,
                footprint,
                volume,
                resolution,
            } => {
                let shape =
                    RoofShape::new(footprint[0], footprint[1] - footprint[0], theta.clone(), *volume)?;
                Ok(shape.build_mesh(*resolution)?)
            }
            GeometryConfig::Mesh { path } => Ok(read_mesh(&resolve(base, path))?),
        }
    }
}

/// Paths inside a config file resolve relative to the file's directory.
pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum MaterialConfig {
    Scalar { a: f64 },
    Lame { lambda: f64, mu: f64 },
}

impl MaterialConfig {
    pub fn build(&self) -> Result<MaterialModel, CliError> {
        Ok(match self {
            MaterialConfig::Scalar { a } => MaterialModel::scalar_constant(*a)?,
            MaterialConfig::Lame { lambda, mu } => MaterialModel::lame_constants(*lambda, *mu)?,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadsConfig {
    pub rho0: f64,
    pub snow: f64,
    #[serde(default = "default_gravity")]
    pub gravity: [f64; 2],
}

fn default_gravity() -> [f64; 2] {
    [0.0, -1.0]
}

impl LoadsConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        ensure(self.rho0 > 0.0, "loads.rho0 must be positive")?;
        ensure(self.snow >= 0.0, "loads.snow must be nonnegative")
    }

    pub fn to_core(&self) -> roofopt_core::shapeopt::LoadConfig {
        roofopt_core::shapeopt::LoadConfig {
            rho0: self.rho0,
            snow: self.snow,
            gravity: self.gravity,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub c1: f64,
    pub c2: f64,
}

impl WeightsConfig {
    pub fn build(&self) -> Result<FunctionalWeights, CliError> {
        Ok(FunctionalWeights::new(self.c1, self.c2)?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        ensure(self.tol > 0.0 && self.tol < 1.0, "solver.tol must lie in (0, 1)")
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl OutputConfig {
    pub fn prepare(&self, base: &Path) -> Result<PathBuf, CliError> {
        let dir = resolve(base, &self.dir);
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(dir)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSamplingConfig {
    pub boundary_step: Option<f64>,
    pub directions: Option<usize>,
    pub cone_samples: Option<usize>,
    pub ball_rings: Option<usize>,
    pub ball_sectors: Option<usize>,
}

impl ConeSamplingConfig {
    pub fn apply(&self, mut sampling: ConeSampling) -> ConeSampling {
        if self.boundary_step.is_some() {
            sampling.boundary_step = self.boundary_step;
        }
        if let Some(v) = self.directions {
            sampling.directions = v;
        }
        if let Some(v) = self.cone_samples {
            sampling.cone_samples = v;
        }
        if let Some(v) = self.ball_rings {
            sampling.ball_rings = v;
        }
        if let Some(v) = self.ball_sectors {
            sampling.ball_sectors = v;
        }
        sampling
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassConfig {
    /// Container box `[x0, y0, x1, y1]`.
    pub container: [f64; 4],
    /// Constraint box for the lower curve.
    pub region: [f64; 4],
    /// Pinned end heights at the clamped walls.
    pub pinned: [f64; 2],
    pub epsilon: f64,
    pub volume: f64,
    pub length_bounds: [f64; 2],
    pub chat: f64,
    pub cone: Option<ConeSamplingConfig>,
}

impl ClassConfig {
    pub fn build(&self) -> Result<AdmissibleClassConfig, CliError> {
        let [cx0, cy0, cx1, cy1] = self.container;
        let [rx0, ry0, rx1, ry1] = self.region;
        let container = Polygon::rectangle(cx0, cy0, cx1, cy1)?;
        let region = Polygon::rectangle(rx0, ry0, rx1, ry1)?;
        let mut cfg = AdmissibleClassConfig::boxed(
            container,
            region,
            (self.pinned[0], self.pinned[1]),
            self.epsilon,
            self.volume,
            (self.length_bounds[0], self.length_bounds[1]),
            self.chat,
        )?;
        if let Some(cone) = &self.cone {
            cfg.cone_sampling = cone.apply(cfg.cone_sampling);
        }
        Ok(cfg)
    }
}

pub fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        roofopt_core::exec::configure_threads(n)?;
    }
    Ok(())
}
