use std::path::Path;

use serde::Deserialize;

use roofopt_core::elasticity::{estimate_korn_constant, estimate_poincare_constant};
use roofopt_core::mesh::{BoundaryTag, TagFilter};
use roofopt_core::report::Report;

use crate::config::{self, GeometryConfig, OutputConfig};
use crate::{CliError, Outcome};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KornConfig {
    threads: Option<usize>,
    geometry: GeometryConfig,
    /// Number of uniform refinements after the base mesh.
    refinements: usize,
    output: OutputConfig,
}

pub fn run(path: &Path) -> Result<Outcome, CliError> {
    let cfg: KornConfig = config::load(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    cfg.geometry.validate(&base)?;
    if cfg.refinements > 4 {
        return Err(CliError::Config("refinements capped at 4".into()));
    }
    let out_dir = cfg.output.prepare(&base)?;
    config::configure_threads(cfg.threads)?;

    let dirichlet = TagFilter::Only(BoundaryTag::Dir);
    let mut mesh = cfg.geometry.build_mesh(&base)?;
    let mut report = Report::new();
    let mut korn_values = Vec::new();
    for level in 0..=cfg.refinements {
        let c_k = estimate_korn_constant(&mesh, dirichlet)?;
        let c_p = estimate_poincare_constant(&mesh, dirichlet)?;
        report.push(&format!("korn_{level}"), c_k);
        report.push(&format!("poincare_{level}"), c_p);
        report.push(&format!("nodes_{level}"), mesh.num_nodes());
        korn_values.push(c_k);
        if level < cfg.refinements {
            mesh = mesh.refine();
        }
    }

    let in_range = korn_values.iter().all(|c| *c > 0.0 && *c <= 1.0);
    let nonincreasing = korn_values
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-6));
    report.push("korn_in_unit_interval", in_range);
    report.push("korn_nonincreasing", nonincreasing);
    let passed = in_range && nonincreasing;
    report.push("passed", passed);
    report.write(&out_dir.join("report.txt"))?;
    println!("{}", report.render().trim_end());

    if passed {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail("korn constants out of contract".into()))
    }
}
