use std::path::Path;

use serde::Deserialize;

use roofopt_core::elasticity::{green_residual, Displacement};
use roofopt_core::geometry::Point2;
use roofopt_core::report::Report;

use crate::config::{self, GeometryConfig, OutputConfig};
use crate::{CliError, Outcome};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GreenConfig {
    threads: Option<usize>,
    geometry: GeometryConfig,
    refinements: usize,
    /// Residual cap for the constant-field / linear-weight case.
    threshold: f64,
    output: OutputConfig,
}

pub fn run(path: &Path) -> Result<Outcome, CliError> {
    let cfg: GreenConfig = config::load(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    cfg.geometry.validate(&base)?;
    if !(cfg.threshold > 0.0) {
        return Err(CliError::Config("threshold must be positive".into()));
    }
    if cfg.refinements == 0 || cfg.refinements > 4 {
        return Err(CliError::Config("refinements must lie in 1..=4".into()));
    }
    let out_dir = cfg.output.prepare(&base)?;
    config::configure_threads(cfg.threads)?;

    let base_mesh = cfg.geometry.build_mesh(&base)?;
    let mut report = Report::new();

    // Exact case: constant field against a linear weight.
    let u_const = Displacement::interpolate(&base_mesh, |_| [0.8, -0.4]);
    let w_linear: Vec<f64> = base_mesh
        .nodes()
        .iter()
        .map(|p| 1.5 * p.x - 0.7 * p.y + 0.2)
        .collect();
    let exact_case = green_residual(&base_mesh, &u_const, &w_linear);
    report.push("constant_linear_residual", exact_case);
    let exact_ok = exact_case <= cfg.threshold;

    // Smooth interpolants: residual must decay at first order or better.
    let field = |p: Point2| [(1.7 * p.x).sin() * (0.9 * p.y).cos(), (p.x + 0.5 * p.y).cos()];
    let weight = |p: Point2| (1.1 * p.x).cos() * (0.8 * p.y + 0.1).sin();
    let mut mesh = base_mesh;
    let mut residuals = Vec::new();
    for level in 0..=cfg.refinements {
        let u = Displacement::interpolate(&mesh, field);
        let w: Vec<f64> = mesh.nodes().iter().map(|&p| weight(p)).collect();
        let r = green_residual(&mesh, &u, &w);
        report.push(&format!("smooth_residual_{level}"), r);
        residuals.push(r);
        if level < cfg.refinements {
            mesh = mesh.refine();
        }
    }
    let mut min_rate = f64::INFINITY;
    for w in residuals.windows(2) {
        let rate = (w[0] / w[1]).log2();
        min_rate = min_rate.min(rate);
    }
    report.push("min_refinement_rate", min_rate);
    let rate_ok = min_rate >= 1.0;

    report.push("exact_case_ok", exact_ok);
    report.push("rate_ok", rate_ok);
    let passed = exact_ok && rate_ok;
    report.push("passed", passed);
    report.write(&out_dir.join("report.txt"))?;
    println!("{}", report.render().trim_end());

    if passed {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail("green identity residual out of contract".into()))
    }
}
