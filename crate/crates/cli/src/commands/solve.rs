use std::path::Path;

use serde::Deserialize;

use roofopt_core::elasticity::{
    apriori_check, assemble, load_work, material_strain_form, solve, LoadSpec, Traction,
};
use roofopt_core::functional::energy_functional;
use roofopt_core::mesh::{write_vtk, BoundaryTag, TagFilter};
use roofopt_core::report::Report;
use roofopt_core::shapeopt::{self, RoofShape};

use crate::config::{
    self, GeometryConfig, LoadsConfig, MaterialConfig, OutputConfig, SolverConfig, WeightsConfig,
};
use crate::{CliError, Outcome};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveConfig {
    threads: Option<usize>,
    geometry: GeometryConfig,
    material: MaterialConfig,
    loads: LoadsConfig,
    weights: WeightsConfig,
    solver: SolverConfig,
    output: OutputConfig,
}

pub fn run(path: &Path) -> Result<Outcome, CliError> {
    let cfg: SolveConfig = config::load(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();

    // Fail-fast validation before any computation.
    cfg.geometry.validate(&base)?;
    cfg.loads.validate()?;
    cfg.solver.validate()?;
    let material = cfg.material.build()?;
    let weights = cfg.weights.build()?;
    let out_dir = cfg.output.prepare(&base)?;
    config::configure_threads(cfg.threads)?;

    let mesh = cfg.geometry.build_mesh(&base)?;

    // Self-weight needs the thickness; mesh-file geometries fall back to a
    // direct body force rho0 * gravity.
    let weight_scale = match &cfg.geometry {
        GeometryConfig::Roof {
            theta,
            footprint,
            volume,
            ..
        } => {
            let shape = RoofShape::new(
                footprint[0],
                footprint[1] - footprint[0],
                theta.clone(),
                *volume,
            )?;
            cfg.loads.rho0 * shape.thickness()
        }
        GeometryConfig::Mesh { .. } => cfg.loads.rho0,
    };
    let body = roofopt_core::elasticity::BodyForce::Constant([
        weight_scale * cfg.loads.gravity[0],
        weight_scale * cfg.loads.gravity[1],
    ]);
    let traction = shapeopt::snow_load(cfg.loads.snow, BoundaryTag::Up)?;
    let neumann = mesh.boundary_measure(TagFilter::Only(BoundaryTag::Up))?;
    let load = LoadSpec {
        body,
        traction: if cfg.loads.snow == 0.0 {
            Traction::Zero
        } else {
            traction
        },
        neumann: Some(neumann),
    };

    let sys = assemble(&mesh, &material, &load, TagFilter::Only(BoundaryTag::Dir), None)?;
    let (displacement, stats) = solve(&sys, cfg.solver.tol)?;

    let j = energy_functional(&mesh, &material, &displacement, weights);
    let compliance = material_strain_form(&mesh, &material, &displacement);
    let work = load_work(&mesh, &load, &displacement);
    let work_residual = (compliance - work).abs() / compliance.abs().max(1e-30);
    let apriori = apriori_check(&mesh, &displacement, &load, f64::INFINITY);

    write_vtk(
        &out_dir.join("solution.vtk"),
        &mesh,
        Some(("displacement", displacement.values())),
    )?;

    let mut report = Report::new();
    report.push("nodes", mesh.num_nodes());
    report.push("triangles", mesh.triangles().len());
    report.push("J", j);
    report.push("compliance", compliance);
    report.push("load_work", work);
    report.push("work_identity_residual", work_residual);
    report.push("u_w12_norm", apriori.u_norm);
    report.push("data_norm", apriori.f_norm + apriori.g_norm);
    report.push("apriori_ratio", apriori.ratio);
    report.push("solver_iterations", stats.iterations);
    report.push("solver_relative_residual", stats.relative_residual);
    report.write(&out_dir.join("report.txt"))?;
    println!("{}", report.render().trim_end());

    Ok(Outcome::Pass)
}
