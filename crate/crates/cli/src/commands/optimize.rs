use std::path::Path;

use serde::Deserialize;

use roofopt_core::geometry::write_points;
use roofopt_core::mesh::write_vtk;
use roofopt_core::report::Report;
use roofopt_core::shapeopt::{
    evaluate_shape, optimize, write_history_csv, EvalSettings, OptimizerSettings,
};

use crate::config::{
    self, ClassConfig, LoadsConfig, MaterialConfig, OutputConfig, SolverConfig, WeightsConfig,
};
use crate::{CliError, Outcome};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizeConfig {
    threads: Option<usize>,
    class: ClassConfig,
    optimizer: OptimizerConfig,
    material: MaterialConfig,
    loads: LoadsConfig,
    weights: WeightsConfig,
    solver: SolverConfig,
    resolution: f64,
    output: OutputConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizerConfig {
    theta0: Vec<f64>,
    budget: usize,
    seed: u64,
    init_step: Option<f64>,
}

pub fn run(path: &Path) -> Result<Outcome, CliError> {
    let cfg: OptimizeConfig = config::load(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();

    if !(cfg.resolution > 0.0) {
        return Err(CliError::Config("resolution must be positive".into()));
    }
    if cfg.optimizer.theta0.len() < 2 {
        return Err(CliError::Config("optimizer.theta0 needs at least two knots".into()));
    }
    if cfg.optimizer.budget < cfg.optimizer.theta0.len() + 1 {
        return Err(CliError::Config(
            "optimizer.budget must cover the initial simplex".into(),
        ));
    }
    cfg.loads.validate()?;
    cfg.solver.validate()?;
    let class = cfg.class.build()?;
    let material = cfg.material.build()?;
    let weights = cfg.weights.build()?;
    let loads = cfg.loads.to_core();
    let out_dir = cfg.output.prepare(&base)?;
    config::configure_threads(cfg.threads)?;

    let settings = OptimizerSettings {
        budget: cfg.optimizer.budget,
        seed: cfg.optimizer.seed,
        init_step: cfg.optimizer.init_step,
        eval: EvalSettings {
            resolution: cfg.resolution,
            solver_tol: cfg.solver.tol,
        },
    };

    let outcome = optimize(
        &class,
        &loads,
        &material,
        weights,
        &cfg.optimizer.theta0,
        &settings,
    )?;

    let mut history_file = std::io::BufWriter::new(std::fs::File::create(
        out_dir.join("history.csv"),
    )?);
    write_history_csv(&mut history_file, &outcome.history)?;
    drop(history_file);

    // Re-evaluate the winner for the exported mesh and displacement.
    let best = evaluate_shape(
        &outcome.best_theta,
        &class,
        &loads,
        &material,
        weights,
        &settings.eval,
    )?;
    write_points(
        &out_dir.join("best_shape.txt"),
        &best.shape.lower_knots(),
        "lower curve knots of the best shape",
    )?;
    write_vtk(
        &out_dir.join("best.vtk"),
        &best.mesh,
        Some(("displacement", best.displacement.values())),
    )?;

    let initial_j = outcome.history.first().map(|r| r.j).unwrap_or(f64::NAN);
    let mut report = Report::new();
    report.push("evaluations", outcome.evaluations);
    report.push("initial_J", initial_j);
    report.push("best_J", outcome.best_j);
    report.push(
        "best_theta",
        outcome
            .best_theta
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    report.push("best_volume", best.shape.volume());
    report.push("best_thickness", best.shape.thickness());
    report.push("work_identity_residual", best.work_residual);
    report.write(&out_dir.join("report.txt"))?;
    println!("{}", report.render().trim_end());

    Ok(Outcome::Pass)
}
