use std::path::Path;

use roofopt_core::geometry::{check_eps_cone, read_points, ConeSampling, Polygon};
use roofopt_core::report::Report;

use crate::{CliError, Outcome};

#[allow(clippy::too_many_arguments)]
pub fn run(
    polygon_path: &Path,
    eps: f64,
    boundary_step: Option<f64>,
    directions: usize,
    cone_samples: usize,
    report_path: Option<&Path>,
) -> Result<Outcome, CliError> {
    if !(eps > 0.0) {
        return Err(CliError::Config("--eps must be positive".into()));
    }
    if directions == 0 || cone_samples == 0 {
        return Err(CliError::Config(
            "--directions and --cone-samples must be positive".into(),
        ));
    }
    let vertices = read_points(polygon_path)?;
    let polygon = Polygon::new(vertices).map_err(|e| CliError::Config(e.to_string()))?;

    let sampling = ConeSampling {
        boundary_step,
        directions,
        cone_samples,
        ..ConeSampling::default()
    };
    let result = check_eps_cone(&polygon, eps, sampling)?;

    let mut report = Report::new();
    report.push("polygon", polygon_path.display());
    report.push("vertices", polygon.vertices().len());
    report.push("epsilon", result.epsilon);
    report.push("passed", result.passed);
    report.push("boundary_points", result.boundary_points);
    report.push("boundary_step", result.boundary_step);
    report.push("directions", sampling.directions);
    report.push("cone_samples", sampling.cone_samples);
    report.push("note", "sampled certificate at the recorded resolution");
    if let Some(w) = &result.witness {
        report.push("witness_base", format!("{} {}", w.base.x, w.base.y));
        report.push(
            "witness_direction",
            format!("{} {}", w.direction.x, w.direction.y),
        );
        report.push(
            "witness_offending",
            format!("{} {}", w.offending.x, w.offending.y),
        );
    }
    if let Some(path) = report_path {
        report.write(path)?;
    }
    println!("{}", report.render().trim_end());

    if result.passed {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail(result.summary()))
    }
}
