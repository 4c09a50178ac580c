use std::path::Path;

use serde::Deserialize;

use roofopt_core::elasticity::BodyForce;
use roofopt_core::geometry::Polygon;
use roofopt_core::mesh::{build_roof_mesh, RoofProfile, TagFilter};
use roofopt_core::mosco::{
    alpha_schedule_study, koch_study, mconvergence_indicators, write_mosco_csv,
};
use roofopt_core::report::Report;

use crate::config::{self, OutputConfig};
use crate::{CliError, Outcome};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
enum StudyConfig {
    /// Fixed unit-square domain, Robin coefficient schedule `alpha + 1/n`.
    Alpha {
        alpha: f64,
        indices: Vec<f64>,
        resolution: f64,
    },
    /// Prefractal-top squares against a deeper proxy.
    Koch {
        levels: Vec<u32>,
        proxy: u32,
        alpha: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoscoConfig {
    threads: Option<usize>,
    study: StudyConfig,
    /// Body force vector.
    body: [f64; 2],
    /// Background-grid cells along x.
    background: usize,
    /// Indicator tolerance.
    tol: f64,
    solver_tol: f64,
    output: OutputConfig,
}

pub fn run(path: &Path) -> Result<Outcome, CliError> {
    let cfg: MoscoConfig = config::load(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    if cfg.background < 8 {
        return Err(CliError::Config("background must be at least 8".into()));
    }
    if !(cfg.tol >= 0.0) {
        return Err(CliError::Config("tol must be nonnegative".into()));
    }
    if !(cfg.solver_tol > 0.0 && cfg.solver_tol < 1.0) {
        return Err(CliError::Config("solver_tol must lie in (0, 1)".into()));
    }
    match &cfg.study {
        StudyConfig::Alpha {
            alpha,
            indices,
            resolution,
        } => {
            if !(*alpha >= 0.0) || indices.is_empty() || !(*resolution > 0.0) {
                return Err(CliError::Config("invalid alpha study parameters".into()));
            }
        }
        StudyConfig::Koch { levels, proxy, alpha } => {
            if levels.is_empty() || !(*alpha >= 0.0) || *proxy == 0 {
                return Err(CliError::Config("invalid koch study parameters".into()));
            }
        }
    }
    let out_dir = cfg.output.prepare(&base)?;
    config::configure_threads(cfg.threads)?;

    let body = BodyForce::Constant(cfg.body);
    let study = match &cfg.study {
        StudyConfig::Alpha {
            alpha,
            indices,
            resolution,
        } => {
            let mesh = build_roof_mesh(
                &RoofProfile {
                    x0: 0.0,
                    length: 1.0,
                    knot_heights: vec![0.0, 0.0],
                    thickness: 1.0,
                },
                *resolution,
            )?;
            let gamma = mesh.boundary_measure(TagFilter::All)?;
            let container = Polygon::rectangle(-0.1, -0.1, 1.1, 1.1)?;
            alpha_schedule_study(
                mesh,
                gamma,
                None,
                *alpha,
                indices,
                body,
                cfg.background,
                cfg.solver_tol,
                container,
            )?
        }
        StudyConfig::Koch { levels, proxy, alpha } => koch_study(
            levels,
            *proxy,
            *alpha,
            body,
            cfg.background,
            cfg.solver_tol,
        )?,
    };

    let result = mconvergence_indicators(&study, cfg.tol)?;

    let mut csv = std::io::BufWriter::new(std::fs::File::create(out_dir.join("study.csv"))?);
    write_mosco_csv(&mut csv, &result)?;
    drop(csv);

    let mut report = Report::new();
    report.push("kind", "indicator");
    report.push("limit", &result.limit_label);
    report.push("levels", result.rows.len());
    report.push("a_limit", result.a_limit);
    report.push("e_decreasing", result.e_decreasing);
    report.push("e_final_below_tol", result.e_final_below_tol);
    report.push("recovery_ok", result.recovery_ok);
    report.push("liminf_ok", result.liminf_ok);
    report.push("passed", result.passed);
    if let Some(last) = result.rows.last() {
        report.push("e_final", last.e_n);
    }
    report.write(&out_dir.join("report.txt"))?;
    println!("{}", report.render().trim_end());

    if result.passed {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::Fail("convergence indicators below contract".into()))
    }
}
