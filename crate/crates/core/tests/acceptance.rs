//! Acceptance suite: one test per contract criterion, each printing a
//! PASS/FAIL line. Run with `cargo test -p roofopt-core --test acceptance
//! -- --nocapture` to see the lines.

use roofopt_core::elasticity::{
    assemble, estimate_korn_constant, estimate_poincare_constant, green_residual, load_work,
    material_strain_form, solve, strain_form, BodyForce, Displacement, LoadSpec, MaterialModel,
    Traction,
};
use roofopt_core::functional::FunctionalWeights;
use roofopt_core::geometry::{
    check_eps_cone, check_lower_regularity, check_upper_regularity, koch_prefractal, ConeSampling,
    Point2,
};
use roofopt_core::measure::BoundaryMeasure;
use roofopt_core::mesh::{build_roof_mesh, BoundaryTag, Mesh, RoofProfile, TagFilter};
use roofopt_core::mosco::{alpha_schedule_study, koch_study, mconvergence_indicators};
use roofopt_core::shapeopt::{
    history_csv_string, optimize, AdmissibleClassConfig, EvalSettings, LoadConfig,
    OptimizerSettings, RoofShape,
};
use roofopt_core::geometry::Polygon;

fn criterion(number: u32, name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("criterion {number} ({name}): PASS"),
        Err(message) => {
            println!("criterion {number} ({name}): FAIL - {message}");
            panic!("criterion {number} ({name}) failed: {message}");
        }
    }
}

fn check(cond: bool, message: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message)
    }
}

fn square_mesh(n: usize) -> Mesh {
    build_roof_mesh(
        &RoofProfile {
            x0: 0.0,
            length: 1.0,
            knot_heights: vec![0.0, 0.0],
            thickness: 1.0,
        },
        1.0 / n as f64,
    )
    .unwrap()
}

fn peaked_roof_mesh(res: f64) -> Mesh {
    build_roof_mesh(
        &RoofProfile {
            x0: 0.0,
            length: 2.0,
            knot_heights: vec![0.5, 0.9, 0.6, 0.8, 0.5],
            thickness: 0.5,
        },
        res,
    )
    .unwrap()
}

// ---------------------------------------------------------------------
// Criterion 1: constant-stress patch test.

#[test]
fn c01_patch_test() {
    criterion(1, "patch test", || {
        let (lambda, mu) = (1.2, 0.8);
        let material = MaterialModel::lame_constants(lambda, mu).unwrap();
        let e0 = [[0.3, 0.1], [0.1, -0.2]];
        let tr = e0[0][0] + e0[1][1];
        let s0 = [
            [lambda * tr + 2.0 * mu * e0[0][0], 2.0 * mu * e0[0][1]],
            [2.0 * mu * e0[1][0], lambda * tr + 2.0 * mu * e0[1][1]],
        ];
        let exact =
            move |p: Point2| [e0[0][0] * p.x + e0[0][1] * p.y, e0[1][0] * p.x + e0[1][1] * p.y];

        let mut mesh = square_mesh(6);
        for level in 0..2 {
            let traction = Traction::Field(std::sync::Arc::new(move |p: Point2| {
                if p.y > 0.5 {
                    [s0[0][1], s0[1][1]]
                } else {
                    [-s0[0][1], -s0[1][1]]
                }
            }));
            let load = LoadSpec {
                body: BodyForce::Zero,
                traction,
                neumann: Some(mesh.boundary_measure(TagFilter::Neumann).unwrap()),
            };
            let sys = assemble(
                &mesh,
                &material,
                &load,
                TagFilter::Only(BoundaryTag::Dir),
                Some(&|p| exact(p)),
            )
            .map_err(|e| e.to_string())?;
            let (u, _) = solve(&sys, 1e-13).map_err(|e| e.to_string())?;
            let mut worst = 0.0f64;
            for (i, p) in mesh.nodes().iter().enumerate() {
                let want = exact(*p);
                let got = u.get(i);
                worst = worst
                    .max((got[0] - want[0]).abs())
                    .max((got[1] - want[1]).abs());
            }
            check(
                worst <= 1e-10,
                format!("level {level}: max nodal error {worst} above 1e-10"),
            )?;
            mesh = mesh.refine();
        }
        Ok(())
    });
}

// ---------------------------------------------------------------------
// Criterion 2: compliance-work identity on every solved problem.

#[test]
fn c02_compliance_work_identity() {
    criterion(2, "compliance-work identity", || {
        struct Case {
            name: &'static str,
            mesh: Mesh,
            material: MaterialModel,
            body: BodyForce,
            snow: f64,
        }
        let cases = vec![
            Case {
                name: "flat roof under self-weight",
                mesh: build_roof_mesh(
                    &RoofProfile {
                        x0: 0.0,
                        length: 2.0,
                        knot_heights: vec![0.5, 0.5],
                        thickness: 0.5,
                    },
                    0.07,
                )
                .unwrap(),
                material: MaterialModel::scalar_constant(1.0).unwrap(),
                body: BodyForce::Constant([0.0, -0.5]),
                snow: 0.0,
            },
            Case {
                name: "snow-loaded peaked roof, scalar",
                mesh: peaked_roof_mesh(0.06),
                material: MaterialModel::scalar_constant(2.0).unwrap(),
                body: BodyForce::Constant([0.0, -0.5]),
                snow: 1.0,
            },
            Case {
                name: "snow-loaded peaked roof, lame",
                mesh: peaked_roof_mesh(0.08),
                material: MaterialModel::lame_constants(1.4, 0.9).unwrap(),
                body: BodyForce::Constant([0.1, -0.8]),
                snow: 2.0,
            },
            Case {
                name: "refined square under body force",
                mesh: square_mesh(8).refine(),
                material: MaterialModel::scalar_constant(1.0).unwrap(),
                body: BodyForce::Constant([0.3, -1.0]),
                snow: 0.0,
            },
        ];
        for case in cases {
            let traction = if case.snow > 0.0 {
                Traction::Constant([0.0, -case.snow])
            } else {
                Traction::Zero
            };
            let load = LoadSpec {
                body: case.body.clone(),
                traction,
                neumann: Some(
                    case.mesh
                        .boundary_measure(TagFilter::Only(BoundaryTag::Up))
                        .unwrap(),
                ),
            };
            let sys = assemble(
                &case.mesh,
                &case.material,
                &load,
                TagFilter::Only(BoundaryTag::Dir),
                None,
            )
            .map_err(|e| e.to_string())?;
            let (u, _) = solve(&sys, 1e-12).map_err(|e| e.to_string())?;
            let energy = material_strain_form(&case.mesh, &case.material, &u);
            let work = load_work(&case.mesh, &load, &u);
            let rel = (energy - work).abs() / energy.abs().max(1e-30);
            check(
                rel <= 1e-8,
                format!("{}: relative discrepancy {rel} above 1e-8", case.name),
            )?;
        }
        Ok(())
    });
}

// ---------------------------------------------------------------------
// Criterion 3: second-order L2 convergence for a manufactured solution.

#[test]
fn c03_convergence_rate() {
    criterion(3, "manufactured-solution convergence rate", || {
        use std::f64::consts::PI;
        let exact = |p: Point2| {
            let s = (PI * p.x).sin() * (PI * p.y).sin();
            [s, s]
        };
        let body = |p: Point2| {
            let ss = (PI * p.x).sin() * (PI * p.y).sin();
            let cc = (PI * p.x).cos() * (PI * p.y).cos();
            let v = 1.5 * PI * PI * ss - 0.5 * PI * PI * cc;
            [v, v]
        };
        let traction = |p: Point2| {
            let s = (PI * p.x).sin();
            [-0.5 * PI * s, -PI * s]
        };
        let l2_error = |mesh: &Mesh, u: &Displacement| -> f64 {
            let mut acc = 0.0;
            for (t, tri) in mesh.triangles().iter().enumerate() {
                let pts = [
                    mesh.nodes()[tri[0]],
                    mesh.nodes()[tri[1]],
                    mesh.nodes()[tri[2]],
                ];
                let vals = [u.get(tri[0]), u.get(tri[1]), u.get(tri[2])];
                let area = mesh.triangle_area(t);
                for k in 0..3 {
                    let (i, j) = (k, (k + 1) % 3);
                    let mid = (pts[i] + pts[j]) / 2.0;
                    let uh = [
                        0.5 * (vals[i][0] + vals[j][0]),
                        0.5 * (vals[i][1] + vals[j][1]),
                    ];
                    let ue = exact(mid);
                    acc += area / 3.0
                        * ((uh[0] - ue[0]).powi(2) + (uh[1] - ue[1]).powi(2));
                }
            }
            acc.sqrt()
        };

        let material = MaterialModel::scalar_constant(1.0).unwrap();
        let mut errors = Vec::new();
        for n in [8usize, 16, 32] {
            let mesh = square_mesh(n);
            let load = LoadSpec {
                body: BodyForce::Field(std::sync::Arc::new(body)),
                traction: Traction::Field(std::sync::Arc::new(traction)),
                neumann: Some(mesh.boundary_measure(TagFilter::Neumann).unwrap()),
            };
            let sys = assemble(
                &mesh,
                &material,
                &load,
                TagFilter::Only(BoundaryTag::Dir),
                None,
            )
            .map_err(|e| e.to_string())?;
            let (u, _) = solve(&sys, 1e-11).map_err(|e| e.to_string())?;
            errors.push(l2_error(&mesh, &u));
        }
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            check(
                (3.5..=4.5).contains(&ratio),
                format!("error ratio {ratio} outside [3.5, 4.5]; errors {errors:?}"),
            )?;
        }
        Ok(())
    });
}

// ---------------------------------------------------------------------
// Criterion 4: Korn constant behaviour and exact rigid-rotation kernel.

#[test]
fn c04_korn_norm_equivalence() {
    criterion(4, "korn norm equivalence", || {
        // Rigid rotation: exactly zero strain form before elimination.
        let probe = peaked_roof_mesh(0.08);
        let rotation = Displacement::interpolate(&probe, |p| [-p.y, p.x]);
        let sform = strain_form(&probe, &rotation);
        check(sform == 0.0, format!("rotation strain form {sform} != 0"))?;

        // c_K in (0, 1] on all test meshes, nonincreasing under refinement.
        for (name, base) in [
            ("unit square", square_mesh(6)),
            ("peaked roof", peaked_roof_mesh(0.16)),
        ] {
            let mut mesh = base;
            let mut prev = f64::INFINITY;
            for level in 0..3 {
                let c = estimate_korn_constant(&mesh, TagFilter::Only(BoundaryTag::Dir))
                    .map_err(|e| e.to_string())?;
                check(
                    c > 0.0 && c <= 1.0,
                    format!("{name} level {level}: c_K = {c} outside (0, 1]"),
                )?;
                check(
                    c <= prev * (1.0 + 1e-6),
                    format!("{name} level {level}: c_K grew from {prev} to {c}"),
                )?;
                prev = c;
                mesh = mesh.refine();
            }
        }
        Ok(())
    });
}

// ---------------------------------------------------------------------
// Criterion 5: Poincare constant scales with the square of the size.

#[test]
fn c05_poincare_scaling() {
    criterion(5, "poincare scaling", || {
        let mesh = square_mesh(8);
        let c1 = estimate_poincare_constant(&mesh, TagFilter::Only(BoundaryTag::Dir))
            .map_err(|e| e.to_string())?;
        for t in [0.5, 2.0] {
            let ct = estimate_poincare_constant(&mesh.scaled(t), TagFilter::Only(BoundaryTag::Dir))
                .map_err(|e| e.to_string())?;
            let ratio = ct / c1;
            check(
                (ratio - t * t).abs() / (t * t) <= 0.01,
                format!("t = {t}: C_P ratio {ratio} deviates from {} by over 1%", t * t),
            )?;
        }
        Ok(())
    });
}

// ---------------------------------------------------------------------
// Criterion 6: boundary Green identity.

#[test]
fn c06_green_identity() {
    criterion(6, "green identity", || {
        let mesh = square_mesh(10);
        let u = Displacement::interpolate(&mesh, |_| [0.7, -0.2]);
        let w: Vec<f64> = mesh.nodes().iter().map(|p| 2.0 * p.x - 0.3 * p.y).collect();
        let exact_case = green_residual(&mesh, &u, &w);
        check(
            exact_case <= 1e-12,
            format!("constant/linear residual {exact_case} above 1e-12"),
        )?;

        let field = |p: Point2| [(1.9 * p.x).sin() * p.y.cos(), (p.x + 0.4 * p.y).cos()];
        let weight = |p: Point2| (1.2 * p.x).cos() * (0.9 * p.y + 0.3).sin();
        let mut mesh = square_mesh(5);
        let mut residuals = Vec::new();
        for _ in 0..3 {
            let u = Displacement::interpolate(&mesh, field);
            let w: Vec<f64> = mesh.nodes().iter().map(|&p| weight(p)).collect();
            residuals.push(green_residual(&mesh, &u, &w));
            mesh = mesh.refine();
        }
        for pair in residuals.windows(2) {
            let rate = (pair[0] / pair[1]).log2();
            check(
                rate >= 1.0,
                format!("refinement rate {rate} below 1; residuals {residuals:?}"),
            )?;
        }
        Ok(())
    });
}

// ---------------------------------------------------------------------
// Criteria 7 and 10: roof optimization run and its reproducibility.

fn acceptance_class() -> AdmissibleClassConfig {
    let container = Polygon::rectangle(0.0, 0.0, 2.0, 2.0).unwrap();
    let region = Polygon::rectangle(0.0, 0.2, 2.0, 1.2).unwrap();
    let mut cfg = AdmissibleClassConfig::boxed(
        container,
        region,
        (0.5, 0.5),
        0.15,
        1.0,
        (1.0, 6.0),
        8.0,
    )
    .unwrap();
    cfg.cone_sampling = ConeSampling {
        boundary_step: Some(0.02),
        directions: 32,
        cone_samples: 100,
        ball_rings: 3,
        ball_sectors: 12,
    };
    cfg
}

fn acceptance_optimize(seed: u64) -> roofopt_core::shapeopt::OptimizeOutcome {
    let cfg = acceptance_class();
    let material = MaterialModel::scalar_constant(1.0).unwrap();
    let weights = FunctionalWeights::compliance();
    let loads = LoadConfig {
        rho0: 1.0,
        snow: 1.0,
        gravity: [0.0, -1.0],
    };
    let theta0 = vec![0.5; 5];
    optimize(
        &cfg,
        &loads,
        &material,
        weights,
        &theta0,
        &OptimizerSettings {
            budget: 60,
            seed,
            init_step: Some(0.12),
            eval: EvalSettings {
                resolution: 0.1,
                solver_tol: 1e-11,
            },
        },
    )
    .unwrap()
}

#[test]
fn c07_roof_optimization() {
    criterion(7, "roof optimization", || {
        let cfg = acceptance_class();
        let outcome = acceptance_optimize(42);
        check(
            outcome.history.len() == 60,
            format!("expected 60 evaluations, got {}", outcome.history.len()),
        )?;
        let initial = outcome.history[0].j;
        check(
            outcome.best_j.is_finite() && outcome.best_j <= initial,
            format!("final J {} above initial {initial}", outcome.best_j),
        )?;

        let mut best = f64::INFINITY;
        let mut accepted_count = 0;
        for rec in &outcome.history {
            if rec.accepted {
                accepted_count += 1;
                check(
                    rec.j <= best,
                    format!("accepted J {} breaks monotonicity at iter {}", rec.j, rec.iter),
                )?;
                best = rec.j;
                check(
                    rec.cone_ok && rec.reg_ok,
                    format!("accepted iterate {} is not strictly feasible", rec.iter),
                )?;
                check(
                    (rec.volume - cfg.volume).abs() <= 1e-10,
                    format!("volume {} misses c_v at iter {}", rec.volume, rec.iter),
                )?;
            }
        }
        check(accepted_count >= 1, "no accepted iterates".into())?;

        // Upper curve is the exact node-wise vertical translate.
        let (x0, length) = cfg.footprint();
        let shape = RoofShape::new(x0, length, outcome.best_theta.clone(), cfg.volume)
            .map_err(|e| e.to_string())?;
        let mesh = shape.build_mesh(0.1).map_err(|e| e.to_string())?;
        let key = |p: &Point2| (p.x.to_bits(), p.y.to_bits());
        let mut lo: Vec<Point2> = mesh
            .tagged_nodes(TagFilter::Only(BoundaryTag::Lo))
            .iter()
            .map(|&n| mesh.nodes()[n])
            .collect();
        let mut up: Vec<Point2> = mesh
            .tagged_nodes(TagFilter::Only(BoundaryTag::Up))
            .iter()
            .map(|&n| mesh.nodes()[n])
            .collect();
        lo.sort_by_key(|p| key(p).0);
        up.sort_by_key(|p| key(p).0);
        check(lo.len() == up.len(), "boundary node counts differ".into())?;
        for (l, u) in lo.iter().zip(&up) {
            let translated = Point2::new(l.x, l.y + shape.thickness());
            check(
                key(u) == key(&translated),
                format!(
                    "upper node ({}, {}) is not the exact translate of ({}, {})",
                    u.x, u.y, l.x, l.y
                ),
            )?;
        }
        Ok(())
    });
}

#[test]
fn c10_determinism() {
    criterion(10, "byte-identical reproducibility", || {
        let a = acceptance_optimize(7);
        let b = acceptance_optimize(7);
        let csv_a = history_csv_string(&a.history);
        let csv_b = history_csv_string(&b.history);
        check(
            csv_a.as_bytes() == csv_b.as_bytes(),
            "identical config and seed produced different history bytes".into(),
        )
    });
}

// ---------------------------------------------------------------------
// Criterion 8: class certification checks.

#[test]
fn c08_class_certification() {
    criterion(8, "class certification", || {
        let square = Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let pass = check_eps_cone(&square, 0.1, ConeSampling::default())
            .map_err(|e| e.to_string())?;
        check(pass.passed, "unit square must pass at eps = 0.1".into())?;
        let fail = check_eps_cone(&square, 10.0, ConeSampling::default())
            .map_err(|e| e.to_string())?;
        check(!fail.passed, "unit square must fail at eps = 10".into())?;

        // Koch level-4 self-similar measure.
        let (_, mu) = koch_prefractal(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), 4)
            .map_err(|e| e.to_string())?;
        let d = 4.0f64.ln() / 3.0f64.ln();
        let self_similar_radii: Vec<f64> =
            (0..=4).map(|k| 0.75 * 3.0f64.powi(-k)).collect();
        let upper = check_upper_regularity(&mu, d, 4.0, &self_similar_radii)
            .map_err(|e| e.to_string())?;
        check(
            upper.passed,
            format!(
                "koch level 4 must be upper {d}-regular; worst ratio {}",
                upper.worst_witness.ratio
            ),
        )?;
        let small_radii = [0.002, 0.005, 0.01];
        let too_steep = check_upper_regularity(&mu, 1.5, 4.0, &small_radii)
            .map_err(|e| e.to_string())?;
        check(
            !too_steep.passed,
            "koch level 4 must fail upper regularity at d = 1.5 for small radii".into(),
        )?;

        // Arc length on a segment: lower 1-regular.
        let h = 1.0 / 64.0;
        let segment = BoundaryMeasure::from_contributions((0..64).flat_map(|i| {
            let a = Point2::new(i as f64 * h, 0.0);
            let b = Point2::new((i + 1) as f64 * h, 0.0);
            [(i, a, h / 2.0), (i + 1, b, h / 2.0)]
        }));
        let lower_radii: Vec<f64> = [3.0, 6.0, 12.0, 31.0]
            .iter()
            .map(|m| (m + 0.25) / 64.0)
            .collect();
        let lower = check_lower_regularity(&segment, 1.0, 1.0, &lower_radii)
            .map_err(|e| e.to_string())?;
        check(
            lower.passed,
            format!(
                "segment must be lower 1-regular; worst ratio {}",
                lower.worst_witness.ratio
            ),
        )?;
        Ok(())
    });
}

// ---------------------------------------------------------------------
// Criterion 9: convergence indicators.

#[test]
fn c09_mosco_indicators() {
    criterion(9, "mosco indicators", || {
        // Constant domain sequence: exactly zero indicators at tol = 0.
        let mesh = square_mesh(6);
        let gamma = mesh.boundary_measure(TagFilter::All).unwrap();
        let container = Polygon::rectangle(-0.1, -0.1, 1.1, 1.1).unwrap();
        let constant = alpha_schedule_study(
            mesh.clone(),
            gamma.clone(),
            None,
            1.0,
            &[1.0, 1.0, 1.0],
            BodyForce::Constant([0.0, -1.0]),
            32,
            1e-11,
            container.clone(),
        )
        .map_err(|e| e.to_string())?;
        // A constant schedule: overwrite alphas with the limit value.
        let constant = {
            let mut study = constant;
            for level in &mut study.levels {
                level.form.alpha = 1.0;
            }
            study
        };
        let report = mconvergence_indicators(&constant, 0.0).map_err(|e| e.to_string())?;
        check(
            report.passed,
            format!("constant sequence must pass at tol = 0: {report:?}"),
        )?;
        check(
            report.rows.iter().all(|r| r.e_n == 0.0),
            "constant sequence indicators must be exactly zero".into(),
        )?;

        // Schedule alpha + 1/n on a fixed domain.
        let schedule = alpha_schedule_study(
            mesh,
            gamma,
            None,
            1.0,
            &[1.0, 10.0, 100.0, 1e4, 1e6, 1e8],
            BodyForce::Constant([0.0, -1.0]),
            32,
            1e-12,
            container,
        )
        .map_err(|e| e.to_string())?;
        let report = mconvergence_indicators(&schedule, 1e-6).map_err(|e| e.to_string())?;
        for w in report.rows.windows(2) {
            check(
                w[1].e_n <= w[0].e_n,
                format!("schedule e_n must be nonincreasing: {:?}", report.rows),
            )?;
        }
        check(
            report.rows.last().unwrap().e_n <= 1e-6,
            format!("final e_n {} above 1e-6", report.rows.last().unwrap().e_n),
        )?;

        // Prefractal sequence against the level-5 proxy.
        let study = koch_study(
            &[1, 2, 3, 4],
            5,
            1.0,
            BodyForce::Constant([0.0, -1.0]),
            72,
            1e-10,
        )
        .map_err(|e| e.to_string())?;
        let report = mconvergence_indicators(&study, 0.05).map_err(|e| e.to_string())?;
        for w in report.rows.windows(2) {
            check(
                w[1].e_n < w[0].e_n,
                format!("prefractal e_n must strictly decrease: {:?}", report.rows),
            )?;
        }
        Ok(())
    });
}
