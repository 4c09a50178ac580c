use super::*;
use crate::elasticity::w12_norm;
use crate::mesh::{build_roof_mesh, BoundaryTag, RoofProfile};

fn unit_square(n: usize) -> Mesh {
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

fn full_boundary_form(n: usize, alpha: f64) -> RobinForm {
    let mesh = unit_square(n);
    let gamma = mesh.boundary_measure(TagFilter::All).unwrap();
    RobinForm::new(mesh, alpha, gamma, None).unwrap()
}

#[test]
fn form_value_of_a_constant_field() {
    // Strain 0, mass 1 over unit area, boundary 4 * |u|^2 with alpha 1.
    let form = full_boundary_form(8, 1.0);
    let u = Displacement::interpolate(&form.mesh, |_| [1.0, 0.0]);
    let value = robin_form_apply(&form, &u);
    assert!((value - 5.0).abs() < 1e-12, "value = {value}");
}

#[test]
fn zero_alpha_reduces_to_strain_plus_mass() {
    let form = full_boundary_form(6, 0.0);
    let u = Displacement::interpolate(&form.mesh, |p| [p.x * p.y, (p.x - p.y).cos()]);
    let direct = strain_form(&form.mesh, &u) + mass_form(&form.mesh, &u);
    assert_eq!(robin_form_apply(&form, &u), direct);
}

#[test]
fn form_is_quadratic_and_monotone_in_alpha() {
    let u_fn = |p: Point2| [p.x + 0.2 * p.y, p.y * p.y];
    let mut last = 0.0;
    for (k, alpha) in [0.0, 0.5, 2.0].into_iter().enumerate() {
        let form = full_boundary_form(6, alpha);
        let u = Displacement::interpolate(&form.mesh, u_fn);
        let v = robin_form_apply(&form, &u);
        assert!(v >= 0.0);
        if k > 0 {
            assert!(v > last);
        }
        last = v;
        let v2 = robin_form_apply(&form, &u.scaled(-2.0));
        assert!((v2 - 4.0 * v).abs() <= 1e-10 * v.max(1.0));
    }
}

#[test]
fn zero_source_solves_to_zero() {
    let form = full_boundary_form(6, 1.0);
    let u = solve_robin(&form, &BodyForce::Zero, 1e-11).unwrap();
    assert_eq!(u.max_norm(), 0.0);
}

#[test]
fn growing_alpha_suppresses_boundary_values() {
    let mut boundary_max = Vec::new();
    for alpha in [1.0, 10.0, 100.0, 1000.0] {
        let form = full_boundary_form(8, alpha);
        let u = solve_robin(&form, &BodyForce::Constant([0.0, -1.0]), 1e-12).unwrap();
        let worst = form
            .mesh
            .tagged_nodes(TagFilter::All)
            .into_iter()
            .map(|n| {
                let v = u.get(n);
                (v[0] * v[0] + v[1] * v[1]).sqrt()
            })
            .fold(0.0f64, f64::max);
        boundary_max.push(worst);
    }
    for w in boundary_max.windows(2) {
        assert!(w[1] < w[0], "{boundary_max:?}");
    }
}

#[test]
fn pure_neumann_with_mass_is_bounded_by_the_source() {
    let form = full_boundary_form(8, 0.0);
    let body = BodyForce::Constant([0.3, -0.9]);
    let u = solve_robin(&form, &body, 1e-12).unwrap();
    // a(u,u) >= |u|_L2^2 and a(u,u) = ∫ f.u <= |f| |u|_L2.
    let u_l2 = mass_form(&form.mesh, &u).sqrt();
    let f_l2 = (0.3f64 * 0.3 + 0.9 * 0.9).sqrt();
    assert!(u_l2 <= f_l2 + 1e-12, "{u_l2} vs {f_l2}");
    assert!(w12_norm(&form.mesh, &u).is_finite());
}

fn constant_study(alpha: f64) -> DomainSequenceStudy {
    let mesh = unit_square(6);
    let gamma = mesh.boundary_measure(TagFilter::All).unwrap();
    let container = Polygon::rectangle(-0.1, -0.1, 1.1, 1.1).unwrap();
    let levels = (0..3)
        .map(|k| RobinLevel {
            label: (k + 1) as f64,
            form: RobinForm::new(mesh.clone(), alpha, gamma.clone(), None).unwrap(),
        })
        .collect();
    DomainSequenceStudy {
        container,
        levels,
        limit: RobinForm::new(mesh, alpha, gamma, None).unwrap(),
        limit_label: "identical domain".into(),
        body: BodyForce::Constant([0.0, -1.0]),
        background: 48,
        solver_tol: 1e-11,
    }
}

#[test]
fn constant_sequence_passes_with_zero_tolerance() {
    let report = mconvergence_indicators(&constant_study(1.0), 0.0).unwrap();
    assert!(report.passed, "{report:?}");
    for row in &report.rows {
        assert_eq!(row.e_n, 0.0);
        assert_eq!(row.a_rec, report.a_limit);
        assert_eq!(row.a_sol, report.a_limit);
    }
}

#[test]
fn alpha_schedule_indicators_decay() {
    let mesh = unit_square(6);
    let gamma = mesh.boundary_measure(TagFilter::All).unwrap();
    let container = Polygon::rectangle(-0.1, -0.1, 1.1, 1.1).unwrap();
    let study = alpha_schedule_study(
        mesh,
        gamma,
        None,
        1.0,
        &[1.0, 10.0, 100.0, 1e4, 1e6, 1e8],
        BodyForce::Constant([0.0, -1.0]),
        48,
        1e-12,
        container,
    )
    .unwrap();
    let report = mconvergence_indicators(&study, 1e-6).unwrap();
    assert!(report.e_decreasing, "{:?}", report.rows);
    assert!(report.e_final_below_tol, "{:?}", report.rows);
    assert!(report.passed);
    // The boundary term is linear in alpha, so the recovery value
    // decreases monotonically toward the limit value from above.
    for w in report.rows.windows(2) {
        assert!(w[1].a_rec <= w[0].a_rec);
        assert!(w[1].a_rec >= report.a_limit - 1e-12);
    }
}

#[test]
fn koch_prefractal_sequence_converges() {
    let study = koch_study(
        &[1, 2, 3],
        4,
        1.0,
        BodyForce::Constant([0.0, -1.0]),
        64,
        1e-10,
    )
    .unwrap();
    let report = mconvergence_indicators(&study, 0.05).unwrap();
    for w in report.rows.windows(2) {
        assert!(
            w[1].e_n < w[0].e_n,
            "indicator must strictly decrease: {:?}",
            report.rows
        );
    }
}

#[test]
fn study_rejects_meshes_outside_the_container() {
    let mut study = constant_study(1.0);
    study.container = Polygon::rectangle(0.2, 0.2, 0.8, 0.8).unwrap();
    assert!(mconvergence_indicators(&study, 0.0).is_err());
}

fn polyline_measure(points: &[Point2]) -> BoundaryMeasure {
    BoundaryMeasure::from_contributions((0..points.len() - 1).flat_map(|i| {
        let half = points[i].dist(points[i + 1]) / 2.0;
        [(i, points[i], half), (i + 1, points[i + 1], half)]
    }))
}

fn subdivide(points: &[Point2]) -> Vec<Point2> {
    let mut out = Vec::with_capacity(points.len() * 2);
    for w in points.windows(2) {
        out.push(w[0]);
        out.push((w[0] + w[1]) / 2.0);
    }
    out.push(*points.last().unwrap());
    out
}

#[test]
fn weak_star_distance_basics() {
    let bank = TestBank::default_for_box(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
    assert_eq!(bank.len(), 32);
    let pts = vec![
        Point2::new(0.0, 0.0),
        Point2::new(0.4, 0.3),
        Point2::new(1.0, 0.2),
    ];
    let mu = polyline_measure(&pts);
    assert_eq!(weak_star_distance(&mu, &mu, &bank).unwrap(), 0.0);

    // A total-mass gap of delta is detected by the constant test function.
    let delta = 0.25;
    let scaled = BoundaryMeasure::new(
        mu.nodes().to_vec(),
        mu.points().to_vec(),
        mu.weights()
            .iter()
            .map(|w| w * (1.0 + delta / mu.total_mass()))
            .collect(),
    )
    .unwrap();
    let d = weak_star_distance(&mu, &scaled, &bank).unwrap();
    assert!(d >= delta - 1e-12, "d = {d}");
}

#[test]
fn weak_star_distance_vanishes_under_refinement() {
    // Both measures approximate the same arc-length measure, so successive
    // refinements get weak-star close at a geometric rate.
    let bank = TestBank::default_for_box(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
    let base = vec![
        Point2::new(0.0, 0.1),
        Point2::new(0.3, 0.8),
        Point2::new(0.7, 0.2),
        Point2::new(1.0, 0.6),
    ];
    let total = polyline_measure(&base).total_mass();
    let mut pts = base;
    let mut last = f64::INFINITY;
    for _ in 0..5 {
        let mu = polyline_measure(&pts);
        let refined_pts = subdivide(&pts);
        let refined = polyline_measure(&refined_pts);
        assert!((refined.total_mass() - total).abs() < 1e-12);
        let d = weak_star_distance(&mu, &refined, &bank).unwrap();
        assert!(d < last, "distance must shrink: {d} vs {last}");
        last = d;
        pts = refined_pts;
    }
    assert!(last < 0.01, "final distance {last}");
}

#[test]
fn weak_star_distance_is_a_pseudo_metric() {
    let bank = TestBank::default_for_box(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
    let make = |shift: f64, scale: f64| {
        let pts = vec![
            Point2::new(0.1, 0.1 + shift),
            Point2::new(0.5, 0.4),
            Point2::new(0.9, 0.2 + shift / 2.0),
        ];
        let mu = polyline_measure(&pts);
        BoundaryMeasure::new(
            mu.nodes().to_vec(),
            mu.points().to_vec(),
            mu.weights().iter().map(|w| w * scale).collect(),
        )
        .unwrap()
    };
    let a = make(0.0, 1.0);
    let b = make(0.2, 1.3);
    let c = make(0.4, 0.7);
    let ab = weak_star_distance(&a, &b, &bank).unwrap();
    let ba = weak_star_distance(&b, &a, &bank).unwrap();
    assert_eq!(ab, ba);
    let ac = weak_star_distance(&a, &c, &bank).unwrap();
    let cb = weak_star_distance(&c, &b, &bank).unwrap();
    assert!(ab <= ac + cb + 1e-12);
}

#[test]
fn invalid_inputs_are_rejected() {
    let mesh = unit_square(4);
    let gamma = mesh.boundary_measure(TagFilter::All).unwrap();
    assert!(RobinForm::new(mesh.clone(), -1.0, gamma.clone(), None).is_err());
    let out_of_range = BoundaryMeasure::new(
        vec![mesh.num_nodes() + 5],
        vec![Point2::new(0.0, 0.0)],
        vec![1.0],
    )
    .unwrap();
    assert!(RobinForm::new(mesh, 1.0, out_of_range, None).is_err());
}
