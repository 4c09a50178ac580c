//! Admissible roof profiles and the projected derivative-free search for
//! energy-minimizing shapes.
//!
//! A profile is a piecewise-linear lower curve over uniform knots; the
//! upper curve is its vertical translate at the thickness fixed by the
//! volume rule. Trial parameter vectors are projected onto the constraint
//! box, certified (cone property, boundary-length and regularity budgets)
//! and only then meshed and solved; infeasible candidates score `+inf`.

mod nelder_mead;

pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elasticity::{
    assemble, load_work, material_strain_form, solve, BodyForce, Displacement, LoadSpec,
    MaterialModel, Traction,
};
use crate::error::{Error, Result};
use crate::functional::{energy_functional, FunctionalWeights};
use crate::geometry::{check_eps_cone, check_upper_regularity, ConeSampling, Point2, Polygon};
use crate::measure::BoundaryMeasure;
use crate::mesh::{build_roof_mesh, BoundaryTag, Mesh, RoofProfile, TagFilter};

/// How the thickness is derived from the fixed material volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeRule {
    /// `h_z = volume / footprint_length`; the meshed band area equals the
    /// volume to rounding.
    ProjectedFootprint,
    /// `h_z = volume / arclength(lower curve)`; the band area then falls
    /// below the volume on slanted profiles.
    ArcLength,
}

/// Roof cross-section: lower curve knots, derived thickness, fixed volume.
#[derive(Debug, Clone)]
pub struct RoofShape {
    x0: f64,
    length: f64,
    knot_heights: Vec<f64>,
    thickness: f64,
    volume: f64,
}

impl RoofShape {
    pub fn new(x0: f64, length: f64, knot_heights: Vec<f64>, volume: f64) -> Result<Self> {
        RoofShape::with_rule(x0, length, knot_heights, volume, VolumeRule::ProjectedFootprint)
    }

    pub fn with_rule(
        x0: f64,
        length: f64,
        knot_heights: Vec<f64>,
        volume: f64,
        rule: VolumeRule,
    ) -> Result<Self> {
        if knot_heights.len() < 2 {
            return Err(Error::Infeasible("need at least two knots".into()));
        }
        if !(length > 0.0) || !(volume > 0.0) {
            return Err(Error::Infeasible(
                "footprint length and volume must be positive".into(),
            ));
        }
        if knot_heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::Infeasible("knot heights must be finite".into()));
        }
        let thickness = match rule {
            VolumeRule::ProjectedFootprint => volume / length,
            VolumeRule::ArcLength => {
                let arc = polyline_length(&knot_points(x0, length, &knot_heights));
                volume / arc
            }
        };
        if !(thickness > 0.0) || !thickness.is_finite() {
            return Err(Error::Infeasible(format!("invalid thickness {thickness}")));
        }
        Ok(RoofShape {
            x0,
            length,
            knot_heights,
            thickness,
            volume,
        })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn knot_heights(&self) -> &[f64] {
        &self.knot_heights
    }

    /// Lower-curve knot points.
    pub fn lower_knots(&self) -> Vec<Point2> {
        knot_points(self.x0, self.length, &self.knot_heights)
    }

    /// Upper-curve knots: the lower knots translated by the thickness.
    pub fn upper_knots(&self) -> Vec<Point2> {
        self.lower_knots()
            .into_iter()
            .map(|p| Point2::new(p.x, p.y + self.thickness))
            .collect()
    }

    pub fn lower_length(&self) -> f64 {
        polyline_length(&self.lower_knots())
    }

    /// Total length of the moving boundary (both curves).
    pub fn neumann_length(&self) -> f64 {
        2.0 * self.lower_length()
    }

    pub fn profile(&self) -> RoofProfile {
        RoofProfile {
            x0: self.x0,
            length: self.length,
            knot_heights: self.knot_heights.clone(),
            thickness: self.thickness,
        }
    }

    /// Closed counterclockwise outline of the band.
    pub fn band_polygon(&self) -> Result<Polygon> {
        let mut verts = self.lower_knots();
        let mut upper = self.upper_knots();
        upper.reverse();
        verts.extend(upper);
        Polygon::new(verts)
    }

    pub fn build_mesh(&self, resolution: f64) -> Result<Mesh> {
        build_roof_mesh(&self.profile(), resolution)
    }
}

fn knot_points(x0: f64, length: f64, heights: &[f64]) -> Vec<Point2> {
    let m = heights.len();
    heights
        .iter()
        .enumerate()
        .map(|(k, &h)| Point2::new(x0 + length * (k as f64 / (m - 1) as f64), h))
        .collect()
}

pub fn polyline_length(points: &[Point2]) -> f64 {
    points.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Extra certification data for the relaxed (possibly fractal) class.
#[derive(Debug, Clone)]
pub struct RelaxedClassData {
    /// Kernel set the domain must contain.
    pub kernel: Polygon,
    pub s: f64,
    pub d: f64,
    pub c_bar: f64,
    pub c_d: f64,
}

/// Constraint data of the admissible shape family.
#[derive(Debug, Clone)]
pub struct AdmissibleClassConfig {
    /// Container: every shape stays inside.
    pub container: Polygon,
    /// Box the lower curve must stay in.
    pub region: Polygon,
    /// Pinned end heights of the lower curve at the clamped walls.
    pub pinned: (f64, f64),
    /// Cone-property aperture.
    pub epsilon: f64,
    /// Fixed material volume.
    pub volume: f64,
    /// Bounds on the moving-boundary length.
    pub length_bounds: (f64, f64),
    /// Upper-regularity budget at exponent 1 for the moving boundary.
    pub chat: f64,
    pub volume_rule: VolumeRule,
    pub cone_sampling: ConeSampling,
    /// Radii for the regularity checks, in `(0, 1]`.
    pub reg_radii: Vec<f64>,
    /// Sampling pitch of the boundary measure used by the regularity
    /// checks, as a fraction of the footprint.
    pub reg_pitch_fraction: f64,
    pub relaxed: Option<RelaxedClassData>,
}

impl AdmissibleClassConfig {
    /// A rectangle-based configuration with the documented defaults.
    pub fn boxed(
        container: Polygon,
        region: Polygon,
        pinned: (f64, f64),
        epsilon: f64,
        volume: f64,
        length_bounds: (f64, f64),
        chat: f64,
    ) -> Result<Self> {
        let cfg = AdmissibleClassConfig {
            container,
            region,
            pinned,
            epsilon,
            volume,
            length_bounds,
            chat,
            volume_rule: VolumeRule::ProjectedFootprint,
            cone_sampling: ConeSampling::default(),
            reg_radii: vec![0.0625, 0.125, 0.25, 0.5, 1.0],
            reg_pitch_fraction: 1.0 / 64.0,
            relaxed: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let (l0, l1) = self.length_bounds;
        if !(0.0 < l0 && l0 < l1) {
            return Err(Error::Infeasible(format!(
                "length bounds need 0 < l0 < l1, got ({l0}, {l1})"
            )));
        }
        if !(self.epsilon > 0.0) || !(self.volume > 0.0) || !(self.chat > 0.0) {
            return Err(Error::Infeasible(
                "epsilon, volume and the regularity budget must be positive".into(),
            ));
        }
        let (rl, rh) = self.region.bounding_box();
        let (cl, ch) = self.container.bounding_box();
        if rl.x < cl.x || rl.y < cl.y || rh.x > ch.x || rh.y > ch.y {
            return Err(Error::Infeasible("region must lie inside the container".into()));
        }
        for p in [self.pinned.0, self.pinned.1] {
            if !(rl.y..=rh.y).contains(&p) {
                return Err(Error::Infeasible(format!(
                    "pinned height {p} is outside the region box"
                )));
            }
        }
        if let Some(relaxed) = &self.relaxed {
            if !(1.0 <= relaxed.s && relaxed.s < 2.0) {
                return Err(Error::Infeasible(format!(
                    "relaxed exponent s = {} outside [1, 2)",
                    relaxed.s
                )));
            }
            if !(0.0 <= relaxed.d && relaxed.d <= relaxed.s) {
                return Err(Error::Infeasible(format!(
                    "relaxed exponent d = {} outside [0, s]",
                    relaxed.d
                )));
            }
        }
        if self.reg_radii.is_empty() || self.reg_radii.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return Err(Error::Infeasible("regularity radii must lie in (0, 1]".into()));
        }
        Ok(())
    }

    /// Footprint interval from the container box.
    pub fn footprint(&self) -> (f64, f64) {
        let (lo, hi) = self.container.bounding_box();
        (lo.x, hi.x - lo.x)
    }

    fn region_height_range(&self) -> (f64, f64) {
        let (lo, hi) = self.region.bounding_box();
        (lo.y, hi.y)
    }
}

/// Flags gathered while projecting a candidate onto the class.
#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub cone_ok: bool,
    /// Moving-boundary length within the class bounds.
    pub bounds_ok: bool,
    /// Upper 1-regularity of the moving-boundary measure within the budget.
    pub chat_ok: bool,
    /// Shape (including the upper curve) stays inside the container.
    pub container_ok: bool,
    /// Relaxed-class conditions; true when no relaxed data is configured.
    pub relaxed_ok: bool,
    pub neumann_length: f64,
}

impl FeasibilityReport {
    /// Combined regularity flag (length bounds plus measure budgets).
    pub fn regularity_ok(&self) -> bool {
        self.bounds_ok && self.chat_ok && self.relaxed_ok
    }

    pub fn feasible(&self) -> bool {
        self.cone_ok && self.regularity_ok() && self.container_ok
    }
}

/// Builds the shape of a parameter vector, requiring the heights to stay in
/// the container.
pub fn make_roof_shape(theta: &[f64], cfg: &AdmissibleClassConfig) -> Result<RoofShape> {
    if theta.len() < 2 {
        return Err(Error::Infeasible("parameter vector needs length >= 2".into()));
    }
    let (clo, chi) = cfg.container.bounding_box();
    if theta.iter().any(|h| !(clo.y..=chi.y).contains(h)) {
        return Err(Error::Infeasible(
            "knot heights leave the container box".into(),
        ));
    }
    let (x0, length) = cfg.footprint();
    RoofShape::with_rule(x0, length, theta.to_vec(), cfg.volume, cfg.volume_rule)
}

/// Projects onto the region box, pins the end heights, and certifies the
/// projected shape. Infeasibility is reported, never thrown.
pub fn project_admissible(theta: &[f64], cfg: &AdmissibleClassConfig) -> (Vec<f64>, FeasibilityReport) {
    let (g_lo, g_hi) = cfg.region_height_range();
    let mut projected: Vec<f64> = theta.iter().map(|h| h.clamp(g_lo, g_hi)).collect();
    if let Some(first) = projected.first_mut() {
        *first = cfg.pinned.0;
    }
    if let Some(last) = projected.last_mut() {
        *last = cfg.pinned.1;
    }

    let shape = match make_roof_shape(&projected, cfg) {
        Ok(s) => s,
        Err(_) => {
            // Projection landed outside the container (possible only with a
            // region box exceeding it, which validate() rejects); report
            // everything false.
            let report = FeasibilityReport {
                cone_ok: false,
                bounds_ok: false,
                chat_ok: false,
                container_ok: false,
                relaxed_ok: cfg.relaxed.is_none(),
                neumann_length: f64::NAN,
            };
            return (projected, report);
        }
    };

    let neumann_length = shape.neumann_length();
    let (l0, l1) = cfg.length_bounds;
    let bounds_ok = (l0..=l1).contains(&neumann_length);

    let container_ok = shape
        .upper_knots()
        .iter()
        .chain(shape.lower_knots().iter())
        .all(|p| cfg.container.contains(*p));

    let cone_ok = match shape.band_polygon() {
        Ok(polygon) => check_eps_cone(&polygon, cfg.epsilon, cfg.cone_sampling)
            .map(|r| r.passed)
            .unwrap_or(false),
        Err(_) => false,
    };

    let (_, length) = cfg.footprint();
    let pitch = length * cfg.reg_pitch_fraction;
    let measure = neumann_arclength_measure(&shape, pitch);
    let chat_ok = check_upper_regularity(&measure, 1.0, cfg.chat, &cfg.reg_radii)
        .map(|r| r.passed)
        .unwrap_or(false);

    let relaxed_ok = match &cfg.relaxed {
        None => true,
        Some(relaxed) => {
            let kernel_inside = match shape.band_polygon() {
                Ok(polygon) => relaxed
                    .kernel
                    .vertices()
                    .iter()
                    .all(|v| polygon.contains(*v)),
                Err(_) => false,
            };
            let upper = check_upper_regularity(&measure, relaxed.d, relaxed.c_d, &cfg.reg_radii)
                .map(|r| r.passed)
                .unwrap_or(false);
            let lower = crate::geometry::check_lower_regularity(
                &measure,
                relaxed.s,
                relaxed.c_bar,
                &cfg.reg_radii,
            )
            .map(|r| r.passed)
            .unwrap_or(false);
            kernel_inside && upper && lower
        }
    };

    (
        projected,
        FeasibilityReport {
            cone_ok,
            bounds_ok,
            chat_ok,
            container_ok,
            relaxed_ok,
            neumann_length,
        },
    )
}

/// Lumped arc-length measure of both moving curves, resampled at `pitch`.
fn neumann_arclength_measure(shape: &RoofShape, pitch: f64) -> BoundaryMeasure {
    let mut contributions: Vec<(usize, Point2, f64)> = Vec::new();
    let mut next_id = 0usize;
    for curve in [shape.lower_knots(), shape.upper_knots()] {
        for w in curve.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = a.dist(b);
            let n = (len / pitch).ceil().max(1.0) as usize;
            let sub = len / n as f64;
            for k in 0..n {
                let pa = a + (b - a) * (k as f64 / n as f64);
                let pb = a + (b - a) * ((k + 1) as f64 / n as f64);
                contributions.push((next_id + k, pa, sub / 2.0));
                contributions.push((next_id + k + 1, pb, sub / 2.0));
            }
            next_id += n + 1;
        }
    }
    BoundaryMeasure::from_contributions(contributions)
}

/// Self-weight body force `rho0 * h_z` along the (downward) gravity
/// direction.
pub fn self_weight_load(shape: &RoofShape, rho0: f64) -> Result<BodyForce> {
    self_weight_load_with(shape, rho0, [0.0, -1.0])
}

pub fn self_weight_load_with(shape: &RoofShape, rho0: f64, gravity: [f64; 2]) -> Result<BodyForce> {
    if !(rho0 > 0.0) {
        return Err(Error::Numeric(format!("density must be positive, got {rho0}")));
    }
    let s = rho0 * shape.thickness();
    Ok(BodyForce::Constant([s * gravity[0], s * gravity[1]]))
}

/// Downward traction of the given intensity on a moving boundary part.
pub fn snow_load(intensity: f64, region: BoundaryTag) -> Result<Traction> {
    if region == BoundaryTag::Dir {
        return Err(Error::Infeasible(
            "traction on the clamped part is undefined".into(),
        ));
    }
    if !(intensity >= 0.0) {
        return Err(Error::Numeric(format!(
            "snow intensity must be nonnegative, got {intensity}"
        )));
    }
    Ok(if intensity == 0.0 {
        Traction::Zero
    } else {
        Traction::Constant([0.0, -intensity])
    })
}

/// Load data of a run: self weight plus snow on the upper curve.
#[derive(Debug, Clone, Copy)]
pub struct LoadConfig {
    pub rho0: f64,
    pub snow: f64,
    pub gravity: [f64; 2],
}

impl Default for LoadConfig {
    fn default() -> Self {
        LoadConfig {
            rho0: 1.0,
            snow: 0.0,
            gravity: [0.0, -1.0],
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvalSettings {
    pub resolution: f64,
    pub solver_tol: f64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            resolution: 0.05,
            solver_tol: 1e-10,
        }
    }
}

/// Result of meshing and solving one admissible candidate.
#[derive(Debug)]
pub struct ShapeEvaluation {
    pub j: f64,
    pub compliance: f64,
    /// Relative gap of the compliance-work identity.
    pub work_residual: f64,
    pub displacement: Displacement,
    pub mesh: Mesh,
    pub shape: RoofShape,
    pub report: FeasibilityReport,
}

/// Projects, certifies, meshes and solves a candidate.
pub fn evaluate_shape(
    theta: &[f64],
    cfg: &AdmissibleClassConfig,
    loads: &LoadConfig,
    material: &MaterialModel,
    weights: FunctionalWeights,
    settings: &EvalSettings,
) -> Result<ShapeEvaluation> {
    let (projected, report) = project_admissible(theta, cfg);
    if !report.feasible() {
        return Err(Error::Infeasible(format!(
            "candidate failed certification: cone {}, regularity {}, container {}",
            report.cone_ok,
            report.regularity_ok(),
            report.container_ok
        )));
    }
    evaluate_projected(&projected, report, cfg, loads, material, weights, settings)
}

fn evaluate_projected(
    projected: &[f64],
    report: FeasibilityReport,
    cfg: &AdmissibleClassConfig,
    loads: &LoadConfig,
    material: &MaterialModel,
    weights: FunctionalWeights,
    settings: &EvalSettings,
) -> Result<ShapeEvaluation> {
    let shape = make_roof_shape(projected, cfg)?;
    let mesh = shape.build_mesh(settings.resolution)?;
    let body = self_weight_load_with(&shape, loads.rho0, loads.gravity)?;
    let traction = snow_load(loads.snow, BoundaryTag::Up)?;
    let neumann = mesh.boundary_measure(TagFilter::Only(BoundaryTag::Up))?;
    let load = LoadSpec {
        body,
        traction,
        neumann: Some(neumann),
    };
    let sys = assemble(&mesh, material, &load, TagFilter::Only(BoundaryTag::Dir), None)?;
    let (displacement, _) = solve(&sys, settings.solver_tol)?;
    let j = energy_functional(&mesh, material, &displacement, weights);
    let compliance = material_strain_form(&mesh, material, &displacement);
    let work = load_work(&mesh, &load, &displacement);
    let work_residual = (compliance - work).abs() / compliance.abs().max(1e-30);
    Ok(ShapeEvaluation {
        j,
        compliance,
        work_residual,
        displacement,
        mesh,
        shape,
        report,
    })
}

/// One objective evaluation in the search history.
#[derive(Debug, Clone)]
pub struct OptimizationRecord {
    pub iter: usize,
    pub theta: Vec<f64>,
    pub j: f64,
    pub volume: f64,
    pub h_z: f64,
    pub cone_ok: bool,
    pub reg_ok: bool,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct OptimizerSettings {
    pub budget: usize,
    pub seed: u64,
    /// Initial simplex step; defaults to 15% of the region height range.
    pub init_step: Option<f64>,
    pub eval: EvalSettings,
}

#[derive(Debug)]
pub struct OptimizeOutcome {
    pub history: Vec<OptimizationRecord>,
    pub best_theta: Vec<f64>,
    pub best_j: f64,
    pub evaluations: usize,
}

/// Projected Nelder-Mead over the knot heights. Every trial point is
/// projected and certified; infeasible candidates score `+inf`. The
/// recorded best-so-far values are nonincreasing by construction and the
/// whole run is deterministic in `(cfg, theta0, seed, budget)`.
pub fn optimize(
    cfg: &AdmissibleClassConfig,
    loads: &LoadConfig,
    material: &MaterialModel,
    weights: FunctionalWeights,
    theta0: &[f64],
    settings: &OptimizerSettings,
) -> Result<OptimizeOutcome> {
    cfg.validate()?;
    let m = theta0.len();
    if m < 2 {
        return Err(Error::Infeasible("theta0 needs at least two knots".into()));
    }
    if settings.budget < m + 1 {
        return Err(Error::Infeasible(format!(
            "budget {} cannot seed a simplex of {} vertices",
            settings.budget,
            m + 1
        )));
    }
    let (_, start_report) = project_admissible(theta0, cfg);
    if !start_report.feasible() {
        return Err(Error::Infeasible(
            "initial point is infeasible after projection".into(),
        ));
    }

    let (g_lo, g_hi) = cfg.region_height_range();
    let base_step = settings.init_step.unwrap_or(0.15 * (g_hi - g_lo));
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let steps: Vec<f64> = (0..m)
        .map(|_| base_step * (1.0 + 0.05 * rng.gen_range(-1.0..1.0)))
        .collect();

    let mut history: Vec<OptimizationRecord> = Vec::new();
    let mut best_j = f64::INFINITY;
    let mut best_theta = theta0.to_vec();

    let mut objective = |theta_raw: &[f64]| -> f64 {
        let (projected, report) = project_admissible(theta_raw, cfg);
        let (x0, length) = cfg.footprint();
        let h_z = match cfg.volume_rule {
            VolumeRule::ProjectedFootprint => cfg.volume / length,
            VolumeRule::ArcLength => {
                cfg.volume / polyline_length(&knot_points(x0, length, &projected))
            }
        };
        let j = if report.feasible() {
            match evaluate_projected(
                &projected,
                report.clone(),
                cfg,
                loads,
                material,
                weights,
                &settings.eval,
            ) {
                Ok(ev) => ev.j,
                Err(_) => f64::INFINITY,
            }
        } else {
            f64::INFINITY
        };
        let accepted = j < best_j;
        if accepted {
            best_j = j;
            best_theta = projected.clone();
        }
        history.push(OptimizationRecord {
            iter: history.len(),
            theta: projected,
            j,
            volume: h_z * length,
            h_z,
            cone_ok: report.cone_ok,
            reg_ok: report.regularity_ok(),
            accepted,
        });
        j
    };

    let nm = nelder_mead(
        &mut objective,
        theta0,
        &steps,
        &NelderMeadOptions {
            budget: settings.budget,
            diameter_tol: 1e-6,
        },
    );
    drop(objective);

    if !best_j.is_finite() {
        return Err(Error::Infeasible(
            "every evaluated candidate was infeasible".into(),
        ));
    }
    Ok(OptimizeOutcome {
        history,
        best_theta,
        best_j,
        evaluations: nm.evaluations,
    })
}

/// History CSV: `iter,J,volume,h_z,cone_ok,reg_ok,accepted`.
pub fn write_history_csv(out: &mut dyn std::io::Write, history: &[OptimizationRecord]) -> Result<()> {
    writeln!(out, "iter,J,volume,h_z,cone_ok,reg_ok,accepted")?;
    for rec in history {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            rec.iter, rec.j, rec.volume, rec.h_z, rec.cone_ok, rec.reg_ok, rec.accepted
        )?;
    }
    Ok(())
}

pub fn history_csv_string(history: &[OptimizationRecord]) -> String {
    let mut buf = Vec::new();
    write_history_csv(&mut buf, history).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv is ascii")
}
