//! Robin-form energies on domain sequences and numerical two-sided
//! convergence indicators, plus weak-star comparison of boundary measures.
//!
//! The reports are indicators computed on canonical sequences (solutions
//! and recovery interpolants), not proofs; fractal limits are stood in for
//! by a fine prefractal proxy whose level is recorded in the report.

mod locate;

pub use locate::P1Locator;

use crate::elasticity::{
    cg_jacobi, cholesky_solve, mass_element, mass_form, material_strain_form, stiffness_element,
    strain_form, BodyForce, Csr, Displacement, DofMap, MaterialModel, TriGeom,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{Point2, Polygon};
use crate::measure::BoundaryMeasure;
use crate::mesh::{build_koch_square_mesh, Mesh, TagFilter};

/// Quadratic Robin energy `∫ e(u):e(u) + ∫ |u|^2 + alpha ∫ |u|^2 dmu` on
/// the subspace vanishing on the (optional) clamped part.
pub struct RobinForm {
    pub mesh: Mesh,
    pub alpha: f64,
    /// Measure on the Robin part of the boundary.
    pub gamma: BoundaryMeasure,
    pub dirichlet: Option<TagFilter>,
    /// Coefficient override; the identity when absent.
    pub material: Option<MaterialModel>,
}

impl RobinForm {
    pub fn new(
        mesh: Mesh,
        alpha: f64,
        gamma: BoundaryMeasure,
        dirichlet: Option<TagFilter>,
    ) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(Error::Numeric(format!(
                "robin coefficient must be nonnegative, got {alpha}"
            )));
        }
        if gamma.nodes().iter().any(|&n| n >= mesh.num_nodes()) {
            return Err(Error::Mesh(
                "robin measure references nodes outside the mesh".into(),
            ));
        }
        Ok(RobinForm {
            mesh,
            alpha,
            gamma,
            dirichlet,
            material: None,
        })
    }

    fn strain_energy(&self, u: &Displacement) -> f64 {
        match &self.material {
            None => strain_form(&self.mesh, u),
            Some(material) => material_strain_form(&self.mesh, material, u),
        }
    }
}

/// Evaluates the Robin form on a nodal field.
pub fn robin_form_apply(form: &RobinForm, u: &Displacement) -> f64 {
    let boundary: f64 = form
        .gamma
        .iter()
        .map(|(node, _, w)| {
            let v = u.get(node);
            w * (v[0] * v[0] + v[1] * v[1])
        })
        .sum();
    form.strain_energy(u) + mass_form(&form.mesh, u) + form.alpha * boundary
}

/// Minimizes `1/2 a(u,u) - ∫ f.u`; the mass term keeps the system positive
/// definite for every `alpha >= 0`, clamped part or not.
pub fn solve_robin(form: &RobinForm, body: &BodyForce, tol: f64) -> Result<Displacement> {
    let mesh = &form.mesh;
    let clamped = match form.dirichlet {
        None => Vec::new(),
        Some(filter) => {
            let nodes = mesh.tagged_nodes(filter);
            if nodes.is_empty() {
                return Err(Error::Mesh("clamped filter matches no boundary nodes".into()));
            }
            nodes
        }
    };
    let dof_map = DofMap::new(mesh.num_nodes(), &clamped);
    let n_free = dof_map.n_free();

    let identity = MaterialModel::scalar_constant(1.0)?;
    let material = form.material.as_ref().unwrap_or(&identity);
    let blocks = exec::map_range(mesh.triangles().len(), |t| {
        let geom = TriGeom::of(mesh, t);
        let k = stiffness_element(&geom, material);
        let m = mass_element(&geom);
        let f = body.eval(geom.centroid);
        let third = geom.area() / 3.0;
        let mut combined = k;
        for i in 0..6 {
            for j in 0..6 {
                combined[i][j] += m[i][j];
            }
        }
        (
            crate::elasticity::element_dofs(geom.nodes),
            combined,
            [f[0] * third, f[1] * third],
        )
    });

    let mut triplets = Vec::with_capacity(blocks.len() * 36 + form.gamma.len() * 2);
    let mut rhs = vec![0.0; n_free];
    for (dofs, k, fe) in &blocks {
        for i in 0..6 {
            let Some(fi) = dof_map.to_free[dofs[i]] else {
                continue;
            };
            rhs[fi] += fe[i % 2];
            for j in 0..6 {
                if let Some(fj) = dof_map.to_free[dofs[j]] {
                    triplets.push((fi, fj, k[i][j]));
                }
            }
        }
    }
    for (node, _, w) in form.gamma.iter() {
        for c in 0..2 {
            if let Some(fi) = dof_map.to_free[2 * node + c] {
                triplets.push((fi, fi, form.alpha * w));
            }
        }
    }
    let a = Csr::from_triplets(n_free, triplets);

    let reduced = if n_free <= 1200 {
        cholesky_solve(&a, &rhs)?
    } else {
        cg_jacobi(&a, &rhs, tol, 40 * n_free + 200)?.0
    };
    let mut values = vec![[0.0, 0.0]; mesh.num_nodes()];
    for (fi, &dof) in dof_map.free.iter().enumerate() {
        values[dof / 2][dof % 2] = reduced[fi];
    }
    Displacement::from_values(values)
}

/// One member of a domain sequence.
pub struct RobinLevel {
    /// Sequence index reported in the CSV.
    pub label: f64,
    pub form: RobinForm,
}

/// Sequence of Robin problems against a limit problem on a common
/// container.
pub struct DomainSequenceStudy {
    pub container: Polygon,
    pub levels: Vec<RobinLevel>,
    pub limit: RobinForm,
    /// Human-readable description of the limit object (for proxies, the
    /// proxy level).
    pub limit_label: String,
    pub body: BodyForce,
    /// Background-grid cells along x.
    pub background: usize,
    pub solver_tol: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MoscoRow {
    pub label: f64,
    /// `L^2(D)` distance of the zero-extended solutions.
    pub e_n: f64,
    /// Form value on the recovery interpolant of the limit solution.
    pub a_rec: f64,
    /// Form value on the level solution.
    pub a_sol: f64,
}

#[derive(Debug, Clone)]
pub struct MoscoReport {
    pub rows: Vec<MoscoRow>,
    pub a_limit: f64,
    pub e_decreasing: bool,
    pub e_final_below_tol: bool,
    /// Last recovery value does not exceed the limit value beyond tol.
    pub recovery_ok: bool,
    /// Last solution value is not below the limit value beyond tol.
    pub liminf_ok: bool,
    pub passed: bool,
    pub limit_label: String,
}

/// Solves the sequence, extends by zero to a background grid on the
/// container, and reports the convergence indicators.
pub fn mconvergence_indicators(study: &DomainSequenceStudy, tol: f64) -> Result<MoscoReport> {
    if study.levels.is_empty() {
        return Err(Error::Mesh("study has no levels".into()));
    }
    if study.background < 2 {
        return Err(Error::Mesh("background grid needs at least 2 cells".into()));
    }
    for (idx, level) in study.levels.iter().enumerate() {
        for p in level.form.mesh.nodes() {
            if !study.container.contains(*p) {
                return Err(Error::Mesh(format!(
                    "level {idx} mesh leaves the container at ({}, {})",
                    p.x, p.y
                )));
            }
        }
    }
    for p in study.limit.mesh.nodes() {
        if !study.container.contains(*p) {
            return Err(Error::Mesh("limit mesh leaves the container".into()));
        }
    }

    let u_limit = solve_robin(&study.limit, &study.body, study.solver_tol)?;
    let a_limit = robin_form_apply(&study.limit, &u_limit);
    let limit_loc = P1Locator::new(&study.limit.mesh);

    let (lo, hi) = study.container.bounding_box();
    let nx = study.background;
    let ny = ((hi.y - lo.y) / (hi.x - lo.x) * nx as f64).ceil().max(1.0) as usize;
    let dx = (hi.x - lo.x) / nx as f64;
    let dy = (hi.y - lo.y) / ny as f64;
    let cell = dx * dy;

    let mut rows = Vec::with_capacity(study.levels.len());
    for level in &study.levels {
        let u_n = solve_robin(&level.form, &study.body, study.solver_tol)?;
        let level_loc = P1Locator::new(&level.form.mesh);

        let row_sums = exec::map_range(ny, |j| {
            let y = lo.y + (j as f64 + 0.5) * dy;
            let mut acc = 0.0;
            for i in 0..nx {
                let p = Point2::new(lo.x + (i as f64 + 0.5) * dx, y);
                let vn = level_loc.eval_extended_by_zero(&u_n, p);
                let vl = limit_loc.eval_extended_by_zero(&u_limit, p);
                let dx0 = vn[0] - vl[0];
                let dx1 = vn[1] - vl[1];
                acc += dx0 * dx0 + dx1 * dx1;
            }
            acc
        });
        let e_n = (row_sums.into_iter().sum::<f64>() * cell).sqrt();

        let u_rec = Displacement::from_values(
            level
                .form
                .mesh
                .nodes()
                .iter()
                .map(|&p| limit_loc.eval_clamped(&u_limit, p))
                .collect(),
        )?;
        let a_rec = robin_form_apply(&level.form, &u_rec);
        let a_sol = robin_form_apply(&level.form, &u_n);
        rows.push(MoscoRow {
            label: level.label,
            e_n,
            a_rec,
            a_sol,
        });
    }

    let e_decreasing = rows.windows(2).all(|w| w[1].e_n <= w[0].e_n);
    let e_final_below_tol = rows.last().map(|r| r.e_n <= tol).unwrap_or(false);
    let scale = tol * a_limit.abs().max(1.0);
    let recovery_ok = rows.last().map(|r| r.a_rec - a_limit <= scale).unwrap_or(false);
    let liminf_ok = rows.last().map(|r| r.a_sol - a_limit >= -scale).unwrap_or(false);
    Ok(MoscoReport {
        rows,
        a_limit,
        e_decreasing,
        e_final_below_tol,
        recovery_ok,
        liminf_ok,
        passed: e_decreasing && e_final_below_tol && recovery_ok && liminf_ok,
        limit_label: study.limit_label.clone(),
    })
}

/// CSV rows `n,e_n,a_n_rec,a_n_sol`.
pub fn write_mosco_csv(out: &mut dyn std::io::Write, report: &MoscoReport) -> Result<()> {
    writeln!(out, "n,e_n,a_n_rec,a_n_sol")?;
    for row in &report.rows {
        writeln!(out, "{},{},{},{}", row.label, row.e_n, row.a_rec, row.a_sol)?;
    }
    Ok(())
}

/// Fixed-domain study with the coefficient schedule `alpha + 1/n` over the
/// given index subsequence.
pub fn alpha_schedule_study(
    mesh: Mesh,
    gamma: BoundaryMeasure,
    dirichlet: Option<TagFilter>,
    alpha: f64,
    indices: &[f64],
    body: BodyForce,
    background: usize,
    solver_tol: f64,
    container: Polygon,
) -> Result<DomainSequenceStudy> {
    let mut levels = Vec::with_capacity(indices.len());
    for &n in indices {
        if !(n >= 1.0) {
            return Err(Error::Numeric("schedule indices must be >= 1".into()));
        }
        levels.push(RobinLevel {
            label: n,
            form: RobinForm::new(mesh.clone(), alpha + 1.0 / n, gamma.clone(), dirichlet)?,
        });
    }
    let limit = RobinForm::new(mesh, alpha, gamma, dirichlet)?;
    Ok(DomainSequenceStudy {
        container,
        levels,
        limit,
        limit_label: format!("alpha = {alpha}"),
        body,
        background,
        solver_tol,
    })
}

/// Prefractal-top square study: levels against a deeper proxy limit. All
/// meshes are resolved at the proxy pitch so geometry differences dominate
/// the indicator.
pub fn koch_study(
    levels: &[u32],
    proxy_level: u32,
    alpha: f64,
    body: BodyForce,
    background: usize,
    solver_tol: f64,
) -> Result<DomainSequenceStudy> {
    if levels.is_empty() {
        return Err(Error::Mesh("need at least one level".into()));
    }
    let depth = proxy_level;
    let mut seq = Vec::with_capacity(levels.len());
    for &level in levels {
        if level >= proxy_level {
            return Err(Error::Mesh(format!(
                "level {level} must stay below the proxy level {proxy_level}"
            )));
        }
        let (mesh, gamma) = build_koch_square_mesh(level, depth)?;
        seq.push(RobinLevel {
            label: level as f64,
            form: RobinForm::new(mesh, alpha, gamma, Some(TagFilter::Only(crate::mesh::BoundaryTag::Dir)))?,
        });
    }
    let (limit_mesh, limit_gamma) = build_koch_square_mesh(proxy_level, depth)?;
    let limit = RobinForm::new(
        limit_mesh,
        alpha,
        limit_gamma,
        Some(TagFilter::Only(crate::mesh::BoundaryTag::Dir)),
    )?;
    let container = Polygon::rectangle(-0.01, -0.01, 1.01, 1.45)?;
    Ok(DomainSequenceStudy {
        container,
        levels: seq,
        limit,
        limit_label: format!("prefractal proxy level {proxy_level}"),
        body,
        background,
        solver_tol,
    })
}

/// Bank of Lipschitz test functions on a box.
pub struct TestBank {
    funcs: Vec<Box<dyn Fn(Point2) -> f64 + Send + Sync>>,
}

impl TestBank {
    /// Polynomials up to degree two plus low-frequency trigonometric
    /// products in normalized box coordinates; 32 functions.
    pub fn default_for_box(lo: Point2, hi: Point2) -> TestBank {
        let w = (hi.x - lo.x).max(f64::MIN_POSITIVE);
        let h = (hi.y - lo.y).max(f64::MIN_POSITIVE);
        let unit = move |p: Point2| ((p.x - lo.x) / w, (p.y - lo.y) / h);
        let mut funcs: Vec<Box<dyn Fn(Point2) -> f64 + Send + Sync>> = vec![
            Box::new(|_| 1.0),
            Box::new(move |p| unit(p).0),
            Box::new(move |p| unit(p).1),
            Box::new(move |p| {
                let (x, y) = unit(p);
                x * y
            }),
            Box::new(move |p| unit(p).0.powi(2)),
            Box::new(move |p| unit(p).1.powi(2)),
        ];
        use std::f64::consts::PI;
        for i in 0..4 {
            for j in 0..4 {
                if i == 0 && j == 0 {
                    continue;
                }
                funcs.push(Box::new(move |p| {
                    let (x, y) = unit(p);
                    (i as f64 * PI * x).cos() * (j as f64 * PI * y).cos()
                }));
            }
        }
        for i in 1..4 {
            for j in 1..4 {
                funcs.push(Box::new(move |p| {
                    let (x, y) = unit(p);
                    (i as f64 * PI * x).sin() * (j as f64 * PI * y).sin()
                }));
            }
        }
        funcs.push(Box::new(move |p| {
            let (x, y) = unit(p);
            (PI * x).sin() * (PI * y).cos()
        }));
        funcs.push(Box::new(move |p| {
            let (x, y) = unit(p);
            (PI * x).cos() * (PI * y).sin()
        }));
        TestBank { funcs }
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }
}

/// Largest gap of the two measures over the bank,
/// `max_phi |∫ phi dmu1 - ∫ phi dmu2|`; a pseudo-metric.
pub fn weak_star_distance(
    mu1: &BoundaryMeasure,
    mu2: &BoundaryMeasure,
    bank: &TestBank,
) -> Result<f64> {
    if bank.is_empty() {
        return Err(Error::Numeric("test bank must be nonempty".into()));
    }
    let gaps = exec::map_slice(&bank.funcs, |f| {
        (mu1.integrate(|p| f(p)) - mu2.integrate(|p| f(p))).abs()
    });
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests;
