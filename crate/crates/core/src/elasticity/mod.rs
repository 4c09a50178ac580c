//! P1 finite elements for the mixed-boundary elasticity system: material
//! laws, assembly with symmetric Dirichlet elimination, solvers, discrete
//! norm constants and the boundary Green-identity residual.

mod constants;
mod forms;
mod green;
mod linalg;

pub use constants::{estimate_korn_constant, estimate_poincare_constant};
pub use forms::{
    body_l2_norm, grad_form, load_work, mass_form, material_strain_form, strain_form,
    traction_l2_norm, w12_norm,
};
pub use green::green_residual;
pub use linalg::{cg_jacobi, cholesky_solve, Csr, SolveStats};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::Point2;
use crate::measure::BoundaryMeasure;
use crate::mesh::{Mesh, TagFilter};

/// Reduced systems at or below this many unknowns use dense Cholesky.
const CHOLESKY_MAX_DOFS: usize = 1200;

/// 2x2 matrix with row-major entries.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub xx: f64,
    pub xy: f64,
    pub yx: f64,
    pub yy: f64,
}

impl Mat2 {
    pub fn trace(self) -> f64 {
        self.xx + self.yy
    }
}

/// Full contraction `A : B = sum_ij a_ij b_ij`.
pub fn contract(a: Mat2, b: Mat2) -> f64 {
    a.xx * b.xx + a.xy * b.xy + a.yx * b.yx + a.yy * b.yy
}

/// Scalar or spatially varying coefficient field.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Field(Arc<dyn Fn(Point2) -> f64 + Send + Sync>),
}

impl Coefficient {
    pub fn eval(&self, p: Point2) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Field(f) => f(p),
        }
    }
}

impl std::fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Field(_) => write!(f, "Field(..)"),
        }
    }
}

/// Stress law `sigma(e) = A e`: either a scalar multiple of the strain or
/// the isotropic two-coefficient law.
#[derive(Debug, Clone)]
pub enum MaterialModel {
    Scalar {
        a: Coefficient,
        /// Lower ellipticity bound, `alpha <= a(x)`.
        alpha: f64,
        /// Inverse upper bound, `a(x) <= 1/beta`.
        beta: f64,
    },
    Lame {
        lambda: Coefficient,
        mu: Coefficient,
    },
}

impl MaterialModel {
    pub fn scalar_constant(a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Numeric(format!("scalar coefficient must be positive, got {a}")));
        }
        Ok(MaterialModel::Scalar {
            a: Coefficient::Constant(a),
            alpha: a,
            beta: 1.0 / a,
        })
    }

    pub fn scalar_field(
        a: impl Fn(Point2) -> f64 + Send + Sync + 'static,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::Numeric("ellipticity bounds must be positive".into()));
        }
        Ok(MaterialModel::Scalar {
            a: Coefficient::Field(Arc::new(a)),
            alpha,
            beta,
        })
    }

    pub fn lame_constants(lambda: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !(lambda > -mu) {
            return Err(Error::Numeric(format!(
                "lame coefficients need mu > 0 and lambda > -mu, got ({lambda}, {mu})"
            )));
        }
        Ok(MaterialModel::Lame {
            lambda: Coefficient::Constant(lambda),
            mu: Coefficient::Constant(mu),
        })
    }

    pub fn stress(&self, at: Point2, e: Mat2) -> Mat2 {
        match self {
            MaterialModel::Scalar { a, .. } => {
                let c = a.eval(at);
                Mat2 {
                    xx: c * e.xx,
                    xy: c * e.xy,
                    yx: c * e.yx,
                    yy: c * e.yy,
                }
            }
            MaterialModel::Lame { lambda, mu } => {
                let l = lambda.eval(at);
                let m = mu.eval(at);
                let tr = e.trace();
                Mat2 {
                    xx: l * tr + 2.0 * m * e.xx,
                    xy: 2.0 * m * e.xy,
                    yx: 2.0 * m * e.yx,
                    yy: l * tr + 2.0 * m * e.yy,
                }
            }
        }
    }

    /// Symmetric energy pairing `sigma(e1) : e2`, evaluated so the two
    /// argument orders give bitwise-equal results.
    pub fn pairing(&self, at: Point2, e1: Mat2, e2: Mat2) -> f64 {
        match self {
            MaterialModel::Scalar { a, .. } => a.eval(at) * contract(e1, e2),
            MaterialModel::Lame { lambda, mu } => {
                lambda.eval(at) * (e1.trace() * e2.trace())
                    + 2.0 * mu.eval(at) * contract(e1, e2)
            }
        }
    }

    /// Coercivity constant: `sigma(e) : e >= alpha e : e` for symmetric `e`.
    pub fn ellipticity_alpha(&self) -> f64 {
        match self {
            MaterialModel::Scalar { alpha, .. } => *alpha,
            MaterialModel::Lame { lambda, mu } => match (lambda, mu) {
                (Coefficient::Constant(l), Coefficient::Constant(m)) => {
                    // tr(e)^2 <= 2 |e|^2 in the plane.
                    if *l >= 0.0 {
                        2.0 * m
                    } else {
                        2.0 * (m + l)
                    }
                }
                _ => f64::NAN,
            },
        }
    }

    /// Checks the recorded bounds against the fields at element midpoints.
    pub fn validate_on(&self, mesh: &Mesh) -> Result<()> {
        for t in 0..mesh.triangles().len() {
            let c = mesh.triangle_centroid(t);
            match self {
                MaterialModel::Scalar { a, alpha, beta } => {
                    let v = a.eval(c);
                    if !(v >= *alpha - 1e-12 && v <= 1.0 / beta + 1e-12) {
                        return Err(Error::Numeric(format!(
                            "scalar coefficient {v} at ({}, {}) violates [{alpha}, {}]",
                            c.x,
                            c.y,
                            1.0 / beta
                        )));
                    }
                }
                MaterialModel::Lame { lambda, mu } => {
                    let l = lambda.eval(c);
                    let m = mu.eval(c);
                    if !(m > 0.0 && l > -m) {
                        return Err(Error::Numeric(format!(
                            "lame fields ({l}, {m}) at ({}, {}) are not elliptic",
                            c.x, c.y
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Nodal displacement field.
#[derive(Debug, Clone, PartialEq)]
pub struct Displacement {
    values: Vec<[f64; 2]>,
}

impl Displacement {
    pub fn zero(num_nodes: usize) -> Self {
        Displacement {
            values: vec![[0.0, 0.0]; num_nodes],
        }
    }

    pub fn from_values(values: Vec<[f64; 2]>) -> Result<Self> {
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("displacement has non-finite entries".into()));
        }
        Ok(Displacement { values })
    }

    /// Nodal interpolation of a closed-form field.
    pub fn interpolate(mesh: &Mesh, f: impl Fn(Point2) -> [f64; 2]) -> Self {
        Displacement {
            values: mesh.nodes().iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }

    pub fn get(&self, node: usize) -> [f64; 2] {
        self.values[node]
    }

    pub fn max_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| (v[0] * v[0] + v[1] * v[1]).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Displacement {
            values: self.values.iter().map(|v| [t * v[0], t * v[1]]).collect(),
        }
    }
}

/// Volume force density.
#[derive(Clone)]
pub enum BodyForce {
    Zero,
    Constant([f64; 2]),
    Field(Arc<dyn Fn(Point2) -> [f64; 2] + Send + Sync>),
}

impl BodyForce {
    pub fn eval(&self, p: Point2) -> [f64; 2] {
        match self {
            BodyForce::Zero => [0.0, 0.0],
            BodyForce::Constant(v) => *v,
            BodyForce::Field(f) => f(p),
        }
    }
}

impl std::fmt::Debug for BodyForce {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BodyForce::Zero => write!(f, "Zero"),
            BodyForce::Constant(v) => write!(f, "Constant({v:?})"),
            BodyForce::Field(_) => write!(f, "Field(..)"),
        }
    }
}

/// Boundary traction, evaluated on the support of the Neumann measure.
#[derive(Clone)]
pub enum Traction {
    Zero,
    Constant([f64; 2]),
    Field(Arc<dyn Fn(Point2) -> [f64; 2] + Send + Sync>),
}

impl Traction {
    pub fn eval(&self, p: Point2) -> [f64; 2] {
        match self {
            Traction::Zero => [0.0, 0.0],
            Traction::Constant(v) => *v,
            Traction::Field(f) => f(p),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Traction::Zero)
    }
}

impl std::fmt::Debug for Traction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Traction::Zero => write!(f, "Zero"),
            Traction::Constant(v) => write!(f, "Constant({v:?})"),
            Traction::Field(_) => write!(f, "Field(..)"),
        }
    }
}

/// Problem data: body force, traction and the measure weighting the trace
/// integral on the Neumann part.
#[derive(Debug, Clone)]
pub struct LoadSpec {
    pub body: BodyForce,
    pub traction: Traction,
    pub neumann: Option<BoundaryMeasure>,
}

impl LoadSpec {
    pub fn body_only(body: BodyForce) -> Self {
        LoadSpec {
            body,
            traction: Traction::Zero,
            neumann: None,
        }
    }
}

/// Per-triangle geometry: coordinate differences, doubled area and the P1
/// basis gradients derived from them.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TriGeom {
    pub nodes: [usize; 3],
    pub dx10: f64,
    pub dy10: f64,
    pub dx20: f64,
    pub dy20: f64,
    pub two_a: f64,
    pub centroid: Point2,
}

impl TriGeom {
    pub fn of(mesh: &Mesh, t: usize) -> TriGeom {
        let tri = mesh.triangles()[t];
        let (p0, p1, p2) = (
            mesh.nodes()[tri[0]],
            mesh.nodes()[tri[1]],
            mesh.nodes()[tri[2]],
        );
        let dx10 = p1.x - p0.x;
        let dy10 = p1.y - p0.y;
        let dx20 = p2.x - p0.x;
        let dy20 = p2.y - p0.y;
        TriGeom {
            nodes: tri,
            dx10,
            dy10,
            dx20,
            dy20,
            two_a: dx10 * dy20 - dx20 * dy10,
            centroid: (p0 + p1 + p2) / 3.0,
        }
    }

    pub fn area(&self) -> f64 {
        0.5 * self.two_a
    }

    /// Gradient of the P1 interpolant of nodal values, from edge
    /// differences. Constant, linear and rigid-rotation fields come out
    /// exact because matching products cancel bitwise.
    pub fn grad_scalar(&self, u0: f64, u1: f64, u2: f64) -> [f64; 2] {
        let du10 = u1 - u0;
        let du20 = u2 - u0;
        [
            (du10 * self.dy20 - du20 * self.dy10) / self.two_a,
            (du20 * self.dx10 - du10 * self.dx20) / self.two_a,
        ]
    }

    /// Basis-function gradients.
    pub fn basis_grads(&self) -> [[f64; 2]; 3] {
        let inv = 1.0 / self.two_a;
        [
            [(self.dy10 - self.dy20) * inv, (self.dx20 - self.dx10) * inv],
            [self.dy20 * inv, -self.dx20 * inv],
            [-self.dy10 * inv, self.dx10 * inv],
        ]
    }

    /// Strains of the six local vector basis functions, indexed by
    /// `2 * local_node + component`.
    pub fn basis_strains(&self) -> [Mat2; 6] {
        let g = self.basis_grads();
        let mut out = [Mat2::default(); 6];
        for a in 0..3 {
            let [gx, gy] = g[a];
            out[2 * a] = Mat2 {
                xx: gx,
                xy: 0.5 * gy,
                yx: 0.5 * gy,
                yy: 0.0,
            };
            out[2 * a + 1] = Mat2 {
                xx: 0.0,
                xy: 0.5 * gx,
                yx: 0.5 * gx,
                yy: gy,
            };
        }
        out
    }
}

/// Symmetric gradient of the displacement, constant on each triangle.
pub fn strain(mesh: &Mesh, u: &Displacement) -> Vec<Mat2> {
    assert_eq!(u.len(), mesh.num_nodes(), "field does not match the mesh");
    exec::map_range(mesh.triangles().len(), |t| {
        let g = TriGeom::of(mesh, t);
        let [a, b, c] = g.nodes;
        let (ua, ub, uc) = (u.get(a), u.get(b), u.get(c));
        let gx = g.grad_scalar(ua[0], ub[0], uc[0]);
        let gy = g.grad_scalar(ua[1], ub[1], uc[1]);
        let off = 0.5 * (gx[1] + gy[0]);
        Mat2 {
            xx: gx[0],
            xy: off,
            yx: off,
            yy: gy[1],
        }
    })
}

pub(crate) fn element_dofs(tri: [usize; 3]) -> [usize; 6] {
    [
        2 * tri[0],
        2 * tri[0] + 1,
        2 * tri[1],
        2 * tri[1] + 1,
        2 * tri[2],
        2 * tri[2] + 1,
    ]
}

/// Stiffness block of one triangle; bitwise symmetric by construction.
pub(crate) fn stiffness_element(geom: &TriGeom, material: &MaterialModel) -> [[f64; 6]; 6] {
    let strains = geom.basis_strains();
    let area = geom.area();
    let mut k = [[0.0; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            k[i][j] = area * material.pairing(geom.centroid, strains[j], strains[i]);
        }
    }
    k
}

/// Consistent P1 mass block per vector component.
pub(crate) fn mass_element(geom: &TriGeom) -> [[f64; 6]; 6] {
    let area = geom.area();
    let mut m = [[0.0; 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            let w = if a == b { area / 6.0 } else { area / 12.0 };
            m[2 * a][2 * b] = w;
            m[2 * a + 1][2 * b + 1] = w;
        }
    }
    m
}

/// Full-gradient (vector Laplacian) block per component.
pub(crate) fn gradient_element(geom: &TriGeom) -> [[f64; 6]; 6] {
    let grads = geom.basis_grads();
    let area = geom.area();
    let mut g = [[0.0; 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            let w = area * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
            g[2 * a][2 * b] = w;
            g[2 * a + 1][2 * b + 1] = w;
        }
    }
    g
}

/// Mapping between global dofs (two per node) and the free unknowns left
/// after constraining the clamped nodes.
#[derive(Debug, Clone)]
pub(crate) struct DofMap {
    pub free: Vec<usize>,
    pub to_free: Vec<Option<usize>>,
}

impl DofMap {
    pub fn new(num_nodes: usize, constrained_nodes: &[usize]) -> DofMap {
        let mut constrained = vec![false; 2 * num_nodes];
        for &n in constrained_nodes {
            constrained[2 * n] = true;
            constrained[2 * n + 1] = true;
        }
        let mut free = Vec::new();
        let mut to_free = vec![None; 2 * num_nodes];
        for dof in 0..2 * num_nodes {
            if !constrained[dof] {
                to_free[dof] = Some(free.len());
                free.push(dof);
            }
        }
        DofMap { free, to_free }
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }
}

/// Assembles element blocks into a reduced matrix over free dofs.
/// Element blocks are computed in parallel; accumulation is sequential in
/// element order, so the matrix is bit-identical across thread counts.
pub(crate) fn assemble_operator(
    mesh: &Mesh,
    dof_map: &DofMap,
    element: impl Fn(&TriGeom) -> [[f64; 6]; 6] + Sync + Send,
) -> Csr {
    let blocks = exec::map_range(mesh.triangles().len(), |t| {
        let geom = TriGeom::of(mesh, t);
        (element_dofs(geom.nodes), element(&geom))
    });
    let mut triplets = Vec::with_capacity(blocks.len() * 36);
    for (dofs, k) in &blocks {
        for i in 0..6 {
            let Some(fi) = dof_map.to_free[dofs[i]] else {
                continue;
            };
            for j in 0..6 {
                if let Some(fj) = dof_map.to_free[dofs[j]] {
                    triplets.push((fi, fj, k[i][j]));
                }
            }
        }
    }
    Csr::from_triplets(dof_map.n_free(), triplets)
}

/// Discrete mixed-boundary system after symmetric elimination of the
/// clamped dofs.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    num_nodes: usize,
    pub stiffness: Csr,
    pub load: Vec<f64>,
    dof_map: DofMap,
    /// Prescribed values on constrained dofs (zero unless lifted).
    dirichlet_values: Vec<f64>,
    dirichlet_dofs: Vec<usize>,
}

impl AssembledSystem {
    pub fn n_free(&self) -> usize {
        self.dof_map.n_free()
    }

    pub fn dirichlet_dofs(&self) -> &[usize] {
        &self.dirichlet_dofs
    }

    /// Expands a reduced vector to a full nodal field, filling constrained
    /// dofs with their prescribed values.
    fn expand(&self, reduced: &[f64]) -> Displacement {
        let mut flat = self.dirichlet_values.clone();
        for (fi, &dof) in self.dof_map.free.iter().enumerate() {
            flat[dof] = reduced[fi];
        }
        let values = flat.chunks(2).map(|c| [c[0], c[1]]).collect();
        Displacement { values }
    }

    /// Restricts a full nodal field to the free dofs.
    pub fn restrict(&self, u: &Displacement) -> Vec<f64> {
        self.dof_map
            .free
            .iter()
            .map(|&dof| u.values[dof / 2][dof % 2])
            .collect()
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }
}

/// Assembles the weak form: stiffness over free dofs, body force by the
/// exact linear rule, traction by lumped nodal weights, and symmetric
/// elimination of the clamped part (with optional lifted boundary values).
pub fn assemble(
    mesh: &Mesh,
    material: &MaterialModel,
    load: &LoadSpec,
    dirichlet: TagFilter,
    lift: Option<&(dyn Fn(Point2) -> [f64; 2] + Sync)>,
) -> Result<AssembledSystem> {
    material.validate_on(mesh)?;
    let clamped = mesh.tagged_nodes(dirichlet);
    if clamped.is_empty() {
        return Err(Error::Solver(
            "clamped part is empty: rigid motions are in the kernel".into(),
        ));
    }
    if !load.traction.is_zero() && load.neumann.is_none() {
        return Err(Error::Solver(
            "traction given without a Neumann measure".into(),
        ));
    }

    let num_nodes = mesh.num_nodes();
    let dof_map = DofMap::new(num_nodes, &clamped);

    let mut dirichlet_values = vec![0.0; 2 * num_nodes];
    if let Some(f) = lift {
        for &n in &clamped {
            let v = f(mesh.nodes()[n]);
            dirichlet_values[2 * n] = v[0];
            dirichlet_values[2 * n + 1] = v[1];
        }
    }

    let blocks = exec::map_range(mesh.triangles().len(), |t| {
        let geom = TriGeom::of(mesh, t);
        let k = stiffness_element(&geom, material);
        // Body force: f(centroid) . phi_i integrates to area/3 per node.
        let f = load.body.eval(geom.centroid);
        let third = geom.area() / 3.0;
        (
            element_dofs(geom.nodes),
            k,
            [f[0] * third, f[1] * third],
        )
    });

    let n_free = dof_map.n_free();
    let mut triplets = Vec::with_capacity(blocks.len() * 36);
    let mut rhs = vec![0.0; n_free];
    for (dofs, k, fe) in &blocks {
        for i in 0..6 {
            let Some(fi) = dof_map.to_free[dofs[i]] else {
                continue;
            };
            rhs[fi] += fe[i % 2];
            for j in 0..6 {
                match dof_map.to_free[dofs[j]] {
                    Some(fj) => triplets.push((fi, fj, k[i][j])),
                    None => rhs[fi] -= k[i][j] * dirichlet_values[dofs[j]],
                }
            }
        }
    }

    if let Some(measure) = &load.neumann {
        for (node, point, w) in measure.iter() {
            let g = load.traction.eval(point);
            for c in 0..2 {
                if let Some(fi) = dof_map.to_free[2 * node + c] {
                    rhs[fi] += g[c] * w;
                }
            }
        }
    }

    let dirichlet_dofs = clamped
        .iter()
        .flat_map(|&n| [2 * n, 2 * n + 1])
        .collect();
    Ok(AssembledSystem {
        num_nodes,
        stiffness: Csr::from_triplets(n_free, triplets),
        load: rhs,
        dof_map,
        dirichlet_values,
        dirichlet_dofs,
    })
}

/// Unreduced stiffness over all dofs; used by kernel and symmetry checks.
pub fn assemble_unconstrained_stiffness(mesh: &Mesh, material: &MaterialModel) -> Result<Csr> {
    material.validate_on(mesh)?;
    let dof_map = DofMap::new(mesh.num_nodes(), &[]);
    Ok(assemble_operator(mesh, &dof_map, |geom| {
        stiffness_element(geom, material)
    }))
}

/// Solves the reduced system: dense Cholesky up to a size threshold, then
/// Jacobi CG at the requested relative residual.
pub fn solve(sys: &AssembledSystem, tol: f64) -> Result<(Displacement, SolveStats)> {
    let n = sys.n_free();
    if n == 0 {
        return Ok((
            sys.expand(&[]),
            SolveStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let (reduced, stats) = if n <= CHOLESKY_MAX_DOFS {
        let x = cholesky_solve(&sys.stiffness, &sys.load)?;
        let r = residual_norm(&sys.stiffness, &x, &sys.load);
        (
            x,
            SolveStats {
                iterations: 0,
                relative_residual: r,
            },
        )
    } else {
        cg_jacobi(&sys.stiffness, &sys.load, tol, 40 * n + 200)?
    };
    if stats.relative_residual > tol.max(1e-12) {
        return Err(Error::Solver(format!(
            "solve finished with relative residual {} above tol {tol}",
            stats.relative_residual
        )));
    }
    Ok((sys.expand(&reduced), stats))
}

fn residual_norm(a: &Csr, x: &[f64], b: &[f64]) -> f64 {
    let bn = linalg::norm(b);
    if bn == 0.0 {
        return 0.0;
    }
    let ax = a.apply(x);
    let r: Vec<f64> = ax.iter().zip(b).map(|(p, q)| q - p).collect();
    linalg::norm(&r) / bn
}

/// Outcome of the discrete a-priori bound check
/// `|u|_{W^{1,2}} <= C (|f|_{L^2} + |g|)`.
#[derive(Debug, Clone, Copy)]
pub struct AprioriReport {
    pub u_norm: f64,
    pub f_norm: f64,
    pub g_norm: f64,
    /// `u_norm / (f_norm + g_norm)`; zero when the data vanish.
    pub ratio: f64,
    pub within: bool,
}

pub fn apriori_check(mesh: &Mesh, u: &Displacement, load: &LoadSpec, c_bound: f64) -> AprioriReport {
    let u_norm = w12_norm(mesh, u);
    let f_norm = body_l2_norm(mesh, &load.body);
    let g_norm = traction_l2_norm(load);
    let denom = f_norm + g_norm;
    let ratio = if denom == 0.0 { 0.0 } else { u_norm / denom };
    AprioriReport {
        u_norm,
        f_norm,
        g_norm,
        ratio,
        within: ratio <= c_bound,
    }
}
