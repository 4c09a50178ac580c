//! Discrete norm-equivalence constants on the clamped subspace, computed by
//! inverse iteration on generalized eigenproblems.

use crate::error::{Error, Result};
use crate::mesh::{Mesh, TagFilter};

use super::linalg::{cg_jacobi, Csr, DenseCholesky};
use super::{
    assemble_operator, gradient_element, mass_element, stiffness_element, DofMap, MaterialModel,
};

const EIG_REL_TOL: f64 = 1e-8;
const MAX_OUTER: usize = 600;
const INNER_TOL: f64 = 1e-12;
const FACTOR_LIMIT: usize = 2400;

/// Korn-type constant: the square root of the smallest eigenvalue of the
/// strain form against the full `W^{1,2}` form on the clamped subspace.
/// Always in `(0, 1]`.
pub fn estimate_korn_constant(mesh: &Mesh, dirichlet: TagFilter) -> Result<f64> {
    let dof_map = constrained_map(mesh, dirichlet)?;
    let identity = MaterialModel::scalar_constant(1.0)?;
    let strain = assemble_operator(mesh, &dof_map, |g| stiffness_element(g, &identity));
    let w12 = assemble_operator(mesh, &dof_map, |g| {
        add_blocks(mass_element(g), gradient_element(g))
    });
    // Largest theta of strain^-1 w12 is 1/lambda_min of (strain, w12).
    let theta = largest_pencil_eigenvalue(&strain, &w12)?;
    Ok((1.0 / theta).sqrt())
}

/// Poincare constant: the largest eigenvalue of the mass form against the
/// gradient form on the clamped subspace.
pub fn estimate_poincare_constant(mesh: &Mesh, dirichlet: TagFilter) -> Result<f64> {
    let dof_map = constrained_map(mesh, dirichlet)?;
    let grad = assemble_operator(mesh, &dof_map, gradient_element);
    let mass = assemble_operator(mesh, &dof_map, mass_element);
    largest_pencil_eigenvalue(&grad, &mass)
}

fn constrained_map(mesh: &Mesh, dirichlet: TagFilter) -> Result<DofMap> {
    let clamped = mesh.tagged_nodes(dirichlet);
    if clamped.is_empty() {
        return Err(Error::Solver(
            "constant estimation needs a nonempty clamped part".into(),
        ));
    }
    let map = DofMap::new(mesh.num_nodes(), &clamped);
    if map.n_free() == 0 {
        return Err(Error::Solver("no free dofs left after clamping".into()));
    }
    Ok(map)
}

fn add_blocks(a: [[f64; 6]; 6], b: [[f64; 6]; 6]) -> [[f64; 6]; 6] {
    let mut out = a;
    for i in 0..6 {
        for j in 0..6 {
            out[i][j] += b[i][j];
        }
    }
    out
}

/// Power iteration on `A^-1 B`: converges to the largest eigenvalue of the
/// pencil `B x = theta A x` for SPD `A`, `B`, stopping at relative
/// eigenvalue change `1e-8`.
fn largest_pencil_eigenvalue(a: &Csr, b: &Csr) -> Result<f64> {
    let n = a.n();
    let solve = InnerSolver::new(a)?;

    // Deterministic pseudo-random start vector.
    let mut x: Vec<f64> = (0..n).map(|i| splitmix(i as u64 + 1) - 0.5).collect();
    normalize_in(b, &mut x)?;

    let mut theta_prev = f64::NAN;
    for _ in 0..MAX_OUTER {
        let bx = b.apply(&x);
        let y = solve.apply(&bx)?;
        let theta = {
            let num = quadratic(b, &y);
            let den = quadratic(a, &y);
            if den <= 0.0 {
                return Err(Error::Numeric("pencil lost positive definiteness".into()));
            }
            num / den
        };
        x = y;
        normalize_in(b, &mut x)?;
        if theta_prev.is_finite() {
            let change = (theta - theta_prev).abs() / theta.abs().max(f64::MIN_POSITIVE);
            if change <= EIG_REL_TOL {
                return Ok(theta);
            }
        }
        theta_prev = theta;
    }
    Err(Error::Numeric(format!(
        "eigenvalue iteration stagnated after {MAX_OUTER} steps (last {theta_prev})"
    )))
}

fn quadratic(m: &Csr, x: &[f64]) -> f64 {
    m.quadratic(x)
}

fn normalize_in(b: &Csr, x: &mut [f64]) -> Result<()> {
    let nb = quadratic(b, x);
    if !(nb > 0.0) {
        return Err(Error::Numeric("degenerate iterate in eigen solve".into()));
    }
    let s = 1.0 / nb.sqrt();
    for v in x.iter_mut() {
        *v *= s;
    }
    Ok(())
}

fn splitmix(seed: u64) -> f64 {
    let mut z = seed.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z = z ^ (z >> 31);
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Reuses a dense factorization when the system is small enough, otherwise
/// solves each application with CG.
enum InnerSolver<'a> {
    Factored(DenseCholesky),
    Iterative(&'a Csr),
}

impl<'a> InnerSolver<'a> {
    fn new(a: &'a Csr) -> Result<Self> {
        if a.n() <= FACTOR_LIMIT {
            Ok(InnerSolver::Factored(DenseCholesky::factor(a)?))
        } else {
            Ok(InnerSolver::Iterative(a))
        }
    }

    fn apply(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match self {
            InnerSolver::Factored(f) => Ok(f.solve(rhs)),
            InnerSolver::Iterative(a) => {
                cg_jacobi(a, rhs, INNER_TOL, 60 * a.n() + 200).map(|(x, _)| x)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::mesh::{build_roof_mesh, BoundaryTag, RoofProfile};

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

    /// Square clamped on its left edge only.
    fn left_clamped_mesh(n: usize) -> Mesh {
        let mesh = square_mesh(n);
        let nodes = mesh.nodes().to_vec();
        let triangles = mesh.triangles().to_vec();
        let edges = mesh
            .boundary_edges()
            .iter()
            .map(|e| {
                let mid = (nodes[e.a] + nodes[e.b]) / 2.0;
                let tag = if mid.x.abs() < 1e-12 {
                    BoundaryTag::Dir
                } else if (mid.y - 1.0).abs() < 1e-12 {
                    BoundaryTag::Up
                } else {
                    BoundaryTag::Lo
                };
                crate::mesh::BoundaryEdge { a: e.a, b: e.b, tag }
            })
            .collect();
        Mesh::new(nodes, triangles, edges).unwrap()
    }

    #[test]
    fn korn_constant_is_in_unit_interval_and_stabilizes() {
        let mut mesh = left_clamped_mesh(6);
        let mut prev = f64::INFINITY;
        let mut values = Vec::new();
        for _ in 0..3 {
            let c = estimate_korn_constant(&mesh, TagFilter::Only(BoundaryTag::Dir)).unwrap();
            assert!(c > 0.0 && c <= 1.0, "c_K = {c}");
            assert!(c <= prev * (1.0 + 1e-6), "c_K grew: {c} after {prev}");
            values.push(c);
            prev = c;
            mesh = mesh.refine();
        }
        // Cauchy within 2% for the last two refinements.
        let (a, b) = (values[values.len() - 2], values[values.len() - 1]);
        assert!((a - b).abs() / b < 0.02, "sequence {values:?}");
    }

    #[test]
    fn poincare_constant_scales_quadratically() {
        let mesh = square_mesh(8);
        let c1 = estimate_poincare_constant(&mesh, TagFilter::Only(BoundaryTag::Dir)).unwrap();
        for t in [0.5, 2.0] {
            let scaled = mesh.scaled(t);
            let ct = estimate_poincare_constant(&scaled, TagFilter::Only(BoundaryTag::Dir)).unwrap();
            let ratio = ct / c1;
            assert!(
                (ratio - t * t).abs() / (t * t) < 0.01,
                "t = {t}: ratio {ratio}"
            );
        }
        assert!(c1.is_finite() && c1 > 0.0);
    }

    #[test]
    fn poincare_does_not_increase_with_more_clamping() {
        // Both vertical sides clamped vs the left side only.
        let both = square_mesh(8);
        let left = left_clamped_mesh(8);
        let c_both = estimate_poincare_constant(&both, TagFilter::Only(BoundaryTag::Dir)).unwrap();
        let c_left = estimate_poincare_constant(&left, TagFilter::Only(BoundaryTag::Dir)).unwrap();
        assert!(c_both <= c_left * (1.0 + 1e-6), "{c_both} vs {c_left}");
    }

    #[test]
    fn empty_clamped_part_is_rejected() {
        let nodes = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        let tri_mesh = Mesh::new(
            nodes,
            vec![[0, 1, 2]],
            vec![
                crate::mesh::BoundaryEdge { a: 0, b: 1, tag: BoundaryTag::Lo },
                crate::mesh::BoundaryEdge { a: 1, b: 2, tag: BoundaryTag::Lo },
                crate::mesh::BoundaryEdge { a: 2, b: 0, tag: BoundaryTag::Lo },
            ],
        )
        .unwrap();
        assert!(estimate_korn_constant(&tri_mesh, TagFilter::Only(BoundaryTag::Dir)).is_err());
    }
}
