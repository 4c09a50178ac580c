//! Discrete residual of the boundary Green identity
//! `∫ u . ∇w + ∫ (div u) w = ∮ (u . n) w`.

use std::collections::HashMap;

use crate::mesh::Mesh;

use super::{Displacement, TriGeom};

/// Volume terms use element-exact P1 quadrature; the boundary term uses the
/// trapezoid (lumped nodal) rule per edge with the outward normal of the
/// adjacent triangle. Exact for constant `u` and linear `w`; otherwise the
/// residual is the boundary lumping error, first order or better.
pub fn green_residual(mesh: &Mesh, u: &Displacement, w: &[f64]) -> f64 {
    assert_eq!(u.len(), mesh.num_nodes());
    assert_eq!(w.len(), mesh.num_nodes());

    let mut volume = 0.0;
    for t in 0..mesh.triangles().len() {
        let g = TriGeom::of(mesh, t);
        let [a, b, c] = g.nodes;
        let (ua, ub, uc) = (u.get(a), u.get(b), u.get(c));
        let grad_w = g.grad_scalar(w[a], w[b], w[c]);
        let mean_u = [
            (ua[0] + ub[0] + uc[0]) / 3.0,
            (ua[1] + ub[1] + uc[1]) / 3.0,
        ];
        let mean_w = (w[a] + w[b] + w[c]) / 3.0;
        let gx = g.grad_scalar(ua[0], ub[0], uc[0]);
        let gy = g.grad_scalar(ua[1], ub[1], uc[1]);
        let div_u = gx[0] + gy[1];
        volume += g.area() * (mean_u[0] * grad_w[0] + mean_u[1] * grad_w[1] + div_u * mean_w);
    }

    // Adjacent triangle of each boundary edge fixes the outward direction,
    // so the edge list's orientation does not matter.
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for k in 0..3 {
            let (i, j) = (tri[k], tri[(k + 1) % 3]);
            owner.insert((i.min(j), i.max(j)), t);
        }
    }
    let mut boundary = 0.0;
    for e in mesh.boundary_edges() {
        let (pa, pb) = (mesh.nodes()[e.a], mesh.nodes()[e.b]);
        let t = owner[&(e.a.min(e.b), e.a.max(e.b))];
        let dir = pb - pa;
        let mut normal = dir.perp().normalized();
        let to_interior = mesh.triangle_centroid(t) - (pa + pb) / 2.0;
        if normal.dot(to_interior) > 0.0 {
            normal = -normal;
        }
        let len = pa.dist(pb);
        let (ua, ub) = (u.get(e.a), u.get(e.b));
        let flux_a = ua[0] * normal.x + ua[1] * normal.y;
        let flux_b = ub[0] * normal.x + ub[1] * normal.y;
        boundary += len / 2.0 * (flux_a * w[e.a] + flux_b * w[e.b]);
    }

    (volume - boundary).abs()
}
