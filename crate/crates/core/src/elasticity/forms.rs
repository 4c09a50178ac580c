//! Quadratic form and norm evaluators on nodal fields. Volume terms use the
//! exact P1 rules; the boundary work term uses the same lumped nodal
//! weights as assembly so the compliance identity closes at solver
//! precision.

use crate::exec;
use crate::mesh::Mesh;

use super::{contract, strain, BodyForce, Displacement, LoadSpec, TriGeom, MaterialModel};

fn sum_over_triangles(mesh: &Mesh, f: impl Fn(&TriGeom) -> f64 + Sync + Send) -> f64 {
    let vals = exec::map_range(mesh.triangles().len(), |t| f(&TriGeom::of(mesh, t)));
    vals.into_iter().sum()
}

/// `∫ |u|^2`, exact for P1 fields.
pub fn mass_form(mesh: &Mesh, u: &Displacement) -> f64 {
    sum_over_triangles(mesh, |g| {
        let [a, b, c] = g.nodes;
        let (ua, ub, uc) = (u.get(a), u.get(b), u.get(c));
        let dot = |p: [f64; 2], q: [f64; 2]| p[0] * q[0] + p[1] * q[1];
        let diag = dot(ua, ua) + dot(ub, ub) + dot(uc, uc);
        let cross = dot(ua, ub) + dot(ub, uc) + dot(uc, ua);
        g.area() / 12.0 * (2.0 * diag + 2.0 * cross)
    })
}

/// `∫ ∇u : ∇u`.
pub fn grad_form(mesh: &Mesh, u: &Displacement) -> f64 {
    sum_over_triangles(mesh, |g| {
        let [a, b, c] = g.nodes;
        let (ua, ub, uc) = (u.get(a), u.get(b), u.get(c));
        let gx = g.grad_scalar(ua[0], ub[0], uc[0]);
        let gy = g.grad_scalar(ua[1], ub[1], uc[1]);
        g.area() * (gx[0] * gx[0] + gx[1] * gx[1] + gy[0] * gy[0] + gy[1] * gy[1])
    })
}

/// `∫ e(u) : e(u)`; exactly zero for rigid fields.
pub fn strain_form(mesh: &Mesh, u: &Displacement) -> f64 {
    let strains = strain(mesh, u);
    let areas = exec::map_range(mesh.triangles().len(), |t| mesh.triangle_area(t));
    strains
        .iter()
        .zip(&areas)
        .map(|(e, a)| a * contract(*e, *e))
        .sum()
}

/// `∫ sigma(u) : e(u)` with the material evaluated at element midpoints.
pub fn material_strain_form(mesh: &Mesh, material: &MaterialModel, u: &Displacement) -> f64 {
    let strains = strain(mesh, u);
    let terms = exec::map_range(mesh.triangles().len(), |t| {
        let g = TriGeom::of(mesh, t);
        g.area() * material.pairing(g.centroid, strains[t], strains[t])
    });
    terms.into_iter().sum()
}

/// Work of the data against a field: `∫ f . u + Σ_k w_k g(x_k) . u(x_k)`,
/// with the same quadrature as assembly.
pub fn load_work(mesh: &Mesh, load: &LoadSpec, u: &Displacement) -> f64 {
    let mut work = sum_over_triangles(mesh, |g| {
        let [a, b, c] = g.nodes;
        let (ua, ub, uc) = (u.get(a), u.get(b), u.get(c));
        let f = load.body.eval(g.centroid);
        let mean = [
            (ua[0] + ub[0] + uc[0]) / 3.0,
            (ua[1] + ub[1] + uc[1]) / 3.0,
        ];
        g.area() * (f[0] * mean[0] + f[1] * mean[1])
    });
    if let Some(measure) = &load.neumann {
        for (node, point, w) in measure.iter() {
            let gv = load.traction.eval(point);
            let uv = u.get(node);
            work += w * (gv[0] * uv[0] + gv[1] * uv[1]);
        }
    }
    work
}

/// Discrete `W^{1,2}` norm.
pub fn w12_norm(mesh: &Mesh, u: &Displacement) -> f64 {
    (mass_form(mesh, u) + grad_form(mesh, u)).sqrt()
}

/// `L^2` norm of the body force by the midpoint rule.
pub fn body_l2_norm(mesh: &Mesh, body: &BodyForce) -> f64 {
    sum_over_triangles(mesh, |g| {
        let f = body.eval(g.centroid);
        g.area() * (f[0] * f[0] + f[1] * f[1])
    })
    .sqrt()
}

/// Lumped `L^2(mu)` norm of the traction over the Neumann measure.
pub fn traction_l2_norm(load: &LoadSpec) -> f64 {
    match &load.neumann {
        None => 0.0,
        Some(measure) => measure
            .iter()
            .map(|(_, p, w)| {
                let g = load.traction.eval(p);
                w * (g[0] * g[0] + g[1] * g[1])
            })
            .sum::<f64>()
            .sqrt(),
    }
}
