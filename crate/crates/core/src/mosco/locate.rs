//! Point location and P1 evaluation on a triangulation, backed by a
//! uniform bin grid over the mesh bounding box.

use crate::elasticity::Displacement;
use crate::geometry::Point2;
use crate::mesh::Mesh;

const BARY_TOL: f64 = 1e-12;

pub struct P1Locator<'a> {
    mesh: &'a Mesh,
    lo: Point2,
    inv_dx: f64,
    inv_dy: f64,
    nx: usize,
    ny: usize,
    bins: Vec<Vec<usize>>,
    node_bins: Vec<Vec<usize>>,
}

impl<'a> P1Locator<'a> {
    pub fn new(mesh: &'a Mesh) -> Self {
        let nodes = mesh.nodes();
        let mut lo = nodes[0];
        let mut hi = nodes[0];
        for p in nodes {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        let tri_count = mesh.triangles().len().max(1);
        let per_axis = ((tri_count as f64).sqrt().ceil() as usize).clamp(1, 256);
        let (nx, ny) = (per_axis, per_axis);
        let dx = ((hi.x - lo.x) / nx as f64).max(f64::MIN_POSITIVE);
        let dy = ((hi.y - lo.y) / ny as f64).max(f64::MIN_POSITIVE);

        let mut bins = vec![Vec::new(); nx * ny];
        let clampi = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let (mut tlo, mut thi) = (nodes[tri[0]], nodes[tri[0]]);
            for &i in tri {
                tlo.x = tlo.x.min(nodes[i].x);
                tlo.y = tlo.y.min(nodes[i].y);
                thi.x = thi.x.max(nodes[i].x);
                thi.y = thi.y.max(nodes[i].y);
            }
            let i0 = clampi((tlo.x - lo.x) / dx, nx);
            let i1 = clampi((thi.x - lo.x) / dx, nx);
            let j0 = clampi((tlo.y - lo.y) / dy, ny);
            let j1 = clampi((thi.y - lo.y) / dy, ny);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    bins[j * nx + i].push(t);
                }
            }
        }

        let mut node_bins = vec![Vec::new(); nx * ny];
        for (n, p) in nodes.iter().enumerate() {
            let i = clampi((p.x - lo.x) / dx, nx);
            let j = clampi((p.y - lo.y) / dy, ny);
            node_bins[j * nx + i].push(n);
        }

        P1Locator {
            mesh,
            lo,
            inv_dx: 1.0 / dx,
            inv_dy: 1.0 / dy,
            nx,
            ny,
            bins,
            node_bins,
        }
    }

    fn bin_of(&self, p: Point2) -> Option<usize> {
        let fx = (p.x - self.lo.x) * self.inv_dx;
        let fy = (p.y - self.lo.y) * self.inv_dy;
        // Points up to half a cell outside still probe the nearest bin; the
        // barycentric test decides membership.
        if fx < -0.5 || fy < -0.5 || fx > self.nx as f64 + 0.5 || fy > self.ny as f64 + 0.5 {
            return None;
        }
        let i = (fx.floor() as i64).clamp(0, self.nx as i64 - 1) as usize;
        let j = (fy.floor() as i64).clamp(0, self.ny as i64 - 1) as usize;
        Some(j * self.nx + i)
    }

    /// Containing triangle and barycentric weights; exact at nodes.
    pub fn locate(&self, p: Point2) -> Option<(usize, [f64; 3])> {
        let bin = self.bin_of(p)?;
        for &t in &self.bins[bin] {
            let tri = self.mesh.triangles()[t];
            let (p0, p1, p2) = (
                self.mesh.nodes()[tri[0]],
                self.mesh.nodes()[tri[1]],
                self.mesh.nodes()[tri[2]],
            );
            let den = (p1 - p0).cross(p2 - p0);
            let s = (p - p0).cross(p2 - p0) / den;
            let t_coord = (p1 - p0).cross(p - p0) / den;
            if s >= -BARY_TOL && t_coord >= -BARY_TOL && s + t_coord <= 1.0 + BARY_TOL {
                return Some((t, [1.0 - s - t_coord, s, t_coord]));
            }
        }
        None
    }

    /// P1 value of the field at `p`, `None` outside the mesh.
    pub fn eval(&self, u: &Displacement, p: Point2) -> Option<[f64; 2]> {
        let (t, w) = self.locate(p)?;
        let tri = self.mesh.triangles()[t];
        let (a, b, c) = (u.get(tri[0]), u.get(tri[1]), u.get(tri[2]));
        Some([
            w[0] * a[0] + w[1] * b[0] + w[2] * c[0],
            w[0] * a[1] + w[1] * b[1] + w[2] * c[1],
        ])
    }

    /// Field value at the nearest mesh node; total fallback for points just
    /// outside the triangulation.
    pub fn eval_nearest_node(&self, u: &Displacement, p: Point2) -> [f64; 2] {
        let mut best: Option<(f64, usize)> = None;
        // Expand rings of bins until a candidate appears, then one more
        // ring to be safe.
        let ci = (((p.x - self.lo.x) * self.inv_dx).floor() as i64).clamp(0, self.nx as i64 - 1);
        let cj = (((p.y - self.lo.y) * self.inv_dy).floor() as i64).clamp(0, self.ny as i64 - 1);
        let max_ring = self.nx.max(self.ny) as i64;
        let mut found_ring: Option<i64> = None;
        for ring in 0..=max_ring {
            if let Some(fr) = found_ring {
                if ring > fr + 1 {
                    break;
                }
            }
            for di in -ring..=ring {
                for dj in -ring..=ring {
                    if di.abs() != ring && dj.abs() != ring {
                        continue;
                    }
                    let (i, j) = (ci + di, cj + dj);
                    if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
                        continue;
                    }
                    for &n in &self.node_bins[j as usize * self.nx + i as usize] {
                        let d = p.dist_sq(self.mesh.nodes()[n]);
                        if best.map_or(true, |(bd, _)| d < bd) {
                            best = Some((d, n));
                        }
                    }
                }
            }
            if best.is_some() && found_ring.is_none() {
                found_ring = Some(ring);
            }
        }
        let (_, n) = best.expect("mesh has nodes");
        u.get(n)
    }

    /// Interpolated value with extension by zero outside the mesh.
    pub fn eval_extended_by_zero(&self, u: &Displacement, p: Point2) -> [f64; 2] {
        self.eval(u, p).unwrap_or([0.0, 0.0])
    }

    /// Interpolation onto an arbitrary point that clamps to the nearest
    /// node when the point lies outside.
    pub fn eval_clamped(&self, u: &Displacement, p: Point2) -> [f64; 2] {
        self.eval(u, p)
            .unwrap_or_else(|| self.eval_nearest_node(u, p))
    }
}
