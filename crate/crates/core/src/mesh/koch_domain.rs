//! Structured meshes of the unit square with its top edge replaced by a
//! Koch prefractal curve.
//!
//! The domain decomposes into the square plus the generator's equilateral
//! bump triangles, each meshed on its own lattice with edge pitch `3^-depth`
//! along every internal interface and along the curve, then welded into one
//! conforming triangulation. The square grid is graded away from the curve
//! so node counts stay moderate at depth 5.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{koch_prefractal, Point2};
use crate::measure::BoundaryMeasure;
use crate::mesh::{BoundaryEdge, BoundaryTag, Mesh};

const MAX_MESH_DEPTH: u32 = 6;
const WELD_TOL: f64 = 1e-10;
const BUCKET: f64 = 1e-6;

/// Mesh of the Koch-top square at prefractal `level`, resolved with edge
/// pitch `3^-mesh_depth` along the curve. Returns the mesh (curve tagged
/// `Up`, the other three sides `Dir`) and the self-similar curve measure
/// (mass `4^-level` per level segment, spread uniformly over its sub-edges
/// and lumped onto mesh nodes).
pub fn build_koch_square_mesh(level: u32, mesh_depth: u32) -> Result<(Mesh, BoundaryMeasure)> {
    if mesh_depth > MAX_MESH_DEPTH {
        return Err(Error::Size(format!(
            "mesh depth {mesh_depth} exceeds the cap of {MAX_MESH_DEPTH}"
        )));
    }
    if level > mesh_depth {
        return Err(Error::Mesh(format!(
            "koch level {level} cannot exceed mesh depth {mesh_depth}"
        )));
    }

    let pitch = 3.0f64.powi(-(mesh_depth as i32));
    let mut welder = Welder::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();

    // Graded tensor grid of the square: rows start at curve pitch under the
    // top edge and grow geometrically toward the bottom.
    let cols = 3usize.pow(mesh_depth);
    let mut ys = vec![1.0f64];
    let mut y = 1.0;
    let mut dy = pitch;
    while y > 0.0 {
        y -= dy;
        if y < 0.5 * dy {
            y = 0.0;
        }
        ys.push(y);
        dy = (dy * 1.6).min(1.0 / 9.0);
    }
    ys.reverse();

    let mut grid = vec![0usize; (cols + 1) * ys.len()];
    for i in 0..=cols {
        let x = i as f64 / cols as f64;
        for (j, &yv) in ys.iter().enumerate() {
            grid[i * ys.len() + j] = welder.insert(Point2::new(x, yv));
        }
    }
    for i in 0..cols {
        for j in 0..ys.len() - 1 {
            let n00 = grid[i * ys.len() + j];
            let n10 = grid[(i + 1) * ys.len() + j];
            let n01 = grid[i * ys.len() + j + 1];
            let n11 = grid[(i + 1) * ys.len() + j + 1];
            triangles.push([n00, n10, n11]);
            triangles.push([n00, n11, n01]);
        }
    }

    // Bump tree over the curve recursion.
    let base_a = Point2::new(0.0, 1.0);
    let base_b = Point2::new(1.0, 1.0);
    let mut stack: Vec<(Point2, Point2, u32)> = vec![(base_a, base_b, 0)];
    while let Some((a, b, depth)) = stack.pop() {
        if depth >= level {
            continue;
        }
        let v = b - a;
        let p = a + v / 3.0;
        let q = a + v * (2.0 / 3.0);
        let apex = a + v * 0.5 + v.perp() * (3.0f64.sqrt() / 6.0);
        let side = 3usize.pow(mesh_depth - depth - 1);
        subdivide_equilateral(&mut welder, &mut triangles, p, q, apex, side);
        stack.push((a, p, depth + 1));
        stack.push((p, apex, depth + 1));
        stack.push((apex, q, depth + 1));
        stack.push((q, b, depth + 1));
    }

    // Boundary edges are the triangle edges used exactly once; the three
    // straight walls are clamped, the curve carries the Robin/Neumann tag.
    let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
    for tri in &triangles {
        for k in 0..3 {
            let (i, j) = (tri[k], tri[(k + 1) % 3]);
            *edge_count.entry((i.min(j), i.max(j))).or_insert(0) += 1;
        }
    }
    let mut boundary_edges: Vec<BoundaryEdge> = Vec::new();
    let points = welder.points();
    let mut keys: Vec<(usize, usize)> = edge_count
        .iter()
        .filter(|(_, &c)| c == 1)
        .map(|(&k, _)| k)
        .collect();
    keys.sort_unstable();
    for (i, j) in keys {
        let m = (points[i] + points[j]) / 2.0;
        let wall = m.x.abs() < 1e-9 || (m.x - 1.0).abs() < 1e-9 || m.y.abs() < 1e-9;
        boundary_edges.push(BoundaryEdge {
            a: i,
            b: j,
            tag: if wall { BoundaryTag::Dir } else { BoundaryTag::Up },
        });
    }

    // Self-similar measure of the level curve, spread uniformly over the
    // mesh sub-edges of each level segment.
    let (curve, _) = koch_prefractal(base_a, base_b, level)?;
    let seg_mass = 0.25f64.powi(level as i32);
    let subs = 3usize.pow(mesh_depth - level);
    let sub_mass = seg_mass / subs as f64;
    let mut contributions: Vec<(usize, Point2, f64)> = Vec::new();
    for w in curve.windows(2) {
        let (p, q) = (w[0], w[1]);
        for k in 0..subs {
            let za = p + (q - p) * (k as f64 / subs as f64);
            let zb = p + (q - p) * ((k + 1) as f64 / subs as f64);
            for z in [za, zb] {
                let idx = welder.lookup(z).ok_or_else(|| {
                    Error::Mesh(format!("curve point ({}, {}) missing from mesh", z.x, z.y))
                })?;
                contributions.push((idx, points[idx], sub_mass / 2.0));
            }
        }
    }
    let measure = BoundaryMeasure::from_contributions(contributions);

    let mesh = Mesh::new(welder.into_points(), triangles, boundary_edges)?;
    Ok((mesh, measure))
}

/// Uniform subdivision of a counterclockwise triangle into `t^2` cells.
fn subdivide_equilateral(
    welder: &mut Welder,
    triangles: &mut Vec<[usize; 3]>,
    a: Point2,
    b: Point2,
    c: Point2,
    t: usize,
) {
    let node = |welder: &mut Welder, i: usize, j: usize| {
        let p = a + (b - a) * (i as f64 / t as f64) + (c - a) * (j as f64 / t as f64);
        welder.insert(p)
    };
    for j in 0..t {
        for i in 0..t - j {
            let n00 = node(welder, i, j);
            let n10 = node(welder, i + 1, j);
            let n01 = node(welder, i, j + 1);
            triangles.push([n00, n10, n01]);
            if i + j < t - 1 {
                let n11 = node(welder, i + 1, j + 1);
                triangles.push([n10, n11, n01]);
            }
        }
    }
}

/// Coordinate welder: points closer than `WELD_TOL` share one index.
struct Welder {
    buckets: HashMap<(i64, i64), Vec<usize>>,
    points: Vec<Point2>,
}

impl Welder {
    fn new() -> Self {
        Welder {
            buckets: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn candidates(&self, p: Point2) -> impl Iterator<Item = usize> + '_ {
        let bx = (p.x / BUCKET).floor() as i64;
        let by = (p.y / BUCKET).floor() as i64;
        (-1..=1)
            .flat_map(move |dx| (-1..=1).map(move |dy| (bx + dx, by + dy)))
            .filter_map(|key| self.buckets.get(&key))
            .flatten()
            .copied()
    }

    fn lookup(&self, p: Point2) -> Option<usize> {
        self.candidates(p)
            .find(|&i| (self.points[i].x - p.x).abs() <= WELD_TOL && (self.points[i].y - p.y).abs() <= WELD_TOL)
    }

    fn insert(&mut self, p: Point2) -> usize {
        if let Some(i) = self.lookup(p) {
            return i;
        }
        let idx = self.points.len();
        self.points.push(p);
        let key = ((p.x / BUCKET).floor() as i64, (p.y / BUCKET).floor() as i64);
        self.buckets.entry(key).or_default().push(idx);
        idx
    }

    fn points(&self) -> &[Point2] {
        &self.points
    }

    fn into_points(self) -> Vec<Point2> {
        self.points
    }
}
