//! Conforming triangulations of roof cross-sections with tagged boundary
//! parts and lumped boundary measures.

mod io;
mod koch_domain;

pub use io::{read_mesh, write_mesh, write_vtk};
pub use koch_domain::build_koch_square_mesh;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::Point2;
use crate::measure::BoundaryMeasure;

/// Boundary part labels: clamped sides, lower curve, upper curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Dir,
    Lo,
    Up,
}

impl BoundaryTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryTag::Dir => "Dir",
            BoundaryTag::Lo => "Lo",
            BoundaryTag::Up => "Up",
        }
    }
}

impl std::str::FromStr for BoundaryTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Dir" | "dir" => Ok(BoundaryTag::Dir),
            "Lo" | "lo" => Ok(BoundaryTag::Lo),
            "Up" | "up" => Ok(BoundaryTag::Up),
            other => Err(Error::Parse(format!("unknown boundary tag `{other}`"))),
        }
    }
}

/// Selects boundary parts for measures and traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagFilter {
    All,
    Only(BoundaryTag),
    /// The Neumann part `Lo ∪ Up`.
    Neumann,
}

impl TagFilter {
    pub fn matches(self, tag: BoundaryTag) -> bool {
        match self {
            TagFilter::All => true,
            TagFilter::Only(t) => t == tag,
            TagFilter::Neumann => tag != BoundaryTag::Dir,
        }
    }
}

impl std::str::FromStr for TagFilter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" | "All" => Ok(TagFilter::All),
            "neu" | "Neu" | "neumann" => Ok(TagFilter::Neumann),
            other => Ok(TagFilter::Only(other.parse()?)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub tag: BoundaryTag,
}

/// Conforming triangulation with counterclockwise triangles and a tagged
/// boundary that covers the whole topological boundary.
#[derive(Debug, Clone)]
pub struct Mesh {
    nodes: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
}

impl Mesh {
    pub fn new(
        nodes: Vec<Point2>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let mesh = Mesh {
            nodes,
            triangles,
            boundary_edges,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Twice the signed area of a triangle, computed from edge differences.
    /// The same expression feeds the P1 gradients, which keeps strains of
    /// linear and rigid fields exact.
    pub fn double_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (p0, p1, p2) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        let dx10 = p1.x - p0.x;
        let dy10 = p1.y - p0.y;
        let dx20 = p2.x - p0.x;
        let dy20 = p2.y - p0.y;
        dx10 * dy20 - dx20 * dy10
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        0.5 * self.double_area(t)
    }

    pub fn triangle_centroid(&self, t: usize) -> Point2 {
        let [a, b, c] = self.triangles[t];
        (self.nodes[a] + self.nodes[b] + self.nodes[c]) / 3.0
    }

    /// Total mesh area: the sum of triangle areas.
    pub fn area(&self) -> f64 {
        let areas = exec::map_range(self.triangles.len(), |t| self.triangle_area(t));
        areas.into_iter().sum()
    }

    /// Node indices lying on edges matched by the filter.
    pub fn tagged_nodes(&self, filter: TagFilter) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for e in &self.boundary_edges {
            if filter.matches(e.tag) {
                for n in [e.a, e.b] {
                    if !seen[n] {
                        seen[n] = true;
                        out.push(n);
                    }
                }
            }
        }
        out
    }

    /// Lumped arc-length measure of the selected boundary part: each edge
    /// contributes half its length to each endpoint.
    pub fn boundary_measure(&self, filter: TagFilter) -> Result<BoundaryMeasure> {
        let edges: Vec<&BoundaryEdge> = self
            .boundary_edges
            .iter()
            .filter(|e| filter.matches(e.tag))
            .collect();
        if edges.is_empty() {
            return Err(Error::Mesh(format!(
                "no boundary edges match the filter {filter:?}"
            )));
        }
        Ok(BoundaryMeasure::from_contributions(edges.iter().flat_map(
            |e| {
                let (pa, pb) = (self.nodes[e.a], self.nodes[e.b]);
                let half = pa.dist(pb) / 2.0;
                [(e.a, pa, half), (e.b, pb, half)]
            },
        )))
    }

    /// Exact polyline length of the selected boundary part.
    pub fn boundary_length(&self, filter: TagFilter) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|e| filter.matches(e.tag))
            .map(|e| self.nodes[e.a].dist(self.nodes[e.b]))
            .sum()
    }

    /// Uniform red refinement: each triangle splits into four through its
    /// edge midpoints; boundary tags are inherited by the half edges.
    pub fn refine(&self) -> Mesh {
        let mut nodes = self.nodes.clone();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |i: usize, j: usize, nodes: &mut Vec<Point2>| -> usize {
            let key = (i.min(j), i.max(j));
            *midpoint.entry(key).or_insert_with(|| {
                let idx = nodes.len();
                nodes.push((nodes[i] + nodes[j]) / 2.0);
                idx
            })
        };

        let mut triangles = Vec::with_capacity(self.triangles.len() * 4);
        for &[a, b, c] in &self.triangles {
            let ab = mid(a, b, &mut nodes);
            let bc = mid(b, c, &mut nodes);
            let ca = mid(c, a, &mut nodes);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }

        let mut boundary_edges = Vec::with_capacity(self.boundary_edges.len() * 2);
        for e in &self.boundary_edges {
            let m = mid(e.a, e.b, &mut nodes);
            boundary_edges.push(BoundaryEdge {
                a: e.a,
                b: m,
                tag: e.tag,
            });
            boundary_edges.push(BoundaryEdge {
                a: m,
                b: e.b,
                tag: e.tag,
            });
        }

        Mesh {
            nodes,
            triangles,
            boundary_edges,
        }
    }

    /// Scales all node coordinates by `t` about the origin.
    pub fn scaled(&self, t: f64) -> Mesh {
        let mut m = self.clone();
        for p in &mut m.nodes {
            *p = *p * t;
        }
        m
    }

    /// Full structural validation; every public constructor runs this.
    pub fn validate(&self) -> Result<()> {
        if self.triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        let n = self.nodes.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                return Err(Error::Mesh(format!("triangle {t} references a missing node")));
            }
            if !(self.double_area(t) > 0.0) {
                return Err(Error::Mesh(format!(
                    "triangle {t} is degenerate or clockwise (2A = {})",
                    self.double_area(t)
                )));
            }
        }

        // Conformity: shared edges appear in exactly two triangles, boundary
        // edges in exactly one, and the tagged edges are exactly the
        // single-triangle edges.
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                *counts.entry((i.min(j), i.max(j))).or_insert(0) += 1;
            }
        }
        if let Some((e, c)) = counts.iter().find(|(_, &c)| c > 2) {
            return Err(Error::Mesh(format!(
                "edge {e:?} is shared by {c} triangles; mesh is not conforming"
            )));
        }

        let mut tagged: HashMap<(usize, usize), usize> = HashMap::new();
        for e in &self.boundary_edges {
            if e.a >= n || e.b >= n || e.a == e.b {
                return Err(Error::Mesh("invalid boundary edge endpoints".into()));
            }
            let key = (e.a.min(e.b), e.a.max(e.b));
            *tagged.entry(key).or_insert(0) += 1;
        }
        for (key, c) in &tagged {
            if *c != 1 {
                return Err(Error::Mesh(format!(
                    "boundary edge {key:?} is tagged {c} times"
                )));
            }
            if counts.get(key) != Some(&1) {
                return Err(Error::Mesh(format!(
                    "tagged edge {key:?} is not a boundary edge of the triangulation"
                )));
            }
        }
        let boundary_count = counts.values().filter(|&&c| c == 1).count();
        if boundary_count != tagged.len() {
            return Err(Error::Mesh(format!(
                "tags cover {} of {} boundary edges",
                tagged.len(),
                boundary_count
            )));
        }

        // Closed loops: every boundary node has exactly two incident
        // boundary edges.
        let mut degree: HashMap<usize, usize> = HashMap::new();
        for e in &self.boundary_edges {
            *degree.entry(e.a).or_insert(0) += 1;
            *degree.entry(e.b).or_insert(0) += 1;
        }
        if let Some((node, d)) = degree.iter().find(|(_, &d)| d != 2) {
            return Err(Error::Mesh(format!(
                "boundary node {node} has degree {d}; boundary does not close"
            )));
        }
        Ok(())
    }
}

/// Geometric profile of a roof band: the lower curve is the piecewise-linear
/// interpolant of `knot_heights` over uniform knots on
/// `[x0, x0 + length]`, and the upper curve is its vertical translate by
/// `thickness`.
#[derive(Debug, Clone)]
pub struct RoofProfile {
    pub x0: f64,
    pub length: f64,
    pub knot_heights: Vec<f64>,
    pub thickness: f64,
}

impl RoofProfile {
    /// Lower-curve height at `x`.
    pub fn lower(&self, x: f64) -> f64 {
        let m = self.knot_heights.len();
        debug_assert!(m >= 2);
        let t = ((x - self.x0) / self.length).clamp(0.0, 1.0) * (m - 1) as f64;
        let k = (t.floor() as usize).min(m - 2);
        let frac = t - k as f64;
        self.knot_heights[k] * (1.0 - frac) + self.knot_heights[k + 1] * frac
    }
}

/// Structured triangulation of the band between the lower curve and its
/// vertical translate. Vertical sides are tagged `Dir`, the lower curve `Lo`
/// and the upper curve `Up`. Upper-curve nodes are the lower-curve nodes
/// translated by exactly `(0, thickness)`.
pub fn build_roof_mesh(profile: &RoofProfile, resolution: f64) -> Result<Mesh> {
    if profile.knot_heights.len() < 2 {
        return Err(Error::Mesh("roof profile needs at least two knots".into()));
    }
    if !(profile.thickness > 0.0) {
        return Err(Error::Mesh(format!(
            "roof thickness must be positive, got {}",
            profile.thickness
        )));
    }
    if !(profile.length > 0.0) || !(resolution > 0.0) {
        return Err(Error::Mesh("length and resolution must be positive".into()));
    }

    let nx = ((profile.length / resolution).ceil() as usize).max(1);
    let ny = ((profile.thickness / resolution).ceil() as usize).max(1);
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for i in 0..=nx {
        let x = profile.x0 + profile.length * (i as f64 / nx as f64);
        let base = profile.lower(x);
        for j in 0..=ny {
            // j = 0 reproduces the lower curve and j = ny its exact
            // vertical translate.
            let y = base + profile.thickness * (j as f64 / ny as f64);
            nodes.push(Point2::new(x, y));
        }
    }
    let id = |i: usize, j: usize| i * (ny + 1) + j;

    // Checkerboard-alternating diagonals: the edge graph then carries both
    // diagonal directions, which the uniformity witness paths rely on.
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let n00 = id(i, j);
            let n10 = id(i + 1, j);
            let n01 = id(i, j + 1);
            let n11 = id(i + 1, j + 1);
            if (i + j) % 2 == 0 {
                triangles.push([n00, n10, n11]);
                triangles.push([n00, n11, n01]);
            } else {
                triangles.push([n00, n10, n01]);
                triangles.push([n10, n11, n01]);
            }
        }
    }

    let mut boundary_edges = Vec::new();
    for j in 0..ny {
        boundary_edges.push(BoundaryEdge {
            a: id(0, j + 1),
            b: id(0, j),
            tag: BoundaryTag::Dir,
        });
        boundary_edges.push(BoundaryEdge {
            a: id(nx, j),
            b: id(nx, j + 1),
            tag: BoundaryTag::Dir,
        });
    }
    for i in 0..nx {
        boundary_edges.push(BoundaryEdge {
            a: id(i, 0),
            b: id(i + 1, 0),
            tag: BoundaryTag::Lo,
        });
        boundary_edges.push(BoundaryEdge {
            a: id(i + 1, ny),
            b: id(i, ny),
            tag: BoundaryTag::Up,
        });
    }

    Mesh::new(nodes, triangles, boundary_edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square_mesh(n: usize) -> Mesh {
        let profile = RoofProfile {
            x0: 0.0,
            length: 1.0,
            knot_heights: vec![0.0, 0.0],
            thickness: 1.0,
        };
        build_roof_mesh(&profile, 1.0 / n as f64).unwrap()
    }

    #[test]
    fn flat_roof_mesh_is_a_uniform_lattice() {
        let profile = RoofProfile {
            x0: 0.0,
            length: 1.0,
            knot_heights: vec![1.0, 1.0],
            thickness: 0.5,
        };
        let mesh = build_roof_mesh(&profile, 0.25).unwrap();
        mesh.validate().unwrap();
        let a0 = mesh.triangle_area(0);
        for t in 0..mesh.triangles().len() {
            assert!((mesh.triangle_area(t) - a0).abs() < 1e-15);
        }
        assert!((mesh.area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn roof_mesh_area_matches_band_area() {
        let profile = RoofProfile {
            x0: 0.0,
            length: 2.0,
            knot_heights: vec![0.0, 0.7, 0.2, 0.5],
            thickness: 0.5,
        };
        let mesh = build_roof_mesh(&profile, 0.07).unwrap();
        // The band between a curve and its vertical translate has area
        // thickness * length regardless of the curve.
        assert!((mesh.area() - 1.0).abs() < 1e-10, "area = {}", mesh.area());
    }

    #[test]
    fn refinement_scaling_of_node_count() {
        let coarse = unit_square_mesh(4);
        let fine = unit_square_mesh(8);
        let ratio = fine.num_nodes() as f64 / coarse.num_nodes() as f64;
        assert!((ratio - 4.0).abs() < 1.0, "ratio = {ratio}");
    }

    #[test]
    fn red_refinement_quadruples_and_preserves() {
        let mesh = unit_square_mesh(4);
        let fine = mesh.refine();
        fine.validate().unwrap();
        assert_eq!(fine.triangles().len(), 4 * mesh.triangles().len());
        assert!((fine.area() - mesh.area()).abs() < 1e-14);
        for filter in [
            TagFilter::Only(BoundaryTag::Dir),
            TagFilter::Only(BoundaryTag::Lo),
            TagFilter::Only(BoundaryTag::Up),
        ] {
            assert!(
                (fine.boundary_length(filter) - mesh.boundary_length(filter)).abs() < 1e-14
            );
        }
    }

    #[test]
    fn boundary_measures_lump_arc_length() {
        let mesh = unit_square_mesh(8);
        let all = mesh.boundary_measure(TagFilter::All).unwrap();
        assert!((all.total_mass() - 4.0).abs() < 1e-14);
        let up = mesh.boundary_measure(TagFilter::Only(BoundaryTag::Up)).unwrap();
        assert!((up.total_mass() - 1.0).abs() < 1e-14);
        // Interior boundary node on a uniform grid of step h carries h.
        let h = 1.0 / 8.0;
        let interior = up
            .iter()
            .filter(|(_, p, _)| p.x > 0.0 && p.x < 1.0)
            .map(|(_, _, w)| w)
            .collect::<Vec<_>>();
        assert!(!interior.is_empty());
        assert!(interior.iter().all(|w| (w - h).abs() < 1e-14));
        // Rectangle of length 2: top edge mass is 2.
        let profile = RoofProfile {
            x0: 0.0,
            length: 2.0,
            knot_heights: vec![0.0, 0.0],
            thickness: 1.0,
        };
        let rect = build_roof_mesh(&profile, 0.25).unwrap();
        let top = rect.boundary_measure(TagFilter::Only(BoundaryTag::Up)).unwrap();
        assert!((top.total_mass() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn measure_total_matches_exact_boundary_length() {
        let profile = RoofProfile {
            x0: -1.0,
            length: 3.0,
            knot_heights: vec![0.3, 0.9, 0.1],
            thickness: 0.8,
        };
        let mesh = build_roof_mesh(&profile, 0.11).unwrap();
        for filter in [TagFilter::All, TagFilter::Neumann, TagFilter::Only(BoundaryTag::Lo)] {
            let mu = mesh.boundary_measure(filter).unwrap();
            let len = mesh.boundary_length(filter);
            assert!((mu.total_mass() - len).abs() < 1e-12 * len.max(1.0));
        }
    }

    #[test]
    fn build_is_deterministic() {
        let profile = RoofProfile {
            x0: 0.0,
            length: 2.0,
            knot_heights: vec![0.1, 0.8, 0.3],
            thickness: 0.5,
        };
        let a = build_roof_mesh(&profile, 0.13).unwrap();
        let b = build_roof_mesh(&profile, 0.13).unwrap();
        assert_eq!(a.nodes().len(), b.nodes().len());
        for (p, q) in a.nodes().iter().zip(b.nodes()) {
            assert!(p.x == q.x && p.y == q.y);
        }
        assert_eq!(a.triangles(), b.triangles());
    }

    #[test]
    fn upper_nodes_are_exact_translates_of_lower_nodes() {
        let profile = RoofProfile {
            x0: 0.0,
            length: 2.0,
            knot_heights: vec![0.1, 0.8, 0.3],
            thickness: 0.5,
        };
        let mesh = build_roof_mesh(&profile, 0.1).unwrap();
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
        lo.sort_by(|a, b| a.x.total_cmp(&b.x));
        up.sort_by(|a, b| a.x.total_cmp(&b.x));
        assert_eq!(lo.len(), up.len());
        for (l, u) in lo.iter().zip(&up) {
            assert!(u.x == l.x && u.y == l.y + profile.thickness);
        }
    }

    #[test]
    fn invalid_meshes_are_rejected() {
        let profile = RoofProfile {
            x0: 0.0,
            length: 1.0,
            knot_heights: vec![0.0, 0.0],
            thickness: -1.0,
        };
        assert!(build_roof_mesh(&profile, 0.25).is_err());

        // Flipped triangle.
        let nodes = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(Mesh::new(
            nodes,
            vec![[0, 2, 1]],
            vec![
                BoundaryEdge { a: 0, b: 1, tag: BoundaryTag::Lo },
                BoundaryEdge { a: 1, b: 2, tag: BoundaryTag::Dir },
                BoundaryEdge { a: 2, b: 0, tag: BoundaryTag::Dir },
            ],
        )
        .is_err());
    }
}
