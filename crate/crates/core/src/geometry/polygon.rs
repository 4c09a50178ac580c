use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Simple closed polygon with counterclockwise vertex order.
#[derive(Debug, Clone)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

impl Polygon {
    /// Builds a polygon, rejecting fewer than three vertices, non-positive
    /// signed area and self-intersections.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Geometry(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let p = Polygon { vertices };
        let area = p.signed_area();
        if !(area > 0.0) {
            return Err(Error::Geometry(format!(
                "polygon must be counterclockwise with positive area (signed area {area})"
            )));
        }
        if !p.is_simple() {
            return Err(Error::Geometry("polygon is self-intersecting".into()));
        }
        Ok(p)
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Polygon::new(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut acc = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            acc += a.cross(b);
        }
        0.5 * acc
    }

    pub fn area(&self) -> f64 {
        self.signed_area()
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| self.vertices[i].dist(self.vertices[(i + 1) % n]))
            .sum()
    }

    /// Edges as vertex pairs, closing the loop.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    /// Even-odd point membership; boundary points count as inside.
    pub fn contains(&self, p: Point2) -> bool {
        if self.on_boundary(p, 1e-12) {
            return true;
        }
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[j];
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Strict interior membership with a clearance `tol` from the boundary.
    pub fn contains_strict(&self, p: Point2, tol: f64) -> bool {
        self.contains(p) && self.dist_to_boundary(p) > tol
    }

    pub fn on_boundary(&self, p: Point2, tol: f64) -> bool {
        self.edges().any(|(a, b)| p.dist_to_segment(a, b) <= tol)
    }

    pub fn dist_to_boundary(&self, p: Point2) -> f64 {
        self.edges()
            .map(|(a, b)| p.dist_to_segment(a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Walks the boundary, emitting points spaced `step` apart in arc length.
    pub fn sample_boundary(&self, step: f64) -> Vec<Point2> {
        assert!(step > 0.0, "boundary sampling step must be positive");
        let mut out = Vec::new();
        for (a, b) in self.edges() {
            let len = a.dist(b);
            let n = (len / step).ceil().max(1.0) as usize;
            for k in 0..n {
                out.push(a + (b - a) * (k as f64 / n as f64));
            }
        }
        out
    }

    fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let (a1, a2) = (self.vertices[i], self.vertices[(i + 1) % n]);
            for j in (i + 1)..n {
                // Adjacent edges share an endpoint by construction.
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (b1, b2) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_intersect(a1, a2, b1, b2) {
                    return false;
                }
            }
        }
        true
    }
}

fn segments_intersect(a1: Point2, a2: Point2, b1: Point2, b2: Point2) -> bool {
    let d1 = (a2 - a1).cross(b1 - a1);
    let d2 = (a2 - a1).cross(b2 - a1);
    let d3 = (b2 - b1).cross(a1 - b1);
    let d4 = (b2 - b1).cross(a2 - b1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Point2, q: Point2, r: Point2| {
        (q - p).cross(r - p) == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a1, a2, b1) || on(a1, a2, b2) || on(b1, b2, a1) || on(b1, b2, a2)
}

/// Nonempty finite set of plane points.
#[derive(Debug, Clone)]
pub struct PointCloud {
    points: Vec<Point2>,
}

impl PointCloud {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Geometry("point cloud must be nonempty".into()));
        }
        Ok(PointCloud { points })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Reads a vertex list: one `x y` pair per line, `#` starts a comment.
pub fn read_points(path: &Path) -> Result<Vec<Point2>> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut it = body.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<f64> {
            tok.ok_or_else(|| {
                Error::Parse(format!("{}:{}: expected `x y`", path.display(), lineno + 1))
            })?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), lineno + 1)))
        };
        let x = parse(it.next())?;
        let y = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Parse(format!(
                "{}:{}: trailing tokens after `x y`",
                path.display(),
                lineno + 1
            )));
        }
        out.push(Point2::new(x, y));
    }
    Ok(out)
}

/// Writes a vertex list in the format accepted by [`read_points`].
pub fn write_points(path: &Path, points: &[Point2], comment: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    if !comment.is_empty() {
        writeln!(f, "# {comment}")?;
    }
    for p in points {
        writeln!(f, "{} {}", p.x, p.y)?;
    }
    Ok(())
}
