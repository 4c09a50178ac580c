//! Set-convergence metrics: Hausdorff distance on point samples and the
//! symmetric-difference area of two polygons on a deterministic grid.

use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{PointCloud, Polygon};

/// Hausdorff distance between two finite point sets,
/// `max(sup_a d(a, B), sup_b d(b, A))`.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> f64 {
    directed(a, b).max(directed(b, a))
}

fn directed(a: &PointCloud, b: &PointCloud) -> f64 {
    let bp = b.points();
    let dists = exec::map_slice(a.points(), |p| {
        bp.iter()
            .map(|q| p.dist_sq(*q))
            .fold(f64::INFINITY, f64::min)
    });
    dists.into_iter().fold(0.0, f64::max).sqrt()
}

/// Evaluation grid for area metrics, `nx * ny` cells over the container.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nx: 256, ny: 256 }
    }
}

/// Area of the symmetric difference `p Δ q`, approximated by counting cells
/// of a deterministic grid over `container` whose centers lie in exactly one
/// of the polygons.
///
/// Both polygons must be contained in `container` (checked on vertices).
pub fn char_fn_distance(p: &Polygon, q: &Polygon, container: &Polygon, grid: GridSpec) -> Result<f64> {
    for (name, poly) in [("first", p), ("second", q)] {
        if !poly.vertices().iter().all(|v| container.contains(*v)) {
            return Err(Error::Geometry(format!(
                "{name} polygon is not contained in the container"
            )));
        }
    }
    if grid.nx == 0 || grid.ny == 0 {
        return Err(Error::Geometry("grid must have at least one cell".into()));
    }
    let (lo, hi) = container.bounding_box();
    let dx = (hi.x - lo.x) / grid.nx as f64;
    let dy = (hi.y - lo.y) / grid.ny as f64;
    let cell = dx * dy;

    // Integer cell counts per row sum exactly, so the parallel and
    // sequential builds agree bit for bit.
    let row_counts = exec::map_range(grid.ny, |j| {
        let y = lo.y + (j as f64 + 0.5) * dy;
        let mut count = 0usize;
        for i in 0..grid.nx {
            let x = lo.x + (i as f64 + 0.5) * dx;
            let pt = crate::geometry::Point2::new(x, y);
            if p.contains(pt) != q.contains(pt) {
                count += 1;
            }
        }
        count
    });
    let total: usize = row_counts.into_iter().sum();
    Ok(total as f64 * cell)
}
