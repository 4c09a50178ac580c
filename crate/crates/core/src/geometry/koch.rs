//! Koch prefractal generator with self-similar node measures.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::measure::BoundaryMeasure;

pub const MAX_KOCH_LEVEL: u32 = 8;

/// Applies the Koch generator `level` times to the segment `[a, b]` and
/// returns the polyline together with the self-similar measure that lumps
/// mass `4^-level` per segment onto its endpoints (half each). The bump of
/// each segment points to the left of the travel direction, so a curve on a
/// left-to-right base bulges upward. Total mass is exactly 1 at every level.
pub fn koch_prefractal(a: Point2, b: Point2, level: u32) -> Result<(Vec<Point2>, BoundaryMeasure)> {
    if level > MAX_KOCH_LEVEL {
        return Err(Error::Size(format!(
            "koch level {level} exceeds the cap of {MAX_KOCH_LEVEL}"
        )));
    }
    if a == b {
        return Err(Error::Geometry("koch base segment is degenerate".into()));
    }
    let mut pts = vec![a, b];
    for _ in 0..level {
        let mut next = Vec::with_capacity((pts.len() - 1) * 4 + 1);
        next.push(pts[0]);
        for w in pts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let v = q - p;
            let third = p + v / 3.0;
            let two_thirds = p + v * (2.0 / 3.0);
            let apex = p + v * 0.5 + v.perp() * (3.0f64.sqrt() / 6.0);
            next.push(third);
            next.push(apex);
            next.push(two_thirds);
            next.push(q);
        }
        pts = next;
    }

    // 4^-level is a power of two, so the lumped weights add without rounding.
    let seg_mass = 0.25f64.powi(level as i32);
    let measure = BoundaryMeasure::from_contributions((0..pts.len() - 1).flat_map(|i| {
        [
            (i, pts[i], seg_mass / 2.0),
            (i + 1, pts[i + 1], seg_mass / 2.0),
        ]
    }));
    Ok((pts, measure))
}
