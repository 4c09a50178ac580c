//! Sampled certification of the cone property: every boundary point must
//! admit one direction whose cones, based at all nearby closure points, stay
//! inside the polygon.

use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::{Point2, Polygon};

/// Sampling resolution of the cone check. A pass is a certificate at this
/// resolution, not an exact proof.
#[derive(Debug, Clone, Copy)]
pub struct ConeSampling {
    /// Arc-length spacing of tested boundary base points. `None` selects
    /// `epsilon / 20`.
    pub boundary_step: Option<f64>,
    /// Number of candidate cone directions on the unit circle.
    pub directions: usize,
    /// Number of sample points inside each tested cone.
    pub cone_samples: usize,
    /// Radial rings of closure samples inside each ball around a base point.
    pub ball_rings: usize,
    /// Angular sectors of closure samples inside each ball.
    pub ball_sectors: usize,
}

impl Default for ConeSampling {
    fn default() -> Self {
        ConeSampling {
            boundary_step: None,
            directions: 64,
            cone_samples: 200,
            ball_rings: 4,
            ball_sectors: 16,
        }
    }
}

/// Failure evidence: a base point, the most promising direction tried for
/// it, and a cone sample that escaped the polygon.
#[derive(Debug, Clone, Copy)]
pub struct ConeWitness {
    pub base: Point2,
    pub direction: Point2,
    pub offending: Point2,
}

#[derive(Debug, Clone)]
pub struct ConeCheckReport {
    pub epsilon: f64,
    pub passed: bool,
    pub witness: Option<ConeWitness>,
    /// Resolved arc-length spacing of the tested base points.
    pub boundary_step: f64,
    pub sampling: ConeSampling,
    pub boundary_points: usize,
}

impl ConeCheckReport {
    /// One-line summary, spelling out that the verdict holds at the sampling
    /// resolution only.
    pub fn summary(&self) -> String {
        let verdict = if self.passed { "passed" } else { "failed" };
        format!(
            "cone check {verdict} at epsilon = {} (sampled certificate: {} base points, step {:.3e}, {} directions, {} cone samples)",
            self.epsilon, self.boundary_points, self.boundary_step, self.sampling.directions, self.sampling.cone_samples
        )
    }
}

/// Checks the cone property of `p` at aperture/height `epsilon` by sampling.
///
/// For each sampled boundary point `x` the candidate directions are scanned
/// starting from the inward normal; a direction is accepted when, for every
/// sampled closure point `y` within `epsilon` of `x`, all sampled points of
/// the cone based at `y` lie in `p`.
pub fn check_eps_cone(p: &Polygon, epsilon: f64, sampling: ConeSampling) -> Result<ConeCheckReport> {
    if !(epsilon > 0.0) {
        return Err(Error::Geometry(format!(
            "cone parameter must be positive, got {epsilon}"
        )));
    }
    if sampling.directions == 0 || sampling.cone_samples == 0 {
        return Err(Error::Geometry("cone sampling must be nonempty".into()));
    }
    let step = sampling.boundary_step.unwrap_or(epsilon / 20.0);
    if !(step > 0.0) {
        return Err(Error::Geometry("boundary step must be positive".into()));
    }

    // Base points with the inward normal of the edge they came from;
    // the polygon is counterclockwise so the left normal points inward.
    let mut bases: Vec<(Point2, Point2)> = Vec::new();
    for (a, b) in p.edges() {
        let len = a.dist(b);
        let n = (len / step).ceil().max(1.0) as usize;
        let inward = (b - a).perp().normalized();
        for k in 0..n {
            bases.push((a + (b - a) * (k as f64 / n as f64), inward));
        }
    }

    let dirs: Vec<Point2> = (0..sampling.directions)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / sampling.directions as f64;
            Point2::new(ang.cos(), ang.sin())
        })
        .collect();

    // Chunked scan: parallel inside a chunk, sequential across chunks, so a
    // failure close to the scan start short-circuits most of the work while
    // the reported witness stays deterministic.
    let chunk = 64;
    let mut failure: Option<ConeWitness> = None;
    for chunk_start in (0..bases.len()).step_by(chunk) {
        let end = (chunk_start + chunk).min(bases.len());
        let slice = &bases[chunk_start..end];
        let results = exec::map_slice(slice, |(x, inward)| {
            check_base_point(p, *x, *inward, epsilon, &dirs, &sampling)
        });
        if let Some(w) = results.into_iter().flatten().next() {
            failure = Some(w);
            break;
        }
    }

    Ok(ConeCheckReport {
        epsilon,
        passed: failure.is_none(),
        witness: failure,
        boundary_step: step,
        sampling,
        boundary_points: bases.len(),
    })
}

/// Returns a witness when no direction works for the base point `x`.
fn check_base_point(
    p: &Polygon,
    x: Point2,
    inward: Point2,
    epsilon: f64,
    dirs: &[Point2],
    sampling: &ConeSampling,
) -> Option<ConeWitness> {
    let ys = closure_samples(p, x, epsilon, sampling);

    // Try directions nearest the inward normal first.
    let base_angle = inward.y.atan2(inward.x);
    let mut order: Vec<usize> = (0..dirs.len()).collect();
    order.sort_by(|&a, &b| {
        let da = angle_gap(dirs[a].y.atan2(dirs[a].x), base_angle);
        let db = angle_gap(dirs[b].y.atan2(dirs[b].x), base_angle);
        da.partial_cmp(&db).unwrap().then(a.cmp(&b))
    });

    let mut first_offender: Option<(Point2, Point2)> = None;
    for &di in &order {
        let xi = dirs[di];
        match cone_fits_for_all(p, &ys, xi, epsilon, sampling) {
            None => return None,
            Some(z) => {
                if first_offender.is_none() {
                    first_offender = Some((xi, z));
                }
            }
        }
    }
    let (direction, offending) = first_offender.expect("at least one direction was tried");
    Some(ConeWitness {
        base: x,
        direction,
        offending,
    })
}

/// Sampled points of `closure(p)` inside the open ball `B(x, epsilon)`:
/// boundary walk points plus a polar grid filtered by membership.
fn closure_samples(p: &Polygon, x: Point2, epsilon: f64, sampling: &ConeSampling) -> Vec<Point2> {
    let step = sampling.boundary_step.unwrap_or(epsilon / 20.0);
    let mut ys = vec![x];
    for (a, b) in p.edges() {
        let len = a.dist(b);
        let n = (len / step).ceil().max(1.0) as usize;
        for k in 0..n {
            let q = a + (b - a) * (k as f64 / n as f64);
            if q.dist(x) < epsilon && q != x {
                ys.push(q);
            }
        }
    }
    for ring in 1..=sampling.ball_rings {
        let r = epsilon * ring as f64 / (sampling.ball_rings as f64 + 1.0);
        for s in 0..sampling.ball_sectors {
            let ang = 2.0 * std::f64::consts::PI * s as f64 / sampling.ball_sectors as f64;
            let q = x + Point2::new(ang.cos(), ang.sin()) * r;
            if p.contains(q) {
                ys.push(q);
            }
        }
    }
    ys
}

/// `None` when the cone based at every `y` stays inside `p`; otherwise the
/// first escaping sample.
fn cone_fits_for_all(
    p: &Polygon,
    ys: &[Point2],
    xi: Point2,
    epsilon: f64,
    sampling: &ConeSampling,
) -> Option<Point2> {
    // The aperture condition compares against cos(epsilon), so the
    // half-angle folds back into [0, pi].
    let half_angle = epsilon.cos().clamp(-1.0, 1.0).acos();
    let radial = ((sampling.cone_samples as f64 / 2.0).sqrt().round() as usize).max(2);
    let angular = (sampling.cone_samples / radial).max(2);
    let xi_angle = xi.y.atan2(xi.x);

    for &y in ys {
        for a in 1..=radial {
            let rho = epsilon * (a as f64 - 0.5) / radial as f64;
            for b in 0..angular {
                let t = if angular == 1 {
                    0.0
                } else {
                    2.0 * b as f64 / (angular as f64 - 1.0) - 1.0
                };
                let phi = xi_angle + t * half_angle;
                let z = y + Point2::new(phi.cos(), phi.sin()) * rho;
                if !p.contains(z) {
                    return Some(z);
                }
            }
        }
    }
    None
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let mut d = (a - b).abs() % (2.0 * std::f64::consts::PI);
    if d > std::f64::consts::PI {
        d = 2.0 * std::f64::consts::PI - d;
    }
    d
}

/// Two overlapping unit disks polygonized as one region; the reflex corners
/// at the thin neck approximate a cusp, which no cone aperture survives.
pub fn near_tangent_disks(center_offset: f64, step_deg: f64) -> Result<Polygon> {
    let c = center_offset;
    let s = (1.0 - c * c).sqrt();
    let mut verts = Vec::new();
    // Left lobe from the neck top, counterclockwise.
    let t0 = s.atan2(c);
    let t1 = 2.0 * std::f64::consts::PI - t0;
    let n = ((t1 - t0).to_degrees() / step_deg).ceil() as usize;
    for k in 0..=n {
        let t = t0 + (t1 - t0) * k as f64 / n as f64;
        verts.push(Point2::new(-c + t.cos(), t.sin()));
    }
    // Right lobe from the neck bottom.
    let u0 = -(std::f64::consts::PI - s.atan2(c));
    let u1 = -u0;
    for k in 1..n {
        let u = u0 + (u1 - u0) * k as f64 / n as f64;
        verts.push(Point2::new(c + u.cos(), u.sin()));
    }
    Polygon::new(verts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Polygon {
        Polygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn unit_square_passes_small_epsilon() {
        let report = check_eps_cone(&unit_square(), 0.1, ConeSampling::default()).unwrap();
        assert!(report.passed, "witness: {:?}", report.witness);
        assert!(report.witness.is_none());
    }

    #[test]
    fn unit_square_fails_huge_epsilon() {
        let report = check_eps_cone(&unit_square(), 10.0, ConeSampling::default()).unwrap();
        assert!(!report.passed);
        assert!(report.witness.is_some());
    }

    #[test]
    fn monotone_in_epsilon_at_fixed_sampling() {
        // Fixed absolute sampling so a pass at a larger aperture implies a
        // pass at smaller ones.
        let sampling = ConeSampling {
            boundary_step: Some(0.01),
            ..ConeSampling::default()
        };
        let sq = unit_square();
        let mut passed_larger = true;
        for eps in [0.2, 0.1, 0.05] {
            let r = check_eps_cone(&sq, eps, sampling).unwrap();
            assert!(
                !passed_larger || r.passed,
                "pass at larger epsilon must imply pass at {eps}"
            );
            passed_larger = r.passed;
        }
    }

    #[test]
    fn near_tangent_disks_fail_with_witness_at_the_neck() {
        let peanut = near_tangent_disks(0.999, 10.0).unwrap();
        let sampling = ConeSampling {
            boundary_step: Some(0.04),
            directions: 16,
            cone_samples: 40,
            ball_rings: 2,
            ball_sectors: 8,
        };
        let report = check_eps_cone(&peanut, 0.1, sampling).unwrap();
        assert!(!report.passed);
        let w = report.witness.unwrap();
        let neck = w.base.x.abs() < 0.3 && w.base.y.abs() < 0.3;
        assert!(neck, "witness expected near the neck, got {:?}", w.base);
    }

    #[test]
    fn invalid_epsilon_is_rejected() {
        assert!(check_eps_cone(&unit_square(), 0.0, ConeSampling::default()).is_err());
        assert!(check_eps_cone(&unit_square(), -1.0, ConeSampling::default()).is_err());
    }
}
