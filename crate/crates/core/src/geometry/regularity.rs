//! Upper and lower regularity checks for discrete boundary measures:
//! `mu(B(x,r)) <= c_d r^d` over all support nodes and supplied radii, and
//! the closed-ball lower bound `mu(closure B(x,r)) >= c_bar r^s`.

use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::Point2;
use crate::measure::BoundaryMeasure;

#[derive(Debug, Clone, Copy)]
pub struct RegularityWitness {
    pub point: Point2,
    pub radius: f64,
    /// `mu(ball) / r^exponent` at the worst support node and radius.
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RegularityReport {
    pub exponent: f64,
    pub constant: f64,
    pub passed: bool,
    pub worst_witness: RegularityWitness,
}

fn validate(mu: &BoundaryMeasure, exponent: f64, constant: f64, radii: &[f64]) -> Result<()> {
    if !(constant > 0.0) {
        return Err(Error::Geometry(format!(
            "regularity constant must be positive, got {constant}"
        )));
    }
    if radii.is_empty() {
        return Err(Error::Geometry("radius list must be nonempty".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
        return Err(Error::Geometry("radii must lie in (0, 1]".into()));
    }
    if mu.is_empty() {
        return Err(Error::Geometry("measure has empty support".into()));
    }
    if !exponent.is_finite() {
        return Err(Error::Geometry("exponent must be finite".into()));
    }
    Ok(())
}

/// Upper regularity: passes iff `mu(B(x,r)) <= c_d r^d` at every support
/// node and radius. The worst witness maximizes `mu(B(x,r)) / r^d`.
pub fn check_upper_regularity(
    mu: &BoundaryMeasure,
    d: f64,
    c_d: f64,
    radii: &[f64],
) -> Result<RegularityReport> {
    validate(mu, d, c_d, radii)?;
    let points = mu.points();
    let per_node = exec::map_range(points.len(), |i| {
        let x = points[i];
        let mut worst = (0.0f64, radii[0]);
        for &r in radii {
            let ratio = mu.ball_mass_open(x, r) / r.powf(d);
            if ratio > worst.0 {
                worst = (ratio, r);
            }
        }
        worst
    });
    let (idx, _) = exec::max_by_index(per_node.len(), |i| per_node[i].0).expect("nonempty support");
    let (ratio, radius) = per_node[idx];
    Ok(RegularityReport {
        exponent: d,
        constant: c_d,
        passed: ratio <= c_d,
        worst_witness: RegularityWitness {
            point: points[idx],
            radius,
            ratio,
        },
    })
}

/// Lower regularity in the closed-ball sense: passes iff
/// `mu(closure B(x,r)) >= c_bar r^s` everywhere. The worst witness
/// minimizes `mu(closure B(x,r)) / r^s`.
pub fn check_lower_regularity(
    mu: &BoundaryMeasure,
    s: f64,
    c_bar: f64,
    radii: &[f64],
) -> Result<RegularityReport> {
    validate(mu, s, c_bar, radii)?;
    let points = mu.points();
    let per_node = exec::map_range(points.len(), |i| {
        let x = points[i];
        let mut worst = (f64::INFINITY, radii[0]);
        for &r in radii {
            let ratio = mu.ball_mass_closed(x, r) / r.powf(s);
            if ratio < worst.0 {
                worst = (ratio, r);
            }
        }
        worst
    });
    let (idx, _) = exec::min_by_index(per_node.len(), |i| per_node[i].0).expect("nonempty support");
    let (ratio, radius) = per_node[idx];
    Ok(RegularityReport {
        exponent: s,
        constant: c_bar,
        passed: ratio >= c_bar,
        worst_witness: RegularityWitness {
            point: points[idx],
            radius,
            ratio,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Lumped arc-length measure of the unit segment at pitch `1/n`; with a
    /// power-of-two `n` the node positions and weights are exact binaries.
    pub(crate) fn segment_measure(n: usize) -> BoundaryMeasure {
        let h = 1.0 / n as f64;
        BoundaryMeasure::from_contributions((0..n).flat_map(|i| {
            let a = Point2::new(i as f64 * h, 0.0);
            let b = Point2::new((i + 1) as f64 * h, 0.0);
            [(i, a, h / 2.0), (i + 1, b, h / 2.0)]
        }))
    }

    // Off-lattice radii: a lumped open ball of radius (m + 3/4)h holds at
    // most 2m+1 node masses, which keeps the ratio strictly below 2; a
    // closed ball of radius (m + 1/4)h holds at least m+1 half-weights even
    // at the segment ends, which keeps the lower ratio above 1.
    fn upper_radii() -> Vec<f64> {
        [3.0, 6.0, 12.0, 31.0].iter().map(|m| (m + 0.75) / 64.0).collect()
    }

    fn lower_radii() -> Vec<f64> {
        [3.0, 6.0, 12.0, 31.0].iter().map(|m| (m + 0.25) / 64.0).collect()
    }

    #[test]
    fn segment_passes_upper_d1() {
        let mu = segment_measure(64);
        let rep = check_upper_regularity(&mu, 1.0, 2.0, &upper_radii()).unwrap();
        assert!(rep.passed, "worst {:?}", rep.worst_witness);
    }

    #[test]
    fn segment_fails_upper_d15_at_small_radii() {
        let mu = segment_measure(64);
        let rep = check_upper_regularity(&mu, 1.5, 2.0, &upper_radii()).unwrap();
        assert!(!rep.passed);
        assert!(rep.worst_witness.radius <= 0.1);
    }

    #[test]
    fn segment_passes_lower_s1() {
        let mu = segment_measure(64);
        let rep = check_lower_regularity(&mu, 1.0, 1.0, &lower_radii()).unwrap();
        assert!(rep.passed, "worst {:?}", rep.worst_witness);
    }

    #[test]
    fn segment_fails_lower_s05() {
        let mu = segment_measure(64);
        let rep = check_lower_regularity(&mu, 0.5, 1.0, &lower_radii()).unwrap();
        assert!(!rep.passed);
    }

    #[test]
    fn upper_check_is_monotone_in_constant() {
        let mu = segment_measure(64);
        let loose = check_upper_regularity(&mu, 1.0, 3.0, &upper_radii()).unwrap();
        let tight = check_upper_regularity(&mu, 1.0, 0.1, &upper_radii()).unwrap();
        assert!(loose.passed);
        assert!(!tight.passed);
        // Same worst ratio either way; only the comparison constant moves.
        assert_eq!(loose.worst_witness.ratio, tight.worst_witness.ratio);
    }

    #[test]
    fn lower_check_is_antitone_in_constant() {
        let mu = segment_measure(64);
        let loose = check_lower_regularity(&mu, 1.0, 0.5, &lower_radii()).unwrap();
        let tight = check_lower_regularity(&mu, 1.0, 5.0, &lower_radii()).unwrap();
        assert!(loose.passed);
        assert!(!tight.passed);
    }

    #[test]
    fn bad_inputs_rejected() {
        let mu = segment_measure(16);
        assert!(check_upper_regularity(&mu, 1.0, 0.0, &upper_radii()).is_err());
        assert!(check_upper_regularity(&mu, 1.0, 1.0, &[]).is_err());
        assert!(check_upper_regularity(&mu, 1.0, 1.0, &[1.5]).is_err());
    }
}
