//! Discrete boundary measures: nonnegative masses lumped onto boundary
//! nodes. The same representation backs mesh boundary measures, prefractal
//! curve measures and the weak-star comparison utilities.

use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Atomic measure `sum_i w_i * delta(x_i)` supported on tagged boundary
/// nodes. `node` keeps the owning node index of the originating mesh or
/// polyline so trace sums can address nodal fields directly.
#[derive(Debug, Clone)]
pub struct BoundaryMeasure {
    nodes: Vec<usize>,
    points: Vec<Point2>,
    weights: Vec<f64>,
}

impl BoundaryMeasure {
    pub fn new(nodes: Vec<usize>, points: Vec<Point2>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != points.len() || nodes.len() != weights.len() {
            return Err(Error::Mesh("measure fields must have equal length".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Mesh("measure weights must be nonnegative".into()));
        }
        Ok(BoundaryMeasure {
            nodes,
            points,
            weights,
        })
    }

    /// Accumulates `w` onto the node, merging repeated node indices.
    pub fn from_contributions(iter: impl IntoIterator<Item = (usize, Point2, f64)>) -> Self {
        let mut order: Vec<usize> = Vec::new();
        let mut map: std::collections::HashMap<usize, (Point2, f64)> =
            std::collections::HashMap::new();
        for (node, point, w) in iter {
            match map.entry(node) {
                std::collections::hash_map::Entry::Occupied(mut e) => e.get_mut().1 += w,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert((point, w));
                    order.push(node);
                }
            }
        }
        let mut nodes = Vec::with_capacity(order.len());
        let mut points = Vec::with_capacity(order.len());
        let mut weights = Vec::with_capacity(order.len());
        for node in order {
            let (p, w) = map[&node];
            nodes.push(node);
            points.push(p);
            weights.push(w);
        }
        BoundaryMeasure {
            nodes,
            points,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Point2, f64)> + '_ {
        (0..self.len()).map(move |i| (self.nodes[i], self.points[i], self.weights[i]))
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Mass of the open ball `B(x, r)`: a node belongs to the ball iff its
    /// coordinate does.
    pub fn ball_mass_open(&self, x: Point2, r: f64) -> f64 {
        self.iter()
            .filter(|(_, p, _)| p.dist(x) < r)
            .map(|(_, _, w)| w)
            .sum()
    }

    /// Mass of the closed ball.
    pub fn ball_mass_closed(&self, x: Point2, r: f64) -> f64 {
        self.iter()
            .filter(|(_, p, _)| p.dist(x) <= r)
            .map(|(_, _, w)| w)
            .sum()
    }

    /// Integral of a test function against the measure.
    pub fn integrate(&self, f: impl Fn(Point2) -> f64) -> f64 {
        self.iter().map(|(_, p, w)| w * f(p)).sum()
    }
}
