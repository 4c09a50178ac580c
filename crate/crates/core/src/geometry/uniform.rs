//! Sampled uniformity check: interior vertex pairs are joined by shortest
//! mesh-graph paths, which must have bounded relative length and stay
//! proportionally far from the boundary.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone)]
pub struct UniformityReport {
    pub epsilon: f64,
    pub passed: bool,
    /// Node-index pair attaining the smallest admissible parameter.
    pub worst_pair: (usize, usize),
    /// Largest value of the parameter the sampled pairs admit: the check
    /// passes iff `epsilon` does not exceed it.
    pub largest_admissible: f64,
    pub pairs_checked: usize,
}

/// Checks both uniformity conditions on `pair_samples` sampled interior
/// vertex pairs: path length `l(γ) <= |x-y| / ε` and the cigar bound
/// `d(z, ∂Ω) >= ε |x-z||y-z| / |x-y|` at path nodes.
pub fn check_uniform_domain(
    mesh: &Mesh,
    epsilon: f64,
    pair_samples: usize,
    seed: u64,
) -> Result<UniformityReport> {
    if !(epsilon > 0.0) {
        return Err(Error::Geometry("epsilon must be positive".into()));
    }
    if pair_samples == 0 {
        return Err(Error::Geometry("need at least one sampled pair".into()));
    }

    let n = mesh.num_nodes();
    let mut on_boundary = vec![false; n];
    for e in mesh.boundary_edges() {
        on_boundary[e.a] = true;
        on_boundary[e.b] = true;
    }
    let interior: Vec<usize> = (0..n).filter(|&i| !on_boundary[i]).collect();
    if interior.len() < 2 {
        return Err(Error::Geometry(
            "mesh has fewer than two interior vertices".into(),
        ));
    }

    // Undirected adjacency with Euclidean edge lengths.
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    {
        let mut seen = std::collections::HashSet::new();
        for tri in mesh.triangles() {
            for k in 0..3 {
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                let key = (i.min(j), i.max(j));
                if seen.insert(key) {
                    let len = mesh.nodes()[i].dist(mesh.nodes()[j]);
                    adj[i].push((j, len));
                    adj[j].push((i, len));
                }
            }
        }
    }

    // Node clearance from the boundary, for the cigar bound and for the
    // penalized path searches below.
    let clearance: Vec<f64> = crate::exec::map_range(n, |i| {
        let p = mesh.nodes()[i];
        mesh.boundary_edges()
            .iter()
            .map(|e| p.dist_to_segment(mesh.nodes()[e.a], mesh.nodes()[e.b]))
            .fold(f64::INFINITY, f64::min)
    });
    let max_clearance = clearance.iter().cloned().fold(0.0f64, f64::max);

    // The conditions quantify existentially over arcs, so any witness path
    // certifies a pair. Beside the plain shortest path, search with edge
    // costs inflated near the boundary: those paths bow inward the way the
    // optimal cigar arcs do.
    let penalties = [0.0, 1.0, 4.0];
    let penalized: Vec<Vec<Vec<(usize, f64)>>> = penalties
        .iter()
        .map(|&beta| {
            adj.iter()
                .enumerate()
                .map(|(i, nbrs)| {
                    nbrs.iter()
                        .map(|&(j, len)| {
                            let mid = (clearance[i] + clearance[j]) / 2.0;
                            let factor = 1.0 + beta * (1.0 - mid / max_clearance.max(1e-300));
                            (j, len * factor)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Option<(f64, (usize, usize))> = None;
    for _ in 0..pair_samples {
        let x = interior[rng.gen_range(0..interior.len())];
        let mut y = interior[rng.gen_range(0..interior.len())];
        while y == x {
            y = interior[rng.gen_range(0..interior.len())];
        }
        let px = mesh.nodes()[x];
        let py = mesh.nodes()[y];
        let chord = px.dist(py);

        let mut admissible = 0.0f64;
        for graph in &penalized {
            let path = shortest_path(graph, x, y)
                .ok_or_else(|| Error::Geometry("mesh graph is disconnected".into()))?;
            // True arc length of the witness, not the penalized cost.
            let length: f64 = path
                .windows(2)
                .map(|w| mesh.nodes()[w[0]].dist(mesh.nodes()[w[1]]))
                .sum();
            let mut path_eps = chord / length;
            for &z in &path[1..path.len() - 1] {
                let pz = mesh.nodes()[z];
                let denom = px.dist(pz) * py.dist(pz);
                if denom == 0.0 {
                    continue;
                }
                path_eps = path_eps.min(clearance[z] * chord / denom);
            }
            admissible = admissible.max(path_eps);
        }

        match worst {
            Some((w, _)) if w <= admissible => {}
            _ => worst = Some((admissible, (x, y))),
        }
    }

    let (largest_admissible, worst_pair) = worst.expect("at least one pair sampled");
    Ok(UniformityReport {
        epsilon,
        passed: epsilon <= largest_admissible,
        worst_pair,
        largest_admissible,
        pairs_checked: pair_samples,
    })
}

#[derive(PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap by distance, ties by node index for determinism.
        other
            .dist
            .total_cmp(&self.dist)
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn shortest_path(adj: &[Vec<(usize, f64)>], from: usize, to: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[from] = 0.0;
    heap.push(HeapItem {
        dist: 0.0,
        node: from,
    });
    while let Some(HeapItem { dist: d, node }) = heap.pop() {
        if node == to {
            break;
        }
        if d > dist[node] {
            continue;
        }
        for &(next, len) in &adj[node] {
            let nd = d + len;
            if nd < dist[next] {
                dist[next] = nd;
                prev[next] = node;
                heap.push(HeapItem {
                    dist: nd,
                    node: next,
                });
            }
        }
    }
    if dist[to].is_infinite() {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}
