//! Sparse symmetric storage and the two solvers behind `solve`: dense
//! Cholesky for small systems, Jacobi-preconditioned conjugate gradients
//! otherwise. Everything here is sequential and deterministic; parallelism
//! lives in assembly, not in the solves.

use crate::error::{Error, Result};

/// Compressed sparse rows, built from triplets with stable duplicate
/// merging (duplicates sum in insertion order).
#[derive(Debug, Clone)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Csr {
        // Stable sort keeps duplicate entries in insertion order, so their
        // sum is independent of thread count upstream.
        triplets.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut row_counts = vec![0usize; n];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut prev: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if prev == Some((r, c)) {
                *vals.last_mut().expect("previous entry exists") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_counts[r] += 1;
                prev = Some((r, c));
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for r in 0..n {
            row_ptr[r + 1] = row_ptr[r] + row_counts[r];
        }
        Csr {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[r] = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// Quadratic form `x . A x`.
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.n {
            let mut row = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                row += self.vals[k] * x[self.cols[k]];
            }
            acc += x[r] * row;
        }
        acc
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] == r {
                    d[r] += self.vals[k];
                }
            }
        }
        d
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &[usize], &[f64])> {
        (0..self.n).map(move |r| {
            let range = self.row_ptr[r]..self.row_ptr[r + 1];
            (r, &self.cols[range.clone()], &self.vals[range])
        })
    }

    /// Largest absolute asymmetry `|a_ij - a_ji|`; zero for matrices
    /// assembled from symmetric element blocks.
    pub fn max_asymmetry(&self) -> f64 {
        use std::collections::HashMap;
        let mut entries: HashMap<(usize, usize), f64> = HashMap::new();
        for (r, cols, vals) in self.rows() {
            for (c, v) in cols.iter().zip(vals) {
                entries.insert((r, *c), *v);
            }
        }
        let mut worst = 0.0f64;
        for (&(r, c), &v) in &entries {
            let vt = entries.get(&(c, r)).copied().unwrap_or(0.0);
            worst = worst.max((v - vt).abs());
        }
        worst
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned CG for SPD systems; converges when the 2-norm
/// relative residual drops below `tol`.
pub fn cg_jacobi(a: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.n();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let diag = a.diagonal();
    let inv_diag: Vec<f64> = diag
        .iter()
        .map(|&d| if d.abs() > 0.0 { 1.0 / d } else { 0.0 })
        .collect();

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    for it in 0..max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::Solver(format!(
                "matrix is not positive definite (p.Ap = {pap} at iteration {it})"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rel = norm(&r) / b_norm;
        if rel <= tol {
            return Ok((
                x,
                SolveStats {
                    iterations: it + 1,
                    relative_residual: rel,
                },
            ));
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solver(format!(
        "cg failed to reach tol {tol} within {max_iter} iterations (residual {})",
        norm(&r) / b_norm
    )))
}

/// Dense lower-Cholesky factor, reusable across right-hand sides.
pub struct DenseCholesky {
    n: usize,
    factor: Vec<f64>,
}

impl DenseCholesky {
    pub fn factor(a: &Csr) -> Result<DenseCholesky> {
        let n = a.n();
        let mut dense = vec![0.0f64; n * n];
        for (r, cols, vals) in a.rows() {
            for (c, v) in cols.iter().zip(vals) {
                dense[r * n + *c] += *v;
            }
        }
        for j in 0..n {
            let mut d = dense[j * n + j];
            for k in 0..j {
                d -= dense[j * n + k] * dense[j * n + k];
            }
            if d <= 0.0 {
                return Err(Error::Solver(format!(
                    "cholesky pivot {d} at column {j}; matrix not positive definite"
                )));
            }
            let d = d.sqrt();
            dense[j * n + j] = d;
            for i in j + 1..n {
                let mut s = dense[i * n + j];
                for k in 0..j {
                    s -= dense[i * n + k] * dense[j * n + k];
                }
                dense[i * n + j] = s / d;
            }
        }
        Ok(DenseCholesky { n, factor: dense })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let t = self.factor[i * n + k] * y[k];
                y[i] -= t;
            }
            y[i] /= self.factor[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.factor[k * n + i] * y[k];
                y[i] -= t;
            }
            y[i] /= self.factor[i * n + i];
        }
        y
    }
}

/// Dense Cholesky solve; intended for reduced systems up to a few thousand
/// unknowns.
pub fn cholesky_solve(a: &Csr, b: &[f64]) -> Result<Vec<f64>> {
    Ok(DenseCholesky::factor(a)?.solve(b))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> Csr {
        let mut trips = Vec::new();
        for i in 0..n {
            trips.push((i, i, 2.0));
            if i + 1 < n {
                trips.push((i, i + 1, -1.0));
                trips.push((i + 1, i, -1.0));
            }
        }
        Csr::from_triplets(n, trips)
    }

    #[test]
    fn triplets_merge_duplicates() {
        let a = Csr::from_triplets(2, vec![(0, 0, 1.0), (0, 0, 2.0), (1, 1, 1.0), (0, 1, 0.5)]);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.diagonal(), vec![3.0, 1.0]);
    }

    #[test]
    fn cg_and_cholesky_agree() {
        let a = laplacian_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let (x_cg, stats) = cg_jacobi(&a, &b, 1e-12, 10_000).unwrap();
        let x_ch = cholesky_solve(&a, &b).unwrap();
        assert!(stats.relative_residual <= 1e-12);
        for (p, q) in x_cg.iter().zip(&x_ch) {
            assert!((p - q).abs() < 1e-8, "{p} vs {q}");
        }
    }

    #[test]
    fn zero_rhs_short_circuits() {
        let a = laplacian_1d(10);
        let (x, stats) = cg_jacobi(&a, &vec![0.0; 10], 1e-10, 100).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
        assert_eq!(stats.iterations, 0);
    }

    #[test]
    fn cg_reports_non_convergence() {
        let a = laplacian_1d(200);
        let b = vec![1.0; 200];
        assert!(cg_jacobi(&a, &b, 1e-14, 3).is_err());
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Csr::from_triplets(2, vec![(0, 0, 1.0), (1, 1, -1.0)]);
        assert!(cholesky_solve(&a, &[1.0, 1.0]).is_err());
    }
}
