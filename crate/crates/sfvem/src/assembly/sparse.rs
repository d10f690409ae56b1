//! Symmetric sparse storage, reverse Cuthill-McKee ordering, an envelope
//! Cholesky factorization, and a Jacobi-preconditioned conjugate gradient
//! fallback for very large systems.

use crate::error::{Error, Result};
use nalgebra::DVector;

/// Compressed sparse rows holding the full (both triangles) pattern of a
/// symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymCsr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SymCsr {
    /// Builds from triplets, summing duplicates. Only entries with
    /// `row ≤ col` need to be supplied; the mirror is filled in.
    pub fn from_upper_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> SymCsr {
        let mut full: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len() * 2);
        for &(i, j, v) in triplets {
            let (i, j) = (i.min(j), i.max(j));
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        full.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        let mut k = 0usize;
        for row in 0..n {
            row_ptr[row] = col_idx.len();
            while k < full.len() && full[k].0 == row {
                let j = full[k].1;
                let mut v = full[k].2;
                k += 1;
                while k < full.len() && full[k].0 == row && full[k].1 == j {
                    v += full[k].2;
                    k += 1;
                }
                col_idx.push(j);
                vals.push(v);
            }
        }
        row_ptr[n] = col_idx.len();
        SymCsr {
            n,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn mat_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.col_idx[k]];
            }
            y[i] = acc;
        }
        y
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] == j {
                return self.vals[k];
            }
        }
        0.0
    }

    /// Maximum relative asymmetry |K - Kᵀ|∞ / |K|∞.
    pub fn asymmetry(&self) -> f64 {
        let mut max_entry: f64 = 0.0;
        let mut max_diff: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                max_entry = max_entry.max(self.vals[k].abs());
                if j > i {
                    max_diff = max_diff.max((self.vals[k] - self.get(j, i)).abs());
                }
            }
        }
        if max_entry == 0.0 {
            0.0
        } else {
            max_diff / max_entry
        }
    }
}

/// Reverse Cuthill-McKee ordering; returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(m: &SymCsr) -> Vec<usize> {
    let n = m.n;
    let degree = |i: usize| m.row_ptr[i + 1] - m.row_ptr[i];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    loop {
        // Lowest-degree unvisited node starts the next component.
        let mut start = None;
        let mut best = usize::MAX;
        for i in 0..n {
            if !visited[i] && degree(i) < best {
                best = degree(i);
                start = Some(i);
            }
        }
        let Some(start) = start else { break };
        let mut queue = std::collections::VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = (m.row_ptr[u]..m.row_ptr[u + 1])
                .map(|k| m.col_idx[k])
                .filter(|&v| !visited[v])
                .collect();
            nbrs.sort_by_key(|&v| (degree(v), v));
            for v in nbrs {
                if !visited[v] {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    order.reverse();
    order
}

/// Envelope (profile) Cholesky factorization of an SPD matrix.
#[derive(Debug)]
pub struct EnvelopeCholesky {
    n: usize,
    start: Vec<usize>,
    /// Row segments of L: entries for columns start[i]..=i.
    rows: Vec<Vec<f64>>,
}

impl EnvelopeCholesky {
    pub fn factor(m: &SymCsr) -> Result<Self> {
        let n = m.n;
        let mut start = vec![0usize; n];
        for i in 0..n {
            let mut first = i;
            for k in m.row_ptr[i]..m.row_ptr[i + 1] {
                let j = m.col_idx[k];
                if j < first {
                    first = j;
                }
            }
            start[i] = first;
        }
        let mut rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row = vec![0.0; i - start[i] + 1];
                for k in m.row_ptr[i]..m.row_ptr[i + 1] {
                    let j = m.col_idx[k];
                    if j <= i {
                        row[j - start[i]] = m.vals[k];
                    }
                }
                row
            })
            .collect();

        for i in 0..n {
            let si = start[i];
            for j in si..i {
                let sj = start[j];
                let lo = si.max(sj);
                let mut sum = rows[i][j - si];
                for k in lo..j {
                    sum -= rows[i][k - si] * rows[j][k - sj];
                }
                rows[i][j - si] = sum / rows[j][j - sj];
            }
            let mut d = rows[i][i - si];
            for k in si..i {
                let l = rows[i][k - si];
                d -= l * l;
            }
            if d <= 0.0 {
                return Err(Error::Solver(format!(
                    "matrix is not positive definite: pivot {d:.3e} at row {i} \
                     (smallest eigenvalue estimate {d:.3e}; check constraints or element rank)"
                )));
            }
            rows[i][i - si] = d.sqrt();
        }
        Ok(EnvelopeCholesky { n, start, rows })
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut y = b.clone();
        for i in 0..n {
            let si = self.start[i];
            let mut sum = y[i];
            for k in si..i {
                sum -= self.rows[i][k - si] * y[k];
            }
            y[i] = sum / self.rows[i][i - si];
        }
        for i in (0..n).rev() {
            let si = self.start[i];
            y[i] /= self.rows[i][i - si];
            let yi = y[i];
            for k in si..i {
                y[k] -= self.rows[i][k - si] * yi;
            }
        }
        y
    }
}

/// Jacobi-preconditioned conjugate gradients at fixed relative tolerance.
pub fn conjugate_gradient(
    m: &SymCsr,
    b: &DVector<f64>,
    tol_rel: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    let n = m.n;
    let mut diag = DVector::zeros(n);
    for i in 0..n {
        let d = m.get(i, i);
        if d <= 0.0 {
            return Err(Error::Solver(format!(
                "nonpositive diagonal {d:.3e} at row {i}"
            )));
        }
        diag[i] = 1.0 / d;
    }
    let mut x = DVector::zeros(n);
    let mut r = b.clone();
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut z = r.component_mul(&diag);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    for _ in 0..max_iter {
        let ap = m.mat_vec(&p);
        let alpha = rz / p.dot(&ap);
        x += alpha * &p;
        r -= alpha * &ap;
        if r.norm() <= tol_rel * bnorm {
            return Ok(x);
        }
        z = r.component_mul(&diag);
        let rz_new = r.dot(&z);
        p = &z + (rz_new / rz) * p;
        rz = rz_new;
    }
    Err(Error::Solver(format!(
        "conjugate gradients stalled at relative residual {:.3e}",
        r.norm() / bnorm
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn laplacian_1d(n: usize) -> (SymCsr, DMatrix<f64>) {
        let mut trip = Vec::new();
        let mut dense = DMatrix::zeros(n, n);
        for i in 0..n {
            trip.push((i, i, 2.0));
            dense[(i, i)] = 2.0;
            if i + 1 < n {
                trip.push((i, i + 1, -1.0));
                dense[(i, i + 1)] = -1.0;
                dense[(i + 1, i)] = -1.0;
            }
        }
        (SymCsr::from_upper_triplets(n, &trip), dense)
    }

    #[test]
    fn csr_round_trip_and_symmetry() {
        let (m, dense) = laplacian_1d(6);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(m.get(i, j), dense[(i, j)]);
            }
        }
        assert_eq!(m.asymmetry(), 0.0);
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let m = SymCsr::from_upper_triplets(2, &[(0, 0, 1.0), (0, 0, 2.5), (0, 1, 1.0)]);
        assert_eq!(m.get(0, 0), 3.5);
        assert_eq!(m.get(1, 0), 1.0);
    }

    #[test]
    fn envelope_cholesky_matches_dense() {
        let (m, dense) = laplacian_1d(24);
        let chol = EnvelopeCholesky::factor(&m).unwrap();
        let b = DVector::from_fn(24, |i, _| (i as f64 * 0.37).sin());
        let x = chol.solve(&b);
        let x_ref = dense.cholesky().unwrap().solve(&b);
        assert_relative_eq!((x - x_ref).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn envelope_cholesky_random_spd() {
        // A A^T + n I with a fixed congruential fill.
        let n = 40;
        let mut a = DMatrix::zeros(n, n);
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = next();
            }
        }
        let spd = &a * a.transpose() + DMatrix::identity(n, n) * n as f64;
        let mut trip = Vec::new();
        for i in 0..n {
            for j in i..n {
                trip.push((i, j, spd[(i, j)]));
            }
        }
        let m = SymCsr::from_upper_triplets(n, &trip);
        let b = DVector::from_fn(n, |i, _| (i as f64).cos());
        let chol = EnvelopeCholesky::factor(&m).unwrap();
        let x = chol.solve(&b);
        assert_relative_eq!((spd * &x - &b).norm() / b.norm(), 0.0, epsilon = 1e-11);

        let x_cg = conjugate_gradient(&m, &b, 1e-13, 10_000).unwrap();
        assert_relative_eq!((x_cg - x).norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let m = SymCsr::from_upper_triplets(2, &[(0, 0, 1.0), (1, 1, -1.0)]);
        let e = EnvelopeCholesky::factor(&m).unwrap_err();
        assert!(e.to_string().contains("positive definite"));
    }

    #[test]
    fn rcm_reduces_profile() {
        // A star graph numbered badly: RCM should bring neighbors together.
        let n = 9;
        let mut trip = vec![];
        for i in 0..n {
            trip.push((i, i, 4.0));
        }
        for i in 0..n - 1 {
            trip.push((i, i + 1, -1.0));
        }
        trip.push((0, n - 1, -1.0));
        let m = SymCsr::from_upper_triplets(n, &trip);
        let perm = reverse_cuthill_mckee(&m);
        let mut seen = perm.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..n).collect::<Vec<_>>());
    }
}
