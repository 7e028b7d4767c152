//! Sparse and dense linear algebra kernels for the eigensolver.
//!
//! Three pieces, all self-contained:
//! * [`SparseSym`] — CSR storage for symmetric matrices (full pattern kept so
//!   matrix–vector products need no branch on the triangle);
//! * [`BandMatrix`] — row-major lower-band storage with an in-place Cholesky
//!   factorization and triangular solves, used to invert `K - sigma M` inside
//!   shift-invert iterations;
//! * [`jacobi_eigen`] — cyclic Jacobi for small dense symmetric matrices
//!   (projected tridiagonal blocks, 2x2 Hessians), returning ascending
//!   eigenvalues with orthonormal eigenvectors.

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot:.3e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Symmetric sparse matrix in CSR form. Construction sorts and merges
/// duplicate entries, so assembly order does not affect the stored values
/// beyond float non-associativity in duplicate summation (and duplicates are
/// summed in deterministic sorted order, so a fixed input multiset of
/// triplets always yields bitwise-identical storage).
#[derive(Clone, Debug)]
pub struct SparseSym {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseSym {
    /// Build from (row, col, value) triplets. Both triangles must be present
    /// (assembly emits symmetric pairs); duplicates are summed in sorted
    /// order, so a fixed multiset of triplets yields bitwise-identical
    /// storage regardless of emission order... up to the non-associativity
    /// of summing equal-key duplicates, which the sort leaves in emission
    /// order — hence the documented 1e-15 order tolerance downstream.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut entries: Vec<(usize, usize, f64)> = triplets.to_vec();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &(i, j, v) in &entries {
            debug_assert!(i < n && j < n);
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] = col_idx.len();
                last = Some((i, j));
            }
        }
        // Rows with no entries inherit the running prefix.
        for i in 1..=n {
            if row_ptr[i] < row_ptr[i - 1] {
                row_ptr[i] = row_ptr[i - 1];
            }
        }
        SparseSym {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            y[i] = s;
        }
    }

    /// `x^T A y`.
    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row += self.values[k] * y[self.col_idx[k]];
            }
            s += x[i] * row;
        }
        s
    }

    /// Half bandwidth: max over rows of `i - min(col in row i)`.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for i in 0..self.n {
            if self.row_ptr[i + 1] > self.row_ptr[i] {
                let jmin = self.col_idx[self.row_ptr[i]];
                bw = bw.max(i.saturating_sub(jmin));
            }
        }
        bw
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] == j {
                return self.values[k];
            }
        }
        0.0
    }
}

/// Symmetric banded matrix holding the lower band row-major:
/// entry `(i, j)` with `i - bw <= j <= i` lives at `data[i*(bw+1) + j-i+bw]`.
/// After [`BandMatrix::cholesky`] succeeds the same storage holds the lower
/// Cholesky factor `L` (so `A = L L^T`).
#[derive(Clone, Debug)]
pub struct BandMatrix {
    pub n: usize,
    pub bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandMatrix {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if i - j > self.bw {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Build `K + shift * M` in band storage (lower triangles of both CSR
    /// matrices must fit in the band).
    pub fn from_shifted(k: &SparseSym, m: &SparseSym, shift: f64) -> Result<Self, LinalgError> {
        if k.n != m.n {
            return Err(LinalgError::Dimension(format!(
                "K is {} but M is {}",
                k.n, m.n
            )));
        }
        let bw = k.bandwidth().max(m.bandwidth());
        let mut band = BandMatrix::zeros(k.n, bw);
        for i in 0..k.n {
            for p in k.row_ptr[i]..k.row_ptr[i + 1] {
                let j = k.col_idx[p];
                if j <= i {
                    band.add(i, j, k.values[p]);
                }
            }
            for p in m.row_ptr[i]..m.row_ptr[i + 1] {
                let j = m.col_idx[p];
                if j <= i {
                    band.add(i, j, shift * m.values[p]);
                }
            }
        }
        Ok(band)
    }

    /// In-place banded Cholesky. On success the band holds `L`; on failure
    /// (non-positive pivot) the matrix was not positive definite — callers
    /// retry with a perturbed shift.
    pub fn cholesky(&mut self) -> Result<(), LinalgError> {
        let bw = self.bw;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let kstart = lo.max(j.saturating_sub(bw));
                let mut s = self.data[self.idx(i, j)];
                for k in kstart..j {
                    s -= self.data[self.idx(i, k)] * self.data[self.idx(j, k)];
                }
                if j < i {
                    let d = self.data[self.idx(j, j)];
                    let k = self.idx(i, j);
                    self.data[k] = s / d;
                } else {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(LinalgError::NotPositiveDefinite { row: i, pivot: s });
                    }
                    let k = self.idx(i, i);
                    self.data[k] = s.sqrt();
                }
            }
        }
        Ok(())
    }

    /// Solve `L L^T x = b` after a successful [`Self::cholesky`].
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let bw = self.bw;
        let mut x = b.to_vec();
        // Forward: L y = b.
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = x[i];
            for k in lo..i {
                s -= self.data[self.idx(i, k)] * x[k];
            }
            x[i] = s / self.data[self.idx(i, i)];
        }
        // Backward: L^T x = y.
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut s = x[i];
            for k in (i + 1)..=hi {
                s -= self.data[self.idx(k, i)] * x[k];
            }
            x[i] = s / self.data[self.idx(i, i)];
        }
        x
    }
}

/// Cyclic Jacobi eigendecomposition of a small dense symmetric matrix given
/// in row-major order. Returns eigenvalues ascending and the matching
/// orthonormal eigenvectors as columns of `v` (row-major `n x n`).
pub fn jacobi_eigen(a_in: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a_in.len(), n * n);
    let mut a = a_in.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let at = |a: &Vec<f64>, i: usize, j: usize| a[i * n + j];
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += at(&a, i, j).powi(2);
            }
        }
        if off.sqrt() < 1e-15 * (1.0 + frobenius(&a, n)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- J^T A J on rows/cols p, q.
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    // Sort ascending, permuting eigenvector columns alongside.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + new] = v[r * n + old];
        }
    }
    (eigenvalues, vectors)
}

fn frobenius(a: &[f64], n: usize) -> f64 {
    a.iter().take(n * n).map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csr_matvec_matches_dense() {
        // 4x4 symmetric with a duplicate triplet to exercise merging.
        let trip = vec![
            (0, 0, 2.0),
            (1, 1, 3.0),
            (2, 2, 4.0),
            (3, 3, 5.0),
            (0, 1, -1.0),
            (1, 0, -1.0),
            (1, 3, 0.5),
            (3, 1, 0.5),
            (0, 0, 1.0), // duplicate: merged into (0,0)
        ];
        let a = SparseSym::from_triplets(4, &trip);
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.nnz(), 8);
        let x = [1.0, 2.0, 3.0, 4.0];
        let mut y = [0.0; 4];
        a.matvec(&x, &mut y);
        assert_eq!(y, [1.0, 7.0, 12.0, 21.0]);
        assert!((a.quadratic_form(&x, &x) - (1.0 + 14.0 + 36.0 + 84.0)).abs() < 1e-14);
        assert_eq!(a.bandwidth(), 2);
    }

    #[test]
    fn band_cholesky_solves_spd_system() {
        // SPD band matrix: second-difference plus identity.
        let n = 60;
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 3.0));
            if i + 1 < n {
                trip.push((i, i + 1, -1.0));
                trip.push((i + 1, i, -1.0));
            }
            if i + 3 < n {
                trip.push((i, i + 3, 0.25));
                trip.push((i + 3, i, 0.25));
            }
        }
        let k = SparseSym::from_triplets(n, &trip);
        let m = SparseSym::from_triplets(n, &(0..n).map(|i| (i, i, 1.0)).collect::<Vec<_>>());
        let mut band = BandMatrix::from_shifted(&k, &m, 0.5).unwrap();
        assert_eq!(band.bw, 3);
        band.cholesky().unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let x = band.solve(&b);
        // Residual against A = K + 0.5 M.
        let mut r = vec![0.0; n];
        k.matvec(&x, &mut r);
        let mut mx = vec![0.0; n];
        m.matvec(&x, &mut mx);
        for i in 0..n {
            r[i] += 0.5 * mx[i] - b[i];
        }
        assert!(norm2(&r) < 1e-12 * norm2(&b), "residual {}", norm2(&r));
    }

    #[test]
    fn band_cholesky_rejects_indefinite() {
        let trip = vec![(0, 0, 1.0), (1, 1, -2.0)];
        let a = SparseSym::from_triplets(2, &trip);
        let zero = SparseSym::from_triplets(2, &[]);
        let mut band = BandMatrix::from_shifted(&a, &zero, 0.0).unwrap();
        match band.cholesky() {
            Err(LinalgError::NotPositiveDefinite { row, .. }) => assert_eq!(row, 1),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn jacobi_diagonalizes_known_matrix() {
        // Eigenvalues of [[2,1,0],[1,2,1],[0,1,2]] are 2 - sqrt2, 2, 2 + sqrt2.
        let a = [2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0];
        let (vals, vecs) = jacobi_eigen(&a, 3);
        let s2 = 2.0f64.sqrt();
        assert!((vals[0] - (2.0 - s2)).abs() < 1e-14);
        assert!((vals[1] - 2.0).abs() < 1e-14);
        assert!((vals[2] - (2.0 + s2)).abs() < 1e-14);
        // Orthonormal columns.
        for i in 0..3 {
            for j in 0..3 {
                let mut d = 0.0;
                for r in 0..3 {
                    d += vecs[r * 3 + i] * vecs[r * 3 + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn jacobi_reconstructs_random_symmetric() {
        // Deterministic pseudo-random symmetric 20x20.
        let n = 20;
        let mut a = vec![0.0; n * n];
        let mut state = 0x5EEDu64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for i in 0..n {
            for j in 0..=i {
                let v = next();
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let (vals, vecs) = jacobi_eigen(&a, n);
        // A V = V diag(vals)
        let mut max_res = 0.0f64;
        for col in 0..n {
            for row in 0..n {
                let mut av = 0.0;
                for k in 0..n {
                    av += a[row * n + k] * vecs[k * n + col];
                }
                max_res = max_res.max((av - vals[col] * vecs[row * n + col]).abs());
            }
        }
        assert!(max_res < 1e-12, "eigen residual {max_res}");
        // Ascending.
        for w in vals.windows(2) {
            assert!(w[0] <= w[1] + 1e-15);
        }
    }
}
