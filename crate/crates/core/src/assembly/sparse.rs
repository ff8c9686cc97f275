use alloc::vec;
use alloc::vec::Vec;

/// Compressed sparse row matrix with sorted column indices per row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds the matrix from `(row, col, value)` triplets. Duplicates are
    /// summed in the order they appear, so the result depends only on the
    /// triplet sequence. Explicit zeros are kept in the pattern.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n_rows + 1];
        for &(r, _, _) in triplets {
            counts[r + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        // bucket by row keeping insertion order
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(r, c, v) in triplets {
            let slot = next[r];
            cols[slot] = c;
            vals[slot] = v;
            next[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut order: Vec<usize> = Vec::new();
        for r in 0..n_rows {
            let (lo, hi) = (counts[r], counts[r + 1]);
            order.clear();
            order.extend(lo..hi);
            order.sort_by_key(|&i| cols[i]);
            let mut last = usize::MAX;
            for &i in &order {
                if cols[i] == last {
                    *values.last_mut().unwrap() += vals[i];
                } else {
                    col_idx.push(cols[i]);
                    values.push(vals[i]);
                    last = cols[i];
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, r: usize, c: usize) -> Option<f64> {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).ok().map(|i| vals[i])
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.n_rows) {
            let (cols, vals) = self.row(r);
            *yr = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.matvec(x, &mut y);
        y
    }

    /// `true` when `(i, j)` stored implies `(j, i)` stored.
    pub fn has_symmetric_pattern(&self) -> bool {
        (0..self.n_rows).all(|r| self.row(r).0.iter().all(|&c| c < self.n_rows && self.get(c, r).is_some()))
    }

    /// `||b - A x|| / ||b||` (or the absolute residual when `b = 0`).
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let ax = self.mul_vec(x);
        let r = libm::sqrt(ax.iter().zip(b).map(|(a, b)| (b - a) * (b - a)).sum::<f64>());
        let nb = libm::sqrt(b.iter().map(|v| v * v).sum::<f64>());
        if nb > 0.0 {
            r / nb
        } else {
            r
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_zeros_kept() {
        let t = [(0, 1, 1.0), (1, 0, 0.0), (0, 1, 2.0), (0, 0, 4.0), (1, 1, -1.0)];
        let m = CsrMatrix::from_triplets(2, 2, &t);
        assert_eq!(m.row_ptr, vec![0, 2, 4]);
        assert_eq!(m.col_idx, vec![0, 1, 0, 1]);
        assert_eq!(m.values, vec![4.0, 3.0, 0.0, -1.0]);
        assert!(m.has_symmetric_pattern());
        assert_eq!(m.mul_vec(&[1.0, 1.0]), vec![7.0, -1.0]);
    }
}
