//! Small dense matrix type used by the network layers.
//!
//! Row-major storage with shape `(rows, cols)`; a layer's weight matrix maps an
//! input of length `cols` to an output of length `rows`. Networks here are
//! desk-scale, so the implementation favors clarity over BLAS-grade speed.

use serde::{Deserialize, Serialize};

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row-major data. Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "matrix data length {} does not match {}x{}",
            data.len(),
            rows,
            cols
        );
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `out = A x`. Panics on dimension mismatch.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec: x has wrong length");
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(w, xi)| w * xi).sum())
            .collect()
    }

    /// `out = Aᵀ x`. Panics on dimension mismatch.
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "matvec_t: x has wrong length");
        let mut out = vec![0.0; self.cols];
        for (row, &xr) in self.data.chunks_exact(self.cols).zip(x) {
            for (o, w) in out.iter_mut().zip(row) {
                *o += w * xr;
            }
        }
        out
    }

    /// Largest singular value, by power iteration on `AᵀA`.
    pub fn spectral_norm(&self) -> f64 {
        if self.data.iter().all(|&v| v == 0.0) {
            return 0.0;
        }
        // Deterministic non-degenerate start vector.
        let mut v: Vec<f64> = (0..self.cols)
            .map(|i| 1.0 + ((i as f64) * 0.7548776662466927).sin() * 0.5)
            .collect();
        let norm = |u: &[f64]| u.iter().map(|a| a * a).sum::<f64>().sqrt();
        let n0 = norm(&v);
        v.iter_mut().for_each(|a| *a /= n0);

        let mut sigma2 = 0.0;
        for _ in 0..1000 {
            let av = self.matvec(&v);
            let atav = self.matvec_t(&av);
            let new_sigma2 = norm(&atav);
            if new_sigma2 == 0.0 {
                return 0.0;
            }
            v = atav.iter().map(|a| a / new_sigma2).collect();
            if (new_sigma2 - sigma2).abs() <= 1e-13 * new_sigma2.max(1.0) {
                sigma2 = new_sigma2;
                break;
            }
            sigma2 = new_sigma2;
        }
        sigma2.sqrt()
    }
}
