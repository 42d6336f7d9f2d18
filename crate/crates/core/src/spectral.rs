//! Adjacency spectral embedding and regularized row normalization.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::AdjacencyMatrix;

/// Spectral node positions `X = U diag(sqrt(max(lambda, 0)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub x_hat: DMatrix<f64>,
    /// The selected eigenvalues, descending, with their signs.
    pub eigenvalues: DVector<f64>,
    /// Columns zeroed because their eigenvalue was not positive.
    pub zeroed_columns: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedEmbedding {
    pub rows: DMatrix<f64>,
    pub tau: f64,
}

/// Sparsity estimate `sum_{i != j} A_ij / (n (n - 1) K)`.
pub fn estimate_alpha(a: &AdjacencyMatrix, k: usize) -> f64 {
    let n = a.nodes();
    assert!(n >= 2 && k >= 1, "need n >= 2 and K >= 1");
    let ordered_pairs = 2 * a.edge_count();
    ordered_pairs as f64 / (n as f64 * (n as f64 - 1.0) * k as f64)
}

/// `c_tau * alpha_hat^0.2 * K^1.5 / n^0.3`.
pub fn regularizer_tau(alpha_hat: f64, k: usize, n: usize, c_tau: f64) -> Result<f64> {
    if !(alpha_hat > 0.0) {
        return Err(Error::NonpositiveAlpha(alpha_hat));
    }
    if !(c_tau.is_finite() && c_tau > 0.0) {
        return Err(Error::InvalidParameter(format!("c_tau must be positive, got {c_tau}")));
    }
    Ok(c_tau * alpha_hat.powf(0.2) * (k as f64).powf(1.5) / (n as f64).powf(0.3))
}

pub fn spectral_embedding(a: &AdjacencyMatrix, k: usize) -> Result<EmbeddingMatrix> {
    spectral_embedding_matrix(&a.to_dense(), k)
}

/// Embedding of an arbitrary symmetric matrix, e.g. the expected adjacency.
pub fn spectral_embedding_matrix(m: &DMatrix<f64>, k: usize) -> Result<EmbeddingMatrix> {
    let n = m.nrows();
    if !m.is_square() {
        return Err(Error::Dimension(format!("cannot embed a {}x{} matrix", n, m.ncols())));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= K <= n, got K={k}, n={n}")));
    }
    let eig = linalg::top_eigenpairs(m, k);
    let mut x_hat = eig.vectors;
    let mut zeroed_columns = Vec::new();
    for (c, &lambda) in eig.values.iter().enumerate() {
        if lambda > 0.0 {
            x_hat.column_mut(c).scale_mut(lambda.sqrt());
        } else {
            x_hat.column_mut(c).fill(0.0);
            zeroed_columns.push(c);
        }
    }
    if zeroed_columns.len() == k {
        return Err(Error::DeficientSpectrum(k));
    }
    if !zeroed_columns.is_empty() {
        log::warn!(
            "{} of {k} leading eigenvalues are nonpositive; their columns are zeroed",
            zeroed_columns.len()
        );
    }
    Ok(EmbeddingMatrix {
        x_hat,
        eigenvalues: eig.values,
        zeroed_columns,
    })
}

/// Row `i` becomes `x_i / (||x_i|| + tau)`.
pub fn regularized_row_normalize(x: &EmbeddingMatrix, tau: f64) -> NormalizedEmbedding {
    assert!(tau > 0.0, "tau must be positive, got {tau}");
    let mut rows = x.x_hat.clone();
    for mut row in rows.row_iter_mut() {
        let scale = 1.0 / (row.norm() + tau);
        row *= scale;
    }
    NormalizedEmbedding { rows, tau }
}
