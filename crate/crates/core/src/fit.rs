//! The end-to-end estimator: embed, regularize, cluster, project.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kmedians::{fit_kmedians, KMediansConfig};
use crate::linalg;
use crate::metrics::BinaryMembership;
use crate::model::{AdjacencyMatrix, MembershipMatrix};
use crate::spectral::{
    estimate_alpha, regularized_row_normalize, regularizer_tau, spectral_embedding_matrix, EmbeddingMatrix,
    NormalizedEmbedding,
};

/// Largest tolerated condition number of `S S^T`.
pub const MAX_CENTER_CONDITION: f64 = 1e12;
const ZERO_ROW: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OccamOptions {
    pub c_tau: f64,
    pub tau_override: Option<f64>,
    pub kmedians: KMediansConfig,
    /// Binarization level; `None` means `1 / K`.
    pub threshold: Option<f64>,
    /// Seeds the k-medians restarts, replacing `kmedians.seed`.
    pub seed: u64,
}

impl Default for OccamOptions {
    fn default() -> Self {
        Self {
            c_tau: 0.1,
            tau_override: None,
            kmedians: KMediansConfig::default(),
            threshold: None,
            seed: 0,
        }
    }
}

impl OccamOptions {
    fn validate(&self) -> Result<()> {
        if !(self.c_tau.is_finite() && self.c_tau > 0.0) {
            return Err(Error::InvalidParameter(format!("c_tau must be positive, got {}", self.c_tau)));
        }
        if let Some(tau) = self.tau_override {
            if !(tau.is_finite() && tau > 0.0) {
                return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
            }
        }
        if let Some(t) = self.threshold {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidParameter(format!("threshold must lie in (0, 1), got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccamResult {
    pub z_hat: MembershipMatrix,
    /// Cluster centers in the normalized embedding, one per row.
    pub s_hat: DMatrix<f64>,
    pub embedding: EmbeddingMatrix,
    pub tau: f64,
    pub alpha_hat: f64,
    pub threshold: f64,
    pub binary: BinaryMembership,
    pub kmedians_loss: f64,
    pub kmedians_converged: bool,
}

/// `Y = X S^T (S S^T)^{-1}`, computed by a linear solve.
pub fn project_memberships(x_norm: &NormalizedEmbedding, s_hat: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let x = &x_norm.rows;
    if s_hat.ncols() != x.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "centers have dimension {} but the embedding has {}",
            s_hat.ncols(),
            x.ncols()
        )));
    }
    let gram = s_hat * s_hat.transpose();
    let eig = linalg::symmetric_eigen(&gram);
    let (largest, smallest) = (eig.values[0], eig.values[eig.values.len() - 1]);
    let condition = if smallest > 0.0 { largest / smallest } else { f64::INFINITY };
    if !(condition <= MAX_CENTER_CONDITION) {
        return Err(Error::SingularCenters(condition));
    }
    let rhs = s_hat * x.transpose();
    let yt = gram
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularCenters(condition))?;
    Ok(yt.transpose())
}

/// Clamps negatives, then scales rows to unit norm. A row that is zero
/// after clamping becomes the indicator of the center nearest to `y_i S`.
pub fn normalize_memberships(y_hat: &DMatrix<f64>, s_hat: &DMatrix<f64>) -> MembershipMatrix {
    let (n, k) = y_hat.shape();
    let mut z = y_hat.map(|v| v.max(0.0));
    for i in 0..n {
        let norm = z.row(i).norm();
        if norm >= ZERO_ROW {
            z.row_mut(i).scale_mut(1.0 / norm);
            continue;
        }
        let point = y_hat.row(i) * s_hat;
        let mut best = (0, f64::INFINITY);
        for c in 0..s_hat.nrows() {
            let d = (s_hat.row(c) - &point).norm();
            if d < best.1 {
                best = (c, d);
            }
        }
        z.row_mut(i).fill(0.0);
        if k > 0 {
            z[(i, best.0)] = 1.0;
        }
    }
    MembershipMatrix::from_raw(z).expect("finite memberships")
}

pub fn threshold_binary(z: &MembershipMatrix, t: f64) -> BinaryMembership {
    BinaryMembership::threshold(z.matrix(), t)
}

pub fn fit(a: &AdjacencyMatrix, k: usize, opts: &OccamOptions) -> Result<OccamResult> {
    check_size(a.nodes(), k)?;
    let alpha_hat = estimate_alpha(a, k);
    run(&a.to_dense(), alpha_hat, k, opts)
}

/// Runs the estimator on any symmetric matrix in place of an observed
/// graph, e.g. the expected adjacency for a noiseless check.
pub fn fit_matrix(m: &DMatrix<f64>, k: usize, opts: &OccamOptions) -> Result<OccamResult> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("cannot fit a {}x{} matrix", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    check_size(n, k)?;
    let off_diagonal = m.sum() - m.trace();
    let alpha_hat = off_diagonal / (n as f64 * (n as f64 - 1.0) * k as f64);
    run(m, alpha_hat, k, opts)
}

fn check_size(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    if n < 2 || k > n {
        return Err(Error::TooFewPoints { n, k });
    }
    Ok(())
}

fn run(m: &DMatrix<f64>, alpha_hat: f64, k: usize, opts: &OccamOptions) -> Result<OccamResult> {
    opts.validate()?;
    let n = m.nrows();
    let tau = match opts.tau_override {
        Some(tau) => tau,
        None => regularizer_tau(alpha_hat, k, n, opts.c_tau)?,
    };
    let embedding = spectral_embedding_matrix(m, k)?;
    let normalized = regularized_row_normalize(&embedding, tau);
    let config = KMediansConfig {
        seed: opts.seed,
        ..opts.kmedians.clone()
    };
    let clustering = fit_kmedians(&normalized.rows, k, &config)?;
    let y_hat = project_memberships(&normalized, &clustering.centers)?;
    let z_hat = normalize_memberships(&y_hat, &clustering.centers);
    let threshold = opts.threshold.unwrap_or(1.0 / k as f64);
    let binary = threshold_binary(&z_hat, threshold);
    Ok(OccamResult {
        z_hat,
        s_hat: clustering.centers,
        embedding,
        tau,
        alpha_hat,
        threshold,
        binary,
        kmedians_loss: clustering.loss,
        kmedians_converged: clustering.converged,
    })
}
