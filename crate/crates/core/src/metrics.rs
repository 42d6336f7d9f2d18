//! Recovery metrics for overlapping memberships.

use nalgebra::DMatrix;

use crate::assignment;
use crate::error::{Error, Result};
use crate::model::MembershipMatrix;

/// `n x K` binary community indicators, stored by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMembership {
    nodes: usize,
    columns: Vec<Vec<bool>>,
}

impl BinaryMembership {
    pub fn from_columns(columns: Vec<Vec<bool>>) -> Result<Self> {
        let nodes = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != nodes) {
            return Err(Error::ShapeMismatch("indicator columns differ in length".into()));
        }
        Ok(Self { nodes, columns })
    }

    /// Accepts a matrix whose entries are exactly 0 or 1.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let mut columns = Vec::with_capacity(m.ncols());
        for (k, col) in m.column_iter().enumerate() {
            let mut out = Vec::with_capacity(m.nrows());
            for (i, &x) in col.iter().enumerate() {
                out.push(match x {
                    x if x == 0.0 => false,
                    x if x == 1.0 => true,
                    x => return Err(Error::InvalidParameter(format!("entry {x} at ({i}, {k}) is not binary"))),
                });
            }
            columns.push(out);
        }
        Ok(Self {
            nodes: m.nrows(),
            columns,
        })
    }

    /// `1(z_ik >= t)` entrywise.
    pub fn threshold(z: &DMatrix<f64>, t: f64) -> Self {
        let columns = z.column_iter().map(|c| c.iter().map(|&x| x >= t).collect()).collect();
        Self {
            nodes: z.nrows(),
            columns,
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn communities(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[bool] {
        &self.columns[k]
    }

    pub fn get(&self, i: usize, k: usize) -> bool {
        self.columns[k][i]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.nodes, self.columns.len(), |i, k| f64::from(u8::from(self.columns[k][i])))
    }

    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        Self {
            nodes: self.nodes,
            columns: perm.iter().map(|&c| self.columns[c].clone()).collect(),
        }
    }
}

fn entropy_of_counts(counts: &[usize], n: usize) -> f64 {
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn entropy(u: &[bool]) -> f64 {
    let ones = u.iter().filter(|&&x| x).count();
    entropy_of_counts(&[ones, u.len() - ones], u.len())
}

/// Empirical joint entropy of two indicator vectors, natural log.
pub fn binary_joint_entropy(u: &[bool], v: &[bool]) -> f64 {
    assert_eq!(u.len(), v.len(), "indicator vectors differ in length");
    assert!(!u.is_empty(), "entropy of an empty sample");
    let mut counts = [0usize; 4];
    for (&a, &b) in u.iter().zip(v) {
        counts[usize::from(a) * 2 + usize::from(b)] += 1;
    }
    entropy_of_counts(&counts, u.len())
}

/// `[H(gamma_k, gamma_hat_l) - H(gamma_k)] / H(gamma_k)`. When `gamma_k` is
/// constant the value is 0 if `gamma_hat_l` is constant too and 1 otherwise.
pub fn conditional_normalized_entropy(gamma_hat_l: &[bool], gamma_k: &[bool]) -> f64 {
    let joint = binary_joint_entropy(gamma_k, gamma_hat_l);
    let marginal = entropy(gamma_k);
    if marginal == 0.0 {
        return if joint == 0.0 { 0.0 } else { 1.0 };
    }
    (joint - marginal) / marginal
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExnviBreakdown {
    /// Score clamped to `[0, 1]`; 1 is perfect recovery.
    pub value: f64,
    /// Unclamped score. Differs from `value` only when a nearly constant
    /// true column makes a normalized entropy exceed one.
    pub raw: f64,
    /// `permutation[k]` is the estimated column matched to true column `k`.
    pub permutation: Vec<usize>,
    /// Per true column: `(H(gamma_hat_sigma(k) | gamma_k), H(gamma_k | gamma_hat_sigma(k)))`, normalized.
    pub per_community: Vec<(f64, f64)>,
}

fn pair_terms(gamma: &BinaryMembership, gamma_hat: &BinaryMembership, k: usize, l: usize) -> (f64, f64) {
    (
        conditional_normalized_entropy(gamma_hat.column(l), gamma.column(k)),
        conditional_normalized_entropy(gamma.column(k), gamma_hat.column(l)),
    )
}

/// Extended normalized variation of information between true indicators
/// `gamma` and estimates `gamma_hat`, matched over column permutations.
pub fn exnvi(gamma: &BinaryMembership, gamma_hat: &BinaryMembership) -> Result<ExnviBreakdown> {
    if gamma.nodes() != gamma_hat.nodes() || gamma.communities() != gamma_hat.communities() {
        return Err(Error::ShapeMismatch(format!(
            "memberships are {}x{} and {}x{}",
            gamma.nodes(),
            gamma.communities(),
            gamma_hat.nodes(),
            gamma_hat.communities()
        )));
    }
    let k = gamma.communities();
    if k == 0 || gamma.nodes() == 0 {
        return Err(Error::ShapeMismatch("memberships are empty".into()));
    }
    let terms: Vec<Vec<(f64, f64)>> = (0..k)
        .map(|a| (0..k).map(|b| pair_terms(gamma, gamma_hat, a, b)).collect())
        .collect();
    let cost = DMatrix::from_fn(k, k, |a, b| terms[a][b].0 + terms[a][b].1);
    let permutation = assignment::min_sum_permutation(&cost);
    let total = assignment::sum_cost(&cost, &permutation);
    let raw = 1.0 - total / (2.0 * k as f64);
    let per_community = permutation.iter().enumerate().map(|(a, &b)| terms[a][b]).collect();
    Ok(ExnviBreakdown {
        value: raw.clamp(0.0, 1.0),
        raw,
        permutation,
        per_community,
    })
}

/// `min_P ||Z_hat P - Z||_F / sqrt(n)` over column permutations `P`.
pub fn membership_error(z_hat: &MembershipMatrix, z: &MembershipMatrix) -> Result<f64> {
    membership_error_matrix(z_hat.matrix(), z.matrix())
}

pub fn membership_error_matrix(z_hat: &DMatrix<f64>, z: &DMatrix<f64>) -> Result<f64> {
    if z_hat.shape() != z.shape() {
        return Err(Error::ShapeMismatch(format!(
            "memberships are {}x{} and {}x{}",
            z_hat.nrows(),
            z_hat.ncols(),
            z.nrows(),
            z.ncols()
        )));
    }
    let (n, k) = z.shape();
    if n == 0 || k == 0 {
        return Err(Error::ShapeMismatch("memberships are empty".into()));
    }
    let cost = DMatrix::from_fn(k, k, |a, b| (z.column(a) - z_hat.column(b)).norm_squared());
    let perm = assignment::min_sum_permutation(&cost);
    Ok((assignment::sum_cost(&cost, &perm).max(0.0) / n as f64).sqrt())
}
