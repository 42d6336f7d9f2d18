//! Model parameters, expected edge probabilities and identifiability checks.
//!
//! The expected adjacency matrix is `W = alpha * Theta Z B Z^T Theta`, with
//! `Theta = diag(theta)`, nonnegative unit-norm membership rows `Z` and a
//! unit-diagonal positive definite connectivity matrix `B`.

use nalgebra::{DMatrix, DVector};

use crate::assignment;
use crate::error::{Error, Result};
use crate::linalg;

const SYMMETRY_TOL: f64 = 1e-12;
const ROW_NORM_TOL: f64 = 1e-10;
/// An entry at least this large marks a pure node.
pub const PURE_NODE_LEVEL: f64 = 1.0 - 1e-8;
/// Allowed deviation of the empirical mean of theta from one.
pub const THETA_MEAN_TOL: f64 = 1e-6;

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in j + 1..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Symmetric `K x K` connectivity between pure nodes of each community.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityMatrix(DMatrix<f64>);

impl ConnectivityMatrix {
    /// Checks symmetry, unit diagonal and strict positive definiteness.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let b = Self::from_raw(m)?;
        let check = check_connectivity(&b.0);
        if !check.passed {
            return Err(Error::InvalidParameter(check.failures.join("; ")));
        }
        Ok(b)
    }

    /// Only checks that the matrix is square, finite and symmetric. Use
    /// [`validate_identifiability`] to test the remaining conditions.
    pub fn from_raw(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!(
                "connectivity matrix is {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("connectivity matrix has non-finite entries".into()));
        }
        let asym = max_asymmetry(&m);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// `n x K` nonnegative membership propensities with unit-L2 rows.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix(DMatrix<f64>);

impl MembershipMatrix {
    /// Checks nonnegativity and unit row norms.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        for (i, row) in m.row_iter().enumerate() {
            if let Some(x) = row.iter().find(|x| !(**x >= 0.0)) {
                return Err(Error::InvalidParameter(format!("membership row {i} has entry {x}")));
            }
            let norm = row.norm();
            if (norm - 1.0).abs() > ROW_NORM_TOL {
                return Err(Error::InvalidParameter(format!("membership row {i} has norm {norm}")));
            }
        }
        Ok(Self(m))
    }

    /// Wraps any finite matrix without checking the membership constraints.
    pub fn from_raw(m: DMatrix<f64>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("membership matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    pub fn nodes(&self) -> usize {
        self.0.nrows()
    }

    pub fn communities(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Rows whose largest entry marks them as pure, with their community.
    pub fn pure_nodes(&self) -> Vec<(usize, usize)> {
        self.0
            .row_iter()
            .enumerate()
            .filter_map(|(i, row)| {
                row.iter()
                    .position(|&x| x >= PURE_NODE_LEVEL)
                    .map(|k| (i, k))
            })
            .collect()
    }
}

/// Degree-correction multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeParams(DVector<f64>);

impl DegreeParams {
    /// Requires every entry to be finite and strictly positive.
    pub fn new(theta: DVector<f64>) -> Result<Self> {
        if let Some(x) = theta.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::InvalidParameter(format!("degree parameter {x} is not positive")));
        }
        Ok(Self(theta))
    }

    pub fn from_raw(theta: DVector<f64>) -> Self {
        Self(theta)
    }

    pub fn ones(n: usize) -> Self {
        Self(DVector::from_element(n, 1.0))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn mean(&self) -> f64 {
        if self.0.is_empty() {
            0.0
        } else {
            self.0.sum() / self.0.len() as f64
        }
    }
}

/// Full parameter set `(alpha, theta, Z, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub theta: DegreeParams,
    pub z: MembershipMatrix,
    pub b: ConnectivityMatrix,
}

impl ModelParams {
    pub fn new(alpha: f64, theta: DegreeParams, z: MembershipMatrix, b: ConnectivityMatrix) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be nonnegative, got {alpha}")));
        }
        if theta.len() != z.nodes() {
            return Err(Error::Dimension(format!(
                "theta has {} entries but Z has {} rows",
                theta.len(),
                z.nodes()
            )));
        }
        if z.communities() != b.dim() {
            return Err(Error::Dimension(format!(
                "Z has {} columns but B is {}x{}",
                z.communities(),
                b.dim(),
                b.dim()
            )));
        }
        Ok(Self { alpha, theta, z, b })
    }

    pub fn nodes(&self) -> usize {
        self.z.nodes()
    }

    pub fn communities(&self) -> usize {
        self.b.dim()
    }

    /// `Theta Z`, rows scaled by theta.
    pub fn scaled_memberships(&self) -> DMatrix<f64> {
        scaled_rows(self.z.matrix(), self.theta.values())
    }
}

pub(crate) fn scaled_rows(z: &DMatrix<f64>, theta: &DVector<f64>) -> DMatrix<f64> {
    let mut out = z.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        row *= theta[i];
    }
    out
}

/// Observed simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    neighbors: Vec<Vec<usize>>,
}

impl AdjacencyMatrix {
    pub fn empty(n: usize) -> Self {
        Self {
            neighbors: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from undirected edges. Duplicates collapse; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!("edge ({i}, {j}) outside 0..{n}")));
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("self-loop at node {i}")));
            }
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in neighbors.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { neighbors })
    }

    /// Accepts a dense 0/1 matrix that is exactly symmetric with zero diagonal.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if !m.is_square() {
            return Err(Error::Dimension(format!("adjacency is {}x{}", n, m.ncols())));
        }
        let mut edges = Vec::new();
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                if a != b {
                    return Err(Error::NotSymmetric((a - b).abs()));
                }
                match a {
                    x if x == 0.0 => {}
                    x if x == 1.0 => edges.push((i, j)),
                    x => return Err(Error::InvalidParameter(format!("entry {x} at ({i}, {j}) is not binary"))),
                }
            }
        }
        Self::from_edges(n, edges)
    }

    pub(crate) fn from_sorted_neighbors(neighbors: Vec<Vec<usize>>) -> Self {
        Self { neighbors }
    }

    pub fn nodes(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.nodes();
        let mut m = DMatrix::zeros(n, n);
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                m[(i, j)] = 1.0;
            }
        }
        m
    }
}

/// Expected adjacency `W = E[A]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProbabilityMatrix(DMatrix<f64>);

impl EdgeProbabilityMatrix {
    /// Checks symmetry and that every off-diagonal entry is a probability.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("probability matrix is {}x{}", m.nrows(), m.ncols())));
        }
        let asym = max_asymmetry(&m);
        if asym > 0.0 {
            return Err(Error::NotSymmetric(asym));
        }
        check_off_diagonal(&m)?;
        Ok(Self(m))
    }

    pub fn nodes(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// Expected average degree, `sum_{i != j} W_ij / n`.
    pub fn expected_average_degree(&self) -> f64 {
        let n = self.0.nrows();
        if n == 0 {
            return 0.0;
        }
        (self.0.sum() - self.0.trace()) / n as f64
    }
}

fn check_off_diagonal(m: &DMatrix<f64>) -> Result<()> {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..n {
            let value = m[(i, j)];
            if i != j && !(0.0..=1.0).contains(&value) {
                return Err(Error::EntryOutOfRange { row: i, col: j, value });
            }
        }
    }
    Ok(())
}

/// `alpha * Theta Z B Z^T Theta` without the probability range check.
pub(crate) fn scaled_gram(alpha: f64, x: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let xb = x * b;
    let mut w = DMatrix::zeros(n, n);
    // Fill one triangle and mirror it so the result is exactly symmetric.
    for j in 0..n {
        for i in j..n {
            let v = alpha * xb.row(i).dot(&x.row(j));
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    w
}

/// Expected edge probabilities. The diagonal is reported as computed but is
/// never used for sampling; off-diagonal entries outside `[0, 1]` are an error.
pub fn expected_matrix(params: &ModelParams) -> Result<EdgeProbabilityMatrix> {
    let x = params.scaled_memberships();
    let w = scaled_gram(params.alpha, &x, params.b.matrix());
    check_off_diagonal(&w)?;
    Ok(EdgeProbabilityMatrix(w))
}

/// Outcome of one identifiability condition.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConditionCheck {
    pub passed: bool,
    pub failures: Vec<String>,
}

impl ConditionCheck {
    fn from_failures(failures: Vec<String>) -> Self {
        Self {
            passed: failures.is_empty(),
            failures,
        }
    }
}

/// Pass/fail per identifiability condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// `B` symmetric, positive definite, unit diagonal.
    pub connectivity: ConditionCheck,
    /// `Z` nonnegative, unit rows, a pure node in every community.
    pub memberships: ConditionCheck,
    /// `theta` positive with mean one.
    pub degrees: ConditionCheck,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.connectivity.passed && self.memberships.passed && self.degrees.passed
    }
}

fn check_connectivity(b: &DMatrix<f64>) -> ConditionCheck {
    let mut failures = Vec::new();
    let asym = max_asymmetry(b);
    if asym > SYMMETRY_TOL {
        failures.push(format!("B is not symmetric (asymmetry {asym:e})"));
    }
    for k in 0..b.nrows() {
        if b[(k, k)] != 1.0 {
            failures.push(format!("B[{k},{k}] = {} is not 1", b[(k, k)]));
        }
    }
    if b.nrows() > 0 {
        let smallest = linalg::symmetric_eigen(b).values[b.nrows() - 1];
        if !(smallest > 0.0) {
            failures.push(format!("B is not positive definite (smallest eigenvalue {smallest})"));
        }
    }
    ConditionCheck::from_failures(failures)
}

fn check_memberships(z: &MembershipMatrix) -> ConditionCheck {
    let mut failures = Vec::new();
    let m = z.matrix();
    for (i, row) in m.row_iter().enumerate() {
        if row.iter().any(|&x| x < 0.0) {
            failures.push(format!("row {i} has a negative entry"));
        }
        let norm = row.norm();
        if (norm - 1.0).abs() > ROW_NORM_TOL {
            failures.push(format!("row {i} has norm {norm}"));
        }
    }
    let mut has_pure = vec![false; z.communities()];
    for (_, k) in z.pure_nodes() {
        has_pure[k] = true;
    }
    for (k, ok) in has_pure.iter().enumerate() {
        if !ok {
            failures.push(format!("community {k} has no pure node"));
        }
    }
    ConditionCheck::from_failures(failures)
}

fn check_degrees(theta: &DegreeParams) -> ConditionCheck {
    let mut failures = Vec::new();
    if let Some(i) = theta.values().iter().position(|&t| !(t > 0.0)) {
        failures.push(format!("theta[{i}] = {} is not positive", theta.values()[i]));
    }
    let mean = theta.mean();
    if (mean - 1.0).abs() > THETA_MEAN_TOL {
        failures.push(format!("mean of theta is {mean}, not 1"));
    }
    ConditionCheck::from_failures(failures)
}

/// Checks the identifiability conditions on `(B, Z, theta)`. Never fails;
/// every violation is listed in the report.
pub fn validate_identifiability(params: &ModelParams) -> ValidationReport {
    ValidationReport {
        connectivity: check_connectivity(params.b.matrix()),
        memberships: check_memberships(&params.z),
        degrees: check_degrees(&params.theta),
    }
}

/// Symmetric square root of a symmetric positive semidefinite matrix.
///
/// Eigenvalues in `[-1e-8, 0)` are treated as roundoff and clamped to zero.
pub fn sqrt_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("cannot take the square root of a {}x{} matrix", m.nrows(), m.ncols())));
    }
    let asym = max_asymmetry(m);
    if asym > 1e-10 {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = linalg::symmetric_eigen(m);
    let mut roots = eig.values.clone();
    for lambda in roots.iter_mut() {
        if *lambda < -1e-8 {
            return Err(Error::NotPsd(*lambda));
        }
        *lambda = lambda.max(0.0).sqrt();
    }
    let v = &eig.vectors;
    let mut s = v * DMatrix::from_diagonal(&roots) * v.transpose();
    // Symmetrize the product to remove roundoff asymmetry.
    let st = s.transpose();
    s = (s + st) * 0.5;
    Ok(s)
}

/// Planted partition connectivity `(1 - rho) I + rho 11^T`.
pub fn planted_partition_b(k: usize, rho: f64) -> ConnectivityMatrix {
    assert!(k >= 1, "planted partition needs at least one community");
    assert!((0.0..1.0).contains(&rho), "rho must lie in [0, 1), got {rho}");
    let m = DMatrix::from_fn(k, k, |i, j| if i == j { 1.0 } else { rho });
    ConnectivityMatrix(m)
}

/// Closed-form square root of the planted partition matrix.
pub fn planted_partition_sqrt_closed_form(k: usize, rho: f64) -> DMatrix<f64> {
    assert!(k >= 1, "planted partition needs at least one community");
    let kf = k as f64;
    let top = ((kf - 1.0) * rho + 1.0).sqrt();
    let rest = (1.0 - rho).sqrt();
    let diag = (top + (kf - 1.0) * rest) / kf;
    let off = (top - rest) / kf;
    DMatrix::from_fn(k, k, |i, j| if i == j { diag } else { off })
}

/// Row-wise distances between two center sets.
pub(crate) fn center_distances(s: &DMatrix<f64>, t: &DMatrix<f64>) -> DMatrix<f64> {
    let k = s.nrows();
    DMatrix::from_fn(k, t.nrows(), |a, b| (s.row(a) - t.row(b)).norm())
}

/// Hausdorff-type distance between center sets: the smallest, over row
/// matchings, of the largest distance between matched rows.
pub fn hausdorff_centers_distance(s: &DMatrix<f64>, t: &DMatrix<f64>) -> f64 {
    assert_eq!(s.shape(), t.shape(), "center sets must have the same shape");
    if s.nrows() == 0 {
        return 0.0;
    }
    let cost = center_distances(s, t);
    let perm = assignment::min_max_permutation(&cost);
    assignment::max_cost(&cost, &perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pure_blocks(sizes: &[usize]) -> MembershipMatrix {
        let n: usize = sizes.iter().sum();
        let mut z = DMatrix::zeros(n, sizes.len());
        let mut row = 0;
        for (k, &size) in sizes.iter().enumerate() {
            for _ in 0..size {
                z[(row, k)] = 1.0;
                row += 1;
            }
        }
        MembershipMatrix::new(z).unwrap()
    }

    /// The worked example: pure nodes plus pairwise overlaps.
    fn planted_example() -> ModelParams {
        let (k, n_pure, n_pair) = (3, 30, 3);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for c in 0..k {
            for _ in 0..n_pure {
                let mut r = vec![0.0; k];
                r[c] = 1.0;
                rows.push(r);
            }
        }
        let h = 0.5f64.sqrt();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            for _ in 0..n_pair {
                let mut r = vec![0.0; k];
                r[a] = h;
                r[b] = h;
                rows.push(r);
            }
        }
        let n = rows.len();
        let z = DMatrix::from_fn(n, k, |i, j| rows[i][j]);
        ModelParams::new(
            0.1,
            DegreeParams::ones(n),
            MembershipMatrix::new(z).unwrap(),
            planted_partition_b(k, 0.25),
        )
        .unwrap()
    }

    #[test]
    fn expected_matrix_identity_case() {
        let b = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.1, 0.2, 1.0, 0.3, 0.1, 0.3, 1.0]);
        let params = ModelParams::new(
            1.0,
            DegreeParams::ones(3),
            MembershipMatrix::new(DMatrix::identity(3, 3)).unwrap(),
            ConnectivityMatrix::new(b.clone()).unwrap(),
        )
        .unwrap();
        assert_eq!(expected_matrix(&params).unwrap().matrix(), &b);
    }

    #[test]
    fn expected_matrix_zero_alpha() {
        let mut params = planted_example();
        params.alpha = 0.0;
        let w = expected_matrix(&params).unwrap();
        assert!(w.matrix().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn expected_matrix_two_blocks() {
        let params = ModelParams::new(
            0.5,
            DegreeParams::ones(4),
            pure_blocks(&[2, 2]),
            planted_partition_b(2, 0.0),
        )
        .unwrap();
        let w = expected_matrix(&params).unwrap();
        let m = w.matrix();
        assert_eq!(m[(0, 1)], 0.5);
        assert_eq!(m[(2, 3)], 0.5);
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert_eq!(m[(i, j)], 0.0);
        }
    }

    #[test]
    fn expected_matrix_rejects_probabilities_above_one() {
        let params = ModelParams::new(
            2.0,
            DegreeParams::ones(4),
            pure_blocks(&[2, 2]),
            planted_partition_b(2, 0.0),
        )
        .unwrap();
        assert!(matches!(expected_matrix(&params), Err(Error::EntryOutOfRange { .. })));
    }

    #[test]
    fn expected_matrix_is_bitwise_symmetric() {
        let mut params = planted_example();
        params.theta = DegreeParams::new(DVector::from_fn(params.nodes(), |i, _| 0.5 + (i % 7) as f64 * 0.1)).unwrap();
        let w = expected_matrix(&params).unwrap();
        assert_eq!(w.matrix(), &w.matrix().transpose());
    }

    #[test]
    fn planted_example_is_identifiable() {
        let report = validate_identifiability(&planted_example());
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn diagonal_below_one_fails_connectivity() {
        let mut params = planted_example();
        let mut b = params.b.matrix().clone();
        b[(1, 1)] = 0.9;
        params.b = ConnectivityMatrix::from_raw(b).unwrap();
        let report = validate_identifiability(&params);
        assert!(!report.connectivity.passed);
        assert!(report.memberships.passed && report.degrees.passed);
    }

    #[test]
    fn missing_pure_node_fails_memberships() {
        let mut params = planted_example();
        let mut z = params.z.matrix().clone();
        let h = 0.5f64.sqrt();
        // Replace every pure node of community 1 by an even 0/2 mix.
        for i in 30..60 {
            z[(i, 0)] = h;
            z[(i, 1)] = 0.0;
            z[(i, 2)] = h;
        }
        params.z = MembershipMatrix::new(z).unwrap();
        let report = validate_identifiability(&params);
        assert!(!report.memberships.passed);
        assert!(report.memberships.failures.iter().any(|f| f.contains("community 1")));
    }

    #[test]
    fn theta_mean_checked() {
        let mut params = planted_example();
        params.theta = DegreeParams::new(DVector::from_element(params.nodes(), 2.0)).unwrap();
        assert!(!validate_identifiability(&params).degrees.passed);
    }

    #[test]
    fn sqrt_of_simple_matrices() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert_abs_diff_eq!(sqrt_psd(&id).unwrap(), id, epsilon = 1e-14);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 9.0]));
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0]));
        assert_abs_diff_eq!(sqrt_psd(&d).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn sqrt_of_planted_partition() {
        let s = sqrt_psd(planted_partition_b(3, 0.25).matrix()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 0.985599 } else { 0.119573 };
                assert!((s[(i, j)] - expected).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(sqrt_psd(&m), Err(Error::NotPsd(_))));
    }

    #[test]
    fn sqrt_clamps_roundoff_negatives() {
        let v = DMatrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]);
        let m = &v * DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1e-11])) * v.transpose();
        let s = sqrt_psd(&m).unwrap();
        assert!((&s * &s - &m).norm() < 1e-9);
    }

    #[test]
    fn planted_partition_b_cases() {
        assert_eq!(planted_partition_b(3, 0.0).matrix(), &DMatrix::<f64>::identity(3, 3));
        assert_eq!(
            planted_partition_b(2, 0.5).matrix(),
            &DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0])
        );
        let eig = linalg::symmetric_eigen(planted_partition_b(3, 0.25).matrix());
        assert!((eig.values[0] - 1.5).abs() < 1e-12);
        assert!((eig.values[2] - 0.75).abs() < 1e-12);
        assert!((eig.values[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn closed_form_square_root() {
        assert_abs_diff_eq!(
            planted_partition_sqrt_closed_form(4, 0.0),
            DMatrix::<f64>::identity(4, 4),
            epsilon = 1e-15
        );
        let s = planted_partition_sqrt_closed_form(3, 0.25);
        assert!((s[(0, 0)] - 0.985599).abs() < 1e-5);
        assert!((s[(0, 1)] - 0.119573).abs() < 1e-5);
        for k in 1..=7 {
            for rho in [0.0, 0.1, 0.25, 0.4, 0.9] {
                let s = planted_partition_sqrt_closed_form(k, rho);
                let b = planted_partition_b(k, rho);
                assert!((&s * &s - b.matrix()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn hausdorff_examples() {
        let s = DMatrix::<f64>::identity(2, 2);
        assert_eq!(hausdorff_centers_distance(&s, &s), 0.0);
        let t = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        assert!((hausdorff_centers_distance(&s, &t) - 1.0).abs() < 1e-15);
        let u = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let permuted = DMatrix::from_row_slice(3, 2, &[5.0, 6.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(hausdorff_centers_distance(&u, &permuted), 0.0);
    }

    #[test]
    fn hausdorff_large_k_uses_matching() {
        let k = 10;
        let s = DMatrix::from_fn(k, k, |i, j| ((i * 7 + j * 3) % 11) as f64);
        let mut t = s.clone();
        t.swap_rows(0, 9);
        t.swap_rows(2, 5);
        assert_eq!(hausdorff_centers_distance(&s, &t), 0.0);
        t[(3, 3)] += 0.5;
        assert!((hausdorff_centers_distance(&s, &t) - 0.5).abs() < 1e-12);
    }

    fn random_psd(k: usize, seed: u64) -> DMatrix<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
        let q = g.qr().q();
        let spectrum = DVector::from_fn(k, |i, _| if i == 0 { 0.0 } else { rng.random_range(0.0..5.0) });
        let m = &q * DMatrix::from_diagonal(&spectrum) * q.transpose();
        (&m + m.transpose()) * 0.5
    }

    proptest! {
        #[test]
        fn sqrt_psd_squares_back(k in 1usize..8, seed in any::<u64>()) {
            let m = random_psd(k, seed);
            let s = sqrt_psd(&m).unwrap();
            prop_assert!((&s * &s - &m).norm() < 1e-9);
            prop_assert_eq!(&s, &s.transpose());
        }

        #[test]
        fn hausdorff_is_a_pseudometric(seed in any::<u64>(), k in 1usize..5) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut draw = || DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
            let (a, b, c) = (draw(), draw(), draw());
            let ab = hausdorff_centers_distance(&a, &b);
            prop_assert_eq!(ab, hausdorff_centers_distance(&b, &a));
            prop_assert!(hausdorff_centers_distance(&a, &c) <= ab + hausdorff_centers_distance(&b, &c) + 1e-12);
            prop_assert_eq!(hausdorff_centers_distance(&a, &a), 0.0);
        }
    }

    #[test]
    fn sqrt_matches_closed_form_grid() {
        for k in 2..=6 {
            for rho in [0.0, 0.1, 0.25, 0.4] {
                let s = sqrt_psd(planted_partition_b(k, rho).matrix()).unwrap();
                let closed = planted_partition_sqrt_closed_form(k, rho);
                assert!((s - closed).abs().max() < 1e-8, "k={k} rho={rho}");
            }
        }
    }
}
