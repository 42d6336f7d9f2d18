//! Synthetic network generation.
//!
//! Randomness is consumed in a fixed order: membership rows, then degree
//! parameters, then edges (upper triangle, row-major). Changing that order
//! changes every generated graph.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    scaled_gram, scaled_rows, AdjacencyMatrix, ConnectivityMatrix, DegreeParams, EdgeProbabilityMatrix,
    MembershipMatrix, ModelParams,
};

const MASS_TOL: f64 = 1e-12;

/// Nodes of one block belong to every community in `communities`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapBlock {
    /// Sorted, distinct, 0-based community indices.
    pub communities: Vec<usize>,
    pub mass: f64,
    /// Optional positive weights, one per community in the block. Rows are
    /// the weights scaled to unit norm; `None` gives equal weights `m^{-1/2}`.
    pub weights: Option<Vec<f64>>,
}

impl OverlapBlock {
    fn row(&self, k: usize) -> Vec<f64> {
        let mut row = vec![0.0; k];
        match &self.weights {
            None => {
                let v = 1.0 / (self.communities.len() as f64).sqrt();
                for &c in &self.communities {
                    row[c] = v;
                }
            }
            Some(w) => {
                let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                for (&c, &x) in self.communities.iter().zip(w) {
                    row[c] = x / norm;
                }
            }
        }
        row
    }
}

/// Distribution of nodes over community subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapProfile {
    k: usize,
    blocks: Vec<OverlapBlock>,
}

impl OverlapProfile {
    pub fn new(k: usize, blocks: Vec<OverlapBlock>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        if k == 0 {
            return bad("need at least one community".into());
        }
        if blocks.is_empty() {
            return bad("no blocks".into());
        }
        let mut total = 0.0;
        for (idx, block) in blocks.iter().enumerate() {
            let c = &block.communities;
            if c.is_empty() {
                return bad(format!("block {idx} has no communities"));
            }
            if c.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("block {idx} communities must be sorted and distinct"));
            }
            if c[c.len() - 1] >= k {
                return bad(format!("block {idx} names a community outside 0..{k}"));
            }
            if !(block.mass.is_finite() && block.mass >= 0.0) {
                return bad(format!("block {idx} has mass {}", block.mass));
            }
            if let Some(w) = &block.weights {
                if w.len() != c.len() || w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return bad(format!("block {idx} weights must be positive, one per community"));
                }
            }
            if blocks[..idx].iter().any(|b| b.communities == *c) {
                return bad(format!("block {idx} duplicates an earlier block"));
            }
            total += block.mass;
        }
        if (total - 1.0).abs() > MASS_TOL {
            return bad(format!("masses sum to {total}"));
        }
        Ok(Self { k, blocks })
    }

    /// Every subset of size `s` gets mass `masses[s - 1]`. Blocks are listed
    /// by size, then lexicographically.
    pub fn symmetric(k: usize, masses: &[f64]) -> Result<Self> {
        if masses.len() > k {
            return Err(Error::InvalidProfile(format!(
                "{} subset sizes requested for {k} communities",
                masses.len()
            )));
        }
        let mut blocks = Vec::new();
        for (s, &mass) in masses.iter().enumerate() {
            for communities in combinations(k, s + 1) {
                blocks.push(OverlapBlock {
                    communities,
                    mass,
                    weights: None,
                });
            }
        }
        Self::new(k, blocks)
    }

    /// Named three-community presets: `A` = (0.3, 0.03, 0.01), `B` = (0.25,
    /// 0.07, 0.04), `A-caption` = (0.3, 0.03, 0.03) rescaled to total mass one,
    /// and `pure` with no overlap.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "A" | "a" => Self::symmetric(3, &[0.3, 0.03, 0.01]),
            "B" | "b" => Self::symmetric(3, &[0.25, 0.07, 0.04]),
            "A-caption" => {
                let raw = [0.3, 0.03, 0.03];
                let total = 3.0 * raw[0] + 3.0 * raw[1] + raw[2];
                Self::symmetric(3, &raw.map(|m| m / total))
            }
            "pure" => Self::symmetric(3, &[1.0 / 3.0]),
            _ => Err(Error::InvalidProfile(format!("unknown preset {name:?}"))),
        }
    }

    pub fn communities(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[OverlapBlock] {
        &self.blocks
    }

    /// Block sizes for `n` nodes by largest-remainder rounding; leftover
    /// nodes go to the largest fractional parts, ties to the earlier block.
    pub fn deterministic_counts(&self, n: usize) -> Vec<usize> {
        let exact: Vec<f64> = self.blocks.iter().map(|b| b.mass * n as f64).collect();
        let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = exact[a] - exact[a].floor();
            let fb = exact[b] - exact[b].floor();
            fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
        });
        if assigned <= n {
            for &idx in order.iter().cycle().take(n - assigned) {
                counts[idx] += 1;
            }
        } else {
            // Only reachable through rounding at the mass tolerance.
            let mut excess = assigned - n;
            for &idx in order.iter().rev() {
                if excess == 0 {
                    break;
                }
                if counts[idx] > 0 {
                    counts[idx] -= 1;
                    excess -= 1;
                }
            }
        }
        counts
    }

    fn draw_block<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (idx, block) in self.blocks.iter().enumerate() {
            acc += block.mass;
            if u < acc {
                return idx;
            }
        }
        // Rounding left a sliver above the last cumulative mass.
        self.blocks.iter().rposition(|b| b.mass > 0.0).unwrap_or(0)
    }
}

fn combinations(k: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for c in start..k {
            cur.push(c);
            rec(c + 1, k, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, size, &mut Vec::new(), &mut out);
    out
}

/// Law of the degree-correction multipliers.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaLaw {
    PointMassOne,
    /// 1 with probability 0.8, 20 with probability 0.2.
    Hub,
    Custom { values: Vec<f64>, probs: Vec<f64> },
}

impl ThetaLaw {
    pub fn custom(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != probs.len() {
            return Err(Error::InvalidParameter("theta law needs matching values and probabilities".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter("theta support must be positive".into()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || (probs.iter().sum::<f64>() - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidParameter("theta probabilities must sum to one".into()));
        }
        Ok(Self::Custom { values, probs })
    }

    fn support(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Self::PointMassOne => (vec![1.0], vec![1.0]),
            Self::Hub => (vec![1.0, 20.0], vec![0.8, 0.2]),
            Self::Custom { values, probs } => (values.clone(), probs.clone()),
        }
    }

    pub fn mean(&self) -> f64 {
        let (values, probs) = self.support();
        values.iter().zip(&probs).map(|(v, p)| v * p).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Allocation {
    #[default]
    Deterministic,
    Multinomial,
}

/// What to do when calibration pushes an off-diagonal probability above one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeProbabilityPolicy {
    /// Fail with [`Error::DegreeTooLarge`].
    #[default]
    Strict,
    /// Cap probabilities at one. The realized mean degree then falls short
    /// of the target.
    Clip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub n: usize,
    pub profile: OverlapProfile,
    pub theta_law: ThetaLaw,
    pub b: ConnectivityMatrix,
    pub target_degree: f64,
    pub seed: u64,
    pub allocation: Allocation,
    pub edge_policy: EdgeProbabilityPolicy,
}

impl SamplerConfig {
    pub fn new(
        n: usize,
        profile: OverlapProfile,
        theta_law: ThetaLaw,
        b: ConnectivityMatrix,
        target_degree: f64,
        seed: u64,
    ) -> Self {
        Self {
            n,
            profile,
            theta_law,
            b,
            target_degree,
            seed,
            allocation: Allocation::Deterministic,
            edge_policy: EdgeProbabilityPolicy::Strict,
        }
    }

    pub fn communities(&self) -> usize {
        self.profile.communities()
    }

    fn validate(&self) -> Result<()> {
        if self.b.dim() != self.profile.communities() {
            return Err(Error::Dimension(format!(
                "profile has {} communities but B is {}x{}",
                self.profile.communities(),
                self.b.dim(),
                self.b.dim()
            )));
        }
        if !(self.target_degree.is_finite() && self.target_degree > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "target degree must be positive, got {}",
                self.target_degree
            )));
        }
        Ok(())
    }
}

pub fn sample_memberships<R: Rng + ?Sized>(config: &SamplerConfig, rng: &mut R) -> Result<MembershipMatrix> {
    let profile = &config.profile;
    let k = profile.communities();
    let n = config.n;
    let block_of: Vec<usize> = match config.allocation {
        Allocation::Deterministic => {
            let counts = profile.deterministic_counts(n);
            let mut assignment: Vec<usize> = counts
                .iter()
                .enumerate()
                .flat_map(|(idx, &c)| std::iter::repeat_n(idx, c))
                .collect();
            assignment.shuffle(rng);
            assignment
        }
        Allocation::Multinomial => (0..n).map(|_| profile.draw_block(rng)).collect(),
    };
    let rows: Vec<Vec<f64>> = profile.blocks.iter().map(|b| b.row(k)).collect();
    let z = DMatrix::from_fn(n, k, |i, c| rows[block_of[i]][c]);
    MembershipMatrix::new(z)
}

pub fn sample_degree_params<R: Rng + ?Sized>(law: &ThetaLaw, n: usize, rng: &mut R) -> DegreeParams {
    if let ThetaLaw::PointMassOne = law {
        return DegreeParams::ones(n);
    }
    let (values, probs) = law.support();
    let draw = |rng: &mut R| {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (v, p) in values.iter().zip(&probs) {
            acc += p;
            if u < acc {
                return *v;
            }
        }
        values[values.len() - 1]
    };
    DegreeParams::from_raw(DVector::from_fn(n, |_, _| draw(rng)))
}

/// `sum_{i != j} (Theta Z B Z^T Theta)_ij` in O(n K^2).
fn off_diagonal_mass(x: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let s = x.row_sum();
    let total = (&s * b).dot(&s);
    let xb = x * b;
    let diag: f64 = (0..x.nrows()).map(|i| xb.row(i).dot(&x.row(i))).sum();
    total - diag
}

fn max_off_diagonal(w: &DMatrix<f64>) -> f64 {
    let n = w.nrows();
    let mut worst = f64::NEG_INFINITY;
    for j in 0..n {
        for i in j + 1..n {
            worst = worst.max(w[(i, j)]);
        }
    }
    worst
}

fn alpha_for_degree(x: &DMatrix<f64>, b: &DMatrix<f64>, target: f64) -> Result<f64> {
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::InvalidParameter(format!("target degree must be positive, got {target}")));
    }
    let mass = off_diagonal_mass(x, b);
    if !(mass > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "off-diagonal expected mass is {mass}; no alpha reaches the target degree"
        )));
    }
    Ok(target * x.nrows() as f64 / mass)
}

/// Sparsity `alpha` giving expected average degree `target_degree`.
pub fn calibrate_alpha(
    theta: &DegreeParams,
    z: &MembershipMatrix,
    b: &ConnectivityMatrix,
    target_degree: f64,
) -> Result<f64> {
    if theta.len() != z.nodes() || z.communities() != b.dim() {
        return Err(Error::Dimension("theta, Z and B do not conform".into()));
    }
    let x = scaled_rows(z.matrix(), theta.values());
    let alpha = alpha_for_degree(&x, b.matrix(), target_degree)?;
    let max_probability = max_off_diagonal(&scaled_gram(alpha, &x, b.matrix()));
    if max_probability > 1.0 {
        return Err(Error::DegreeTooLarge {
            target: target_degree,
            alpha,
            max_probability,
        });
    }
    Ok(alpha)
}

/// Independent Bernoulli edges for `i < j`, one uniform draw per pair.
pub fn sample_adjacency<R: Rng + ?Sized>(w: &EdgeProbabilityMatrix, rng: &mut R) -> AdjacencyMatrix {
    let m = w.matrix();
    let n = m.nrows();
    let mut neighbors = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < m[(i, j)] {
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
    }
    // Lists are filled in increasing order, so they are already sorted.
    AdjacencyMatrix::from_sorted_neighbors(neighbors)
}

/// A generated network together with the parameters that produced it.
#[derive(Debug, Clone)]
pub struct SampledNetwork {
    pub params: ModelParams,
    pub probabilities: EdgeProbabilityMatrix,
    pub adjacency: AdjacencyMatrix,
    /// Number of node pairs whose probability was capped at one.
    pub clipped_pairs: usize,
}

/// Draws `(Z, theta, A)` from a stream seeded with `config.seed`.
pub fn generate(config: &SamplerConfig) -> Result<SampledNetwork> {
    generate_with_rng(config, &mut ChaCha8Rng::seed_from_u64(config.seed))
}

pub fn generate_with_rng<R: Rng + ?Sized>(config: &SamplerConfig, rng: &mut R) -> Result<SampledNetwork> {
    config.validate()?;
    let z = sample_memberships(config, rng)?;
    let theta = sample_degree_params(&config.theta_law, config.n, rng);
    let x = scaled_rows(z.matrix(), theta.values());
    let alpha = alpha_for_degree(&x, config.b.matrix(), config.target_degree)?;
    let mut w = scaled_gram(alpha, &x, config.b.matrix());
    let max_probability = max_off_diagonal(&w);
    let mut clipped_pairs = 0;
    if max_probability > 1.0 {
        match config.edge_policy {
            EdgeProbabilityPolicy::Strict => {
                return Err(Error::DegreeTooLarge {
                    target: config.target_degree,
                    alpha,
                    max_probability,
                })
            }
            EdgeProbabilityPolicy::Clip => {
                let n = w.nrows();
                for j in 0..n {
                    for i in 0..n {
                        if w[(i, j)] > 1.0 {
                            w[(i, j)] = 1.0;
                            if i < j {
                                clipped_pairs += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let probabilities = EdgeProbabilityMatrix::new(w)?;
    let adjacency = sample_adjacency(&probabilities, rng);
    let params = ModelParams::new(alpha, theta, z, config.b.clone())?;
    Ok(SampledNetwork {
        params,
        probabilities,
        adjacency,
        clipped_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{planted_partition_b, validate_identifiability};
    use proptest::prelude::*;

    fn config(n: usize, profile: OverlapProfile, degree: f64, seed: u64) -> SamplerConfig {
        SamplerConfig::new(n, profile, ThetaLaw::PointMassOne, planted_partition_b(3, 0.1), degree, seed)
    }

    fn block_counts(z: &MembershipMatrix) -> std::collections::BTreeMap<Vec<usize>, usize> {
        let mut counts = std::collections::BTreeMap::new();
        for row in z.matrix().row_iter() {
            let support: Vec<usize> = (0..row.len()).filter(|&c| row[c] > 0.0).collect();
            *counts.entry(support).or_insert(0) += 1;
        }
        counts
    }

    #[test]
    fn preset_a_counts_at_100() {
        let cfg = config(100, OverlapProfile::preset("A").unwrap(), 10.0, 1);
        let z = sample_memberships(&cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let counts = block_counts(&z);
        for c in 0..3 {
            assert_eq!(counts[&vec![c]], 30);
        }
        for pair in [vec![0, 1], vec![0, 2], vec![1, 2]] {
            assert_eq!(counts[&pair], 3);
        }
        assert_eq!(counts[&vec![0, 1, 2]], 1);
    }

    #[test]
    fn single_block_profile() {
        let profile = OverlapProfile::new(
            3,
            vec![OverlapBlock {
                communities: vec![0],
                mass: 1.0,
                weights: None,
            }],
        )
        .unwrap();
        let z = sample_memberships(&config(10, profile, 1.0, 0), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        for row in z.matrix().row_iter() {
            assert_eq!(row.iter().copied().collect::<Vec<_>>(), vec![1.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn pair_rows_are_normalized_indicators() {
        let profile = OverlapProfile::new(
            3,
            vec![OverlapBlock {
                communities: vec![0, 1],
                mass: 1.0,
                weights: None,
            }],
        )
        .unwrap();
        let z = sample_memberships(&config(4, profile, 1.0, 0), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let h = 1.0 / 2f64.sqrt();
        for row in z.matrix().row_iter() {
            assert_eq!(row.iter().copied().collect::<Vec<_>>(), vec![h, h, 0.0]);
        }
    }

    #[test]
    fn weighted_block_rows() {
        let profile = OverlapProfile::new(
            2,
            vec![OverlapBlock {
                communities: vec![0, 1],
                mass: 1.0,
                weights: Some(vec![3.0, 4.0]),
            }],
        )
        .unwrap();
        let mut cfg = config(2, profile, 1.0, 0);
        cfg.b = planted_partition_b(2, 0.0);
        let z = sample_memberships(&cfg, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!((z.matrix()[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((z.matrix()[(0, 1)] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn malformed_profiles_rejected() {
        let block = |c: Vec<usize>, mass| OverlapBlock {
            communities: c,
            mass,
            weights: None,
        };
        assert!(OverlapProfile::new(2, vec![block(vec![0], 0.5), block(vec![1], 0.4)]).is_err());
        assert!(OverlapProfile::new(2, vec![block(vec![], 1.0)]).is_err());
        assert!(OverlapProfile::new(2, vec![block(vec![0], 0.5), block(vec![0], 0.5)]).is_err());
        assert!(OverlapProfile::new(2, vec![block(vec![2], 1.0)]).is_err());
        assert!(OverlapProfile::new(2, vec![block(vec![1, 0], 1.0)]).is_err());
        assert!(OverlapProfile::new(2, vec![block(vec![0], 1.5), block(vec![1], -0.5)]).is_err());
        assert!(OverlapProfile::preset("C").is_err());
    }

    #[test]
    fn caption_preset_is_rescaled() {
        let p = OverlapProfile::preset("A-caption").unwrap();
        let total: f64 = p.blocks().iter().map(|b| b.mass).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((p.blocks()[0].mass - 0.3 / 1.02).abs() < 1e-15);
    }

    #[test]
    fn largest_remainder_rounding() {
        let p = OverlapProfile::symmetric(3, &[1.0 / 3.0]).unwrap();
        assert_eq!(p.deterministic_counts(10), vec![4, 3, 3]);
        assert_eq!(p.deterministic_counts(11), vec![4, 4, 3]);
        let b = OverlapProfile::preset("B").unwrap();
        assert_eq!(b.deterministic_counts(100), vec![25, 25, 25, 7, 7, 7, 4]);
        assert_eq!(b.deterministic_counts(500).iter().sum::<usize>(), 500);
    }

    #[test]
    fn degree_params_point_mass_and_custom() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ones = sample_degree_params(&ThetaLaw::PointMassOne, 5, &mut rng);
        assert_eq!(ones.values().as_slice(), &[1.0; 5]);
        let threes = sample_degree_params(&ThetaLaw::custom(vec![3.0], vec![1.0]).unwrap(), 4, &mut rng);
        assert_eq!(threes.values().as_slice(), &[3.0; 4]);
    }

    #[test]
    fn hub_fraction_concentrates() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 20_000;
        let theta = sample_degree_params(&ThetaLaw::Hub, n, &mut rng);
        let hubs = theta.values().iter().filter(|&&t| t == 20.0).count() as f64 / n as f64;
        // Four standard deviations of a Bernoulli(0.2) mean.
        assert!((hubs - 0.2).abs() < 4.0 * (0.16 / n as f64).sqrt(), "hub fraction {hubs}");
        assert!(theta.values().iter().all(|&t| t == 1.0 || t == 20.0));
        assert!((ThetaLaw::Hub.mean() - 4.8).abs() < 1e-12);
    }

    fn two_pure_blocks() -> MembershipMatrix {
        MembershipMatrix::new(DMatrix::from_row_slice(
            4,
            2,
            &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0],
        ))
        .unwrap()
    }

    #[test]
    fn calibrate_two_blocks() {
        let alpha = calibrate_alpha(&DegreeParams::ones(4), &two_pure_blocks(), &planted_partition_b(2, 0.0), 0.5).unwrap();
        assert!((alpha - 0.5).abs() < 1e-15);
        let doubled = calibrate_alpha(&DegreeParams::ones(4), &two_pure_blocks(), &planted_partition_b(2, 0.0), 1.0).unwrap();
        assert!((doubled - 2.0 * alpha).abs() < 1e-15);
    }

    #[test]
    fn calibrate_all_ones_b() {
        let n = 6;
        let z = MembershipMatrix::new(DMatrix::from_fn(n, 2, |i, c| if i % 2 == c { 1.0 } else { 0.0 })).unwrap();
        let b = ConnectivityMatrix::from_raw(DMatrix::from_element(2, 2, 1.0)).unwrap();
        let alpha = calibrate_alpha(&DegreeParams::ones(n), &z, &b, 2.0).unwrap();
        assert!((alpha - 2.0 / (n as f64 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn calibrate_rejects_excess_degree() {
        let err = calibrate_alpha(&DegreeParams::ones(4), &two_pure_blocks(), &planted_partition_b(2, 0.0), 3.0);
        assert!(matches!(err, Err(Error::DegreeTooLarge { .. })));
    }

    #[test]
    fn adjacency_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let zeros = EdgeProbabilityMatrix::new(DMatrix::zeros(6, 6)).unwrap();
        assert_eq!(sample_adjacency(&zeros, &mut rng).edge_count(), 0);
        let ones = EdgeProbabilityMatrix::new(DMatrix::from_fn(6, 6, |i, j| if i == j { 0.0 } else { 1.0 })).unwrap();
        assert_eq!(sample_adjacency(&ones, &mut rng).edge_count(), 15);
    }

    #[test]
    fn adjacency_edge_count_concentrates() {
        let n = 200;
        let p = 0.3;
        let w = EdgeProbabilityMatrix::new(DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { p })).unwrap();
        let a = sample_adjacency(&w, &mut ChaCha8Rng::seed_from_u64(9));
        let pairs = (n * (n - 1) / 2) as f64;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        assert!((a.edge_count() as f64 - p * pairs).abs() < 4.0 * sd);
    }

    #[test]
    fn mean_degree_concentrates_on_target() {
        let target = 20.0;
        let profile = OverlapProfile::preset("A").unwrap();
        for rep in 0..20 {
            let net = generate(&config(500, profile.clone(), target, 1000 + rep)).unwrap();
            let a = &net.adjacency;
            let mean = 2.0 * a.edge_count() as f64 / a.nodes() as f64;
            assert!((mean - target).abs() / target <= 0.1, "rep {rep}: mean degree {mean}");
            assert!((net.probabilities.expected_average_degree() - target).abs() < 1e-9);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = config(150, OverlapProfile::preset("B").unwrap(), 15.0, 77);
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.adjacency, b.adjacency);
    }

    #[test]
    fn hub_law_needs_clipping_at_high_degree() {
        let mut cfg = config(500, OverlapProfile::preset("A").unwrap(), 40.0, 3);
        cfg.theta_law = ThetaLaw::Hub;
        assert!(matches!(generate(&cfg), Err(Error::DegreeTooLarge { .. })));
        cfg.edge_policy = EdgeProbabilityPolicy::Clip;
        let net = generate(&cfg).unwrap();
        assert!(net.clipped_pairs > 0);
        assert!(net.probabilities.matrix().iter().enumerate().all(|(idx, &p)| idx % 501 == 0 || p <= 1.0));
    }

    #[test]
    fn multinomial_allocation_draws_blocks() {
        let mut cfg = config(3000, OverlapProfile::preset("A").unwrap(), 10.0, 4);
        cfg.allocation = Allocation::Multinomial;
        let z = sample_memberships(&cfg, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let pure0 = block_counts(&z)[&vec![0]] as f64 / 3000.0;
        assert!((pure0 - 0.3).abs() < 4.0 * (0.21f64 / 3000.0).sqrt());
    }

    proptest! {
        #[test]
        fn deterministic_counts_do_not_depend_on_seed(seed in any::<u64>(), n in 10usize..300) {
            let cfg = config(n, OverlapProfile::preset("B").unwrap(), 1.0, seed);
            let z = sample_memberships(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let reference = sample_memberships(&cfg, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
            prop_assert_eq!(block_counts(&z), block_counts(&reference));
            let total: usize = cfg.profile.deterministic_counts(n).iter().sum();
            prop_assert_eq!(total, n);
        }

        #[test]
        fn sampled_memberships_have_pure_nodes(seed in any::<u64>(), n in 30usize..200) {
            let cfg = config(n, OverlapProfile::preset("A").unwrap(), 1.0, seed);
            let net = generate(&cfg).unwrap();
            prop_assert!(validate_identifiability(&net.params).memberships.passed);
        }

        #[test]
        fn adjacency_symmetric_zero_diagonal(seed in any::<u64>(), n in 20usize..60) {
            let cfg = config(n, OverlapProfile::preset("pure").unwrap(), 1.0, seed);
            let dense = generate(&cfg).unwrap().adjacency.to_dense();
            prop_assert_eq!(&dense, &dense.transpose());
            prop_assert!(dense.diagonal().iter().all(|&x| x == 0.0));
        }
    }
}
