//! K-medians clustering with Weiszfeld medians and seeded restarts.

use nalgebra::{DMatrix, DVector, RowDVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

const COINCIDENT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct KMediansConfig {
    pub restarts: usize,
    pub max_outer_iters: usize,
    pub weiszfeld_tol: f64,
    pub weiszfeld_max_iters: usize,
    pub loss_tol: f64,
    pub seed: u64,
    /// Start a single run from these centers instead of seeded restarts.
    pub initial_centers: Option<DMatrix<f64>>,
}

impl Default for KMediansConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_outer_iters: 100,
            weiszfeld_tol: 1e-8,
            weiszfeld_max_iters: 200,
            loss_tol: 1e-10,
            seed: 0,
            initial_centers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    /// One center per row.
    pub centers: DMatrix<f64>,
    pub assignments: Vec<usize>,
    pub loss: f64,
    pub converged: bool,
    pub restarts_used: usize,
    /// Loss after each assignment step of the winning run.
    pub loss_history: Vec<f64>,
}

fn distance(q: &DMatrix<f64>, i: usize, center: &RowDVector<f64>) -> f64 {
    (q.row(i) - center).norm()
}

fn nearest(q: &DMatrix<f64>, i: usize, centers: &[RowDVector<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = distance(q, i, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn rows_of(s: &DMatrix<f64>) -> Vec<RowDVector<f64>> {
    s.row_iter().map(|r| r.into_owned()).collect()
}

fn stack(centers: &[RowDVector<f64>], dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(centers.len(), dim, |c, j| centers[c][j])
}

/// Mean distance from each row of `q` to its nearest center (row of `s`).
pub fn kmedians_loss(q: &DMatrix<f64>, s: &DMatrix<f64>) -> f64 {
    assert_eq!(q.ncols(), s.ncols(), "points and centers differ in dimension");
    let n = q.nrows();
    if n == 0 {
        return 0.0;
    }
    let centers = rows_of(s);
    (0..n).map(|i| nearest(q, i, &centers).1).sum::<f64>() / n as f64
}

fn objective(points: &DMatrix<f64>, x: &RowDVector<f64>) -> f64 {
    points.row_iter().map(|p| (p - x).norm()).sum()
}

/// Point minimizing the sum of Euclidean distances to the rows of `points`.
pub fn geometric_median(points: &DMatrix<f64>, tol: f64, max_iters: usize) -> DVector<f64> {
    let m = points.nrows();
    assert!(m >= 1, "geometric median of an empty set");
    if m == 1 {
        return points.row(0).transpose();
    }
    let mean = points.row_mean();
    let mut x = mean.clone();
    for _ in 0..max_iters {
        let mut numerator = RowDVector::zeros(points.ncols());
        let mut weight = 0.0;
        let mut pull = RowDVector::zeros(points.ncols());
        let mut coincident = 0usize;
        for p in points.row_iter() {
            let diff = p - &x;
            let d = diff.norm();
            if d < COINCIDENT {
                coincident += 1;
            } else {
                numerator += p / d;
                weight += 1.0 / d;
                pull += diff / d;
            }
        }
        let next = if coincident > 0 {
            // Subgradient test at a data point of the given multiplicity.
            let strength = pull.norm();
            if strength <= coincident as f64 {
                break;
            }
            &x + pull * (tol / strength)
        } else {
            numerator / weight
        };
        let step = (&next - &x).norm();
        x = next;
        if step < tol {
            break;
        }
    }
    // Weiszfeld descends from the mean; the guards catch roundoff near data points.
    let mut best = (objective(points, &x), x);
    let mean_obj = objective(points, &mean);
    if mean_obj < best.0 {
        best = (mean_obj, mean);
    }
    let closest = (0..m)
        .min_by(|&a, &b| {
            let da = (points.row(a) - &best.1).norm();
            let db = (points.row(b) - &best.1).norm();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let candidate = points.row(closest).into_owned();
    if objective(points, &candidate) < best.0 {
        best.1 = candidate;
    }
    best.1.transpose()
}

fn seed_centers(q: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> Vec<RowDVector<f64>> {
    let n = q.nrows();
    let mut centers = vec![q.row(rng.random_range(0..n)).into_owned()];
    let mut dist: Vec<f64> = (0..n).map(|i| distance(q, i, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &d) in dist.iter().enumerate() {
                acc += d;
                if u < acc && d > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let center = q.row(pick).into_owned();
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(distance(q, i, &center));
        }
        centers.push(center);
    }
    centers
}

struct Run {
    centers: Vec<RowDVector<f64>>,
    converged: bool,
    history: Vec<f64>,
}

fn lloyd(q: &DMatrix<f64>, mut centers: Vec<RowDVector<f64>>, config: &KMediansConfig) -> Run {
    let n = q.nrows();
    let k = centers.len();
    let mut history = Vec::new();
    let mut converged = false;
    let mut previous = f64::INFINITY;
    for _ in 0..config.max_outer_iters {
        let assigned: Vec<(usize, f64)> = (0..n).map(|i| nearest(q, i, &centers)).collect();
        let loss = assigned.iter().map(|a| a.1).sum::<f64>() / n as f64;
        assert!(
            loss <= previous + 1e-12 * previous.abs().max(1.0),
            "k-medians loss increased from {previous} to {loss}"
        );
        history.push(loss);
        if previous - loss < config.loss_tol {
            converged = true;
            break;
        }
        previous = loss;

        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &(c, _)) in assigned.iter().enumerate() {
            members[c].push(i);
        }
        let mut by_distance: Vec<usize> = (0..n).collect();
        by_distance.sort_by(|&a, &b| assigned[b].1.partial_cmp(&assigned[a].1).unwrap().then(a.cmp(&b)));
        let mut spare = by_distance.into_iter();
        for c in 0..k {
            if members[c].is_empty() {
                if let Some(i) = spare.next() {
                    centers[c] = q.row(i).into_owned();
                }
                continue;
            }
            let points = q.select_rows(members[c].iter());
            let median = geometric_median(&points, config.weiszfeld_tol, config.weiszfeld_max_iters).transpose();
            // Keep the old center unless the median does at least as well.
            if objective(&points, &median) <= objective(&points, &centers[c]) {
                centers[c] = median;
            }
        }
    }
    Run {
        centers,
        converged,
        history,
    }
}

/// Restart `r` draws from its own stream of the ChaCha generator seeded by `seed`.
fn restart_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    rng
}

pub fn fit_kmedians(q: &DMatrix<f64>, k: usize, config: &KMediansConfig) -> Result<ClusteringResult> {
    let n = q.nrows();
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    if n < k {
        return Err(Error::TooFewPoints { n, k });
    }
    let dim = q.ncols();
    let runs: Vec<Run> = match &config.initial_centers {
        Some(init) => {
            if init.shape() != (k, dim) {
                return Err(Error::ShapeMismatch(format!(
                    "initial centers are {}x{}, expected {k}x{dim}",
                    init.nrows(),
                    init.ncols()
                )));
            }
            vec![lloyd(q, rows_of(init), config)]
        }
        None => {
            if config.restarts == 0 {
                return Err(Error::InvalidParameter("restarts must be at least 1".into()));
            }
            (0..config.restarts)
                .into_par_iter()
                .map(|r| {
                    let mut rng = restart_rng(config.seed, r);
                    lloyd(q, seed_centers(q, k, &mut rng), config)
                })
                .collect()
        }
    };
    let restarts_used = runs.len();
    let mut best: Option<(f64, Run)> = None;
    for run in runs {
        let loss = kmedians_loss(q, &stack(&run.centers, dim));
        if best.as_ref().is_none_or(|(b, _)| loss < *b) {
            best = Some((loss, run));
        }
    }
    let (loss, run) = best.expect("at least one run");
    let assignments = (0..n).map(|i| nearest(q, i, &run.centers).0).collect();
    Ok(ClusteringResult {
        centers: stack(&run.centers, dim),
        assignments,
        loss,
        converged: run.converged,
        restarts_used,
        loss_history: run.history,
    })
}
