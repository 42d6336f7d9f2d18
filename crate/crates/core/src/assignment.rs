//! Permutation matching shared by the center distance and the metrics.
//!
//! Every search returns `perm` with `perm[row] = col`. Small problems are
//! solved by enumeration in lexicographic order so ties resolve to the
//! lexicographically smallest permutation; larger ones fall back to exact
//! polynomial algorithms.

use nalgebra::DMatrix;

/// Largest size solved by enumerating all permutations.
pub const BRUTE_FORCE_MAX: usize = 8;

/// Rearranges `perm` into the next permutation in lexicographic order.
/// Returns `false` after the last one.
pub fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Visits every permutation of `0..k` in lexicographic order.
pub fn for_each_permutation(k: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        visit(&perm);
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

pub fn sum_cost(cost: &DMatrix<f64>, perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(r, &c)| cost[(r, c)]).sum()
}

pub fn max_cost(cost: &DMatrix<f64>, perm: &[usize]) -> f64 {
    perm.iter()
        .enumerate()
        .map(|(r, &c)| cost[(r, c)])
        .fold(0.0, f64::max)
}

fn brute_force(cost: &DMatrix<f64>, objective: impl Fn(&DMatrix<f64>, &[usize]) -> f64) -> Vec<usize> {
    let k = cost.nrows();
    let mut best = (0..k).collect::<Vec<_>>();
    let mut best_value = f64::INFINITY;
    for_each_permutation(k, |perm| {
        let value = objective(cost, perm);
        if value < best_value {
            best_value = value;
            best.copy_from_slice(perm);
        }
    });
    best
}

/// Minimum-sum permutation by exhaustive search.
pub fn brute_force_min_sum(cost: &DMatrix<f64>) -> Vec<usize> {
    brute_force(cost, sum_cost)
}

/// Minimum-bottleneck permutation by exhaustive search.
pub fn brute_force_min_max(cost: &DMatrix<f64>) -> Vec<usize> {
    brute_force(cost, max_cost)
}

/// Minimum-sum assignment on a square cost matrix (Hungarian method with
/// potentials, O(k^3)).
pub fn hungarian(cost: &DMatrix<f64>) -> Vec<usize> {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "assignment needs a square cost matrix");
    // 1-based bookkeeping; column 0 is the virtual start.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; n];
    for j in 1..=n {
        perm[owner[j] - 1] = j - 1;
    }
    perm
}

/// Minimum-bottleneck assignment: binary search over the distinct cost
/// values for the smallest threshold admitting a perfect matching.
pub fn bottleneck(cost: &DMatrix<f64>) -> Vec<usize> {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "assignment needs a square cost matrix");
    if n == 0 {
        return Vec::new();
    }
    let mut candidates: Vec<f64> = cost.iter().copied().collect();
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup();
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    let mut best = perfect_matching(cost, candidates[hi]).expect("complete graph has a matching");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match perfect_matching(cost, candidates[mid]) {
            Some(m) => {
                best = m;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    if let Some(m) = perfect_matching(cost, candidates[lo]) {
        best = m;
    }
    best
}

/// Perfect matching using only edges with `cost <= threshold` (augmenting paths).
fn perfect_matching(cost: &DMatrix<f64>, threshold: f64) -> Option<Vec<usize>> {
    let n = cost.nrows();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];
    for row in 0..n {
        let mut seen = vec![false; n];
        if !augment(cost, threshold, row, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (col, owner) in col_owner.iter().enumerate() {
        perm[owner.expect("perfect matching covers every column")] = col;
    }
    Some(perm)
}

fn augment(
    cost: &DMatrix<f64>,
    threshold: f64,
    row: usize,
    seen: &mut [bool],
    col_owner: &mut [Option<usize>],
) -> bool {
    for col in 0..cost.ncols() {
        if cost[(row, col)] > threshold || seen[col] {
            continue;
        }
        seen[col] = true;
        let free = match col_owner[col] {
            None => true,
            Some(other) => augment(cost, threshold, other, seen, col_owner),
        };
        if free {
            col_owner[col] = Some(row);
            return true;
        }
    }
    false
}

/// Minimum-sum permutation: enumeration up to [`BRUTE_FORCE_MAX`], Hungarian beyond.
pub fn min_sum_permutation(cost: &DMatrix<f64>) -> Vec<usize> {
    if cost.nrows() <= BRUTE_FORCE_MAX {
        brute_force_min_sum(cost)
    } else {
        hungarian(cost)
    }
}

/// Minimum-bottleneck permutation: enumeration up to [`BRUTE_FORCE_MAX`],
/// threshold search beyond.
pub fn min_max_permutation(cost: &DMatrix<f64>) -> Vec<usize> {
    if cost.nrows() <= BRUTE_FORCE_MAX {
        brute_force_min_max(cost)
    } else {
        bottleneck(cost)
    }
}
