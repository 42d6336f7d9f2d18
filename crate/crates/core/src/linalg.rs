//! Dense symmetric eigensolvers.
//!
//! Two entry points share the same implicit QL kernel:
//!
//! * [`symmetric_eigen`] computes the full decomposition (Householder
//!   reduction with accumulated transforms followed by QL with vector
//!   updates). Used for small matrices.
//! * [`top_eigenpairs`] computes only the `k` algebraically largest pairs:
//!   the reduction keeps its reflectors, QL runs on eigenvalues only,
//!   eigenvectors of the tridiagonal come from inverse iteration and are
//!   mapped back through the reflectors. A final Rayleigh-Ritz step on the
//!   original matrix cleans up rotations inside near-degenerate clusters.

use nalgebra::{DMatrix, DVector};

const EPS: f64 = f64::EPSILON;

/// Eigenvalues sorted in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymmetricEigen {
    /// `V diag(values) V^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = &self.vectors * DMatrix::from_diagonal(&self.values);
        scaled * self.vectors.transpose()
    }
}

/// Full eigendecomposition of a symmetric matrix. Only the lower triangle
/// is read.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> SymmetricEigen {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "symmetric_eigen needs a square matrix");
    if n == 0 {
        return SymmetricEigen {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        };
    }
    let mut v = m.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    // tred2 leaves e[i] coupling (i-1, i); shift to the (i, i+1) convention.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    tql(&mut d, &mut e, Some(&mut v));
    sort_descending(d, v)
}

/// The `k` algebraically largest eigenpairs of a symmetric matrix, in
/// descending order. Only the lower triangle is read.
pub fn top_eigenpairs(m: &DMatrix<f64>, k: usize) -> SymmetricEigen {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "top_eigenpairs needs a square matrix");
    assert!(k <= n, "cannot select {k} eigenpairs from a {n}x{n} matrix");
    if k == 0 {
        return SymmetricEigen {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(n, 0),
        };
    }
    // Below this size the full path is as cheap and avoids inverse iteration.
    if n <= 32 || 4 * k >= n {
        let full = symmetric_eigen(m);
        return SymmetricEigen {
            values: full.values.rows(0, k).into_owned(),
            vectors: full.vectors.columns(0, k).into_owned(),
        };
    }

    let tri = Tridiagonal::reduce(m.clone());
    let mut d = tri.diag.clone();
    let mut e = tri.off.clone();
    e.push(0.0);
    tql(&mut d, &mut e, None);
    d.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let selected = &d[..k];

    let tri_vectors = tridiagonal_vectors(&tri.diag, &tri.off, selected);
    let mut basis = DMatrix::zeros(n, k);
    for (j, y) in tri_vectors.iter().enumerate() {
        let x = tri.apply_q(y);
        basis.set_column(j, &x);
    }
    rayleigh_ritz(m, basis)
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// `A = Q T Q^T`, with `Q` kept implicitly as a product of reflectors.
struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    off: Vec<f64>,
    /// Reflector `j` acts on indices `j + 1..n`; stored with unit lead.
    reflectors: Vec<(f64, Vec<f64>)>,
}

impl Tridiagonal {
    fn reduce(mut a: DMatrix<f64>) -> Self {
        let n = a.nrows();
        // Work on the full symmetric block so all inner loops run down columns.
        a.fill_upper_triangle_with_lower_triangle();
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        let mut p = vec![0.0; n];

        for j in 0..n.saturating_sub(1) {
            diag.push(a[(j, j)]);
            let len = n - j - 1;
            let x: Vec<f64> = a.column(j).rows(j + 1, len).iter().copied().collect();
            let (beta, v, alpha) = householder(&x);
            off.push(alpha);
            if len < 2 {
                continue;
            }
            if beta != 0.0 {
                let sub = j + 1;
                // p = beta * A_sub * v
                for c in 0..len {
                    let col = a.column(sub + c);
                    let col = &col.as_slice()[sub..];
                    p[c] = beta * dot(col, &v);
                }
                let pv = dot(&p[..len], &v);
                let shift = 0.5 * beta * pv;
                for c in 0..len {
                    p[c] -= shift * v[c];
                }
                // A_sub -= v w^T + w v^T
                for c in 0..len {
                    let wc = p[c];
                    let vc = v[c];
                    let mut col = a.column_mut(sub + c);
                    let col = &mut col.as_mut_slice()[sub..];
                    for r in 0..len {
                        col[r] -= v[r] * wc + p[r] * vc;
                    }
                }
            }
            reflectors.push((beta, v));
        }
        diag.push(a[(n - 1, n - 1)]);
        Tridiagonal {
            diag,
            off,
            reflectors,
        }
    }

    /// `Q y` where `Q = H_0 H_1 ... H_{n-3}`.
    fn apply_q(&self, y: &[f64]) -> DVector<f64> {
        let mut x = y.to_vec();
        for (j, (beta, v)) in self.reflectors.iter().enumerate().rev() {
            if *beta == 0.0 {
                continue;
            }
            let tail = &mut x[j + 1..];
            let s = beta * dot(tail, v);
            for (t, vi) in tail.iter_mut().zip(v) {
                *t -= s * vi;
            }
        }
        DVector::from_vec(x)
    }
}

/// Reflector `(beta, v, alpha)` with `(I - beta v v^T) x = alpha e_1` and
/// `v[0] = 1`.
fn householder(x: &[f64]) -> (f64, Vec<f64>, f64) {
    let mut v = x.to_vec();
    if v.is_empty() {
        return (0.0, v, 0.0);
    }
    let sigma: f64 = x[1..].iter().map(|t| t * t).sum();
    v[0] = 1.0;
    if sigma == 0.0 {
        return (0.0, v, x[0]);
    }
    let norm = (x[0] * x[0] + sigma).sqrt();
    let v0 = if x[0] <= 0.0 {
        x[0] - norm
    } else {
        -sigma / (x[0] + norm)
    };
    let beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
    for t in v[1..].iter_mut() {
        *t /= v0;
    }
    (beta, v, norm)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Householder tridiagonalization with accumulated transforms. On exit `v`
/// holds `Q`, `d` the diagonal and `e[1..]` the subdiagonal.
fn tred2(v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on a symmetric tridiagonal matrix. `e[i]` couples `i` and
/// `i + 1`, `e[n - 1]` must be zero. When `vectors` is given the rotations
/// are applied to its columns.
fn tql(d: &mut [f64], e: &mut [f64], mut vectors: Option<&mut DMatrix<f64>>) {
    let n = d.len();
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= EPS * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                assert!(iter < 200, "implicit QL failed to converge");
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = vectors.as_deref_mut() {
                        let rows = v.nrows();
                        for k in 0..rows {
                            let hk = v[(k, i + 1)];
                            v[(k, i + 1)] = s * v[(k, i)] + c * hk;
                            v[(k, i)] = c * v[(k, i)] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= EPS * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

fn sort_descending(d: Vec<f64>, v: DMatrix<f64>) -> SymmetricEigen {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the QL output order among exact ties.
    order.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).unwrap());
    let values = DVector::from_iterator(n, order.iter().map(|&i| d[i]));
    let mut vectors = DMatrix::zeros(v.nrows(), n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    SymmetricEigen { values, vectors }
}

/// Eigenvectors of the tridiagonal `(diag, off)` for the given eigenvalues
/// (descending) by inverse iteration. Members of a cluster of close
/// eigenvalues are orthogonalized against each other.
fn tridiagonal_vectors(diag: &[f64], off: &[f64], values: &[f64]) -> Vec<Vec<f64>> {
    let n = diag.len();
    let t_norm = diag
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let lo = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let hi = if i + 1 < n { off[i].abs() } else { 0.0 };
            d.abs() + lo + hi
        })
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let cluster_gap = 1e-3 * t_norm;

    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    let mut cluster_start = 0;
    let mut prev_shift = f64::NAN;
    for (j, &lambda) in values.iter().enumerate() {
        let mut shift = lambda;
        if j > 0 {
            if (values[j - 1] - lambda).abs() > cluster_gap {
                cluster_start = j;
            }
            // Separate numerically identical shifts so the solves differ.
            let min_sep = 10.0 * EPS * t_norm;
            if prev_shift - shift < min_sep {
                shift = prev_shift - min_sep;
            }
        }
        prev_shift = shift;

        let lu = TridiagonalLu::factor(diag, off, shift, EPS * t_norm);
        let mut x = start_vector(n, j);
        for _ in 0..6 {
            lu.solve(&mut x);
            for prev in &out[cluster_start..j] {
                let proj = dot(&x, prev);
                for (xi, pi) in x.iter_mut().zip(prev) {
                    *xi -= proj * pi;
                }
            }
            let norm = dot(&x, &x).sqrt();
            if norm == 0.0 || !norm.is_finite() {
                x = start_vector(n, j + 7);
                continue;
            }
            for xi in x.iter_mut() {
                *xi /= norm;
            }
        }
        out.push(x);
    }
    out
}

/// Deterministic, non-degenerate starting vector for inverse iteration.
fn start_vector(n: usize, salt: usize) -> Vec<f64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (salt as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    (0..n)
        .map(|_| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
        .collect()
}

/// LU factorization with partial pivoting of `T - shift I` for tridiagonal `T`.
struct TridiagonalLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(diag: &[f64], off: &[f64], shift: f64, tiny: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
        let mut dl = off.to_vec();
        let mut du = off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                } else {
                    dl[i] = 0.0;
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        let tiny = tiny.max(f64::MIN_POSITIVE);
        for di in d.iter_mut() {
            if di.abs() < tiny {
                *di = if *di < 0.0 { -tiny } else { tiny };
            }
        }
        TridiagonalLu {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
        // Guard against overflow on exact shifts.
        let big = b.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if big > 1e150 {
            for x in b.iter_mut() {
                *x /= big;
            }
        }
    }
}

/// Orthonormalize `basis`, then rotate it to the eigenvectors of the
/// projected matrix `B^T M B`.
fn rayleigh_ritz(m: &DMatrix<f64>, basis: DMatrix<f64>) -> SymmetricEigen {
    let q = basis.qr().q();
    let mq = symmetric_times(m, &q);
    let mut projected = q.transpose() * &mq;
    projected.fill_upper_triangle_with_lower_triangle();
    let small = symmetric_eigen(&projected);
    SymmetricEigen {
        values: small.values.clone(),
        vectors: q * small.vectors,
    }
}

/// `M x` reading only the lower triangle of `M`.
fn symmetric_times(m: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, x.ncols());
    for c in 0..x.ncols() {
        let xc = x.column(c);
        let mut oc = vec![0.0; n];
        for j in 0..n {
            let col = &m.as_slice()[j * n + j..(j + 1) * n];
            let xj = xc[j];
            // diagonal + below-diagonal entries of column j
            let mut acc = col[0] * xj;
            for (off, &mij) in col.iter().enumerate().skip(1) {
                let i = j + off;
                acc += mij * xc[i];
                oc[i] += mij * xj;
            }
            oc[j] += acc;
        }
        out.set_column(c, &DVector::from_vec(oc));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in j..n {
                let x: f64 = rng.random_range(-1.0..1.0);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        m
    }

    #[test]
    fn full_decomposition_reconstructs() {
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (40, 4)] {
            let m = random_symmetric(n, seed);
            let eig = symmetric_eigen(&m);
            assert!((eig.reconstruct() - &m).norm() < 1e-10);
            let gram = eig.vectors.transpose() * &eig.vectors;
            assert!((gram - DMatrix::identity(n, n)).norm() < 1e-10);
            for w in eig.values.as_slice().windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn matches_nalgebra_eigenvalues() {
        let m = random_symmetric(60, 11);
        let ours = symmetric_eigen(&m);
        let mut theirs: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in ours.values.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn top_pairs_match_full_decomposition() {
        for (n, k, seed) in [(80, 3, 5), (150, 5, 6), (33, 1, 7)] {
            let m = random_symmetric(n, seed);
            let full = symmetric_eigen(&m);
            let top = top_eigenpairs(&m, k);
            for j in 0..k {
                assert!((full.values[j] - top.values[j]).abs() < 1e-9, "value {j}");
                let v = top.vectors.column(j);
                let residual = &m * v - v * top.values[j];
                assert!(residual.norm() < 1e-8, "residual {j}: {}", residual.norm());
            }
        }
    }

    #[test]
    fn top_pairs_handle_exact_multiplicity() {
        // Rank-3 PSD matrix with a doubly repeated leading eigenvalue.
        let n = 50;
        let mut x = DMatrix::zeros(n, 3);
        for i in 0..n {
            x[(i, i % 3)] = 1.0;
        }
        let m = &x * x.transpose();
        let top = top_eigenpairs(&m, 3);
        let recon = top.reconstruct();
        assert!((recon - &m).norm() < 1e-9);
        let gram = top.vectors.transpose() * &top.vectors;
        assert!((gram - DMatrix::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn selects_algebraic_not_magnitude() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(
            (0..40).map(|i| if i == 0 { -100.0 } else { i as f64 }).collect(),
        ));
        let top = top_eigenpairs(&m, 2);
        assert!((top.values[0] - 39.0).abs() < 1e-10);
        assert!((top.values[1] - 38.0).abs() < 1e-10);
    }
}
