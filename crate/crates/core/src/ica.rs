//! GraDe: ICA for graph signals by joint diagonalization of graph
//! autocorrelation matrices, plus the MD index and SOV-ratio summaries.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Observed mixtures `X = Omega Z` with the sources and mixing kept for scoring.
#[derive(Debug, Clone)]
pub struct IcaDataset {
    pub mixing: DMatrix<f64>,
    pub sources: DMatrix<f64>,
    pub observed: DMatrix<f64>,
}

impl IcaDataset {
    pub fn new(mixing: DMatrix<f64>, sources: DMatrix<f64>) -> Result<Self> {
        let p = sources.nrows();
        if p < 2 {
            return Err(Error::Parameter("ICA needs at least two sources".into()));
        }
        if mixing.nrows() != p || mixing.ncols() != p {
            return Err(Error::Parameter(format!("mixing must be {p}x{p}")));
        }
        if mixing.clone().lu().determinant().abs() < 1e-12 {
            return Err(Error::Rank("mixing matrix is singular".into()));
        }
        let observed = &mixing * &sources;
        Ok(IcaDataset {
            mixing,
            sources,
            observed,
        })
    }
}

/// Independent GMA(1) rows `z_i = y_i + theta_i (scale A) y_i`, `y_i ~ N(0, I)`.
pub fn gma_sources<R: Rng + ?Sized>(a: &Graph, thetas: &[f64], scale: f64, rng: &mut R) -> DMatrix<f64> {
    let n = a.n();
    let y: DMatrix<f64> = DMatrix::from_fn(thetas.len(), n, |_, _| StandardNormal.sample(rng));
    // rows are signals, so A acts from the right as A^T
    let ay: DMatrix<f64> = &y * a.adj().transpose();
    DMatrix::from_fn(thetas.len(), n, |i, j| y[(i, j)] + thetas[i] * scale * ay[(i, j)])
}

/// Matrix with iid standard normal entries, redrawn until well conditioned.
pub fn random_mixing<R: Rng + ?Sized>(p: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(p, p, |_, _| StandardNormal.sample(rng));
        let sv = m.singular_values();
        let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(*s), hi.max(*s)));
        if lo > 1e-6 * hi {
            return m;
        }
    }
}

/// Centers the rows and applies the symmetric inverse square root of the
/// `1/N` sample covariance.
pub fn whiten(x: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (p, n) = x.shape();
    if n < 2 || p == 0 {
        return Err(Error::Parameter(format!("cannot whiten a {p}x{n} matrix")));
    }
    let mut xc = x.clone();
    for mut row in xc.row_iter_mut() {
        let mean = row.mean();
        row.add_scalar_mut(-mean);
    }
    let mut s0 = &xc * xc.transpose() / n as f64;
    symmetrize(&mut s0);
    let eig = SymmetricEigen::new(s0);
    let max = eig.eigenvalues.amax();
    let min = eig.eigenvalues.min();
    if !(min > 1e-12 * max) || !min.is_finite() {
        return Err(Error::Rank(format!(
            "sample covariance is singular (eigenvalues {min:e} .. {max:e})"
        )));
    }
    let inv_sqrt = eig.eigenvalues.map(|l| 1.0 / l.sqrt());
    let mut whitener = &eig.eigenvectors * DMatrix::from_diagonal(&inv_sqrt) * eig.eigenvectors.transpose();
    symmetrize(&mut whitener);
    Ok((&whitener * xc, whitener))
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

/// `S_k = X_w W^k X_w^T / (N - k)`, symmetrized, for `k = 1..=lags`.
pub fn autocorr_matrices(xw: &DMatrix<f64>, w: &Graph, lags: usize) -> Result<Vec<DMatrix<f64>>> {
    let n = xw.ncols();
    if w.n() != n {
        return Err(Error::Parameter(format!("data has {n} columns, graph has {} nodes", w.n())));
    }
    if lags == 0 || lags >= n {
        return Err(Error::Parameter(format!("need 1 <= lags < {n}, got {lags}")));
    }
    let wt = w.adj().transpose();
    let mut shifted = xw.clone();
    let mut out = Vec::with_capacity(lags);
    for k in 1..=lags {
        // row form of W^k x
        shifted = &shifted * &wt;
        let mut s = xw * shifted.transpose() / (n - k) as f64;
        symmetrize(&mut s);
        out.push(s);
    }
    Ok(out)
}

/// Sum of squared diagonal entries of `U S U^T` over all matrices.
pub fn jd_objective(u: &DMatrix<f64>, mats: &[DMatrix<f64>]) -> f64 {
    mats.iter()
        .map(|s| (u * s * u.transpose()).diagonal().norm_squared())
        .sum()
}

#[derive(Debug, Clone)]
pub struct JointDiagonalization {
    /// Orthogonal `U` with every `U S_k U^T` as diagonal as possible.
    pub rotation: DMatrix<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

pub const JD_TOL: f64 = 1e-8;
pub const JD_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi with the closed-form optimal Givens angle per pivot pair.
pub fn joint_diagonalize(mats: &[DMatrix<f64>], tol: f64, max_sweeps: usize) -> Result<JointDiagonalization> {
    let Some(first) = mats.first() else {
        return Err(Error::Parameter("nothing to diagonalize".into()));
    };
    let p = first.nrows();
    for m in mats {
        if m.shape() != (p, p) {
            return Err(Error::Parameter("matrices must share a square shape".into()));
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        if (m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Domain("joint diagonalization needs symmetric matrices".into()));
        }
    }
    let mut a: Vec<DMatrix<f64>> = mats.to_vec();
    // columns accumulate the rotations: V^T S V becomes diagonal
    let mut v = DMatrix::<f64>::identity(p, p);
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut rotated = false;
        for i in 0..p {
            for j in i + 1..p {
                let (mut g11, mut g12, mut g22) = (0.0, 0.0, 0.0);
                for m in &a {
                    let h1 = m[(i, i)] - m[(j, j)];
                    let h2 = m[(i, j)] + m[(j, i)];
                    g11 += h1 * h1;
                    g12 += h1 * h2;
                    g22 += h2 * h2;
                }
                let ton = g11 - g22;
                let toff = 2.0 * g12;
                let theta = 0.5 * toff.atan2(ton + (ton * ton + toff * toff).sqrt());
                // sub-tolerance angles are still applied; they only decide when to stop
                if theta.abs() > tol {
                    rotated = true;
                }
                if theta == 0.0 {
                    continue;
                }
                let (s, c) = theta.sin_cos();
                for m in a.iter_mut() {
                    rotate_cols(m, i, j, c, s);
                    rotate_rows(m, i, j, c, s);
                }
                rotate_cols(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    Ok(JointDiagonalization {
        rotation: v.transpose(),
        sweeps,
        converged,
    })
}

/// `M[:, (i, j)] <- M[:, (i, j)] [[c, -s], [s, c]]`.
fn rotate_cols(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let (a, b) = (m[(r, i)], m[(r, j)]);
        m[(r, i)] = c * a + s * b;
        m[(r, j)] = -s * a + c * b;
    }
}

/// `M[(i, j), :] <- [[c, s], [-s, c]] M[(i, j), :]`.
fn rotate_rows(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for col in 0..m.ncols() {
        let (a, b) = (m[(i, col)], m[(j, col)]);
        m[(i, col)] = c * a + s * b;
        m[(j, col)] = -s * a + c * b;
    }
}

#[derive(Debug, Clone)]
pub struct UnmixingEstimate {
    /// `Gamma = U S0^{-1/2}`.
    pub gamma: DMatrix<f64>,
    pub rotation: DMatrix<f64>,
    pub whitener: DMatrix<f64>,
}

/// GraDe unmixing estimate with `lags` graph-autocorrelation matrices.
pub fn grade(x: &DMatrix<f64>, w: &Graph, lags: usize) -> Result<UnmixingEstimate> {
    let (xw, whitener) = whiten(x)?;
    let mats = autocorr_matrices(&xw, w, lags)?;
    let jd = joint_diagonalize(&mats, JD_TOL, JD_MAX_SWEEPS)?;
    Ok(UnmixingEstimate {
        gamma: &jd.rotation * &whitener,
        rotation: jd.rotation,
        whitener,
    })
}

/// Largest source count handled by the exact permutation search.
pub const MD_MAX_DIM: usize = 8;

/// Squared MD index `D^2` of `gamma` against the true mixing matrix.
pub fn md_index_squared(gamma: &DMatrix<f64>, mixing: &DMatrix<f64>) -> Result<f64> {
    let p = gamma.nrows();
    if gamma.shape() != (p, p) || mixing.shape() != (p, p) {
        return Err(Error::Parameter("unmixing and mixing must be square and equal in size".into()));
    }
    if p < 2 {
        return Err(Error::Size("MD index needs at least two sources".into()));
    }
    if p > MD_MAX_DIM {
        return Err(Error::Size(format!("MD index supports up to {MD_MAX_DIM} sources, got {p}")));
    }
    let g = gamma * mixing;
    // cost[r][i]: row r of G assigned to column i, with the row scale optimal
    let mut cost = vec![vec![0.0; p]; p];
    for r in 0..p {
        let norm2 = g.row(r).norm_squared();
        if !(norm2 > 0.0) {
            return Err(Error::Degenerate(format!("row {r} of the gain matrix is zero")));
        }
        for i in 0..p {
            cost[r][i] = 1.0 - g[(r, i)] * g[(r, i)] / norm2;
        }
    }
    // best[mask]: least cost of giving columns 0..popcount(mask) the rows in mask
    let full = 1usize << p;
    let mut best = vec![f64::INFINITY; full];
    best[0] = 0.0;
    for mask in 0..full {
        let b = best[mask];
        if !b.is_finite() {
            continue;
        }
        let col = mask.count_ones() as usize;
        if col == p {
            continue;
        }
        for (r, row) in cost.iter().enumerate() {
            if mask & (1 << r) == 0 {
                let next = mask | (1 << r);
                let c = b + row[col];
                if c < best[next] {
                    best[next] = c;
                }
            }
        }
    }
    Ok((best[full - 1] / (p - 1) as f64).max(0.0))
}

/// MD index in `[0, 1]`; zero iff `gamma mixing` is a scaled permutation.
pub fn md_index(gamma: &DMatrix<f64>, mixing: &DMatrix<f64>) -> Result<f64> {
    Ok(md_index_squared(gamma, mixing)?.sqrt())
}

/// Monte Carlo estimate of the sum of asymptotic variances, `N (P - 1) mean(D^2)`.
pub fn sov_from_md(md_squares: &[f64], n: usize, p: usize) -> Result<f64> {
    if md_squares.is_empty() {
        return Err(Error::Parameter("no MD values".into()));
    }
    let mean = md_squares.iter().sum::<f64>() / md_squares.len() as f64;
    Ok(n as f64 * (p as f64 - 1.0) * mean)
}

/// `mean(first) / mean(second)`.
pub fn ratio_hat(first: &[f64], second: &[f64]) -> Result<f64> {
    if first.is_empty() || second.is_empty() {
        return Err(Error::Parameter("ratio needs two nonempty samples".into()));
    }
    let m1 = first.iter().sum::<f64>() / first.len() as f64;
    let m2 = second.iter().sum::<f64>() / second.len() as f64;
    if m2 == 0.0 {
        return Err(Error::Degenerate("denominator mean is zero".into()));
    }
    Ok(m1 / m2)
}

/// `U` is orthogonal to within `tol` in max norm.
pub fn is_orthogonal(u: &DMatrix<f64>, tol: f64) -> bool {
    u.is_square() && (u.tr_mul(u) - DMatrix::identity(u.nrows(), u.ncols())).amax() <= tol
}

/// Row-major signal matrix helper for single-source checks.
pub fn row_signal(z: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(1, z.len(), z.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{cycle_graph, erdos_renyi};
    use crate::rng::stream;
    use crate::signals::graph_autocovariance;

    fn random_matrix(p: usize, q: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = stream(seed, 0);
        DMatrix::from_fn(p, q, |_, _| StandardNormal.sample(&mut rng))
    }

    fn random_symmetric(p: usize, seed: u64) -> DMatrix<f64> {
        let m = random_matrix(p, p, seed);
        (&m + m.transpose()) * 0.5
    }

    fn random_orthogonal(p: usize, seed: u64) -> DMatrix<f64> {
        random_matrix(p, p, seed).qr().q()
    }

    #[test]
    fn whitening() {
        let x = random_matrix(3, 500, 1);
        let mix = DMatrix::from_row_slice(3, 3, &[2., 1., 0., 0.5, 3., 1., 0., 0., 1.]);
        let (xw, wh) = whiten(&(&mix * &x)).unwrap();
        let cov = &xw * xw.transpose() / 500.0;
        assert!((cov - DMatrix::identity(3, 3)).amax() < 1e-10);
        assert!((&wh - wh.transpose()).amax() < 1e-15);

        // spectral oracle for the inverse square root
        let mut xc = &mix * &x;
        for mut r in xc.row_iter_mut() {
            let m = r.mean();
            r.add_scalar_mut(-m);
        }
        let s0 = &xc * xc.transpose() / 500.0;
        let e = s0.clone().symmetric_eigen();
        let oracle = &e.eigenvectors * DMatrix::from_diagonal(&e.eigenvalues.map(|l| l.powf(-0.5))) * e.eigenvectors.transpose();
        assert!((wh - oracle).amax() < 1e-10);

        let rank1 = DMatrix::from_fn(2, 50, |i, j| (i + 1) as f64 * j as f64);
        assert!(matches!(whiten(&rank1), Err(Error::Rank(_))));
    }

    #[test]
    fn white_input_has_identity_whitener() {
        // exactly white data: orthonormal centered rows scaled by sqrt(N)
        let n = 8;
        let mut x = DMatrix::zeros(2, n);
        for j in 0..n {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            x[(0, j)] = 2f64.sqrt() * t.cos();
            x[(1, j)] = 2f64.sqrt() * t.sin();
        }
        let (_, wh) = whiten(&x).unwrap();
        assert!((wh - DMatrix::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn autocorr_cases() {
        let x = random_matrix(3, 40, 2);
        let zero = autocorr_matrices(&x, &Graph::empty(40, false, false), 2).unwrap();
        assert!(zero.iter().all(|m| m.amax() == 0.0));

        // single row agrees with the signals module
        let mut rng = stream(3, 0);
        let w = erdos_renyi(40, 0.2, true, &mut rng).unwrap();
        let z = DVector::from_fn(40, |i, _| (i as f64 * 0.37).sin());
        let mean = z.mean();
        let zc = z.map(|v| v - mean);
        let s = autocorr_matrices(&row_signal(&zc), &w, 2).unwrap();
        for k in 1..=2 {
            let expected = graph_autocovariance(&z, &w, k).unwrap();
            assert!((s[k - 1][(0, 0)] - expected).abs() < 1e-12);
        }

        // cycle graph gives symmetrized circular lag-1 autocovariance
        let c = cycle_graph(40).unwrap();
        let s = autocorr_matrices(&x, &c, 1).unwrap();
        let mut lag = DMatrix::zeros(3, 3);
        for t in 0..40 {
            lag += x.column(t) * x.column((t + 39) % 40).transpose();
        }
        lag /= 39.0;
        let lag = (&lag + lag.transpose()) * 0.5;
        assert!((&s[0] - lag).amax() < 1e-12);
    }

    #[test]
    fn jd_single_matrix_is_eigendecomposition() {
        let s = random_symmetric(5, 4);
        let jd = joint_diagonalize(std::slice::from_ref(&s), JD_TOL, JD_MAX_SWEEPS).unwrap();
        assert!(jd.converged);
        let d = &jd.rotation * &s * jd.rotation.transpose();
        let off = d.norm_squared() - d.diagonal().norm_squared();
        assert!(off <= 1e-10, "{off}");
        let eig = s.symmetric_eigenvalues();
        assert!((jd_objective(&jd.rotation, &[s]) - eig.norm_squared()).abs() < 1e-10);
        assert!(is_orthogonal(&jd.rotation, 1e-10));
    }

    #[test]
    fn jd_commuting_pair() {
        let v = random_orthogonal(4, 5);
        let d1 = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]));
        let d2 = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 0.5, 0.7, 2.0]));
        let mats = [&v * d1 * v.transpose(), &v * d2 * v.transpose()];
        let jd = joint_diagonalize(&mats, JD_TOL, JD_MAX_SWEEPS).unwrap();
        for m in &mats {
            let d = &jd.rotation * m * jd.rotation.transpose();
            assert!(d.norm_squared() - d.diagonal().norm_squared() <= 1e-8);
        }
    }

    #[test]
    fn jd_matches_angle_search_at_p2() {
        for seed in 0..20 {
            let mats = [random_symmetric(2, 100 + seed), random_symmetric(2, 200 + seed)];
            let jd = joint_diagonalize(&mats, 1e-14, JD_MAX_SWEEPS).unwrap();
            let got = jd_objective(&jd.rotation, &mats);
            let obj = |t: f64| {
                let (s, c) = t.sin_cos();
                let u = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
                jd_objective(&u, &mats)
            };
            // grid, then golden-section refinement around the best cell
            let grid = 20_000;
            let step = std::f64::consts::PI / grid as f64;
            let (mut best_t, mut best) = (0.0, f64::NEG_INFINITY);
            for k in 0..grid {
                let t = k as f64 * step;
                let v = obj(t);
                if v > best {
                    best = v;
                    best_t = t;
                }
            }
            let (mut a, mut b) = (best_t - step, best_t + step);
            let r = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..200 {
                let c = b - r * (b - a);
                let d = a + r * (b - a);
                if obj(c) > obj(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            let best = obj(0.5 * (a + b)).max(best);
            assert!((got - best).abs() <= 1e-8 * (1.0 + best), "{got} vs {best}");
        }
    }

    #[test]
    fn jd_objective_non_decreasing_and_rejects_asymmetric() {
        let mats: Vec<_> = (0..3).map(|k| random_symmetric(5, 300 + k)).collect();
        let mut last = jd_objective(&DMatrix::identity(5, 5), &mats);
        for sweeps in 1..8 {
            let jd = joint_diagonalize(&mats, 0.0, sweeps).unwrap();
            let obj = jd_objective(&jd.rotation, &mats);
            assert!(obj >= last - 1e-12);
            assert!(is_orthogonal(&jd.rotation, 1e-10));
            last = obj;
        }
        let asym = random_matrix(3, 3, 9);
        assert!(matches!(joint_diagonalize(&[asym], JD_TOL, 10), Err(Error::Domain(_))));
    }

    /// Direct infimum: every permutation, with the optimal scale for each row.
    fn md_bruteforce(g: &DMatrix<f64>) -> f64 {
        let p = g.nrows();
        let mut perm: Vec<usize> = (0..p).collect();
        let mut best = f64::INFINITY;
        permutations(&mut perm, 0, &mut |pi| {
            // C has entry c_i at (i, pi(i)); (C G)_i = c_i g_{pi(i)}
            let mut total = 0.0;
            for i in 0..p {
                let row = g.row(pi[i]);
                let c = row[i] / row.norm_squared();
                for j in 0..p {
                    let target = if i == j { 1.0 } else { 0.0 };
                    total += (c * row[j] - target).powi(2);
                }
            }
            best = best.min(total);
        });
        best / (p - 1) as f64
    }

    fn permutations(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permutations(v, k + 1, f);
            v.swap(k, i);
        }
    }

    #[test]
    fn md_matches_bruteforce() {
        for seed in 0..30 {
            let p = 2 + (seed as usize % 3);
            let g = random_matrix(p, p, 400 + seed);
            let d2 = md_index_squared(&g, &DMatrix::identity(p, p)).unwrap();
            assert!((d2 - md_bruteforce(&g)).abs() < 1e-10);
        }
    }

    #[test]
    fn md_invariances() {
        let omega = random_matrix(4, 4, 7);
        let inv = omega.clone().try_inverse().unwrap();
        assert!(md_index(&inv, &omega).unwrap() < 1e-7);
        let perm = DMatrix::from_row_slice(4, 4, &[0., 1., 0., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., 0., 1., 0.]);
        let lam = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -0.5, 3.0, -7.0]));
        assert!(md_index(&(&perm * &lam * &inv), &omega).unwrap() < 1e-7);
        let gamma = random_matrix(4, 4, 8);
        let a = md_index(&gamma, &omega).unwrap();
        let b = md_index(&(&perm * &lam * &gamma), &omega).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&a));
        let nine = DMatrix::identity(9, 9);
        assert!(matches!(md_index(&nine, &nine), Err(Error::Size(_))));
        let mut zero_row = DMatrix::identity(3, 3);
        zero_row.row_mut(1).fill(0.0);
        assert!(matches!(md_index(&zero_row, &DMatrix::identity(3, 3)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sov_and_ratio() {
        assert_eq!(sov_from_md(&[0.0; 5], 1000, 4).unwrap(), 0.0);
        assert!((sov_from_md(&[0.001; 3], 1000, 4).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(ratio_hat(&[0.2, 0.4], &[0.2, 0.4]).unwrap(), 1.0);
        assert!(ratio_hat(&[0.2], &[0.0]).is_err());
        assert!(sov_from_md(&[], 10, 2).is_err());
    }

    #[test]
    fn grade_separates_gma_sources() {
        let mut rng = stream(20, 0);
        let n = 1000;
        let a = erdos_renyi(n, 0.05, false, &mut rng).unwrap();
        let scale = 1.0 / (n as f64 * 0.05 * 0.95).sqrt();
        let mut mds = Vec::new();
        for _ in 0..20 {
            let z = gma_sources(&a, &[0.0, 0.2, 0.4, 0.6], scale, &mut rng);
            let est = grade(&z, &a, 1).unwrap();
            mds.push(md_index(&est.gamma, &DMatrix::identity(4, 4)).unwrap());
            assert!(is_orthogonal(&est.rotation, 1e-10));
            assert!((&est.gamma - &est.rotation * &est.whitener).amax() < 1e-15);
        }
        mds.sort_by(f64::total_cmp);
        assert!(mds[mds.len() / 2] < 0.15, "{mds:?}");
    }

    #[test]
    fn grade_row_scaling_equivariance() {
        let mut rng = stream(21, 0);
        let a = erdos_renyi(300, 0.05, false, &mut rng).unwrap();
        let z = gma_sources(&a, &[0.0, 0.3, 0.6], 0.3, &mut rng);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5, 3.0]));
        let g1 = grade(&z, &a, 1).unwrap().gamma;
        let g2 = grade(&(&d * &z), &a, 1).unwrap().gamma;
        let m1 = md_index(&g1, &DMatrix::identity(3, 3)).unwrap();
        let m2 = md_index(&g2, &d).unwrap();
        assert!((m1 - m2).abs() < 1e-8);
    }

    #[test]
    fn grade_on_cycle_matches_sobi() {
        let mut rng = stream(22, 0);
        let n = 400;
        // AR(1)-like sources along the cycle
        let coefs = [0.9, 0.3, -0.5];
        let mut z = DMatrix::zeros(3, n);
        for (i, &c) in coefs.iter().enumerate() {
            let mut prev = 0.0;
            for t in 0..n {
                let e: f64 = StandardNormal.sample(&mut rng);
                prev = c * prev + e;
                z[(i, t)] = prev;
            }
        }
        let x = random_matrix(3, 3, 23) * &z;
        let est = grade(&x, &cycle_graph(n).unwrap(), 1).unwrap();

        // reference SOBI: eigenvectors of the symmetrized circular lag-1 covariance
        let (xw, wh) = whiten(&x).unwrap();
        let mut lag = DMatrix::zeros(3, 3);
        for t in 0..n {
            lag += xw.column(t) * xw.column((t + n - 1) % n).transpose();
        }
        lag /= (n - 1) as f64;
        let lag = (&lag + lag.transpose()) * 0.5;
        let eig = lag.symmetric_eigen();
        let reference = eig.eigenvectors.transpose() * wh;
        // match rows up to sign and order
        for r in 0..3 {
            let row = reference.row(r);
            let found = (0..3).any(|s| {
                let other = est.gamma.row(s);
                (row - other).amax() < 1e-8 || (row + other).amax() < 1e-8
            });
            assert!(found, "row {r} has no match");
        }
    }

    #[test]
    fn dataset_validation() {
        let z = random_matrix(3, 20, 30);
        assert!(IcaDataset::new(DMatrix::zeros(3, 3), z.clone()).is_err());
        let ds = IcaDataset::new(DMatrix::identity(3, 3) * 2.0, z.clone()).unwrap();
        assert_eq!(ds.observed, z * 2.0);
    }
}
