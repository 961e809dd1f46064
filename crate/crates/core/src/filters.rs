//! Graph filters on symmetric shift matrices: graph Fourier transform,
//! least-squares polynomial (GMA) filters, the high-pass outlier detector,
//! the translated normalized Laplacian and GARMA filters.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_symmetric, Graph};
use crate::models::planar_distance;

/// Eigenpairs of a symmetric shift matrix in graph-frequency order.
///
/// Frequencies run from low to high by `d_n = | max_m |lambda_m| - lambda_n |`,
/// ties by ascending eigenvalue.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub vectors: DMatrix<f64>,
    pub distances: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn from_symmetric(m: &DMatrix<f64>) -> Result<Self> {
        if !is_symmetric(m) {
            return Err(Error::Domain("spectral decomposition needs a symmetric matrix".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("matrix has non-finite entries".into()));
        }
        let eig = SymmetricEigen::new(m.clone());
        let lam = eig.eigenvalues;
        let max_abs = lam.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let dist: Vec<f64> = lam.iter().map(|l| (max_abs - l).abs()).collect();
        let mut order: Vec<usize> = (0..lam.len()).collect();
        order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(lam[a].total_cmp(&lam[b])));
        let n = lam.len();
        Ok(SpectralDecomposition {
            eigenvalues: DVector::from_iterator(n, order.iter().map(|&k| lam[k])),
            vectors: DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]),
            distances: order.iter().map(|&k| dist[k]).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(r) V^T x`.
    pub fn apply_response(&self, response: &[f64], x: &DVector<f64>) -> DVector<f64> {
        let mut c = self.vectors.tr_mul(x);
        for (ci, r) in c.iter_mut().zip(response) {
            *ci *= r;
        }
        &self.vectors * c
    }
}

/// Frequency-ordered eigendecomposition of a symmetric graph.
pub fn frequency_order(w: &Graph) -> Result<SpectralDecomposition> {
    if !w.is_symmetric() {
        return Err(Error::Domain("frequency ordering needs a symmetric shift matrix".into()));
    }
    SpectralDecomposition::from_symmetric(w.adj())
}

/// `V^T x`.
pub fn gft(dec: &SpectralDecomposition, x: &DVector<f64>) -> DVector<f64> {
    dec.vectors.tr_mul(x)
}

/// `V c`.
pub fn inverse_gft(dec: &SpectralDecomposition, coeffs: &DVector<f64>) -> DVector<f64> {
    &dec.vectors * coeffs
}

/// Median with the midpoint convention for even lengths.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Ideal high-pass: response 1 iff `d_n` is strictly above the median of `d`.
pub fn highpass_response(dec: &SpectralDecomposition) -> Vec<f64> {
    let med = median(&dec.distances);
    dec.distances
        .iter()
        .map(|&d| if d > med { 1.0 } else { 0.0 })
        .collect()
}

/// Least-squares polynomial filter `h_0 I + h_1 W + ... + h_K W^K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub responses: Vec<f64>,
    pub coeffs: Vec<f64>,
    pub order: usize,
    /// Sum of squared response errors at the eigenvalues.
    pub residual: f64,
    /// Set when the Vandermonde system had less than full column rank and
    /// the minimum-norm solution was returned.
    pub rank_deficient: bool,
}

impl FilterSpec {
    /// `sum_k h_k lambda^k`.
    pub fn response_at(&self, lambda: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, h| acc * lambda + h)
    }
}

/// Minimum-norm least squares through the SVD; returns the solution and the numerical rank.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, usize)> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |m, s| m.max(*s));
    let tol = f64::EPSILON * a.nrows().max(a.ncols()) as f64 * smax;
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    let x = svd
        .solve(b, tol)
        .map_err(|e| Error::Numerical(format!("least squares: {e}")))?;
    Ok((x, rank))
}

pub fn design_polynomial_filter(
    dec: &SpectralDecomposition,
    responses: &[f64],
    order: usize,
) -> Result<FilterSpec> {
    let n = dec.n();
    if responses.len() != n {
        return Err(Error::Parameter(format!(
            "{} responses for {n} frequencies",
            responses.len()
        )));
    }
    if n == 0 || order > n - 1 {
        return Err(Error::Parameter(format!("filter order {order} must be below {n}")));
    }
    let v = DMatrix::from_fn(n, order + 1, |i, k| dec.eigenvalues[i].powi(k as i32));
    let alpha = DVector::from_column_slice(responses);
    let (h, rank) = lstsq(&v, &alpha)?;
    let residual = (&v * &h - &alpha).norm_squared();
    Ok(FilterSpec {
        responses: responses.to_vec(),
        coeffs: h.iter().copied().collect(),
        order,
        residual,
        rank_deficient: rank < order + 1,
    })
}

/// `sum_k h_k W^k x` by Horner's rule.
pub fn apply_polynomial_filter(w: &DMatrix<f64>, spec: &FilterSpec, x: &DVector<f64>) -> DVector<f64> {
    let mut coeffs = spec.coeffs.iter().rev();
    let Some(&top) = coeffs.next() else {
        return DVector::zeros(x.len());
    };
    let mut y = x * top;
    for &h in coeffs {
        y = w * y;
        y.axpy(h, x, 1.0);
    }
    y
}

/// One detection decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DayResult {
    /// 1-based day number.
    pub day: usize,
    pub flag: bool,
    pub max_gft: f64,
    pub threshold: f64,
}

/// High-pass GFT thresholding against the three previous days.
#[derive(Debug, Clone)]
pub struct OutlierDetector {
    /// Maps a day's signal to the GFT of its filtered version.
    transform: DMatrix<f64>,
    pub spec: FilterSpec,
}

pub const LOOKBACK: usize = 3;

impl OutlierDetector {
    /// High-pass polynomial filter of order `order` on `w`.
    pub fn new(w: &Graph, order: usize) -> Result<Self> {
        let dec = frequency_order(w)?;
        let spec = design_polynomial_filter(&dec, &highpass_response(&dec), order)?;
        Ok(Self::with_spec(&dec, spec))
    }

    /// On a symmetric `W`, `V^T F(W) x = diag(F(lambda)) V^T x`.
    pub fn with_spec(dec: &SpectralDecomposition, spec: FilterSpec) -> Self {
        let mut t = dec.vectors.transpose();
        for (i, &lam) in dec.eigenvalues.iter().enumerate() {
            let r = spec.response_at(lam);
            t.row_mut(i).scale_mut(r);
        }
        OutlierDetector { transform: t, spec }
    }

    pub fn coefficients(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.transform * x
    }

    pub fn max_coefficient(&self, x: &DVector<f64>) -> f64 {
        self.coefficients(x).amax()
    }

    pub fn detect(&self, history: &[DVector<f64>]) -> Result<Vec<DayResult>> {
        if history.len() < LOOKBACK + 1 {
            return Err(Error::Parameter(format!(
                "need at least {} days, got {}",
                LOOKBACK + 1,
                history.len()
            )));
        }
        let maxes: Vec<f64> = history.iter().map(|x| self.max_coefficient(x)).collect();
        Ok((LOOKBACK..history.len())
            .map(|t| {
                let threshold = maxes[t - LOOKBACK..t].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                DayResult {
                    day: t + 1,
                    flag: maxes[t] > threshold,
                    max_gft: maxes[t],
                    threshold,
                }
            })
            .collect())
    }

    /// Counts the sensors of day `x` that would be flagged if set to `value`
    /// one at a time, given the day's GFT `coeffs` and the threshold.
    pub fn injection_hits(&self, x: &DVector<f64>, coeffs: &DVector<f64>, threshold: f64, value: f64) -> usize {
        // the transform is linear, so only column s changes
        (0..x.len())
            .filter(|&s| {
                let delta = value - x[s];
                let col = self.transform.column(s);
                coeffs
                    .iter()
                    .zip(col.iter())
                    .any(|(g, c)| (g + delta * c).abs() > threshold)
            })
            .count()
    }
}

pub fn detect_outliers(history: &[DVector<f64>], w: &Graph, spec: &FilterSpec) -> Result<Vec<DayResult>> {
    let dec = frequency_order(w)?;
    if spec.responses.len() != dec.n() {
        return Err(Error::Parameter("filter spec does not match the graph size".into()));
    }
    OutlierDetector::with_spec(&dec, spec.clone()).detect(history)
}

/// Synthetic sensor network: smooth spatial field plus seasonal cycle plus noise.
#[derive(Debug, Clone)]
pub struct SensorField {
    pub coords: Vec<[f64; 2]>,
    chol: DMatrix<f64>,
    pub field_std: f64,
    pub mean: f64,
    pub amplitude: f64,
    pub noise_std: f64,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorFieldConfig {
    pub sensors: usize,
    pub side_km: f64,
    pub length_scale_km: f64,
    pub field_std: f64,
    pub mean: f64,
    pub amplitude: f64,
    pub noise_std: f64,
    pub period_days: f64,
}

impl Default for SensorFieldConfig {
    fn default() -> Self {
        SensorFieldConfig {
            sensors: 150,
            side_km: 1000.0,
            length_scale_km: 300.0,
            field_std: 3.0,
            mean: 5.0,
            amplitude: 12.0,
            noise_std: 1.0,
            period_days: 365.0,
        }
    }
}

impl SensorField {
    pub fn new<R: Rng + ?Sized>(cfg: &SensorFieldConfig, rng: &mut R) -> Result<Self> {
        if cfg.sensors < 2 || !(cfg.length_scale_km > 0.0) || !(cfg.side_km > 0.0) {
            return Err(Error::Parameter("sensor field needs 2+ sensors and positive lengths".into()));
        }
        let coords: Vec<[f64; 2]> = (0..cfg.sensors)
            .map(|_| [rng.random::<f64>() * cfg.side_km, rng.random::<f64>() * cfg.side_km])
            .collect();
        let n = coords.len();
        let ell2 = cfg.length_scale_km * cfg.length_scale_km;
        let cov = DMatrix::from_fn(n, n, |i, j| {
            let d = planar_distance(coords[i], coords[j]);
            (-(d * d) / (2.0 * ell2)).exp() + if i == j { 1e-8 } else { 0.0 }
        });
        let chol = cov
            .cholesky()
            .ok_or_else(|| Error::Numerical("field covariance is not positive definite".into()))?
            .l();
        Ok(SensorField {
            coords,
            chol,
            field_std: cfg.field_std,
            mean: cfg.mean,
            amplitude: cfg.amplitude,
            noise_std: cfg.noise_std,
            period: cfg.period_days,
        })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// Readings of day `t` (0-based).
    pub fn day<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> DVector<f64> {
        let n = self.n();
        let g = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        let e = DVector::from_fn(n, |_, _| -> f64 { StandardNormal.sample(rng) });
        let season = self.mean + self.amplitude * (2.0 * std::f64::consts::PI * t as f64 / self.period).sin();
        (&self.chol * g) * self.field_std + e * self.noise_std + DVector::from_element(n, season)
    }

    pub fn days<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<DVector<f64>> {
        (0..count).map(|t| self.day(t, rng)).collect()
    }
}

/// `L = -T^{-1/2} W T^{-1/2}` with `T` the degree matrix; isolated nodes get zero rows.
pub fn translated_normalized_laplacian(w: &Graph) -> Result<DMatrix<f64>> {
    if !w.is_symmetric() {
        return Err(Error::Domain("Laplacian needs a symmetric graph".into()));
    }
    if w.adj().iter().any(|v| *v < 0.0) {
        return Err(Error::Domain("Laplacian needs nonnegative weights".into()));
    }
    let n = w.n();
    let t: Vec<f64> = (0..n)
        .map(|i| {
            let d = w.adj().row(i).sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| -(t[i] * t[j]) * w.adj()[(i, j)]))
}

/// Stopping rule of the GARMA recursions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recursion {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for Recursion {
    fn default() -> Self {
        Recursion {
            tol: 1e-10,
            max_iters: 10_000,
        }
    }
}

const DIVERGENCE_STEPS: usize = 10;

/// Steady state of `y <- phi L y + psi x` from `y = 0`.
///
/// Stops when `||y_{t+1} - y_t||` drops below `tol / 10` times the smaller of
/// `||y_{t+1}||` and `||psi x||`. The step is the fixed-point residual of
/// `y_t`, so the returned state is within `tol ||psi x||` of the fixed point
/// whenever `|phi| rho(L) <= 0.9`. The step size of a convergent recursion
/// shrinks geometrically, so ten consecutive growing steps are reported as
/// divergence.
pub fn garma1_state(l: &DMatrix<f64>, phi: f64, psi: f64, x: &DVector<f64>, rec: Recursion) -> Result<DVector<f64>> {
    if l.nrows() != x.len() || !l.is_square() {
        return Err(Error::Parameter("shift matrix and signal sizes differ".into()));
    }
    let mut y = DVector::zeros(x.len());
    let drive = psi.abs() * x.norm();
    let mut last_step = f64::INFINITY;
    let mut growing = 0;
    for _ in 0..rec.max_iters {
        let mut next = l * &y * phi;
        next.axpy(psi, x, 1.0);
        let step = (&next - &y).norm();
        let size = next.norm();
        if !step.is_finite() {
            return Err(Error::Instability("non-finite GARMA state".into()));
        }
        y = next;
        if step <= 0.1 * rec.tol * size.min(drive) {
            return Ok(y);
        }
        if step > last_step {
            growing += 1;
            if growing >= DIVERGENCE_STEPS {
                return Err(Error::Instability(format!(
                    "GARMA(1) with phi = {phi} keeps growing"
                )));
            }
        } else {
            growing = 0;
        }
        last_step = step;
    }
    Err(Error::Numerical(format!(
        "GARMA(1) with phi = {phi} did not converge in {} iterations",
        rec.max_iters
    )))
}

/// `y_inf + c x`.
pub fn garma1_run(
    l: &DMatrix<f64>,
    phi: f64,
    psi: f64,
    c: f64,
    x: &DVector<f64>,
    rec: Recursion,
) -> Result<DVector<f64>> {
    let mut z = garma1_state(l, phi, psi, x, rec)?;
    z.axpy(c, x, 1.0);
    Ok(z)
}

/// Parallel GARMA(1) branches with a common feedthrough:
/// `r(lambda) = c + sum_k psi_k / (1 - phi_k lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarmaSpec {
    pub phis: Vec<f64>,
    pub psis: Vec<f64>,
    pub c: f64,
    #[serde(default)]
    pub recursion: Recursion,
    /// Sum of squared response errors of the design.
    #[serde(default)]
    pub residual: f64,
}

impl GarmaSpec {
    pub fn order(&self) -> usize {
        self.phis.len()
    }

    pub fn response(&self, lambda: f64) -> f64 {
        self.c
            + self
                .phis
                .iter()
                .zip(&self.psis)
                .map(|(p, s)| s / (1.0 - p * lambda))
                .sum::<f64>()
    }
}

pub fn garma_k_run(l: &DMatrix<f64>, spec: &GarmaSpec, x: &DVector<f64>) -> Result<DVector<f64>> {
    let mut z = x * spec.c;
    for (&phi, &psi) in spec.phis.iter().zip(&spec.psis) {
        z += garma1_state(l, phi, psi, x, spec.recursion)?;
    }
    Ok(z)
}

/// Bound on the feedback coefficients of designed filters.
pub const PHI_BOUND: f64 = 0.99;
/// Random starting points per design.
pub const DESIGN_STARTS: usize = 8;

struct LinearFit {
    phis: Vec<f64>,
    coef: DVector<f64>,
    residual: DVector<f64>,
    cost: f64,
}

fn rational_basis(lams: &[f64], phis: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(lams.len(), phis.len() + 1, |i, k| {
        if k == 0 {
            1.0
        } else {
            1.0 / (1.0 - phis[k - 1] * lams[i])
        }
    })
}

/// Singular values below this fraction of the largest are dropped in the
/// inner least squares. Clustered poles otherwise buy tiny residual gains
/// with branch weights near 1e10 that the recursions cannot realize.
const LINEAR_RTOL: f64 = 1e-7;

/// Inner linear solve of the variable projection: best `c`, `psi` for fixed `phi`.
/// Also returns an orthonormal basis of the range of the rational basis matrix.
fn linear_fit(lams: &[f64], target: &DVector<f64>, phis: &[f64]) -> Result<(LinearFit, DMatrix<f64>)> {
    let m = rational_basis(lams, phis);
    let qr = m.clone().qr();
    let r = qr.r();
    let rmax = r.diagonal().amax();
    let (coef, basis) = if r.diagonal().iter().all(|d| d.abs() > 10.0 * LINEAR_RTOL * rmax) {
        let q = qr.q();
        let coef = r
            .solve_upper_triangular(&q.tr_mul(target))
            .ok_or_else(|| Error::Numerical("GARMA linear fit: singular triangular factor".into()))?;
        (coef, q)
    } else {
        // nearly coincident poles: minimum-norm solution on the numerical range
        let svd = m.clone().svd(true, true);
        let smax = svd.singular_values.iter().fold(0.0f64, |a, s| a.max(*s));
        let tol = LINEAR_RTOL * smax;
        let coef = svd
            .solve(target, tol)
            .map_err(|e| Error::Numerical(format!("GARMA linear fit: {e}")))?;
        let u = svd.u.expect("left singular vectors requested");
        let cols: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&k| svd.singular_values[k] > tol)
            .collect();
        (coef, DMatrix::from_fn(u.nrows(), cols.len(), |i, j| u[(i, cols[j])]))
    };
    let residual = &m * &coef - target;
    let cost = residual.norm_squared();
    Ok((
        LinearFit {
            phis: phis.to_vec(),
            coef,
            residual,
            cost,
        },
        basis,
    ))
}

/// Projected Levenberg-Marquardt on the feedback coefficients, with the
/// Kaufman approximation of the variable-projection Jacobian.
fn refine(lams: &[f64], target: &DVector<f64>, start: Vec<f64>) -> Result<LinearFit> {
    let k = start.len();
    let (mut fit, mut basis) = linear_fit(lams, target, &start)?;
    let mut mu = 1e-3;
    for _ in 0..300 {
        if fit.cost <= 1e-30 {
            break;
        }
        // J_k = (I - P) d(M c)/d phi_k
        let mut jac = DMatrix::zeros(lams.len(), k);
        for j in 0..k {
            let (phi, cj) = (fit.phis[j], fit.coef[j + 1]);
            let d = DVector::from_iterator(
                lams.len(),
                lams.iter().map(|&l| cj * l / (1.0 - phi * l).powi(2)),
            );
            let proj = &basis * basis.tr_mul(&d);
            jac.set_column(j, &(d - proj));
        }
        let jtj = jac.tr_mul(&jac);
        let g = jac.tr_mul(&fit.residual);
        if g.amax() <= 1e-12 * (1.0 + fit.cost) {
            break;
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for d in 0..k {
                a[(d, d)] += mu * (jtj[(d, d)] + 1e-12);
            }
            let Some(chol) = a.cholesky() else {
                mu *= 10.0;
                continue;
            };
            let step = chol.solve(&(-&g));
            let trial: Vec<f64> = fit
                .phis
                .iter()
                .zip(step.iter())
                .map(|(p, s)| (p + s).clamp(-PHI_BOUND, PHI_BOUND))
                .collect();
            let (cand, cand_basis) = linear_fit(lams, target, &trial)?;
            if cand.cost < fit.cost {
                let gain = fit.cost - cand.cost;
                fit = cand;
                basis = cand_basis;
                mu = (mu / 3.0).max(1e-12);
                improved = gain > 1e-7 * fit.cost;
                if !improved {
                    return Ok(fit);
                }
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    Ok(fit)
}

fn into_spec(fit: LinearFit) -> GarmaSpec {
    GarmaSpec {
        phis: fit.phis,
        psis: fit.coef.iter().skip(1).copied().collect(),
        c: fit.coef[0],
        recursion: Recursion::default(),
        residual: fit.cost,
    }
}

fn check_design_inputs(lams: &[f64], target: &[f64], order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::Parameter("GARMA order must be at least 1".into()));
    }
    if lams.len() != target.len() || lams.is_empty() {
        return Err(Error::Parameter("eigenvalues and targets must have equal nonzero length".into()));
    }
    if lams.iter().chain(target).any(|v| !v.is_finite()) {
        return Err(Error::Parameter("design inputs must be finite".into()));
    }
    Ok(())
}

fn best_of_starts<R: Rng + ?Sized>(
    lams: &[f64],
    target: &DVector<f64>,
    order: usize,
    warm: Option<&[f64]>,
    rng: &mut R,
) -> Result<LinearFit> {
    let mut starts: Vec<Vec<f64>> = (0..DESIGN_STARTS)
        .map(|_| (0..order).map(|_| rng.random_range(-PHI_BOUND..=PHI_BOUND)).collect())
        .collect();
    if let Some(prev) = warm {
        // previous optimum plus fresh poles; zero weights on those reproduce it
        let mut s = prev.to_vec();
        while s.len() < order {
            s.push(rng.random_range(-PHI_BOUND..=PHI_BOUND));
        }
        starts.push(s);
    }
    let mut best: Option<LinearFit> = None;
    for s in starts {
        let fit = refine(lams, target, s)?;
        if best.as_ref().is_none_or(|b| fit.cost < b.cost) {
            best = Some(fit);
        }
    }
    let best = best.expect("at least one start");
    if !best.cost.is_finite() {
        return Err(Error::Design {
            message: format!("no finite GARMA({order}) fit"),
            residual: best.cost,
        });
    }
    Ok(best)
}

/// Fits `c + sum_k psi_k / (1 - phi_k lambda)` to `target` at `lams` by
/// least squares with `|phi_k| <= 0.99`, from several random starts.
pub fn garma_k_design<R: Rng + ?Sized>(lams: &[f64], target: &[f64], order: usize, rng: &mut R) -> Result<GarmaSpec> {
    check_design_inputs(lams, target, order)?;
    let t = DVector::from_column_slice(target);
    Ok(into_spec(best_of_starts(lams, &t, order, None, rng)?))
}

/// Designs several orders (ascending), warm-starting each from the previous
/// optimum so the residual cannot increase with the order.
pub fn design_orders<R: Rng + ?Sized>(lams: &[f64], target: &[f64], orders: &[usize], rng: &mut R) -> Result<Vec<GarmaSpec>> {
    if orders.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Parameter("orders must be ascending".into()));
    }
    let t = DVector::from_column_slice(target);
    let mut out = Vec::with_capacity(orders.len());
    let mut prev: Option<Vec<f64>> = None;
    for &order in orders {
        check_design_inputs(lams, target, order)?;
        let fit = best_of_starts(lams, &t, order, prev.as_deref(), rng)?;
        prev = Some(fit.phis.clone());
        out.push(into_spec(fit));
    }
    Ok(out)
}

/// `||z_e - z_d|| / sqrt(N)`.
pub fn filter_rmse(ze: &DVector<f64>, zd: &DVector<f64>) -> Result<f64> {
    if ze.len() != zd.len() || ze.is_empty() {
        return Err(Error::Parameter("signals must have equal nonzero length".into()));
    }
    Ok((ze - zd).norm() / (ze.len() as f64).sqrt())
}
