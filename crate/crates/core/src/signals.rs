//! GMA graph signals, graph autocovariance and autocorrelation, and the
//! closed-form expected autocorrelation of a GMA(1) signal on an ER graph
//! observed through an M2-perturbed adjacency matrix.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{check_probability, Error, Result};
use crate::graph::Graph;

/// `z = y + sum_l theta_l A^l y` with `y ~ N(0, sigma_y2 I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GmaModel {
    pub thetas: Vec<f64>,
    pub sigma_y2: f64,
}

impl GmaModel {
    pub fn new(thetas: Vec<f64>, sigma_y2: f64) -> Result<Self> {
        if !(sigma_y2 > 0.0) || !sigma_y2.is_finite() {
            return Err(Error::Parameter(format!("sigma_y2 must be positive, got {sigma_y2}")));
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::Parameter("MA coefficients must be finite".into()));
        }
        Ok(GmaModel { thetas, sigma_y2 })
    }

    pub fn gma1(theta: f64) -> Self {
        GmaModel {
            thetas: vec![theta],
            sigma_y2: 1.0,
        }
    }

    pub fn order(&self) -> usize {
        self.thetas.len()
    }
}

/// Draws the innovation and returns the GMA signal.
pub fn gma_generate<R: Rng + ?Sized>(a: &Graph, model: &GmaModel, rng: &mut R) -> Result<DVector<f64>> {
    let normal = Normal::new(0.0, model.sigma_y2.sqrt())
        .map_err(|e| Error::Parameter(format!("innovation variance: {e}")))?;
    let y = DVector::from_fn(a.n(), |_, _| normal.sample(rng));
    Ok(gma_filter(a, &model.thetas, &y))
}

/// `y + sum_l theta_l A^l y` for a given innovation.
pub fn gma_filter(a: &Graph, thetas: &[f64], y: &DVector<f64>) -> DVector<f64> {
    let mut z = y.clone();
    let mut power = y.clone();
    for &theta in thetas {
        power = a.apply(&power);
        z.axpy(theta, &power, 1.0);
    }
    z
}

fn centered(z: &DVector<f64>) -> DVector<f64> {
    let mean = z.mean();
    z.map(|v| v - mean)
}

fn check_lag(n: usize, len: usize, k: usize) -> Result<()> {
    if len != n {
        return Err(Error::Parameter(format!("signal has length {len}, graph has {n} nodes")));
    }
    if k >= n {
        return Err(Error::Parameter(format!("lag {k} must be below the node count {n}")));
    }
    Ok(())
}

/// `z^T W^k z / (N - k)` of the centered signal.
pub fn graph_autocovariance(z: &DVector<f64>, w: &Graph, k: usize) -> Result<f64> {
    check_lag(w.n(), z.len(), k)?;
    let zc = centered(z);
    let wz = w.apply_power(&zc, k);
    Ok(zc.dot(&wz) / (w.n() - k) as f64)
}

/// `z^T W^k z / (||z|| ||W^k z||)` of the centered signal; lies in `[-1, 1]`.
pub fn graph_autocorrelation(z: &DVector<f64>, w: &Graph, k: usize) -> Result<f64> {
    check_lag(w.n(), z.len(), k)?;
    let zc = centered(z);
    let wz = w.apply_power(&zc, k);
    let denom = zc.norm() * wz.norm();
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::Degenerate(
            "zero signal norm or zero graph-shifted norm".into(),
        ));
    }
    Ok((zc.dot(&wz) / denom).clamp(-1.0, 1.0))
}

/// Setting of the expected-autocorrelation formula: GMA(1) with coefficient
/// `theta` on a directed ER(`alpha`) graph, observed through M2(`eps1`, `eps2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutocorrTheoryParams {
    pub n: usize,
    pub alpha: f64,
    pub theta: f64,
    pub eps1: f64,
    pub eps2: f64,
}

impl AutocorrTheoryParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Parameter(format!("need n >= 2, got {}", self.n)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !self.theta.is_finite() {
            return Err(Error::Parameter("theta must be finite".into()));
        }
        check_probability("eps1", self.eps1)?;
        check_probability("eps2", self.eps2)
    }
}

/// Scale `a` of the true graph, scale `w` of the observed graph and the
/// innovation variance making the three normalized signal energies one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaling {
    pub a: f64,
    pub w: f64,
    pub sigma_y2: f64,
}

/// Coefficients, highest degree first, of the polynomial in `a` obtained by
/// dividing the two energy equations.
fn scaling_quartic(n: f64, alpha: f64, theta: f64) -> [f64; 5] {
    let v = alpha - alpha * alpha;
    [
        (alpha * alpha - alpha.powi(3)) * theta * theta * n * n,
        -2.0 * alpha * alpha * theta * n,
        v * n - v * theta * theta * n,
        2.0 * alpha * theta,
        -1.0,
    ]
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Smallest positive root of a polynomial with `p(0) < 0`, by geometric
/// bracketing and bisection to `1e-12` relative width.
fn smallest_positive_root(c: &[f64]) -> Option<f64> {
    let mut lo = 0.0;
    let mut hi = 1e-9;
    while horner(c, hi) < 0.0 {
        lo = hi;
        hi *= 1.05;
        if hi > 1e12 {
            return None;
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if horner(c, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Normalized energy `(1/N) E||z||^2` of the centered GMA(1) signal built on `a A`.
pub fn expected_signal_energy(n: usize, alpha: f64, theta: f64, a: f64, sigma_y2: f64) -> f64 {
    let nf = n as f64;
    sigma_y2 * ((alpha - alpha * alpha) * theta * theta * a * a * nf - 2.0 * alpha * theta * a + 1.0)
}

/// Normalized energy `(1/N) E||a A z||^2`.
pub fn shifted_energy(n: usize, alpha: f64, theta: f64, a: f64, sigma_y2: f64) -> f64 {
    let n = n as f64;
    sigma_y2
        * ((alpha * alpha - alpha.powi(3)) * theta * theta * a.powi(4) * n * n
            - 2.0 * alpha * alpha * theta * a.powi(3) * n
            + (alpha - alpha * alpha) * a * a * n)
}

/// Solves the energy equations for `a` and `sigma_y2`, then evaluates `w`.
pub fn solve_scaling(p: &AutocorrTheoryParams) -> Result<Scaling> {
    p.validate()?;
    let n = p.n as f64;
    let (al, th, e1, e2) = (p.alpha, p.theta, p.eps1, p.eps2);
    let quartic = scaling_quartic(n, al, th);
    let a = smallest_positive_root(&quartic)
        .ok_or_else(|| Error::Numerical("no positive root for the graph scale a".into()))?;
    let energy = expected_signal_energy(p.n, al, th, a, 1.0);
    if !(energy > 0.0) {
        return Err(Error::Numerical(format!(
            "signal energy factor {energy} is not positive at a = {a}"
        )));
    }
    let sigma_y2 = 1.0 / energy;

    let e = e1 + e2 - 1.0;
    let ta2 = th * th * a * a;
    let t = -al.powi(3) * n * n * ta2 * e * e
        + al * al * n * n * ta2 * (1.0 - e1 + e2 * (2.0 * (e1 + e2) - 3.0))
        + al * n * n * ta2 * (e2 - e2 * e2)
        + al * al * n * (ta2 * e - e * e)
        + al * n * (1.0 - e1 + e2 * (2.0 * (e1 + e2) - ta2 - 3.0))
        + n * (e2 - e2 * e2)
        + al * e
        - e2;
    let st = sigma_y2 * t;
    if !(st > 0.0) {
        return Err(Error::Numerical(format!(
            "observed-graph energy factor {st} is not positive"
        )));
    }
    Ok(Scaling {
        a,
        w: st.powf(-0.5),
        sigma_y2,
    })
}

/// Approximate expected lag-1 graph autocorrelation under M2.
pub fn expected_autocorrelation(p: &AutocorrTheoryParams) -> Result<f64> {
    if p.eps1 == 1.0 && p.eps2 == 0.0 {
        // every edge removed: W = 0 and both terms vanish, while w is undefined
        p.validate()?;
        return Ok(0.0);
    }
    let s = solve_scaling(p)?;
    Ok(autocorrelation_from_scaling(p, &s))
}

pub fn autocorrelation_from_scaling(p: &AutocorrTheoryParams, s: &Scaling) -> f64 {
    let n = p.n as f64;
    let al = p.alpha;
    s.sigma_y2 * (p.theta * s.a * s.w * n * (al - al * al) - al * s.w) * (1.0 - p.eps1 - p.eps2)
        - s.w * p.eps2
}
