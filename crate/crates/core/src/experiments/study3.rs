//! GARMA low-pass filters designed on a perturbed geometric graph.

use nalgebra::{DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{check_probs, mean_se, par_reps, ExperimentConfig, Study, SHARED};
use crate::error::{Error, Result};
use crate::error_models::perturb_m2;
use crate::filters::{design_orders, filter_rmse, translated_normalized_laplacian};
use crate::graph::Graph;
use crate::models::random_geometric;
use crate::rng::cell_stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study3Params {
    pub n: usize,
    pub radius: f64,
    pub noise_var: f64,
    /// Ascending GARMA orders.
    pub orders: Vec<usize>,
    /// Edge-removal sweep, run with `eps2 = 0`.
    pub eps1: Vec<f64>,
    /// Edge-addition sweep, run with `eps1 = 0`.
    pub eps2: Vec<f64>,
    pub reps: usize,
}

impl Study3Params {
    pub fn paper() -> Self {
        Study3Params {
            n: 100,
            radius: 0.15 * 2f64.sqrt(),
            noise_var: 0.1,
            orders: vec![1, 3, 5, 7],
            eps1: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            eps2: vec![0.0, 0.02, 0.04, 0.06, 0.08, 0.1],
            reps: 2000,
        }
    }

    pub fn desk() -> Self {
        Study3Params {
            reps: 200,
            ..Self::paper()
        }
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.expect(Study::GarmaFilter)?;
        let base = if cfg.desk() { Self::desk() } else { Self::paper() };
        let p = Study3Params {
            n: cfg.n.unwrap_or(base.n),
            radius: cfg.radius.unwrap_or(base.radius),
            noise_var: cfg.noise_var.unwrap_or(base.noise_var),
            orders: cfg.grid.k.clone().unwrap_or(base.orders),
            eps1: cfg.grid.eps1.clone().unwrap_or(base.eps1),
            eps2: cfg.grid.eps2.clone().unwrap_or(base.eps2),
            reps: cfg.reps.unwrap_or(base.reps),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_probs("eps1", &self.eps1)?;
        check_probs("eps2", &self.eps2)?;
        if self.orders.is_empty() || self.orders.contains(&0) || self.orders.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("GARMA orders must be positive and strictly ascending".into()));
        }
        if self.n < 2 || !(self.radius > 0.0) || !(self.noise_var >= 0.0) {
            return Err(Error::Config("need n >= 2, positive radius, nonnegative noise".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        Ok(())
    }

    /// The `eps1` sweep followed by the `eps2` sweep; `(0, 0)` appears once.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = self.eps1.iter().map(|&e| (e, 0.0)).collect();
        for &e in &self.eps2 {
            if !out.contains(&(0.0, e)) {
                out.push((0.0, e));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study3Row {
    pub eps1: f64,
    pub eps2: f64,
    pub order: usize,
    pub sigma_mean: f64,
    pub sigma_se: f64,
    pub reps: usize,
    /// Repetitions whose filter design failed; they are left out of the mean.
    pub failures: usize,
}

/// `sigma_e` per order for one observed graph `w`. The filters are designed
/// on the spectrum of the Laplacian of `w` and evaluated in its eigenbasis,
/// which is where the converged recursions land.
pub fn sigma_errors<R: Rng + ?Sized>(
    w: &Graph,
    x: &DVector<f64>,
    zd: &DVector<f64>,
    orders: &[usize],
    rng: &mut R,
) -> Result<Vec<f64>> {
    let lw = translated_normalized_laplacian(w)?;
    let eig = SymmetricEigen::new(lw);
    let lams: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let target: Vec<f64> = lams.iter().map(|&l| if l < 0.0 { 1.0 } else { 0.0 }).collect();
    let specs = design_orders(&lams, &target, orders, rng)?;
    let xhat = eig.eigenvectors.tr_mul(x);
    specs
        .iter()
        .map(|spec| {
            let y = DVector::from_fn(lams.len(), |i, _| spec.response(lams[i]) * xhat[i]);
            filter_rmse(&(&eig.eigenvectors * y), zd)
        })
        .collect()
}

/// Noisy low-frequency signal on a fresh geometric graph, and its ideal
/// low-pass output.
pub struct GarmaScene {
    pub graph: Graph,
    pub x: DVector<f64>,
    pub ideal: DVector<f64>,
}

impl GarmaScene {
    pub fn draw<R: Rng + ?Sized>(p: &Study3Params, rng: &mut R) -> Result<Self> {
        let graph = random_geometric(p.n, p.radius, rng)?.graph;
        let eig = SymmetricEigen::new(translated_normalized_laplacian(&graph)?);
        let low = eig.eigenvalues.map(|l| if l < 0.0 { 1.0 } else { 0.0 });
        let xbar = &eig.eigenvectors * &low;
        let sd = p.noise_var.sqrt();
        let x = DVector::from_fn(p.n, |i, _| {
            let e: f64 = StandardNormal.sample(rng);
            xbar[i] + sd * e
        });
        let coeffs = eig.eigenvectors.tr_mul(&x).component_mul(&low);
        let ideal = &eig.eigenvectors * coeffs;
        Ok(GarmaScene { graph, x, ideal })
    }
}

pub fn study3(p: &Study3Params, seed: u64) -> Result<Vec<Study3Row>> {
    p.validate()?;
    let cells = p.cells();
    let per_rep = par_reps(p.reps, |rep| {
        let scene = GarmaScene::draw(p, &mut cell_stream(seed, SHARED, rep))?;
        cells
            .iter()
            .enumerate()
            .map(|(ci, &(e1, e2))| {
                let mut rng = cell_stream(seed, ci as u64, rep);
                let w = perturb_m2(&scene.graph, e1, e2, &mut rng)?;
                match sigma_errors(&w, &scene.x, &scene.ideal, &p.orders, &mut rng) {
                    Ok(s) => Ok(Some(s)),
                    Err(e) if e.is_numerical() => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<Option<Vec<f64>>>>>()
    })?;
    let mut rows = Vec::new();
    for (ci, &(e1, e2)) in cells.iter().enumerate() {
        for (k, &order) in p.orders.iter().enumerate() {
            let values: Vec<f64> = per_rep.iter().filter_map(|r| r[ci].as_ref().map(|s| s[k])).collect();
            let (sigma_mean, sigma_se) = mean_se(&values);
            rows.push(Study3Row {
                eps1: e1,
                eps2: e2,
                order,
                sigma_mean,
                sigma_se,
                reps: p.reps,
                failures: p.reps - values.len(),
            });
        }
    }
    Ok(rows)
}
