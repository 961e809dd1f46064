//! GraDe separation with a perturbed adjacency matrix: the MD-index ratio grid.

use serde::{Deserialize, Serialize};

use super::{check_probs, mean_se, par_reps, ExperimentConfig, Study, SHARED};
use crate::error::{Error, Result};
use crate::error_models::perturb_m2;
use crate::ica::{gma_sources, grade, md_index_squared, random_mixing, MD_MAX_DIM};
use crate::models::erdos_renyi;
use crate::rng::cell_stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study4Params {
    pub n: usize,
    /// One or more graph densities; more than one gives the density sweep.
    pub alphas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub lags: usize,
    pub eps1: Vec<f64>,
    pub eps2: Vec<f64>,
    pub reps: usize,
}

impl Study4Params {
    pub fn paper() -> Self {
        Study4Params {
            n: 1000,
            alphas: vec![0.05],
            thetas: vec![0.0, 0.2, 0.4, 0.6],
            lags: 1,
            eps1: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            eps2: vec![0.0, 0.01, 0.02, 0.03, 0.04, 0.05],
            reps: 1000,
        }
    }

    pub fn desk() -> Self {
        Study4Params {
            n: 500,
            reps: 200,
            ..Self::paper()
        }
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.expect(Study::Grade)?;
        let base = if cfg.desk() { Self::desk() } else { Self::paper() };
        let alphas = match (&cfg.grid.alpha, cfg.alpha) {
            (Some(_), Some(_)) => return Err(Error::Config("give either alpha or grid.alpha".into())),
            (Some(list), None) => list.clone(),
            (None, Some(a)) => vec![a],
            (None, None) => base.alphas,
        };
        let p = Study4Params {
            n: cfg.n.unwrap_or(base.n),
            alphas,
            thetas: cfg.theta.clone().unwrap_or(base.thetas),
            lags: cfg.lags.unwrap_or(base.lags),
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
        check_probs("alpha", &self.alphas)?;
        let p = self.thetas.len();
        if !(2..=MD_MAX_DIM).contains(&p) {
            return Err(Error::Config(format!("need 2..={MD_MAX_DIM} sources, got {p}")));
        }
        if self.lags == 0 || self.lags >= self.n {
            return Err(Error::Config("lags must lie in 1..n".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        Ok(())
    }

    /// `(0, 0)` first, since it is the benchmark, then the grid in row order.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0)];
        for &e1 in &self.eps1 {
            for &e2 in &self.eps2 {
                if (e1, e2) != (0.0, 0.0) {
                    out.push((e1, e2));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study4RepRow {
    pub rep: u64,
    pub alpha: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub md2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study4Row {
    pub alpha: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub md2_mean: f64,
    pub md2_se: f64,
    /// `mean D^2(A) / mean D^2(W)`.
    pub ratio_hat: f64,
    /// Delta-method standard error of the ratio, using the pairing of repetitions.
    pub ratio_se: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study4Output {
    pub reps: Vec<Study4RepRow>,
    pub grid: Vec<Study4Row>,
}

/// Ratio of means with a paired delta-method standard error.
pub fn ratio_with_se(num: &[f64], den: &[f64]) -> (f64, f64) {
    let n = num.len() as f64;
    let (m1, _) = mean_se(num);
    let (m2, _) = mean_se(den);
    let r = m1 / m2;
    if num.len() < 2 {
        return (r, f64::NAN);
    }
    // residuals of the linearized ratio
    let var = num
        .iter()
        .zip(den)
        .map(|(a, b)| ((a - m1) - r * (b - m2)).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    (r, (var / n).sqrt() / m2)
}

/// Per repetition and density: one ER graph `A`, GMA(1) sources on `A`
/// normalized by its degree spread, a Gaussian mixing matrix, and a fresh
/// M2 perturbation of `A` for each cell. Every cell sees the same data.
pub fn study4(p: &Study4Params, seed: u64) -> Result<Study4Output> {
    p.validate()?;
    let cells = p.cells();
    let mut reps_out = Vec::new();
    let mut grid = Vec::new();
    for (ai, &alpha) in p.alphas.iter().enumerate() {
        let scale = 1.0 / (p.n as f64 * alpha * (1.0 - alpha)).sqrt();
        let offset = (ai * cells.len()) as u64;
        let per_rep = par_reps(p.reps, |rep| {
            let mut rng = cell_stream(seed, SHARED - ai as u64, rep);
            let a = erdos_renyi(p.n, alpha, false, &mut rng)?;
            let z = gma_sources(&a, &p.thetas, scale, &mut rng);
            let omega = random_mixing(p.thetas.len(), &mut rng);
            let x = &omega * z;
            cells
                .iter()
                .enumerate()
                .map(|(ci, &(e1, e2))| {
                    let est = if (e1, e2) == (0.0, 0.0) {
                        grade(&x, &a, p.lags)?
                    } else {
                        let mut rng = cell_stream(seed, offset + ci as u64, rep);
                        grade(&x, &perturb_m2(&a, e1, e2, &mut rng)?, p.lags)?
                    };
                    md_index_squared(&est.gamma, &omega)
                })
                .collect::<Result<Vec<f64>>>()
        })?;
        for (rep, row) in per_rep.iter().enumerate() {
            for (&(e1, e2), &md2) in cells.iter().zip(row) {
                reps_out.push(Study4RepRow {
                    rep: rep as u64,
                    alpha,
                    eps1: e1,
                    eps2: e2,
                    md2,
                });
            }
        }
        let base: Vec<f64> = per_rep.iter().map(|r| r[0]).collect();
        for (ci, &(e1, e2)) in cells.iter().enumerate() {
            let values: Vec<f64> = per_rep.iter().map(|r| r[ci]).collect();
            let (md2_mean, md2_se) = mean_se(&values);
            let (ratio_hat, ratio_se) = ratio_with_se(&base, &values);
            grid.push(Study4Row {
                alpha,
                eps1: e1,
                eps2: e2,
                md2_mean,
                md2_se,
                ratio_hat,
                ratio_se,
                reps: p.reps,
            });
        }
    }
    Ok(Study4Output { reps: reps_out, grid })
}
