//! Expected graph autocorrelation under M2: theory against simulation.

use nalgebra::DVector;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{check_probs, mean_se, par_reps, ExperimentConfig, Study, SHARED};
use crate::error::{Error, Result};
use crate::error_models::perturb_m2;
use crate::models::erdos_renyi;
use crate::rng::cell_stream;
use crate::signals::{expected_autocorrelation, gma_filter, graph_autocorrelation, solve_scaling, AutocorrTheoryParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study1Params {
    pub n: usize,
    pub alpha: f64,
    pub theta: f64,
    pub eps1: Vec<f64>,
    pub eps2: Vec<f64>,
    pub reps: usize,
}

impl Study1Params {
    pub fn paper() -> Self {
        Study1Params {
            n: 500,
            alpha: 0.05,
            theta: 0.5,
            eps1: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            eps2: vec![0.0, 0.02, 0.04, 0.06],
            reps: 2000,
        }
    }

    pub fn desk() -> Self {
        Study1Params {
            n: 250,
            reps: 200,
            ..Self::paper()
        }
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.expect(Study::Autocorr)?;
        let base = if cfg.desk() { Self::desk() } else { Self::paper() };
        let theta = match cfg.theta.as_deref() {
            None => base.theta,
            Some([t]) => *t,
            Some(_) => return Err(Error::Config("study 1 takes a single theta".into())),
        };
        let p = Study1Params {
            n: cfg.n.unwrap_or(base.n),
            alpha: cfg.alpha.unwrap_or(base.alpha),
            theta,
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
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        self.theory(0.0, 0.0)
            .map(|_| ())
            .map_err(|e| Error::Config(e.to_string()))
    }

    fn theory_params(&self, eps1: f64, eps2: f64) -> AutocorrTheoryParams {
        AutocorrTheoryParams {
            n: self.n,
            alpha: self.alpha,
            theta: self.theta,
            eps1,
            eps2,
        }
    }

    pub fn theory(&self, eps1: f64, eps2: f64) -> Result<f64> {
        expected_autocorrelation(&self.theory_params(eps1, eps2))
    }

    /// Grid cells in row order: `eps2` outer, `eps1` inner.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.eps2
            .iter()
            .flat_map(|&e2| self.eps1.iter().map(move |&e1| (e1, e2)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study1Row {
    pub eps1: f64,
    pub eps2: f64,
    pub theory: f64,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub reps: usize,
}

/// Each repetition draws one directed ER graph and one GMA(1) signal, then
/// an independent M2 perturbation per cell.
pub fn study1(p: &Study1Params, seed: u64) -> Result<Vec<Study1Row>> {
    p.validate()?;
    let scaling = solve_scaling(&p.theory_params(0.0, 0.0))?;
    let normal = Normal::new(0.0, scaling.sigma_y2.sqrt())
        .map_err(|e| Error::Parameter(format!("innovation variance: {e}")))?;
    let cells = p.cells();
    let per_rep = par_reps(p.reps, |rep| {
        let mut rng = cell_stream(seed, SHARED, rep);
        let a = erdos_renyi(p.n, p.alpha, true, &mut rng)?;
        let y = DVector::from_fn(p.n, |_, _| normal.sample(&mut rng));
        let z = gma_filter(&a.scaled(scaling.a), &[p.theta], &y);
        cells
            .iter()
            .enumerate()
            .map(|(ci, &(e1, e2))| {
                let mut rng = cell_stream(seed, ci as u64, rep);
                let w = perturb_m2(&a, e1, e2, &mut rng)?;
                graph_autocorrelation(&z, &w, 1)
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    cells
        .iter()
        .enumerate()
        .map(|(ci, &(e1, e2))| {
            let values: Vec<f64> = per_rep.iter().map(|r| r[ci]).collect();
            let (mc_mean, mc_se) = mean_se(&values);
            Ok(Study1Row {
                eps1: e1,
                eps2: e2,
                theory: p.theory(e1, e2)?,
                mc_mean,
                mc_se,
                reps: p.reps,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rep_smoke_run() {
        let p = Study1Params {
            n: 100,
            eps1: vec![0.0, 0.5],
            eps2: vec![0.0],
            reps: 1,
            ..Study1Params::paper()
        };
        let rows = study1(&p, 4).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.mc_mean.is_finite() && r.mc_se.is_nan()));
        assert!(rows[0].theory > rows[1].theory);
    }

    #[test]
    fn desk_preset_and_overrides() {
        let mut cfg = ExperimentConfig::new(Study::Autocorr);
        cfg.scale = super::super::Scale::Desk;
        assert_eq!(Study1Params::from_config(&cfg).unwrap(), Study1Params::desk());
        cfg.reps = Some(7);
        cfg.theta = Some(vec![0.3]);
        let p = Study1Params::from_config(&cfg).unwrap();
        assert_eq!((p.reps, p.theta, p.n), (7, 0.3, 250));
        cfg.theta = Some(vec![0.3, 0.1]);
        assert!(Study1Params::from_config(&cfg).is_err());
        cfg.theta = None;
        cfg.grid.eps1 = Some(vec![1.5]);
        assert!(matches!(Study1Params::from_config(&cfg), Err(Error::Config(_))));
    }
}
