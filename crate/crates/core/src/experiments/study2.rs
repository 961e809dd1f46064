//! High-pass outlier detection on a synthetic sensor network with a
//! perturbed k-NN graph.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_probs, mean_se, par_reps, ExperimentConfig, Study};
use crate::error::{Error, Result};
use crate::error_models::{perturb_m3w, ErrorPartition, VarianceMode, WeightOptions, WeightSource};
use crate::filters::{OutlierDetector, SensorField, SensorFieldConfig, LOOKBACK};
use crate::graph::Graph;
use crate::models::{KnnWeights, Metric};
use crate::rng::{cell_stream, stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study2Params {
    pub field: SensorFieldConfig,
    pub knn: usize,
    pub knn_scale_km: f64,
    pub filter_order: usize,
    /// Pairs farther apart than this are never rewired.
    pub threshold_km: f64,
    pub outlier_value: f64,
    pub days: usize,
    pub eps1: Vec<f64>,
    pub eps2: Vec<f64>,
    pub c: Vec<f64>,
    pub reps: usize,
}

impl Study2Params {
    pub fn paper() -> Self {
        Study2Params {
            field: SensorFieldConfig::default(),
            knn: 6,
            knn_scale_km: 20.0,
            filter_order: 10,
            threshold_km: 250.0,
            outlier_value: 20.0,
            days: 365,
            eps1: vec![0.0, 0.01, 0.02, 0.03],
            eps2: vec![0.0, 0.1, 0.2, 0.3],
            c: vec![0.0, 0.005, 0.01, 0.015],
            reps: 200,
        }
    }

    pub fn desk() -> Self {
        Study2Params {
            reps: 20,
            ..Self::paper()
        }
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.expect(Study::GmaFilter)?;
        let base = if cfg.desk() { Self::desk() } else { Self::paper() };
        let p = Study2Params {
            field: cfg.sensor_field.clone().unwrap_or(base.field),
            knn: cfg.knn.unwrap_or(base.knn),
            knn_scale_km: cfg.knn_scale_km.unwrap_or(base.knn_scale_km),
            filter_order: cfg.filter_order.unwrap_or(base.filter_order),
            threshold_km: cfg.threshold_km.unwrap_or(base.threshold_km),
            outlier_value: cfg.outlier_value.unwrap_or(base.outlier_value),
            days: cfg.days.unwrap_or(base.days),
            eps1: cfg.grid.eps1.clone().unwrap_or(base.eps1),
            eps2: cfg.grid.eps2.clone().unwrap_or(base.eps2),
            c: cfg.grid.c.clone().unwrap_or(base.c),
            reps: cfg.reps.unwrap_or(base.reps),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_probs("eps1", &self.eps1)?;
        check_probs("eps2", &self.eps2)?;
        if self.c.is_empty() || self.c.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
            return Err(Error::Config("grid c needs nonnegative finite values".into()));
        }
        if self.days <= LOOKBACK {
            return Err(Error::Config(format!("need more than {LOOKBACK} days")));
        }
        if self.knn == 0 || self.knn >= self.field.sensors {
            return Err(Error::Config("knn must lie in 1..sensors".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        Ok(())
    }

    /// Full product grid, `eps1` outermost and `c` innermost.
    pub fn cells(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for &e1 in &self.eps1 {
            for &e2 in &self.eps2 {
                for &c in &self.c {
                    out.push((e1, e2, c));
                }
            }
        }
        out
    }
}

/// Share of injected outliers found and share of clean days flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub accuracy: f64,
    pub false_positive_rate: f64,
}

/// Sensor positions, readings and the benchmark k-NN graph of one run.
pub struct SensorStudy {
    pub weights: KnnWeights,
    pub graph: Graph,
    pub days: Vec<DVector<f64>>,
    params: Study2Params,
}

impl SensorStudy {
    pub fn new<R: Rng + ?Sized>(p: &Study2Params, rng: &mut R) -> Result<Self> {
        let field = SensorField::new(&p.field, rng)?;
        let weights = KnnWeights::new(&field.coords, p.knn, p.knn_scale_km, Metric::Planar)?;
        let graph = weights.graph();
        let days = field.days(p.days, rng);
        Ok(SensorStudy {
            weights,
            graph,
            days,
            params: p.clone(),
        })
    }

    /// Weighted M3 on the two distance cells: near pairs get `(eps1, eps2)`,
    /// far pairs are left alone, and every surviving edge gets weight noise
    /// scaled by the receiving node's weight variance.
    pub fn perturb<R: Rng + ?Sized>(&self, eps1: f64, eps2: f64, c: f64, rng: &mut R) -> Result<Graph> {
        let part = ErrorPartition::distance_threshold(
            self.weights.distances(),
            self.params.threshold_km,
            (eps1, eps2, c),
            (0.0, 0.0, c),
        )?
        .with_weight_source(WeightSource::GeneratorRule);
        let opts = WeightOptions {
            source: WeightSource::GeneratorRule,
            variance: VarianceMode::PerNode,
            rule: Some(&self.weights),
        };
        perturb_m3w(&self.graph, &part, opts, rng)
    }

    /// Runs the detector with graph `w` over every day after the lookback.
    /// Each day, every sensor in turn is set to the outlier value.
    pub fn evaluate(&self, w: &Graph) -> Result<Detection> {
        let det = OutlierDetector::new(w, self.params.filter_order)?;
        let coeffs: Vec<DVector<f64>> = self.days.iter().map(|x| det.coefficients(x)).collect();
        let maxes: Vec<f64> = coeffs.iter().map(|g| g.amax()).collect();
        let n = self.graph.n();
        let (mut hits, mut flagged) = (0usize, 0usize);
        for t in LOOKBACK..self.days.len() {
            let threshold = maxes[t - LOOKBACK..t].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if maxes[t] > threshold {
                flagged += 1;
            }
            hits += det.injection_hits(&self.days[t], &coeffs[t], threshold, self.params.outlier_value);
        }
        let tested = self.days.len() - LOOKBACK;
        Ok(Detection {
            accuracy: hits as f64 / (tested * n) as f64,
            false_positive_rate: flagged as f64 / tested as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study2Row {
    pub eps1: f64,
    pub eps2: f64,
    pub c: f64,
    pub accuracy_mean: f64,
    pub accuracy_se: f64,
    pub false_positive_mean: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study2Output {
    pub benchmark: Detection,
    pub rows: Vec<Study2Row>,
}

const FIELD_STREAM: u64 = u64::MAX - 1;

/// One sensor field for the whole run; `reps` graph realizations per cell.
/// The all-zero cell reproduces the benchmark graph exactly and is evaluated once.
pub fn study2(p: &Study2Params, seed: u64) -> Result<Study2Output> {
    p.validate()?;
    let setup = SensorStudy::new(p, &mut stream(seed, FIELD_STREAM))?;
    let benchmark = setup.evaluate(&setup.graph)?;
    let cells = p.cells();
    let per_rep = par_reps(p.reps, |rep| {
        cells
            .iter()
            .enumerate()
            .map(|(ci, &(e1, e2, c))| {
                if e1 == 0.0 && e2 == 0.0 && c == 0.0 {
                    return Ok(benchmark);
                }
                let mut rng = cell_stream(seed, ci as u64, rep);
                let w = setup.perturb(e1, e2, c, &mut rng)?;
                setup.evaluate(&w)
            })
            .collect::<Result<Vec<Detection>>>()
    })?;
    let rows = cells
        .iter()
        .enumerate()
        .map(|(ci, &(e1, e2, c))| {
            let acc: Vec<f64> = per_rep.iter().map(|r| r[ci].accuracy).collect();
            let fp: Vec<f64> = per_rep.iter().map(|r| r[ci].false_positive_rate).collect();
            let (accuracy_mean, accuracy_se) = mean_se(&acc);
            Study2Row {
                eps1: e1,
                eps2: e2,
                c,
                accuracy_mean,
                accuracy_se,
                false_positive_mean: mean_se(&fp).0,
                reps: p.reps,
            }
        })
        .collect();
    Ok(Study2Output { benchmark, rows })
}
