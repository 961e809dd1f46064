//! Monte Carlo drivers for the four studies, their JSON configs and result files.
//!
//! Every repetition draws from its own ChaCha stream addressed by
//! `(cell, rep)`, and results are reduced in repetition order, so the output
//! does not depend on the worker count.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::SensorFieldConfig;
use crate::output::{write_csv, write_json, Provenance};

mod study1;
mod study2;
mod study3;
mod study4;
pub mod tools;

pub use study1::{study1, Study1Params, Study1Row};
pub use study2::{study2, Detection, SensorStudy, Study2Output, Study2Params, Study2Row};
pub use study3::{study3, Study3Params, Study3Row};
pub use study4::{study4, Study4Output, Study4Params, Study4RepRow, Study4Row};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    Autocorr,
    GmaFilter,
    GarmaFilter,
    Grade,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::Autocorr => "study1",
            Study::GmaFilter => "study2",
            Study::GarmaFilter => "study3",
            Study::Grade => "study4",
        }
    }
}

/// `paper` runs the published sizes; `desk` cuts repetitions and, where the
/// checks allow it, the node count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Paper,
    Desk,
}

/// Parameter lists; an absent list falls back to the study default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub eps1: Option<Vec<f64>>,
    pub eps2: Option<Vec<f64>>,
    pub c: Option<Vec<f64>>,
    /// GARMA orders (study 3).
    pub k: Option<Vec<usize>>,
    /// Graph densities for the study 4 sweep.
    pub alpha: Option<Vec<f64>>,
}

/// One JSON file per run. Absent fields take the defaults of the study at the
/// chosen scale; explicit fields always win over the scale preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub study: Study,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub scale: Scale,
    #[serde(default)]
    pub reps: Option<usize>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub alpha: Option<f64>,
    /// GMA coefficients: one value for study 1, one per source for study 4.
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub workers: Option<usize>,

    // study 2
    #[serde(default)]
    pub sensor_field: Option<SensorFieldConfig>,
    #[serde(default)]
    pub knn: Option<usize>,
    #[serde(default)]
    pub knn_scale_km: Option<f64>,
    #[serde(default)]
    pub filter_order: Option<usize>,
    #[serde(default)]
    pub threshold_km: Option<f64>,
    #[serde(default)]
    pub outlier_value: Option<f64>,
    #[serde(default)]
    pub days: Option<usize>,

    // study 3
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub noise_var: Option<f64>,

    // study 4
    #[serde(default)]
    pub lags: Option<usize>,
}

fn default_seed() -> u64 {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

impl ExperimentConfig {
    pub fn new(study: Study) -> Self {
        ExperimentConfig {
            study,
            seed: default_seed(),
            scale: Scale::Paper,
            reps: None,
            n: None,
            alpha: None,
            theta: None,
            grid: Grid::default(),
            output_dir: default_output_dir(),
            workers: None,
            sensor_field: None,
            knn: None,
            knn_scale_km: None,
            filter_order: None,
            threshold_km: None,
            outlier_value: None,
            days: None,
            radius: None,
            noise_var: None,
            lags: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    fn expect(&self, study: Study) -> Result<()> {
        if self.study != study {
            return Err(Error::Config(format!(
                "config is for {:?}, expected {:?}",
                self.study, study
            )));
        }
        if self.reps == Some(0) {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    fn desk(&self) -> bool {
        self.scale == Scale::Desk
    }
}

pub(crate) fn check_probs(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config(format!("grid {name} is empty")));
    }
    for &v in values {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Config(format!("grid {name} value {v} is outside [0, 1]")));
        }
    }
    Ok(())
}

/// Stream id shared by every cell of one repetition.
pub(crate) const SHARED: u64 = u64::MAX;

/// Sample mean and standard error; the error is NaN below two values.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs `f` for every repetition in parallel and returns the results in order.
pub(crate) fn par_reps<T, F>(reps: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..reps as u64).into_par_iter().map(f).collect()
}

/// Runs `f` on a pool of `workers` threads, or the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary<T: Serialize> {
    pub study: &'static str,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub reps: usize,
    pub results: T,
}

/// Paths written by [`run`].
#[derive(Debug, Clone)]
pub struct RunFiles {
    pub csv: Vec<PathBuf>,
    pub json: PathBuf,
}

/// Runs the study named in `config` and writes its CSV and JSON summary.
pub fn run(config: &ExperimentConfig) -> Result<RunFiles> {
    // where and how fast a run happens does not change its numbers
    let mut hashed = config.clone();
    hashed.output_dir = default_output_dir();
    hashed.workers = None;
    let prov = Provenance::new(&hashed, config.seed)?;
    let dir = &config.output_dir;
    let name = config.study.name();
    let csv = dir.join(format!("{name}.csv"));
    let json = dir.join(format!("{name}_summary.json"));
    match config.study {
        Study::Autocorr => {
            let p = Study1Params::from_config(config)?;
            let rows = with_workers(config.workers, || study1(&p, config.seed))??;
            write_csv(&csv, &prov, &rows)?;
            write_json(&json, &Summary { study: name, provenance: prov, reps: p.reps, results: &rows })?;
            Ok(RunFiles { csv: vec![csv], json })
        }
        Study::GmaFilter => {
            let p = Study2Params::from_config(config)?;
            let out = with_workers(config.workers, || study2(&p, config.seed))??;
            write_csv(&csv, &prov, &out.rows)?;
            write_json(&json, &Summary { study: name, provenance: prov, reps: p.reps, results: &out })?;
            Ok(RunFiles { csv: vec![csv], json })
        }
        Study::GarmaFilter => {
            let p = Study3Params::from_config(config)?;
            let rows = with_workers(config.workers, || study3(&p, config.seed))??;
            write_csv(&csv, &prov, &rows)?;
            write_json(&json, &Summary { study: name, provenance: prov, reps: p.reps, results: &rows })?;
            Ok(RunFiles { csv: vec![csv], json })
        }
        Study::Grade => {
            let p = Study4Params::from_config(config)?;
            let out = with_workers(config.workers, || study4(&p, config.seed))??;
            let grid = dir.join(format!("{name}_grid.csv"));
            write_csv(&csv, &prov, &out.reps)?;
            write_csv(&grid, &prov, &out.grid)?;
            write_json(&json, &Summary { study: name, provenance: prov, reps: p.reps, results: &out.grid })?;
            Ok(RunFiles { csv: vec![csv, grid], json })
        }
    }
}
