//! Single-shot utilities behind the `gen-graph`, `perturb`, `grade` and
//! `filter` subcommands. Each reads a small JSON config.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::error_models::{
    perturb_m1, perturb_m2, perturb_m2w, perturb_m3, perturb_m3w, PartitionConfig, VarianceMode, WeightOptions,
    WeightSource,
};
use crate::filters::{detect_outliers, design_polynomial_filter, frequency_order, highpass_response};
use crate::graph::Graph;
use crate::ica::grade;
use crate::models::{cycle_graph, erdos_renyi, random_geometric, sbm, KnnWeights, Metric, SbmSpec};
use crate::output::{write_atomic, write_csv, write_json, Provenance};
use crate::rng::stream;

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn resolve(out_dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        out_dir.join(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GraphModel {
    ErdosRenyi { n: usize, eps: f64, #[serde(default)] directed: bool },
    Sbm { sizes: Vec<usize>, probs: Vec<Vec<f64>>, #[serde(default)] directed: bool },
    PlantedPartition { n: usize, m: usize, p: f64, q: f64 },
    Geometric { n: usize, radius: f64 },
    /// Points uniform on a square of side `side`, weighted k-NN graph.
    Knn { n: usize, k: usize, scale: f64, side: f64 },
    Cycle { n: usize },
}

impl GraphModel {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        match self {
            GraphModel::ErdosRenyi { n, eps, directed } => erdos_renyi(*n, *eps, *directed, rng),
            GraphModel::Sbm { sizes, probs, directed } => {
                sbm(&SbmSpec::new(sizes.clone(), probs.clone())?, *directed, rng)
            }
            GraphModel::PlantedPartition { n, m, p, q } => {
                sbm(&SbmSpec::planted_partition(*n, *m, *p, *q)?, false, rng)
            }
            GraphModel::Geometric { n, radius } => Ok(random_geometric(*n, *radius, rng)?.graph),
            GraphModel::Knn { n, k, scale, side } => {
                let coords: Vec<[f64; 2]> = (0..*n)
                    .map(|_| [rng.random::<f64>() * side, rng.random::<f64>() * side])
                    .collect();
                Ok(KnnWeights::new(&coords, *k, *scale, Metric::Planar)?.graph())
            }
            GraphModel::Cycle { n } => cycle_graph(*n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenGraphConfig {
    #[serde(flatten)]
    pub model: GraphModel,
    #[serde(default)]
    pub seed: u64,
    /// Output stem; `.csv` and `.json` are appended.
    pub output: PathBuf,
}

pub fn gen_graph(config: &Path, seed: Option<u64>, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let cfg: GenGraphConfig = parse(config)?;
    let seed = seed.unwrap_or(cfg.seed);
    let g = cfg.model.sample(&mut stream(seed, 0))?;
    let stem = resolve(out_dir, &cfg.output);
    g.write(&stem, Some(seed))?;
    Ok(vec![stem.with_extension("csv"), stem.with_extension("json")])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ErrorModel {
    M1 { eps: f64 },
    M2 { eps1: f64, eps2: f64 },
    M3 { partition: PartitionConfig },
    M2w { eps1: f64, eps2: f64, c: f64, #[serde(default)] variance: VarianceMode },
    M3w { partition: PartitionConfig, #[serde(default)] variance: VarianceMode },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbConfig {
    /// Stem of the input graph files.
    pub input: PathBuf,
    pub output: PathBuf,
    #[serde(flatten)]
    pub model: ErrorModel,
    /// Node positions, needed only by the `distance_threshold` mask rule.
    #[serde(default)]
    pub coords: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub seed: u64,
}

pub fn perturb(config: &Path, seed: Option<u64>, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let cfg: PerturbConfig = parse(config)?;
    let seed = seed.unwrap_or(cfg.seed);
    let (a, _) = Graph::read(&cfg.input)?;
    let mut rng = stream(seed, 0);
    let dist = cfg.coords.as_ref().map(|c| Metric::Planar.distance_matrix(c));
    let w = match &cfg.model {
        ErrorModel::M1 { eps } => perturb_m1(&a, *eps, &mut rng)?,
        ErrorModel::M2 { eps1, eps2 } => perturb_m2(&a, *eps1, *eps2, &mut rng)?,
        ErrorModel::M3 { partition } => perturb_m3(&a, &partition.build(dist.as_ref())?, &mut rng)?,
        ErrorModel::M2w { eps1, eps2, c, variance } => {
            let opts = WeightOptions {
                source: WeightSource::ResampleFromExisting,
                variance: *variance,
                rule: None,
            };
            perturb_m2w(&a, *eps1, *eps2, *c, opts, &mut rng)?
        }
        ErrorModel::M3w { partition, variance } => {
            let part = partition.build(dist.as_ref())?;
            let opts = WeightOptions {
                source: part.weight_source,
                variance: *variance,
                rule: None,
            };
            perturb_m3w(&a, &part, opts, &mut rng)?
        }
    };
    let stem = resolve(out_dir, &cfg.output);
    w.write(&stem, Some(seed))?;
    Ok(vec![stem.with_extension("csv"), stem.with_extension("json")])
}

/// Headerless numeric CSV as a matrix, one record per row.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Config(format!("{}: not a number: {s:?}", path.display())))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Config(format!("{}: expected a nonempty rectangular table", path.display())));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradeConfig {
    /// Headerless CSV with one signal per row and one node per column.
    pub data: PathBuf,
    pub graph: PathBuf,
    #[serde(default = "one")]
    pub lags: usize,
    pub output: PathBuf,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize)]
struct GradeOutput {
    #[serde(flatten)]
    provenance: Provenance,
    unmixing: Vec<Vec<f64>>,
    rotation: Vec<Vec<f64>>,
    whitener: Vec<Vec<f64>>,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn grade_tool(config: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let cfg: GradeConfig = parse(config)?;
    let x = read_matrix(&cfg.data)?;
    let (w, _) = Graph::read(&cfg.graph)?;
    let est = grade(&x, &w, cfg.lags)?;
    let path = resolve(out_dir, &cfg.output);
    write_json(
        &path,
        &GradeOutput {
            provenance: Provenance::new(&cfg, 0)?,
            unmixing: rows_of(&est.gamma),
            rotation: rows_of(&est.rotation),
            whitener: rows_of(&est.whitener),
        },
    )?;
    Ok(vec![path])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    /// Symmetric shift matrix stem.
    pub graph: PathBuf,
    /// Headerless CSV with one day per row and one sensor per column.
    pub days: PathBuf,
    #[serde(default = "default_order")]
    pub order: usize,
    /// Day-by-day flags CSV; the filter spec goes next to it as JSON.
    pub output: PathBuf,
}

fn default_order() -> usize {
    10
}

/// High-pass outlier detection over the days of a CSV.
pub fn filter_tool(config: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let cfg: FilterConfig = parse(config)?;
    let (w, _) = Graph::read(&cfg.graph)?;
    let table = read_matrix(&cfg.days)?;
    let days: Vec<DVector<f64>> = table.row_iter().map(|r| r.transpose()).collect();
    let dec = frequency_order(&w)?;
    let spec = design_polynomial_filter(&dec, &highpass_response(&dec), cfg.order)?;
    let results = detect_outliers(&days, &w, &spec)?;
    let prov = Provenance::new(&cfg, 0)?;
    let csv = resolve(out_dir, &cfg.output);
    write_csv(&csv, &prov, &results)?;
    let json = csv.with_extension("json");
    let mut bytes = serde_json::to_vec_pretty(&spec)?;
    bytes.push(b'\n');
    write_atomic(&json, &bytes)?;
    Ok(vec![csv, json])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_perturb_grade_filter_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        fs::write(d.join("g.json"), r#"{"model": "knn", "n": 12, "k": 3, "scale": 20.0, "side": 100.0, "output": "a", "seed": 4}"#).unwrap();
        gen_graph(&d.join("g.json"), None, d).unwrap();
        let (a, meta) = Graph::read(&d.join("a")).unwrap();
        assert_eq!((a.n(), meta.seed), (12, Some(4)));

        fs::write(d.join("p.json"), format!(r#"{{"input": "{}", "output": "w", "model": "m2w", "eps1": 0.2, "eps2": 0.1, "c": 0.01}}"#, d.join("a").display())).unwrap();
        perturb(&d.join("p.json"), Some(9), d).unwrap();
        let (w, _) = Graph::read(&d.join("w")).unwrap();
        assert!(w.is_symmetric() && w.weighted());

        let mut rng = stream(1, 0);
        let rows: Vec<String> = (0..8)
            .map(|_| (0..12).map(|_| format!("{:.6}", rng.random::<f64>())).collect::<Vec<_>>().join(","))
            .collect();
        fs::write(d.join("days.csv"), rows.join("\n")).unwrap();
        fs::write(d.join("f.json"), format!(r#"{{"graph": "{}", "days": "{}", "order": 3, "output": "flags.csv"}}"#, d.join("a").display(), d.join("days.csv").display())).unwrap();
        filter_tool(&d.join("f.json"), d).unwrap();
        let text = fs::read_to_string(d.join("flags.csv")).unwrap();
        assert_eq!(text.lines().nth(1), Some("day,flag,max_gft,threshold"));
        assert_eq!(text.lines().count(), 2 + 5);

        let sig: Vec<String> = (0..3)
            .map(|_| (0..12).map(|_| format!("{:.6}", rng.random::<f64>())).collect::<Vec<_>>().join(","))
            .collect();
        fs::write(d.join("x.csv"), sig.join("\n")).unwrap();
        fs::write(d.join("c.json"), r#"{"model": "cycle", "n": 12, "output": "cyc"}"#).unwrap();
        gen_graph(&d.join("c.json"), None, d).unwrap();
        fs::write(d.join("gr.json"), format!(r#"{{"data": "{}", "graph": "{}", "output": "u.json"}}"#, d.join("x.csv").display(), d.join("cyc").display())).unwrap();
        grade_tool(&d.join("gr.json"), d).unwrap();
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("u.json")).unwrap()).unwrap();
        assert_eq!(v["unmixing"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn bad_tables_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        fs::write(&p, "1,2\n3").unwrap();
        assert!(read_matrix(&p).is_err());
        fs::write(&p, "1,x\n").unwrap();
        assert!(matches!(read_matrix(&p), Err(Error::Config(_))));
    }
}
