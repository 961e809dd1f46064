//! Stochastic graph-error models.
//!
//! * M1 flips every off-diagonal slot with probability `eps`.
//! * M2 removes existing edges with probability `eps1` and adds missing ones
//!   with probability `eps2`.
//! * M3 is M2 with separate probabilities on each cell of a partition of the
//!   off-diagonal slots.
//! * M2w and M3w additionally perturb the weights of surviving edges with
//!   Gaussian noise and give added edges a weight.
//!
//! Undirected graphs make one decision per unordered pair (lower triangle,
//! mirrored), so outputs stay symmetric.

use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::graph::Graph;
use crate::models::{KnnWeights, SbmSpec};
use crate::sampling::bernoulli_pairs;

fn require_unweighted(a: &Graph, model: &str) -> Result<()> {
    if a.weighted() {
        Err(Error::ModelDomain(format!("{model} applies to unweighted graphs")))
    } else {
        Ok(())
    }
}

fn require_weighted(a: &Graph, model: &str) -> Result<()> {
    if a.weighted() {
        Ok(())
    } else {
        Err(Error::ModelDomain(format!("{model} applies to weighted graphs")))
    }
}

fn set_pair(adj: &mut DMatrix<f64>, directed: bool, i: usize, j: usize, v: f64) {
    adj[(i, j)] = v;
    if !directed {
        adj[(j, i)] = v;
    }
}

/// Every off-diagonal slot flips `0 <-> 1` with probability `eps`.
pub fn perturb_m1<R: Rng + ?Sized>(a: &Graph, eps: f64, rng: &mut R) -> Result<Graph> {
    require_unweighted(a, "M1")?;
    check_probability("eps", eps)?;
    let directed = a.directed();
    let mut adj = a.adj().clone();
    bernoulli_pairs(a.n(), directed, eps, rng, |i, j| {
        let v = 1.0 - adj[(i, j)];
        set_pair(&mut adj, directed, i, j, v);
    });
    Ok(Graph::from_parts(adj, directed, false))
}

/// Existing edges are removed with probability `eps1`, missing ones added with probability `eps2`.
pub fn perturb_m2<R: Rng + ?Sized>(a: &Graph, eps1: f64, eps2: f64, rng: &mut R) -> Result<Graph> {
    require_unweighted(a, "M2")?;
    check_probability("eps1", eps1)?;
    check_probability("eps2", eps2)?;
    let directed = a.directed();
    let n = a.n();
    let src = a.adj();
    let mut adj = src.clone();
    // Removal decisions over the edge list, addition decisions over all slots
    // with hits on existing edges discarded: the two sets of draws are
    // independent and each slot sees exactly one relevant Bernoulli trial.
    if eps1 > 0.0 {
        let edges = slot_edges(src, directed);
        crate::sampling::bernoulli_indices(edges.len(), eps1, rng, |k| {
            let (i, j) = edges[k];
            set_pair(&mut adj, directed, i, j, 0.0);
        });
    }
    bernoulli_pairs(n, directed, eps2, rng, |i, j| {
        if src[(i, j)] == 0.0 {
            set_pair(&mut adj, directed, i, j, 1.0);
        }
    });
    Ok(Graph::from_parts(adj, directed, false))
}

/// Nonzero slots in the enumeration order of `bernoulli_pairs`.
fn slot_edges(adj: &DMatrix<f64>, directed: bool) -> Vec<(usize, usize)> {
    let n = adj.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        let cols = if directed { n } else { i };
        for j in 0..cols {
            if i != j && adj[(i, j)] != 0.0 {
                out.push((i, j));
            }
        }
    }
    out
}

/// Where the weights of added edges come from in M2w and M3w.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    /// Draw uniformly with replacement from the nonzero weights of the input.
    #[default]
    ResampleFromExisting,
    /// Ask the generator that built the graph; requires a [`WeightRule`].
    GeneratorRule,
}

/// Variance of the Gaussian weight noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMode {
    /// `c` times the variance of all nonzero weights.
    #[default]
    Global,
    /// `c` times the variance of the incoming weights of the receiving node.
    /// For undirected graphs the two endpoint variances are averaged.
    PerNode,
}

/// A generator's own weight for the slot `(i, j)`.
pub trait WeightRule {
    fn weight(&self, i: usize, j: usize) -> f64;
}

impl WeightRule for KnnWeights {
    fn weight(&self, i: usize, j: usize) -> f64 {
        KnnWeights::weight(self, i, j)
    }
}

/// Options shared by the weighted models.
#[derive(Clone, Copy, Default)]
pub struct WeightOptions<'a> {
    pub source: WeightSource,
    pub variance: VarianceMode,
    pub rule: Option<&'a dyn WeightRule>,
}

/// Cells of a partition of the off-diagonal slots and their error parameters.
///
/// Stored as one label per slot; [`ErrorPartition::mask`] recovers the binary masks.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorPartition {
    labels: DMatrix<u32>,
    remove_probs: Vec<f64>,
    add_probs: Vec<f64>,
    var_multipliers: Vec<f64>,
    pub weight_source: WeightSource,
}

const DIAG: u32 = u32::MAX;

impl ErrorPartition {
    /// Validates binary masks: zero diagonals, disjoint, covering every off-diagonal slot.
    pub fn from_masks(
        masks: &[DMatrix<f64>],
        remove_probs: Vec<f64>,
        add_probs: Vec<f64>,
        var_multipliers: Vec<f64>,
    ) -> Result<Self> {
        let Some(first) = masks.first() else {
            return Err(Error::Partition("no masks given".into()));
        };
        let n = first.nrows();
        let mut labels = DMatrix::from_element(n, n, DIAG);
        for (k, m) in masks.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Partition(format!("mask {k} is not {n}x{n}")));
            }
            for i in 0..n {
                for j in 0..n {
                    let v = m[(i, j)];
                    if v != 0.0 && v != 1.0 {
                        return Err(Error::Partition(format!("mask {k} is not binary at ({i}, {j})")));
                    }
                    if v == 1.0 {
                        if i == j {
                            return Err(Error::Partition(format!("mask {k} has a nonzero diagonal")));
                        }
                        if labels[(i, j)] != DIAG {
                            return Err(Error::Partition(format!(
                                "masks {} and {k} overlap at ({i}, {j})",
                                labels[(i, j)]
                            )));
                        }
                        labels[(i, j)] = k as u32;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && labels[(i, j)] == DIAG {
                    return Err(Error::Partition(format!("slot ({i}, {j}) is in no mask")));
                }
            }
        }
        Self::from_labels(labels, remove_probs, add_probs, var_multipliers)
    }

    /// `labels[(i, j)]` names the cell of slot `(i, j)`; the diagonal is ignored.
    pub fn from_labels(
        mut labels: DMatrix<u32>,
        remove_probs: Vec<f64>,
        add_probs: Vec<f64>,
        var_multipliers: Vec<f64>,
    ) -> Result<Self> {
        let k = remove_probs.len();
        if k == 0 || add_probs.len() != k || var_multipliers.len() != k {
            return Err(Error::Partition(format!(
                "need matching nonempty parameter lists, got {}, {} and {}",
                k,
                add_probs.len(),
                var_multipliers.len()
            )));
        }
        for &p in remove_probs.iter().chain(&add_probs) {
            check_probability("partition probability", p)?;
        }
        if var_multipliers.iter().any(|c| !(*c >= 0.0)) {
            return Err(Error::Parameter("variance multipliers must be nonnegative".into()));
        }
        if !labels.is_square() {
            return Err(Error::Partition("label matrix is not square".into()));
        }
        let n = labels.nrows();
        for i in 0..n {
            labels[(i, i)] = DIAG;
            for j in 0..n {
                if i != j && labels[(i, j)] as usize >= k {
                    return Err(Error::Partition(format!(
                        "slot ({i}, {j}) has label {} but only {k} cells exist",
                        labels[(i, j)]
                    )));
                }
            }
        }
        Ok(ErrorPartition {
            labels,
            remove_probs,
            add_probs,
            var_multipliers,
            weight_source: WeightSource::default(),
        })
    }

    /// Single cell covering every off-diagonal slot.
    pub fn uniform(n: usize, eps1: f64, eps2: f64, c: f64) -> Result<Self> {
        Self::from_labels(DMatrix::zeros(n, n), vec![eps1], vec![eps2], vec![c])
    }

    /// Two cells: pairs at distance `<= threshold`, and pairs farther apart.
    pub fn distance_threshold(
        distances: &DMatrix<f64>,
        threshold: f64,
        near: (f64, f64, f64),
        far: (f64, f64, f64),
    ) -> Result<Self> {
        let labels = distances.map(|d| u32::from(d > threshold));
        Self::from_labels(
            labels,
            vec![near.0, far.0],
            vec![near.1, far.1],
            vec![near.2, far.2],
        )
    }

    /// One cell per unordered community pair `(k, m)`, `k <= m`, listed row by row.
    pub fn sbm_blocks(
        spec: &SbmSpec,
        remove_probs: Vec<f64>,
        add_probs: Vec<f64>,
        var_multipliers: Vec<f64>,
    ) -> Result<Self> {
        let r = spec.sizes.len();
        let members = spec.memberships();
        let n = members.len();
        let index = |k: usize, m: usize| {
            let (k, m) = if k <= m { (k, m) } else { (m, k) };
            // pairs (0,0),(0,1),..,(0,r-1),(1,1),..
            (k * r - k * (k.saturating_sub(1)) / 2 + (m - k)) as u32
        };
        let labels = DMatrix::from_fn(n, n, |i, j| index(members[i], members[j]));
        let cells = r * (r + 1) / 2;
        if remove_probs.len() != cells {
            return Err(Error::Partition(format!(
                "{r} communities give {cells} block cells, got {} probabilities",
                remove_probs.len()
            )));
        }
        Self::from_labels(labels, remove_probs, add_probs, var_multipliers)
    }

    /// Two cells: within-community and between-community pairs.
    pub fn ppm(spec: &SbmSpec, within: (f64, f64, f64), between: (f64, f64, f64)) -> Result<Self> {
        let members = spec.memberships();
        let n = members.len();
        let labels = DMatrix::from_fn(n, n, |i, j| u32::from(members[i] != members[j]));
        Self::from_labels(
            labels,
            vec![within.0, between.0],
            vec![within.1, between.1],
            vec![within.2, between.2],
        )
    }

    pub fn with_weight_source(mut self, source: WeightSource) -> Self {
        self.weight_source = source;
        self
    }

    pub fn n(&self) -> usize {
        self.labels.nrows()
    }

    pub fn cells(&self) -> usize {
        self.remove_probs.len()
    }

    pub fn remove_probs(&self) -> &[f64] {
        &self.remove_probs
    }

    pub fn add_probs(&self) -> &[f64] {
        &self.add_probs
    }

    pub fn var_multipliers(&self) -> &[f64] {
        &self.var_multipliers
    }

    /// Cell of the off-diagonal slot `(i, j)`.
    pub fn label(&self, i: usize, j: usize) -> usize {
        self.labels[(i, j)] as usize
    }

    /// Binary mask `D_k`.
    pub fn mask(&self, k: usize) -> DMatrix<f64> {
        self.labels.map(|l| if l as usize == k { 1.0 } else { 0.0 })
    }

    fn check_for(&self, a: &Graph) -> Result<()> {
        if self.n() != a.n() {
            return Err(Error::Partition(format!(
                "partition covers {} nodes, graph has {}",
                self.n(),
                a.n()
            )));
        }
        if !a.directed() && !crate::graph::is_symmetric(&self.labels.map(f64::from)) {
            return Err(Error::Partition("masks must be symmetric for undirected graphs".into()));
        }
        Ok(())
    }
}

/// Partition parameters together with a mask rule, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    pub masks: MaskRule,
    pub remove_probs: Vec<f64>,
    pub add_probs: Vec<f64>,
    #[serde(default)]
    pub var_multipliers: Option<Vec<f64>>,
    #[serde(default)]
    pub weight_source: WeightSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum MaskRule {
    /// Explicit 0/1 matrices, row-major nested lists.
    Explicit { masks: Vec<Vec<Vec<f64>>> },
    /// Cell 0 for pairs within the threshold distance, cell 1 beyond it.
    DistanceThreshold { threshold: f64 },
    /// One cell per unordered community pair.
    SbmBlocks { sizes: Vec<usize> },
    /// Within- and between-community cells.
    Ppm { sizes: Vec<usize> },
}

impl PartitionConfig {
    /// Expands the rule; `distances` is required by `distance_threshold`.
    pub fn build(&self, distances: Option<&DMatrix<f64>>) -> Result<ErrorPartition> {
        let k = self.remove_probs.len();
        let c = self.var_multipliers.clone().unwrap_or_else(|| vec![0.0; k]);
        let p1 = self.remove_probs.clone();
        let p2 = self.add_probs.clone();
        let part = match &self.masks {
            MaskRule::Explicit { masks } => {
                let mats = masks
                    .iter()
                    .map(|rows| {
                        let n = rows.len();
                        if rows.iter().any(|r| r.len() != n) {
                            return Err(Error::Partition("explicit mask is not square".into()));
                        }
                        Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
                    })
                    .collect::<Result<Vec<_>>>()?;
                ErrorPartition::from_masks(&mats, p1, p2, c)?
            }
            MaskRule::DistanceThreshold { threshold } => {
                let d = distances.ok_or_else(|| {
                    Error::Partition("distance_threshold needs node positions".into())
                })?;
                if k != 2 {
                    return Err(Error::Partition("distance_threshold has exactly 2 cells".into()));
                }
                let labels = d.map(|v| u32::from(v > *threshold));
                ErrorPartition::from_labels(labels, p1, p2, c)?
            }
            MaskRule::SbmBlocks { sizes } => {
                let r = sizes.len();
                let spec = SbmSpec::new(sizes.clone(), vec![vec![0.0; r]; r])?;
                ErrorPartition::sbm_blocks(&spec, p1, p2, c)?
            }
            MaskRule::Ppm { sizes } => {
                let r = sizes.len();
                let spec = SbmSpec::new(sizes.clone(), vec![vec![0.0; r]; r])?;
                let members = spec.memberships();
                let n = members.len();
                let labels = DMatrix::from_fn(n, n, |i, j| u32::from(members[i] != members[j]));
                ErrorPartition::from_labels(labels, p1, p2, c)?
            }
        };
        Ok(part.with_weight_source(self.weight_source))
    }
}

/// Slot-wise M3: in cell `k`, edges are removed with `eps_k1` and added with `eps_k2`.
pub fn perturb_m3<R: Rng + ?Sized>(a: &Graph, part: &ErrorPartition, rng: &mut R) -> Result<Graph> {
    require_unweighted(a, "M3")?;
    part.check_for(a)?;
    let directed = a.directed();
    let n = a.n();
    let src = a.adj();
    let mut adj = src.clone();
    for i in 0..n {
        let cols = if directed { n } else { i };
        for j in 0..cols {
            if i == j {
                continue;
            }
            let k = part.label(i, j);
            let u: f64 = rng.random();
            if src[(i, j)] != 0.0 {
                if u < part.remove_probs[k] {
                    set_pair(&mut adj, directed, i, j, 0.0);
                }
            } else if u < part.add_probs[k] {
                set_pair(&mut adj, directed, i, j, 1.0);
            }
        }
    }
    Ok(Graph::from_parts(adj, directed, false))
}

/// Weighted M2: M3w with a single cell.
pub fn perturb_m2w<R: Rng + ?Sized>(
    a: &Graph,
    eps1: f64,
    eps2: f64,
    c: f64,
    opts: WeightOptions<'_>,
    rng: &mut R,
) -> Result<Graph> {
    require_weighted(a, "M2w")?;
    let part = ErrorPartition::uniform(a.n(), eps1, eps2, c)?.with_weight_source(opts.source);
    perturb_m3w(a, &part, opts, rng)
}

/// Weighted M3.
///
/// Surviving edges get `N(0, c_k sigma^2)` noise, removed edges are zeroed,
/// added edges take a weight from `opts.source`, and negative results are
/// clipped to zero at the end. `part.weight_source` decides the source;
/// `opts.source` is ignored here.
pub fn perturb_m3w<R: Rng + ?Sized>(
    a: &Graph,
    part: &ErrorPartition,
    opts: WeightOptions<'_>,
    rng: &mut R,
) -> Result<Graph> {
    require_weighted(a, "M3w")?;
    part.check_for(a)?;
    let directed = a.directed();
    let n = a.n();
    let src = a.adj();

    // each stored weight once: the lower triangle for undirected graphs
    let pool = slot_edges(src, directed)
        .into_iter()
        .map(|(i, j)| src[(i, j)])
        .collect::<Vec<_>>();
    let global_var = population_variance(&pool);
    let node_var = match opts.variance {
        VarianceMode::Global => Vec::new(),
        VarianceMode::PerNode => (0..n)
            .map(|i| {
                let w: Vec<f64> = src.row(i).iter().copied().filter(|v| *v != 0.0).collect();
                population_variance(&w)
            })
            .collect(),
    };
    let rule = match part.weight_source {
        WeightSource::ResampleFromExisting => None,
        WeightSource::GeneratorRule => Some(opts.rule.ok_or_else(|| {
            Error::Parameter("generator_rule weights need a weight rule".into())
        })?),
    };

    let mut adj = src.clone();
    for i in 0..n {
        let cols = if directed { n } else { i };
        for j in 0..cols {
            if i == j {
                continue;
            }
            let k = part.label(i, j);
            let u: f64 = rng.random();
            let w = src[(i, j)];
            let v = if w != 0.0 {
                if u < part.remove_probs[k] {
                    0.0
                } else {
                    let c = part.var_multipliers[k];
                    if c > 0.0 {
                        let var = match opts.variance {
                            VarianceMode::Global => global_var,
                            VarianceMode::PerNode if directed => node_var[i],
                            VarianceMode::PerNode => 0.5 * (node_var[i] + node_var[j]),
                        };
                        let g: f64 = StandardNormal.sample(rng);
                        w + (c * var).sqrt() * g
                    } else {
                        w
                    }
                }
            } else if u < part.add_probs[k] {
                match rule {
                    Some(r) => r.weight(i, j),
                    None => *pool.choose(rng).ok_or_else(|| {
                        Error::Degenerate("no existing weights to resample from".into())
                    })?,
                }
            } else {
                0.0
            };
            set_pair(&mut adj, directed, i, j, v.max(0.0));
        }
    }
    Ok(Graph::from_parts(adj, directed, true))
}

/// Variance with denominator `len`; zero for fewer than two values.
pub fn population_variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}

/// Edge probability of the ER graph obtained by applying M2 to ER(`alpha`).
pub fn effective_er_parameter(alpha: f64, eps1: f64, eps2: f64) -> Result<f64> {
    check_probability("alpha", alpha)?;
    check_probability("eps1", eps1)?;
    check_probability("eps2", eps2)?;
    Ok(alpha * (1.0 - eps1) + (1.0 - alpha) * eps2)
}

/// Expected shifts `E[lambda_1(A) - lambda_1(W)]` and `E[lambda_k(A) - lambda_k(W)]`,
/// `2 <= k <= m`, for an undirected planted partition under M2.
pub fn ppm_eigen_shift(n: usize, m: usize, p: f64, q: f64, eps1: f64, eps2: f64) -> Result<(f64, f64)> {
    if m == 0 || !n.is_multiple_of(m) {
        return Err(Error::Parameter(format!(
            "{n} nodes cannot be split into {m} equal communities"
        )));
    }
    for (name, v) in [("p", p), ("q", q), ("eps1", eps1), ("eps2", eps2)] {
        check_probability(name, v)?;
    }
    let (nf, mf) = (n as f64, m as f64);
    let s = eps1 + eps2;
    let first = nf * (s * (p + (mf - 1.0) * q) - mf * eps2) / mf;
    let rest = nf * s * (p - q) / mf;
    Ok((first, rest))
}
