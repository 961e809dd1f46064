//! Random and deterministic graph families: Erdős–Rényi, stochastic block
//! models, random geometric graphs, weighted k-nearest-neighbour graphs,
//! cycles and graphon (kernel) sampling.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::graph::Graph;
use crate::sampling::bernoulli_pairs;

/// Each off-diagonal slot (unordered pair when undirected) is an edge with probability `eps`.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, eps: f64, directed: bool, rng: &mut R) -> Result<Graph> {
    check_probability("eps", eps)?;
    let mut adj = DMatrix::zeros(n, n);
    bernoulli_pairs(n, directed, eps, rng, |i, j| {
        adj[(i, j)] = 1.0;
        if !directed {
            adj[(j, i)] = 1.0;
        }
    });
    Ok(Graph::from_parts(adj, directed, false))
}

/// Community sizes and the block edge-probability matrix of a stochastic block model.
///
/// `probs[i][j]` is the probability of an edge from a node of community `j`
/// to a node of community `i`. Nodes are numbered community by community.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub sizes: Vec<usize>,
    pub probs: Vec<Vec<f64>>,
}

impl SbmSpec {
    pub fn new(sizes: Vec<usize>, probs: Vec<Vec<f64>>) -> Result<Self> {
        let spec = SbmSpec { sizes, probs };
        spec.validate()?;
        Ok(spec)
    }

    /// Planted partition: `m` equal communities, `p` within and `q` between.
    pub fn planted_partition(n: usize, m: usize, p: f64, q: f64) -> Result<Self> {
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::Parameter(format!(
                "{n} nodes cannot be split into {m} equal communities"
            )));
        }
        let probs = (0..m)
            .map(|i| (0..m).map(|j| if i == j { p } else { q }).collect())
            .collect();
        SbmSpec::new(vec![n / m; m], probs)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.sizes.len();
        if r == 0 {
            return Err(Error::Parameter("SBM needs at least one community".into()));
        }
        if self.probs.len() != r || self.probs.iter().any(|row| row.len() != r) {
            return Err(Error::Parameter(format!(
                "probability matrix must be {r}x{r} to match the community sizes"
            )));
        }
        for row in &self.probs {
            for &p in row {
                check_probability("block probability", p)?;
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Community index of every node under the contiguous numbering.
    pub fn memberships(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &size)| std::iter::repeat_n(c, size))
            .collect()
    }

    /// Edge probability from node `j` to node `i`.
    pub fn pair_prob(&self, members: &[usize], i: usize, j: usize) -> f64 {
        self.probs[members[i]][members[j]]
    }
}

/// Undirected graphs draw the lower triangle and mirror it.
pub fn sbm<R: Rng + ?Sized>(spec: &SbmSpec, directed: bool, rng: &mut R) -> Result<Graph> {
    spec.validate()?;
    let members = spec.memberships();
    let n = members.len();
    let mut adj = DMatrix::zeros(n, n);
    for i in 0..n {
        let cols = if directed { n } else { i };
        for j in 0..cols {
            if i == j {
                continue;
            }
            if rng.random::<f64>() < spec.pair_prob(&members, i, j) {
                adj[(i, j)] = 1.0;
                if !directed {
                    adj[(j, i)] = 1.0;
                }
            }
        }
    }
    Ok(Graph::from_parts(adj, directed, false))
}

/// A geometric graph together with the node positions that produced it.
#[derive(Debug, Clone)]
pub struct GeometricGraph {
    pub graph: Graph,
    pub coords: Vec<[f64; 2]>,
}

/// `n` points uniform on the unit square; undirected edge iff distance < `radius`.
pub fn random_geometric<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> Result<GeometricGraph> {
    let coords: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
    geometric_from_coords(coords, radius)
}

pub fn geometric_from_coords(coords: Vec<[f64; 2]>, radius: f64) -> Result<GeometricGraph> {
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!("radius must be positive, got {radius}")));
    }
    let n = coords.len();
    let mut adj = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            if planar_distance(coords[i], coords[j]) < radius {
                adj[(i, j)] = 1.0;
                adj[(j, i)] = 1.0;
            }
        }
    }
    Ok(GeometricGraph {
        graph: Graph::from_parts(adj, false, false),
        coords,
    })
}

/// How node positions are turned into distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Euclidean distance in the units of the coordinates.
    #[default]
    Planar,
    /// Haversine distance in kilometres; coordinates are `[latitude, longitude]` in degrees.
    GreatCircleKm,
}

const EARTH_RADIUS_KM: f64 = 6371.0088;

pub fn planar_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn great_circle_km(a: [f64; 2], b: [f64; 2]) -> f64 {
    let (lat1, lon1) = (a[0].to_radians(), a[1].to_radians());
    let (lat2, lon2) = (b[0].to_radians(), b[1].to_radians());
    let h = ((lat2 - lat1) / 2.0).sin().powi(2)
        + lat1.cos() * lat2.cos() * ((lon2 - lon1) / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

impl Metric {
    pub fn distance(self, a: [f64; 2], b: [f64; 2]) -> f64 {
        match self {
            Metric::Planar => planar_distance(a, b),
            Metric::GreatCircleKm => great_circle_km(a, b),
        }
    }

    pub fn distance_matrix(self, coords: &[[f64; 2]]) -> DMatrix<f64> {
        let n = coords.len();
        DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { self.distance(coords[i], coords[j]) })
    }
}

/// Gaussian-kernel k-nearest-neighbour weights.
///
/// Node pair `(k, l)` is connected iff one is among the other's `k` nearest
/// neighbours, with weight
/// `exp(-(d_kl/s)^2) / sqrt(S_k S_l)`, `S_k = sum_{j in N_k} exp(-(d_kj/s)^2)`.
/// [`KnnWeights::weight`] evaluates the same rule for any pair, which is what
/// the weighted error models use for generator-rule edge weights.
#[derive(Debug, Clone)]
pub struct KnnWeights {
    distances: DMatrix<f64>,
    neighbors: Vec<Vec<usize>>,
    sums: Vec<f64>,
    scale: f64,
}

impl KnnWeights {
    pub fn new(coords: &[[f64; 2]], k: usize, scale: f64, metric: Metric) -> Result<Self> {
        let n = coords.len();
        if k == 0 || k >= n {
            return Err(Error::Parameter(format!("need 0 < k < n, got k={k}, n={n}")));
        }
        if !(scale > 0.0) {
            return Err(Error::Parameter(format!("scale must be positive, got {scale}")));
        }
        let distances = metric.distance_matrix(coords);
        if distances.iter().any(|d| !d.is_finite()) {
            return Err(Error::Parameter("pairwise distances are not finite".into()));
        }
        let mut neighbors = Vec::with_capacity(n);
        for i in 0..n {
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            // stable sort keeps the lower index first on distance ties
            others.sort_by(|&a, &b| distances[(i, a)].total_cmp(&distances[(i, b)]));
            others.truncate(k);
            neighbors.push(others);
        }
        let sums = neighbors
            .iter()
            .enumerate()
            .map(|(i, nb)| nb.iter().map(|&j| kernel(distances[(i, j)], scale)).sum())
            .collect();
        Ok(KnnWeights {
            distances,
            neighbors,
            sums,
            scale,
        })
    }

    pub fn distances(&self) -> &DMatrix<f64> {
        &self.distances
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Kernel weight of the pair `(i, j)` whether or not they are neighbours.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        kernel(self.distances[(i, j)], self.scale) / (self.sums[i] * self.sums[j]).sqrt()
    }

    pub fn graph(&self) -> Graph {
        let n = self.sums.len();
        let mut adj = DMatrix::zeros(n, n);
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                let w = self.weight(i, j);
                adj[(i, j)] = w;
                adj[(j, i)] = w;
            }
        }
        Graph::from_parts(adj, false, true)
    }
}

fn kernel(d: f64, scale: f64) -> f64 {
    (-(d / scale).powi(2)).exp()
}

pub fn knn_weighted(coords: &[[f64; 2]], k: usize, scale: f64, metric: Metric) -> Result<Graph> {
    Ok(KnnWeights::new(coords, k, scale, metric)?.graph())
}

/// Directed cycle with entry `(i, i-1 mod n)` equal to one.
pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::Parameter(format!("cycle needs at least 2 nodes, got {n}")));
    }
    let mut adj = DMatrix::zeros(n, n);
    for i in 0..n {
        adj[(i, (i + n - 1) % n)] = 1.0;
    }
    Ok(Graph::from_parts(adj, true, false))
}

/// Edge-probability kernel on the unit square.
#[derive(Clone)]
pub enum Kernel {
    Constant(f64),
    /// `exp(-(beta1 (x + y) + beta0))`.
    Exponential { beta0: f64, beta1: f64 },
    /// Piecewise constant on `[cuts[k-1], cuts[k]) x [cuts[l-1], cuts[l])`
    /// with value `probs[k][l]`; `cuts` are the right-closed upper edges, the last one 1.
    Block { cuts: Vec<f64>, probs: Vec<Vec<f64>> },
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Kernel::Exponential { beta0, beta1 } => f
                .debug_struct("Exponential")
                .field("beta0", beta0)
                .field("beta1", beta1)
                .finish(),
            Kernel::Block { cuts, probs } => f
                .debug_struct("Block")
                .field("cuts", cuts)
                .field("probs", probs)
                .finish(),
            Kernel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Kernel {
    /// Block kernel matching an SBM with the given community sizes.
    pub fn from_sbm(spec: &SbmSpec) -> Result<Kernel> {
        spec.validate()?;
        let n = spec.n() as f64;
        let mut acc = 0usize;
        let cuts = spec
            .sizes
            .iter()
            .map(|s| {
                acc += s;
                acc as f64 / n
            })
            .collect();
        Ok(Kernel::Block {
            cuts,
            probs: spec.probs.clone(),
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Kernel::Constant(v) => *v,
            Kernel::Exponential { beta0, beta1 } => (-(beta1 * (x + y) + beta0)).exp(),
            Kernel::Block { cuts, probs } => probs[block_of(cuts, x)][block_of(cuts, y)],
            Kernel::Custom(f) => f(x, y),
        }
    }

    /// Evaluates and rejects values outside `[0, 1]`.
    pub fn prob(&self, x: f64, y: f64) -> Result<f64> {
        let value = self.eval(x, y);
        if (0.0..=1.0).contains(&value) {
            Ok(value)
        } else {
            Err(Error::KernelDomain { x, y, value })
        }
    }
}

/// Index of the block containing `x`, with blocks closed on the right.
fn block_of(cuts: &[f64], x: f64) -> usize {
    let tol = 1e-12;
    cuts.iter()
        .position(|&c| x <= c + tol)
        .unwrap_or(cuts.len() - 1)
}

/// Symmetric piecewise-constant kernel on a `blocks x blocks` grid of equal
/// cells, random values in `[0, 1]`, integrating exactly to `eps`.
pub fn random_block_kernel<R: Rng + ?Sized>(blocks: usize, eps: f64, rng: &mut R) -> Result<Kernel> {
    if blocks == 0 {
        return Err(Error::Parameter("need at least one block".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let mut raw = vec![vec![0.0; blocks]; blocks];
    for i in 0..blocks {
        for j in 0..=i {
            let v: f64 = rng.random();
            raw[i][j] = v;
            raw[j][i] = v;
        }
    }
    let mean = raw.iter().flatten().sum::<f64>() / (blocks * blocks) as f64;
    let mut vals: Vec<Vec<f64>> = raw
        .iter()
        .map(|row| row.iter().map(|v| eps * v / mean.max(f64::MIN_POSITIVE)).collect())
        .collect();
    let max = vals.iter().flatten().copied().fold(0.0, f64::max);
    if max > 1.0 {
        // shrink toward the constant eps; keeps the mean and brings the max to 1
        let t = (1.0 - eps) / (max - eps);
        for v in vals.iter_mut().flatten() {
            *v = eps + t * (*v - eps);
        }
    }
    let cuts = (1..=blocks).map(|k| k as f64 / blocks as f64).collect();
    Ok(Kernel::Block { cuts, probs: vals })
}

/// How the latent node positions `u_i` are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NodeSampling {
    #[default]
    Uniform,
    /// `u_i = i / n` for `i = 1..=n`.
    DeterministicGrid,
}

#[derive(Debug, Clone)]
pub struct GraphonSpec {
    pub kernel: Kernel,
    pub node_sampling: NodeSampling,
    pub directed: bool,
}

impl GraphonSpec {
    pub fn undirected(kernel: Kernel, node_sampling: NodeSampling) -> Self {
        GraphonSpec {
            kernel,
            node_sampling,
            directed: false,
        }
    }
}

/// Kernel graph: draws `u_1..u_n`, then connects each slot independently
/// with probability `W(u_i, u_j)`.
pub fn sample_graphon<R: Rng + ?Sized>(spec: &GraphonSpec, n: usize, rng: &mut R) -> Result<Graph> {
    let u: Vec<f64> = match spec.node_sampling {
        NodeSampling::Uniform => (0..n).map(|_| rng.random()).collect(),
        NodeSampling::DeterministicGrid => (1..=n).map(|i| i as f64 / n as f64).collect(),
    };
    let mut adj = DMatrix::zeros(n, n);
    for i in 0..n {
        let cols = if spec.directed { n } else { i };
        for j in 0..cols {
            if i == j {
                continue;
            }
            let p = spec.kernel.prob(u[i], u[j])?;
            if rng.random::<f64>() < p {
                adj[(i, j)] = 1.0;
                if !spec.directed {
                    adj[(j, i)] = 1.0;
                }
            }
        }
    }
    Ok(Graph::from_parts(adj, spec.directed, false))
}

/// `(1/M) sum_i c_i W_i(x, y)`.
pub fn average_graphons(kernels: &[Kernel], coeffs: &[f64], x: f64, y: f64) -> Result<f64> {
    if kernels.is_empty() {
        return Err(Error::Parameter("no kernels to average".into()));
    }
    if kernels.len() != coeffs.len() {
        return Err(Error::Parameter(format!(
            "{} kernels but {} coefficients",
            kernels.len(),
            coeffs.len()
        )));
    }
    let mut total = 0.0;
    for (k, &c) in kernels.iter().zip(coeffs) {
        check_probability("coefficient", c)?;
        total += c * k.prob(x, y)?;
    }
    Ok(total / kernels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn er_extremes() {
        let mut rng = stream(1, 0);
        for directed in [false, true] {
            let g = erdos_renyi(5, 0.0, directed, &mut rng).unwrap();
            assert_eq!(g.edge_count(), 0);
            let g = erdos_renyi(5, 1.0, directed, &mut rng).unwrap();
            g.validate().unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    assert_eq!(g.adj()[(i, j)], if i == j { 0.0 } else { 1.0 });
                }
            }
        }
        assert!(matches!(erdos_renyi(5, 1.5, false, &mut rng), Err(Error::Parameter(_))));
    }

    #[test]
    fn er_directed_edge_count_mean() {
        // binomial mean 0.05 * 500 * 499 over 1000 draws, 3 sigma of the mean
        let mut rng = stream(3, 0);
        let n = 500;
        let p = 0.05;
        let reps = 1000;
        let total: usize = (0..reps)
            .map(|_| erdos_renyi(n, p, true, &mut rng).unwrap().edge_count())
            .sum();
        let slots = (n * (n - 1)) as f64;
        let mean = total as f64 / reps as f64;
        let se = (slots * p * (1.0 - p) / reps as f64).sqrt();
        assert!((mean - p * slots).abs() < 3.0 * se, "{mean} vs {}", p * slots);
    }

    #[test]
    fn sbm_complete_and_size_errors() {
        let mut rng = stream(2, 0);
        let spec = SbmSpec::new(vec![2, 2], vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let g = sbm(&spec, false, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(SbmSpec::new(vec![2, 2], vec![vec![0.1]]).is_err());
        assert!(SbmSpec::new(vec![3], vec![vec![1.2]]).is_err());
        assert!(SbmSpec::planted_partition(10, 3, 0.3, 0.1).is_err());
    }

    #[test]
    fn sbm_memberships_follow_contiguous_ordering() {
        let spec = SbmSpec::new(vec![2, 3], vec![vec![0.5, 0.1], vec![0.1, 0.5]]).unwrap();
        assert_eq!(spec.memberships(), vec![0, 0, 1, 1, 1]);
    }

    #[test]
    fn sbm_directed_respects_block_direction() {
        // edges only from community 1 into community 0
        let mut rng = stream(4, 0);
        let spec = SbmSpec::new(vec![3, 3], vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let g = sbm(&spec, true, &mut rng).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expected = if i < 3 && j >= 3 { 1.0 } else { 0.0 };
                assert_eq!(g.adj()[(i, j)], expected);
            }
        }
    }

    #[test]
    fn geometric_forced_coordinates() {
        let g = geometric_from_coords(vec![[0.0, 0.0], [1.0, 1.0]], 0.5).unwrap();
        assert_eq!(g.graph.edge_count(), 0);
        let g = geometric_from_coords(vec![[0.0, 0.5], [0.1, 0.5], [0.2, 0.5]], 0.15).unwrap();
        let a = g.graph.adj();
        assert_eq!((a[(0, 1)], a[(1, 2)], a[(0, 2)]), (1.0, 1.0, 0.0));
        assert!(geometric_from_coords(vec![], 0.0).is_err());
    }

    #[test]
    fn knn_equilateral_weights_equal() {
        let h = 3f64.sqrt() / 2.0;
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.5, h]];
        let g = knn_weighted(&pts, 2, 20.0, Metric::Planar).unwrap();
        let w = g.adj()[(0, 1)];
        assert!(w > 0.0);
        for (i, j) in [(0, 2), (1, 2), (1, 0), (2, 1)] {
            assert!((g.adj()[(i, j)] - w).abs() < 1e-15);
        }
    }

    #[test]
    fn knn_sole_neighbor_at_zero_distance_has_unit_weight() {
        let pts = [[0.0, 0.0], [0.0, 0.0]];
        let g = knn_weighted(&pts, 1, 20.0, Metric::Planar).unwrap();
        assert_eq!(g.adj()[(0, 1)], 1.0);
    }

    #[test]
    fn knn_ties_prefer_lower_index() {
        // nodes 1 and 2 are both at distance 1 from node 0
        let pts = [[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [5.0, 5.0]];
        let w = KnnWeights::new(&pts, 1, 1.0, Metric::Planar).unwrap();
        assert_eq!(w.neighbors(0), &[1]);
        assert!(KnnWeights::new(&pts, 4, 1.0, Metric::Planar).is_err());
    }

    #[test]
    fn great_circle_known_distance() {
        // Helsinki to Oulu is about 540 km
        let d = great_circle_km([60.1699, 24.9384], [65.0121, 25.4651]);
        assert!((d - 540.0).abs() < 5.0, "{d}");
        assert!(great_circle_km([10.0, 20.0], [10.0, 20.0]).abs() < 1e-12);
    }

    #[test]
    fn cycle_properties() {
        let g = cycle_graph(3).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[0., 0., 1., 1., 0., 0., 0., 1., 0.]);
        assert_eq!(g.adj(), &expected);
        let g = cycle_graph(6).unwrap();
        let mut p = DMatrix::identity(6, 6);
        for _ in 0..6 {
            p = g.adj() * p;
        }
        assert_eq!(p, DMatrix::identity(6, 6));
        assert!(cycle_graph(1).is_err());
    }

    #[test]
    fn kernel_domain_is_checked() {
        let mut rng = stream(5, 0);
        let spec = GraphonSpec::undirected(Kernel::Constant(1.5), NodeSampling::Uniform);
        assert!(matches!(
            sample_graphon(&spec, 4, &mut rng),
            Err(Error::KernelDomain { .. })
        ));
    }

    #[test]
    fn block_kernel_on_grid_reproduces_community_blocks() {
        let mut rng = stream(6, 0);
        let spec = SbmSpec::new(vec![3, 5], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let gspec = GraphonSpec::undirected(Kernel::from_sbm(&spec).unwrap(), NodeSampling::DeterministicGrid);
        let g = sample_graphon(&gspec, 8, &mut rng).unwrap();
        let members = spec.memberships();
        for i in 0..8 {
            for j in 0..8 {
                let expected = if i != j && members[i] == members[j] { 1.0 } else { 0.0 };
                assert_eq!(g.adj()[(i, j)], expected, "({i},{j})");
            }
        }
    }

    #[test]
    fn random_block_kernel_integrates_to_eps() {
        let mut rng = stream(7, 0);
        for eps in [0.05, 0.2, 0.7] {
            let k = random_block_kernel(6, eps, &mut rng).unwrap();
            let Kernel::Block { probs, .. } = &k else { unreachable!() };
            let mean = probs.iter().flatten().sum::<f64>() / 36.0;
            assert!((mean - eps).abs() < 1e-12);
            assert!(probs.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
            for i in 0..6 {
                for j in 0..6 {
                    assert_eq!(probs[i][j], probs[j][i]);
                }
            }
        }
    }

    #[test]
    fn average_graphons_trivial_cases() {
        let k = vec![Kernel::Constant(0.3)];
        assert!((average_graphons(&k, &[1.0], 0.2, 0.9).unwrap() - 0.3).abs() < 1e-15);
        let ks = vec![Kernel::Constant(0.3), Kernel::Exponential { beta0: 1.0, beta1: 2.0 }];
        assert_eq!(average_graphons(&ks, &[0.0, 0.0], 0.4, 0.1).unwrap(), 0.0);
        assert!(average_graphons(&[], &[], 0.0, 0.0).is_err());
        assert!(average_graphons(&ks, &[1.0], 0.0, 0.0).is_err());
    }
}
