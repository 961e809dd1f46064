//! Dense adjacency matrices and their edge-list serialization.
//!
//! Entry `adj[(i, j)]` is the weight of the edge from node `j` to node `i`.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: DMatrix<f64>,
    directed: bool,
    weighted: bool,
}

impl Graph {
    /// Wraps an adjacency matrix after checking the graph invariants.
    pub fn new(adj: DMatrix<f64>, directed: bool, weighted: bool) -> Result<Self> {
        let g = Graph {
            adj,
            directed,
            weighted,
        };
        g.validate()?;
        Ok(g)
    }

    pub(crate) fn from_parts(adj: DMatrix<f64>, directed: bool, weighted: bool) -> Self {
        debug_assert!(adj.is_square());
        Graph {
            adj,
            directed,
            weighted,
        }
    }

    pub fn empty(n: usize, directed: bool, weighted: bool) -> Self {
        Graph::from_parts(DMatrix::zeros(n, n), directed, weighted)
    }

    pub fn n(&self) -> usize {
        self.adj.nrows()
    }

    pub fn adj(&self) -> &DMatrix<f64> {
        &self.adj
    }

    pub fn into_adj(self) -> DMatrix<f64> {
        self.adj
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn weighted(&self) -> bool {
        self.weighted
    }

    /// Zero diagonal, finite entries, exact symmetry when undirected, 0/1 entries when unweighted.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if !self.adj.is_square() {
            return Err(Error::Domain(format!(
                "adjacency is {}x{}, not square",
                self.adj.nrows(),
                self.adj.ncols()
            )));
        }
        for i in 0..n {
            if self.adj[(i, i)] != 0.0 {
                return Err(Error::Domain(format!("nonzero diagonal entry at node {i}")));
            }
            for j in 0..n {
                let v = self.adj[(i, j)];
                if !v.is_finite() {
                    return Err(Error::Domain(format!("non-finite weight at ({i}, {j})")));
                }
                if !self.weighted && v != 0.0 && v != 1.0 {
                    return Err(Error::Domain(format!(
                        "unweighted graph has weight {v} at ({i}, {j})"
                    )));
                }
                if !self.directed && v != self.adj[(j, i)] {
                    return Err(Error::Domain(format!(
                        "undirected graph is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of edges: nonzero ordered entries if directed, unordered pairs otherwise.
    pub fn edge_count(&self) -> usize {
        let nnz = self.adj.iter().filter(|v| **v != 0.0).count();
        if self.directed {
            nnz
        } else {
            nnz / 2
        }
    }

    /// Fraction of off-diagonal slots that carry an edge.
    pub fn density(&self) -> f64 {
        let n = self.n() as f64;
        let slots = if self.directed {
            n * (n - 1.0)
        } else {
            n * (n - 1.0) / 2.0
        };
        if slots == 0.0 {
            0.0
        } else {
            self.edge_count() as f64 / slots
        }
    }

    pub fn is_symmetric(&self) -> bool {
        is_symmetric(&self.adj)
    }

    /// Nonzero weights, each stored entry once (both orientations for undirected graphs).
    pub fn nonzero_weights(&self) -> Vec<f64> {
        self.adj.iter().copied().filter(|v| *v != 0.0).collect()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.adj * x
    }

    /// `W^k x` by repeated matrix-vector products.
    pub fn apply_power(&self, x: &DVector<f64>, k: usize) -> DVector<f64> {
        let mut out = x.clone();
        for _ in 0..k {
            out = &self.adj * out;
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Graph {
        Graph::from_parts(&self.adj * factor, self.directed, true)
    }

    /// Edge list rows `(src, dst, weight)`; undirected pairs are listed once with `src < dst`.
    pub fn edges(&self) -> Vec<Edge> {
        let n = self.n();
        let mut out = Vec::new();
        for dst in 0..n {
            for src in 0..n {
                let w = self.adj[(dst, src)];
                if w == 0.0 || (!self.directed && src > dst) {
                    continue;
                }
                out.push(Edge { src, dst, weight: w });
            }
        }
        out.sort_by_key(|e| (e.src, e.dst));
        out
    }

    pub fn from_edges(n: usize, edges: &[Edge], directed: bool, weighted: bool) -> Result<Graph> {
        let mut adj = DMatrix::zeros(n, n);
        for e in edges {
            if e.src >= n || e.dst >= n {
                return Err(Error::Parameter(format!(
                    "edge ({}, {}) references a node outside 0..{n}",
                    e.src, e.dst
                )));
            }
            adj[(e.dst, e.src)] = e.weight;
            if !directed {
                adj[(e.src, e.dst)] = e.weight;
            }
        }
        Graph::new(adj, directed, weighted)
    }

    /// Writes `<stem>.csv` (edge list) and `<stem>.json` (sidecar).
    pub fn write(&self, stem: &Path, seed: Option<u64>) -> Result<()> {
        let csv_path = stem.with_extension("csv");
        let mut wtr = csv::Writer::from_writer(Vec::new());
        for e in self.edges() {
            wtr.serialize(e)?;
        }
        let mut bytes = wtr
            .into_inner()
            .map_err(|e| Error::Numerical(format!("csv buffer: {e}")))?;
        if bytes.is_empty() {
            bytes = b"src,dst,weight\n".to_vec();
        }
        crate::output::write_atomic(&csv_path, &bytes)?;

        let meta = GraphMeta {
            n: self.n(),
            directed: self.directed,
            weighted: self.weighted,
            seed,
        };
        let json = serde_json::to_vec_pretty(&meta)?;
        crate::output::write_atomic(&stem.with_extension("json"), &json)
    }

    pub fn read(stem: &Path) -> Result<(Graph, GraphMeta)> {
        let json_path = stem.with_extension("json");
        let text = fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
        let meta: GraphMeta = serde_json::from_str(&text)?;
        let csv_path = stem.with_extension("csv");
        let mut rdr = csv::Reader::from_path(&csv_path)?;
        let edges = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<Edge>, _>>()?;
        let g = Graph::from_edges(meta.n, &edges, meta.directed, meta.weighted)?;
        Ok((g, meta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// JSON sidecar of an edge-list file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub n: usize,
    pub directed: bool,
    pub weighted: bool,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub fn is_symmetric(m: &DMatrix<f64>) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    (0..n).all(|i| (0..i).all(|j| m[(i, j)] == m[(j, i)]))
}
