//! Property checks shared by the proptest suite and the acceptance runner.
//! Each check takes a seed plus a few drawn parameters and builds its own
//! random inputs from the seed.
#![allow(dead_code)]

use gel::error_models::{
    perturb_m1, perturb_m2, perturb_m2w, perturb_m3, perturb_m3w, ErrorPartition, VarianceMode, WeightOptions,
    WeightSource,
};
use gel::ica::{is_orthogonal, jd_objective, joint_diagonalize, md_index_squared, JD_MAX_SWEEPS, JD_TOL};
use gel::models::{cycle_graph, erdos_renyi, knn_weighted, random_geometric, sbm, Metric, SbmSpec};
use gel::rng::{stream, StreamRng};
use gel::signals::graph_autocorrelation;
use gel::{Error, Graph};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub const CASES: u32 = 1000;

pub type Check = Result<(), TestCaseError>;

pub fn gauss(rng: &mut StreamRng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn gauss_matrix(p: usize, q: usize, rng: &mut StreamRng) -> DMatrix<f64> {
    DMatrix::from_fn(p, q, |_, _| gauss(rng))
}

/// Zero diagonal, symmetric when undirected, 0/1 when unweighted, nonnegative.
pub fn check_graph(g: &Graph, directed: bool, weighted: bool) -> Check {
    prop_assert!(g.validate().is_ok(), "{:?}", g.validate());
    prop_assert_eq!(g.directed(), directed);
    prop_assert_eq!(g.weighted(), weighted);
    let a = g.adj();
    for i in 0..g.n() {
        prop_assert_eq!(a[(i, i)], 0.0);
    }
    if !directed {
        prop_assert!(g.is_symmetric());
    }
    prop_assert!(a.iter().all(|v| *v >= 0.0 && v.is_finite()));
    Ok(())
}

fn random_weights(a: &Graph, rng: &mut StreamRng) -> Graph {
    let n = a.n();
    let mut adj = a.adj().clone();
    for i in 0..n {
        let cols = if a.directed() { n } else { i };
        for j in 0..cols {
            if adj[(i, j)] != 0.0 {
                let w = rng.random_range(0.1..2.0);
                adj[(i, j)] = w;
                if !a.directed() {
                    adj[(j, i)] = w;
                }
            }
        }
    }
    Graph::new(adj, a.directed(), true).unwrap()
}

fn random_labels(n: usize, cells: u32, directed: bool, rng: &mut StreamRng) -> DMatrix<u32> {
    let mut labels = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if directed || j < i {
                let l = rng.random_range(0..cells);
                labels[(i, j)] = l;
                if !directed {
                    labels[(j, i)] = l;
                }
            }
        }
    }
    labels
}

/// Every generator returns a graph satisfying the type invariants, and the
/// edge list round trip is lossless.
pub fn generators_are_valid(seed: u64, n: usize, p: f64, directed: bool) -> Check {
    let mut rng = stream(seed, 0);
    let er = erdos_renyi(n, p, directed, &mut rng).unwrap();
    check_graph(&er, directed, false)?;
    prop_assert_eq!(Graph::from_edges(n, &er.edges(), directed, false).unwrap(), er);

    let half = n / 2;
    let spec = SbmSpec::new(vec![half, n - half], vec![vec![p, 0.5 * p], vec![0.5 * p, 1.0 - p]]).unwrap();
    check_graph(&sbm(&spec, directed, &mut rng).unwrap(), directed, false)?;

    let geo = random_geometric(n, 0.1 + p, &mut rng).unwrap();
    check_graph(&geo.graph, false, false)?;

    let k = 1 + (seed as usize % (n - 1));
    let knn = knn_weighted(&geo.coords, k, 0.2, Metric::Planar).unwrap();
    check_graph(&knn, false, true)?;
    prop_assert!(knn.edge_count() >= n * k / 2);
    prop_assert_eq!(Graph::from_edges(n, &knn.edges(), false, true).unwrap(), knn);

    check_graph(&cycle_graph(n).unwrap(), true, false)?;
    Ok(())
}

/// Constructors reject matrices that break the invariants.
pub fn invalid_inputs_are_rejected(seed: u64, n: usize) -> Check {
    let mut rng = stream(seed, 1);
    let i = rng.random_range(0..n);
    let j = (i + rng.random_range(1..n)) % n;

    let mut diag = DMatrix::zeros(n, n);
    diag[(i, i)] = 1.0;
    prop_assert!(matches!(Graph::new(diag, true, false), Err(Error::Domain(_))));

    let mut asym = DMatrix::zeros(n, n);
    asym[(i, j)] = 1.0;
    prop_assert!(matches!(Graph::new(asym.clone(), false, false), Err(Error::Domain(_))));
    prop_assert!(Graph::new(asym, true, false).is_ok());

    let mut half = DMatrix::zeros(n, n);
    half[(i, j)] = 0.5;
    half[(j, i)] = 0.5;
    prop_assert!(matches!(Graph::new(half.clone(), false, false), Err(Error::Domain(_))));
    prop_assert!(Graph::new(half, false, true).is_ok());

    // two masks that both claim the slot (i, j)
    let full = DMatrix::from_fn(n, n, |r, c| if r == c { 0.0 } else { 1.0 });
    let mut one = DMatrix::zeros(n, n);
    one[(i, j)] = 1.0;
    let overlap = ErrorPartition::from_masks(&[full.clone(), one], vec![0.1; 2], vec![0.1; 2], vec![0.0; 2]);
    prop_assert!(matches!(overlap, Err(Error::Partition(_))));
    let mut gap = full.clone();
    gap[(i, j)] = 0.0;
    prop_assert!(matches!(
        ErrorPartition::from_masks(&[gap], vec![0.1], vec![0.1], vec![0.0]),
        Err(Error::Partition(_))
    ));

    let bad = rng.random_range(1.0001..3.0);
    prop_assert!(matches!(ErrorPartition::uniform(n, bad, 0.0, 0.0), Err(Error::Parameter(_))));
    prop_assert!(matches!(erdos_renyi(n, bad, false, &mut rng), Err(Error::Parameter(_))));
    prop_assert!(SbmSpec::new(vec![n], vec![vec![bad]]).is_err());
    Ok(())
}

/// Autocorrelation ignores positive rescaling of the signal and of the
/// graph, and constant offsets of the signal.
pub fn autocorrelation_scale_invariance(seed: u64, n: usize, c_signal: f64, c_graph: f64, offset: f64) -> Check {
    let mut rng = stream(seed, 2);
    let a = erdos_renyi(n, 0.3, rng.random(), &mut rng).unwrap();
    let w = random_weights(&a, &mut rng);
    let z = DVector::from_fn(n, |_, _| gauss(&mut rng));
    let moved = z.map(|v| c_signal * v + offset);
    match graph_autocorrelation(&z, &w, 1) {
        Ok(r) => {
            prop_assert!((-1.0..=1.0).contains(&r));
            let r2 = graph_autocorrelation(&moved, &w.scaled(c_graph), 1).unwrap();
            prop_assert!((r - r2).abs() <= 1e-9, "{} vs {}", r, r2);
        }
        Err(e) => {
            // an empty graph shifts everything to zero whatever the scale
            prop_assert!(matches!(e, Error::Degenerate(_)));
            prop_assert!(graph_autocorrelation(&moved, &w.scaled(c_graph), 1).is_err());
        }
    }
    Ok(())
}

/// `D(P L Gamma, Omega) = D(Gamma, Omega)` for permutations `P` and
/// nonsingular diagonal `L`; `D` lies in `[0, 1]` and vanishes at the inverse.
pub fn md_scaled_permutation_invariance(seed: u64, p: usize) -> Check {
    let mut rng = stream(seed, 3);
    let gamma = gauss_matrix(p, p, &mut rng);
    let omega = gauss_matrix(p, p, &mut rng);
    let mut perm: Vec<usize> = (0..p).collect();
    perm.shuffle(&mut rng);
    let scales: Vec<f64> = (0..p)
        .map(|_| {
            let s: f64 = rng.random_range(0.1..10.0);
            if rng.random() { s } else { -s }
        })
        .collect();
    let moved = DMatrix::from_fn(p, p, |r, c| scales[r] * gamma[(perm[r], c)]);
    let d = md_index_squared(&gamma, &omega).unwrap();
    let d2 = md_index_squared(&moved, &omega).unwrap();
    prop_assert!((0.0..=1.0).contains(&d));
    prop_assert!((d - d2).abs() <= 1e-10, "{} vs {}", d, d2);
    if let Some(inv) = omega.clone().try_inverse() {
        prop_assert!(md_index_squared(&inv, &omega).unwrap() <= 1e-12);
    }
    Ok(())
}

/// The joint diagonalizer returns an orthogonal matrix that does no worse
/// than the identity.
pub fn jd_rotation_is_orthogonal(seed: u64, p: usize, k: usize) -> Check {
    let mut rng = stream(seed, 4);
    let mats: Vec<DMatrix<f64>> = (0..k)
        .map(|_| {
            let m = gauss_matrix(p, p, &mut rng);
            &m + m.transpose()
        })
        .collect();
    let jd = joint_diagonalize(&mats, JD_TOL, JD_MAX_SWEEPS).unwrap();
    prop_assert!(is_orthogonal(&jd.rotation, 1e-10));
    let eye = DMatrix::identity(p, p);
    prop_assert!(jd_objective(&jd.rotation, &mats) >= jd_objective(&eye, &mats) * (1.0 - 1e-12));
    Ok(())
}

/// Every error model keeps the diagonal zero, keeps undirected graphs
/// symmetric and leaves the direction flag alone.
pub fn error_models_preserve_invariants(seed: u64, n: usize, directed: bool, eps1: f64, eps2: f64, c: f64) -> Check {
    let mut rng = stream(seed, 5);
    let a = erdos_renyi(n, 0.3, directed, &mut rng).unwrap();
    check_graph(&perturb_m1(&a, eps1, &mut rng).unwrap(), directed, false)?;
    check_graph(&perturb_m2(&a, eps1, eps2, &mut rng).unwrap(), directed, false)?;
    prop_assert_eq!(&perturb_m2(&a, 0.0, 0.0, &mut rng).unwrap(), &a);

    let labels = random_labels(n, 3, directed, &mut rng);
    let part = ErrorPartition::from_labels(
        labels,
        vec![eps1, eps2, 0.5],
        vec![eps2, eps1, 0.0],
        vec![c, 0.0, 2.0 * c],
    )
    .unwrap();
    check_graph(&perturb_m3(&a, &part, &mut rng).unwrap(), directed, false)?;

    let aw = random_weights(&a, &mut rng);
    for variance in [VarianceMode::Global, VarianceMode::PerNode] {
        let opts = WeightOptions {
            source: WeightSource::ResampleFromExisting,
            variance,
            rule: None,
        };
        for out in [
            perturb_m2w(&aw, eps1, eps2, c, opts, &mut rng),
            perturb_m3w(&aw, &part, opts, &mut rng),
        ] {
            match out {
                Ok(w) => check_graph(&w, directed, true)?,
                // nothing to resample added weights from
                Err(Error::Degenerate(_)) => prop_assert_eq!(aw.edge_count(), 0),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }
    Ok(())
}

pub fn size() -> impl Strategy<Value = usize> {
    3usize..24
}

pub fn prob() -> impl Strategy<Value = f64> {
    0.0f64..=1.0
}
