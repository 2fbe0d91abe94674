#![allow(dead_code)]

use lapbc_core::graph::{Region, VertexId, WeightedGraph};
use nalgebra::DMatrix;
use rand::Rng;

/// Random graph on `Int(0..n)` with `m, b ~ U[0.5, 2]`. A random spanning
/// tree is laid down first when `connected` is set; extra edges appear with
/// probability `p`. Killing terms are zero unless `killing` is set.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64, connected: bool, killing: bool) -> WeightedGraph {
    let vertices = (0..n)
        .map(|i| {
            let c = if killing && rng.random_bool(0.3) { rng.random_range(0.0..1.0) } else { 0.0 };
            (VertexId::Int(i as i64), rng.random_range(0.5..2.0), c)
        })
        .collect();
    let mut pairs = std::collections::BTreeSet::new();
    if connected {
        for i in 1..n {
            let j = rng.random_range(0..i);
            pairs.insert((j, i));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                pairs.insert((i, j));
            }
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(i, j)| (VertexId::Int(i as i64), VertexId::Int(j as i64), rng.random_range(0.5..2.0)))
        .collect();
    WeightedGraph::new(vertices, edges).expect("generated graph is valid")
}

/// Random graph with unit weights, unit measure and no killing.
pub fn random_unit_graph(rng: &mut impl Rng, n: usize, p: f64) -> WeightedGraph {
    let vertices = (0..n).map(|i| (VertexId::Int(i as i64), 1.0, 0.0)).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((VertexId::Int(i as i64), VertexId::Int(j as i64), 1.0));
            }
        }
    }
    WeightedGraph::new(vertices, edges).expect("generated graph is valid")
}

pub fn whole(g: &WeightedGraph) -> Region {
    Region::from_vertices(g, g.ids().to_vec())
}

/// Connected components by union-find over the edge list.
pub fn component_labels(g: &WeightedGraph) -> Vec<usize> {
    let n = g.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for (i, j, b) in g.edges() {
        if b > 0.0 {
            let (a, c) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = c;
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// Symmetric eigenvalues and eigenvectors by cyclic Jacobi rotations.
/// Columns of the returned matrix are the eigenvectors.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // skip rotations that cannot change anything at this precision
                if apq.abs() < 1e-300 || apq.abs() <= f64::EPSILON * 1e-3 * (a[(p, p)].abs() * a[(q, q)].abs()).sqrt() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

/// Deterministic proptest configuration.
pub fn fixed(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Default::default()
    }
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Random subset of the vertex ids with at least `min` elements.
pub fn random_subset(rng: &mut impl Rng, g: &WeightedGraph, min: usize) -> Vec<VertexId> {
    let n = g.len();
    let lo = min.clamp(1, n);
    let k = rng.random_range(lo..=n);
    let mut ids = g.ids().to_vec();
    for i in (1..ids.len()).rev() {
        let j = rng.random_range(0..=i);
        ids.swap(i, j);
    }
    ids.truncate(k);
    ids
}
