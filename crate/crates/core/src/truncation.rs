//! Finite operators on `ℓ²(K, m)` with Dirichlet, Neumann or mixed boundary
//! conditions.
//!
//! All three share the off-diagonal entries `-b(x,y)/m(x)` for `x, y ∈ K`.
//! The Neumann diagonal is `(Σ_{y∈K} b(x,y) + c(x))/m(x)`; Dirichlet adds the
//! boundary weight `w(x) = Σ_{y∉K} b(x,y)`, mixed adds it only on `A ⊆ ∂K`.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphGenerator, RadialProfile, Region, VertexId, WeightedGraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    /// Dirichlet on the listed boundary vertices, Neumann elsewhere.
    Mixed(BTreeSet<VertexId>),
}

impl BoundaryCondition {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::Mixed(_) => "mixed",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    measure: Vec<f64>,
    killing: Vec<f64>,
    boundary: Vec<f64>,
    bc: BoundaryCondition,
    diag: Vec<f64>,
    /// `(j, b(i,j))` for `j ∈ K`, symmetric.
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl TruncatedOperator {
    fn assemble(
        ids: Vec<VertexId>,
        measure: Vec<f64>,
        killing: Vec<f64>,
        boundary: Vec<f64>,
        adjacency: Vec<Vec<(usize, f64)>>,
        bc: BoundaryCondition,
    ) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::EmptySet);
        }
        let index: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
        if index.len() != ids.len() {
            return Err(Error::Parameter("vertex set lists a vertex twice".into()));
        }
        if let BoundaryCondition::Mixed(a) = &bc {
            for x in a {
                match index.get(x) {
                    Some(&i) if boundary[i] > 0.0 => {}
                    _ => {
                        return Err(Error::Parameter(format!(
                            "mixed boundary set contains {x}, which is not a boundary vertex of K"
                        )))
                    }
                }
            }
        }
        let diag = (0..ids.len())
            .map(|i| {
                let inner: f64 = adjacency[i].iter().map(|(_, b)| b).sum();
                let w = match &bc {
                    BoundaryCondition::Dirichlet => boundary[i],
                    BoundaryCondition::Neumann => 0.0,
                    BoundaryCondition::Mixed(a) if a.contains(&ids[i]) => boundary[i],
                    BoundaryCondition::Mixed(_) => 0.0,
                };
                (inner + killing[i] + w) / measure[i]
            })
            .collect();
        Ok(TruncatedOperator { ids, index, measure, killing, boundary, bc, diag, adjacency })
    }

    /// The operator of a finite graph on its full vertex set (no boundary).
    pub fn from_graph(g: &WeightedGraph) -> Result<Self> {
        let n = g.len();
        Self::assemble(
            g.ids().to_vec(),
            (0..n).map(|i| g.measure_at(i)).collect(),
            (0..n).map(|i| g.killing_at(i)).collect(),
            vec![0.0; n],
            (0..n).map(|i| g.arcs(i).to_vec()).collect(),
            BoundaryCondition::Neumann,
        )
    }

    /// Path operator of a radial profile, with `B_N` as the boundary weight
    /// of the last sphere. Vertices are `Int(0..=N)`.
    pub fn from_profile(p: &RadialProfile, bc: BoundaryCondition) -> Result<Self> {
        let q = p.quotient();
        let n = q.len();
        let mut boundary = vec![0.0; n];
        boundary[n - 1] = p.outward()[n - 1];
        Self::assemble(
            q.ids().to_vec(),
            p.masses().to_vec(),
            p.killing().to_vec(),
            boundary,
            (0..n).map(|i| q.arcs(i).to_vec()).collect(),
            bc,
        )
    }

    /// Same vertex set, different boundary condition.
    pub fn with_boundary(&self, bc: BoundaryCondition) -> Result<Self> {
        Self::assemble(
            self.ids.clone(),
            self.measure.clone(),
            self.killing.clone(),
            self.boundary.clone(),
            self.adjacency.clone(),
            bc,
        )
    }

    /// Operator restricted to a subset of indices (sorted), keeping the
    /// boundary condition. Edges to dropped vertices are discarded.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let adjacency = keep
            .iter()
            .map(|&i| {
                self.adjacency[i]
                    .iter()
                    .filter_map(|&(j, b)| pos.get(&j).map(|&a| (a, b)))
                    .collect()
            })
            .collect();
        let bc = match &self.bc {
            BoundaryCondition::Mixed(a) => BoundaryCondition::Mixed(
                keep.iter().map(|&i| self.ids[i].clone()).filter(|x| a.contains(x)).collect(),
            ),
            other => other.clone(),
        };
        Self::assemble(
            keep.iter().map(|&i| self.ids[i].clone()).collect(),
            keep.iter().map(|&i| self.measure[i]).collect(),
            keep.iter().map(|&i| self.killing[i]).collect(),
            keep.iter().map(|&i| self.boundary[i]).collect(),
            adjacency,
            bc,
        )
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn index_of(&self, x: &VertexId) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn require_index(&self, x: &VertexId) -> Result<usize> {
        self.index_of(x).ok_or_else(|| Error::UnknownVertex(x.clone()))
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn killing(&self) -> &[f64] {
        &self.killing
    }

    /// `w(x) = Σ_{y∉K} b(x,y)`.
    pub fn boundary_weight(&self) -> &[f64] {
        &self.boundary
    }

    pub fn boundary_condition(&self) -> &BoundaryCondition {
        &self.bc
    }

    /// `∂K`: vertices of `K` adjacent to the halo.
    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        (0..self.len()).filter(|&i| self.boundary[i] > 0.0).map(|i| self.ids[i].clone()).collect()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn arcs(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn max_diag(&self) -> f64 {
        self.diag.iter().copied().fold(0.0, f64::max)
    }

    /// Entry `T[i][j]`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        self.adjacency[i]
            .iter()
            .find(|&&(k, _)| k == j)
            .map_or(0.0, |&(_, b)| -b / self.measure[i])
    }

    /// The part of `w(i)` this boundary condition keeps on the diagonal.
    pub fn kept_boundary(&self, i: usize) -> f64 {
        match &self.bc {
            BoundaryCondition::Dirichlet => self.boundary[i],
            BoundaryCondition::Mixed(a) if a.contains(&self.ids[i]) => self.boundary[i],
            _ => 0.0,
        }
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.apply_into(u, &mut out);
        out
    }

    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = self.diag[i] * u[i];
            for &(j, b) in &self.adjacency[i] {
                acc -= b / self.measure[i] * u[j];
            }
            *o = acc;
        }
    }

    pub fn apply_complex(&self, u: &[Complex64]) -> Vec<Complex64> {
        (0..self.len())
            .map(|i| {
                let mut acc = u[i] * self.diag[i];
                for &(j, b) in &self.adjacency[i] {
                    acc -= u[j] * (b / self.measure[i]);
                }
                acc
            })
            .collect()
    }

    /// `⟨u, v⟩_m = Σ u v m`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.measure).map(|((a, b), m)| a * b * m).sum()
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.inner(u, u).sqrt()
    }

    /// `⟨u, Tv⟩_m` through the matrix.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        self.inner(u, &self.apply(v))
    }

    /// `⟨u, Tu⟩_m` through the matrix.
    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        self.bilinear(u, u)
    }

    /// The same form written as a sum of non-negative terms:
    /// `Σ_{edges in K} b (u(x)-u(y))² + Σ (c + kept boundary) u²`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.len() {
            for &(j, b) in &self.adjacency[i] {
                if i < j {
                    acc += b * (u[i] - u[j]).powi(2);
                }
            }
            acc += (self.killing[i] + self.kept_boundary(i)) * u[i] * u[i];
        }
        acc
    }

    /// Sesquilinear `⟨Tu, v⟩_m`, linear in `u`.
    pub fn sesquilinear(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let tu = self.apply_complex(u);
        tu.iter().zip(v).zip(&self.measure).map(|((a, b), m)| a * b.conj() * m).sum()
    }

    /// Dense `T`.
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut t = DMatrix::zeros(n, n);
        for i in 0..n {
            t[(i, i)] = self.diag[i];
            for &(j, b) in &self.adjacency[i] {
                t[(i, j)] = -b / self.measure[i];
            }
        }
        t
    }

    /// `M^{1/2} T M^{-1/2}`, symmetric in the Euclidean sense.
    pub fn symmetrized_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut s = DMatrix::zeros(n, n);
        for i in 0..n {
            s[(i, i)] = self.diag[i];
            for &(j, b) in &self.adjacency[i] {
                s[(i, j)] = -b / (self.measure[i] * self.measure[j]).sqrt();
            }
        }
        s
    }

    /// Connected components (index lists, sorted, ordered by first member).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut label = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let c = out.len();
            label[s] = c;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let x = comp[head];
                head += 1;
                for &(y, b) in &self.adjacency[x] {
                    if b > 0.0 && label[y] == usize::MAX {
                        label[y] = c;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Vector indexed by this operator from a function of the vertex.
    pub fn vector(&self, f: impl Fn(&VertexId) -> f64) -> Vec<f64> {
        self.ids.iter().map(f).collect()
    }

    pub fn indicator(&self, x: &VertexId) -> Result<Vec<f64>> {
        let i = self.require_index(x)?;
        let mut v = vec![0.0; self.len()];
        v[i] = 1.0;
        Ok(v)
    }
}

/// Builds the truncation of `gen` to `region` under `bc`. Vertex order is
/// the region's order.
pub fn truncate<G: GraphGenerator + ?Sized>(gen: &G, region: &Region, bc: BoundaryCondition) -> Result<TruncatedOperator> {
    if region.vertices.is_empty() {
        return Err(Error::EmptySet);
    }
    let index: HashMap<&VertexId, usize> = region.vertices.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let n = region.vertices.len();
    let mut adjacency = vec![Vec::new(); n];
    let mut boundary = vec![0.0; n];
    for (i, x) in region.vertices.iter().enumerate() {
        for (y, b) in gen.neighbors(x) {
            match index.get(&y) {
                Some(&j) => adjacency[i].push((j, b)),
                None => boundary[i] += b,
            }
        }
        adjacency[i].sort_by_key(|&(j, _)| j);
    }
    TruncatedOperator::assemble(
        region.vertices.clone(),
        region.vertices.iter().map(|x| gen.measure(x)).collect(),
        region.vertices.iter().map(|x| gen.killing(x)).collect(),
        boundary,
        adjacency,
        bc,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderingReport {
    pub samples: usize,
    /// The mixed set used.
    pub mixed: Vec<VertexId>,
    /// Largest of `q_N - q_A` and `q_A - q_D` over the samples, relative to
    /// `max(1, q_D)`; non-positive when the ordering holds.
    pub max_violation: f64,
    pub violations: usize,
    /// `L^D - L^N` is diagonal with non-negative entries, checked entrywise.
    pub diagonal_difference_ok: bool,
}

/// Samples `u` on `K` and compares the Neumann, mixed and Dirichlet
/// quadratic forms. Without `mixed`, a random subset of `∂K` is drawn.
pub fn ordering_check<G: GraphGenerator + ?Sized>(
    gen: &G,
    region: &Region,
    mixed: Option<BTreeSet<VertexId>>,
    samples: usize,
    seed: u64,
) -> Result<OrderingReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir = truncate(gen, region, BoundaryCondition::Dirichlet)?;
    let neu = dir.with_boundary(BoundaryCondition::Neumann)?;
    let a = mixed.unwrap_or_else(|| {
        dir.boundary_vertices().into_iter().filter(|_| rng.random_bool(0.5)).collect()
    });
    let mix = dir.with_boundary(BoundaryCondition::Mixed(a.clone()))?;

    let n = dir.len();
    let mut diagonal_difference_ok = true;
    for i in 0..n {
        let d = dir.diag()[i] - neu.diag()[i];
        if d < 0.0 || dir.arcs(i) != neu.arcs(i) || mix.arcs(i) != neu.arcs(i) {
            diagonal_difference_ok = false;
        }
        if mix.diag()[i] < neu.diag()[i] || mix.diag()[i] > dir.diag()[i] {
            diagonal_difference_ok = false;
        }
    }

    let mut max_violation = f64::NEG_INFINITY;
    let mut violations = 0;
    for _ in 0..samples {
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (qn, qa, qd) = (neu.quadratic_form(&u), mix.quadratic_form(&u), dir.quadratic_form(&u));
        let scale = qd.abs().max(1.0);
        let v = ((qn - qa) / scale).max((qa - qd) / scale);
        max_violation = max_violation.max(v);
        if v > 1e-12 {
            violations += 1;
        }
    }
    Ok(OrderingReport {
        samples,
        mixed: a.into_iter().collect(),
        max_violation,
        violations,
        diagonal_difference_ok,
    })
}
