use std::collections::HashSet;

use serde::Serialize;

use super::{GraphGenerator, VertexId};

/// A finite vertex set `K` together with its halo, the vertices outside `K`
/// adjacent to `K`. Vertices are in breadth-first order from the root with
/// [`VertexId`] order inside each shell; the halo is sorted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Region {
    pub vertices: Vec<VertexId>,
    pub halo: Vec<VertexId>,
}

impl Region {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, x: &VertexId) -> bool {
        self.vertices.contains(x)
    }

    /// Builds a region from an arbitrary finite set, computing the halo.
    pub fn from_vertices<G: GraphGenerator + ?Sized>(gen: &G, vertices: Vec<VertexId>) -> Self {
        let set: HashSet<&VertexId> = vertices.iter().collect();
        let mut halo: Vec<VertexId> = vertices
            .iter()
            .flat_map(|x| gen.neighbors(x))
            .filter(|(y, b)| *b > 0.0 && !set.contains(y))
            .map(|(y, _)| y)
            .collect();
        halo.sort();
        halo.dedup();
        Region { vertices, halo }
    }
}

/// Breadth-first shells `S_0 = {root}, S_1, ..., S_{r+1}`.
fn shells<G: GraphGenerator + ?Sized>(gen: &G, root: &VertexId, r: usize) -> Vec<Vec<VertexId>> {
    let mut seen: HashSet<VertexId> = HashSet::from([root.clone()]);
    let mut out = vec![vec![root.clone()]];
    for _ in 0..=r {
        let mut next: Vec<VertexId> = Vec::new();
        for x in out.last().unwrap() {
            for (y, b) in gen.neighbors(x) {
                if b > 0.0 && seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        next.sort();
        out.push(next);
    }
    out
}

/// Vertices within graph distance `r` of `root`, with halo.
pub fn combinatorial_ball<G: GraphGenerator + ?Sized>(gen: &G, root: &VertexId, r: usize) -> Region {
    let mut sh = shells(gen, root, r);
    let halo = sh.pop().unwrap_or_default();
    Region { vertices: sh.into_iter().flatten().collect(), halo }
}

/// Increasing sequence of finite regions `K_1 ⊆ K_2 ⊆ ...`.
#[derive(Clone, Debug, Serialize)]
pub struct Exhaustion {
    levels: Vec<Region>,
}

impl Exhaustion {
    /// Combinatorial balls about `root` with the given radii (sorted
    /// ascending internally).
    pub fn balls<G: GraphGenerator + ?Sized>(gen: &G, root: &VertexId, radii: &[usize]) -> Self {
        let mut radii = radii.to_vec();
        radii.sort_unstable();
        radii.dedup();
        let max = radii.last().copied().unwrap_or(0);
        let sh = shells(gen, root, max);
        let levels = radii
            .iter()
            .map(|&r| Region {
                vertices: sh[..=r].iter().flatten().cloned().collect(),
                halo: sh[r + 1].clone(),
            })
            .collect();
        Exhaustion { levels }
    }

    /// Balls of radius `1, 2, ..., levels`.
    pub fn radii<G: GraphGenerator + ?Sized>(gen: &G, root: &VertexId, levels: usize) -> Self {
        let radii: Vec<usize> = (1..=levels.max(1)).collect();
        Self::balls(gen, root, &radii)
    }

    /// Wraps explicitly given regions; they must be nested.
    pub fn from_levels(levels: Vec<Region>) -> Self {
        Exhaustion { levels }
    }

    pub fn levels(&self) -> &[Region] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, i: usize) -> &Region {
        &self.levels[i]
    }

    pub fn last(&self) -> &Region {
        self.levels.last().expect("exhaustion has at least one level")
    }

    /// `K_n \ K_{n-1}` for every level (the first shell is `K_0` itself).
    pub fn shells(&self) -> Vec<Vec<VertexId>> {
        let mut prev: HashSet<&VertexId> = HashSet::new();
        let mut out = Vec::with_capacity(self.levels.len());
        for level in &self.levels {
            let fresh: Vec<VertexId> =
                level.vertices.iter().filter(|x| !prev.contains(x)).cloned().collect();
            prev.extend(level.vertices.iter());
            out.push(fresh);
        }
        out
    }

    pub fn is_monotone(&self) -> bool {
        self.levels.windows(2).all(|w| {
            let big: HashSet<&VertexId> = w[1].vertices.iter().collect();
            w[0].vertices.iter().all(|x| big.contains(x))
        })
    }
}
