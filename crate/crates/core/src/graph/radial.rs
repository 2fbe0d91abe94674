//! Sphere aggregation for spherically symmetric graphs.
//!
//! On functions that only depend on the distance to the root, the formal
//! Laplacian of a spherically symmetric graph acts as a weighted path
//! operator on the sphere indices. [`RadialProfile::quotient`] is that path.

use std::collections::HashSet;

use serde::Serialize;

use super::{GraphGenerator, VertexId, WeightedGraph};
use crate::error::{Error, Result};

/// Largest sphere enumerated vertex by vertex before switching to the
/// generator's closed form.
pub const SPHERE_ENUMERATION_CAP: usize = 1 << 14;

const REL_TOL: f64 = 1e-12;

/// Sphere data `(M_n, B_n, C_n)` for `n = 0..=N`. `B_N` is the weight from
/// the last sphere to sphere `N + 1`, i.e. the Dirichlet boundary weight of
/// the ball of radius `N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialProfile {
    masses: Vec<f64>,
    outward: Vec<f64>,
    killing: Vec<f64>,
}

impl RadialProfile {
    /// # Panics
    /// If the three sequences differ in length or are empty.
    pub fn new(masses: Vec<f64>, outward: Vec<f64>, killing: Vec<f64>) -> Self {
        assert!(!masses.is_empty(), "profile needs at least the root sphere");
        assert_eq!(masses.len(), outward.len());
        assert_eq!(masses.len(), killing.len());
        RadialProfile { masses, outward, killing }
    }

    pub fn depth(&self) -> usize {
        self.masses.len() - 1
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn outward(&self) -> &[f64] {
        &self.outward
    }

    pub fn killing(&self) -> &[f64] {
        &self.killing
    }

    /// `B_{n-1}` with `B_{-1} = 0`.
    pub fn inward(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.outward[n - 1]
        }
    }

    /// Profile restricted to spheres `0..=n`.
    pub fn truncated(&self, n: usize) -> Self {
        let k = n.min(self.depth()) + 1;
        RadialProfile::new(
            self.masses[..k].to_vec(),
            self.outward[..k].to_vec(),
            self.killing[..k].to_vec(),
        )
    }

    /// Checks `M_n > 0`, `B_n > 0` for `n < N`, `C_n >= 0`.
    pub fn check(&self) -> Result<()> {
        let n = self.depth();
        for i in 0..=n {
            let (m, b, c) = (self.masses[i], self.outward[i], self.killing[i]);
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::Parameter(format!("sphere mass M_{i} = {m} must be positive")));
            }
            if i < n && !(b > 0.0 && b.is_finite()) {
                return Err(Error::Parameter(format!("sphere weight B_{i} = {b} must be positive")));
            }
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::Parameter(format!("sphere killing C_{i} = {c} must be non-negative")));
            }
        }
        Ok(())
    }

    /// Reduced operator `(Ju)(n)` for `n < N`; at `n = N` the outer
    /// neighbour value `outer` is used for `u(N + 1)`.
    pub fn apply_reduced(&self, u: &[f64], outer: f64) -> Vec<f64> {
        let n = self.depth();
        (0..=n)
            .map(|i| {
                let inner = if i == 0 { 0.0 } else { self.inward(i) * (u[i] - u[i - 1]) };
                let next = if i < n { u[i + 1] } else { outer };
                (inner + self.outward[i] * (u[i] - next) + self.killing[i] * u[i]) / self.masses[i]
            })
            .collect()
    }

    /// The weighted path on `Int(0..=N)` with `m = M_n`, `c = C_n` and
    /// `b(n, n+1) = B_n`. The outward weight `B_N` is not part of the graph.
    pub fn quotient(&self) -> WeightedGraph {
        let n = self.depth();
        let vertices = (0..=n)
            .map(|i| (VertexId::Int(i as i64), self.masses[i], self.killing[i]))
            .collect();
        let mut arcs = Vec::with_capacity(2 * n);
        for i in 0..n {
            arcs.push((i, i + 1, self.outward[i]));
            arcs.push((i + 1, i, self.outward[i]));
        }
        WeightedGraph::from_raw_parts(vertices, arcs)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs())
}

/// Aggregates spheres about `root` up to depth `depth`, verifying that the
/// generator is in fact spherically symmetric on the enumerated part.
pub fn radial_reduce<G: GraphGenerator + ?Sized>(gen: &G, root: &VertexId, depth: usize) -> Result<RadialProfile> {
    if !gen.is_spherically_symmetric() {
        return Err(Error::Asymmetry(format!(
            "{} does not declare spherical symmetry",
            gen.describe()
        )));
    }
    let mut masses = Vec::new();
    let mut outward = Vec::new();
    let mut killing = Vec::new();
    let mut prev: HashSet<VertexId> = HashSet::new();
    let mut sphere = vec![root.clone()];
    let mut seen: HashSet<VertexId> = HashSet::from([root.clone()]);
    for n in 0..=depth {
        if sphere.len() > SPHERE_ENUMERATION_CAP {
            return finish_with_closed_form(gen, root, depth, masses, outward, killing);
        }
        if sphere.is_empty() {
            return Err(Error::Parameter(format!("no vertices at distance {n} from {root}")));
        }
        let mut next_set: HashSet<VertexId> = HashSet::new();
        let mut next = Vec::new();
        for x in &sphere {
            for (y, b) in gen.neighbors(x) {
                if b > 0.0 && !seen.contains(&y) && next_set.insert(y.clone()) {
                    next.push(y);
                }
            }
            if next.len() > SPHERE_ENUMERATION_CAP {
                return finish_with_closed_form(gen, root, depth, masses, outward, killing);
            }
        }
        let mut witness: Option<(VertexId, f64, f64, f64, f64)> = None;
        let (mut mass, mut out_total, mut kill) = (0.0, 0.0, 0.0);
        for x in &sphere {
            let (m, c) = (gen.measure(x), gen.killing(x));
            let (mut out, mut inn) = (0.0, 0.0);
            for (y, b) in gen.neighbors(x) {
                if next_set.contains(&y) {
                    out += b;
                } else if prev.contains(&y) {
                    inn += b;
                }
            }
            match &witness {
                None => witness = Some((x.clone(), m, c, out, inn)),
                Some((w, wm, wc, wout, winn)) => {
                    let what = if !close(m, *wm) {
                        Some("measure")
                    } else if !close(c, *wc) {
                        Some("killing term")
                    } else if !close(out, *wout) {
                        Some("outward weight sum")
                    } else if !close(inn, *winn) {
                        Some("inward weight sum")
                    } else {
                        None
                    };
                    if let Some(what) = what {
                        return Err(Error::Asymmetry(format!(
                            "vertices {w} and {x} on sphere {n} have different {what}"
                        )));
                    }
                }
            }
            mass += m;
            out_total += out;
            kill += c;
        }
        masses.push(mass);
        outward.push(out_total);
        killing.push(kill);
        seen.extend(next.iter().cloned());
        prev = sphere.into_iter().collect();
        next.sort();
        sphere = next;
    }
    Ok(RadialProfile::new(masses, outward, killing))
}

fn finish_with_closed_form<G: GraphGenerator + ?Sized>(
    gen: &G,
    root: &VertexId,
    depth: usize,
    masses: Vec<f64>,
    outward: Vec<f64>,
    killing: Vec<f64>,
) -> Result<RadialProfile> {
    let closed = (gen.root() == *root)
        .then(|| gen.closed_form_profile(depth))
        .flatten()
        .ok_or_else(|| {
            Error::SizeCap(format!(
                "sphere {} about {root} exceeds {SPHERE_ENUMERATION_CAP} vertices and no closed form is known",
                masses.len()
            ))
        })?;
    for (i, ((m, b), c)) in masses.iter().zip(&outward).zip(&killing).enumerate() {
        if !close(*m, closed.masses[i]) || !close(*b, closed.outward[i]) || !close(*c, closed.killing[i]) {
            return Err(Error::Asymmetry(format!(
                "closed-form sphere data disagree with enumeration at sphere {i}"
            )));
        }
    }
    Ok(closed)
}
