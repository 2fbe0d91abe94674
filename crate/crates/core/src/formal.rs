//! The formal Laplacian
//!
//! `L̃u(x) = (1/m(x)) Σ_y b(x,y)(u(x) - u(y)) + (c(x)/m(x)) u(x)`
//!
//! evaluated pointwise on functions known at finitely many vertices, plus
//! Green's formula and the weighted degree.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Exhaustion, GraphGenerator, VertexId};

/// A function known on finitely many vertices, optionally extended by a
/// constant everywhere else.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampledFunction {
    values: BTreeMap<VertexId, Complex64>,
    default: Option<Complex64>,
}

impl SampledFunction {
    pub fn new() -> Self {
        Self::default()
    }

    /// `δ_x`: one at `x`, zero elsewhere.
    pub fn delta(x: VertexId) -> Self {
        Self::from_pairs([(x, Complex64::new(1.0, 0.0))]).with_default(Complex64::new(0.0, 0.0))
    }

    /// Constant function.
    pub fn constant(k: Complex64) -> Self {
        SampledFunction { values: BTreeMap::new(), default: Some(k) }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VertexId, Complex64)>) -> Self {
        SampledFunction { values: pairs.into_iter().collect(), default: None }
    }

    pub fn from_real(pairs: impl IntoIterator<Item = (VertexId, f64)>) -> Self {
        Self::from_pairs(pairs.into_iter().map(|(x, v)| (x, Complex64::new(v, 0.0))))
    }

    /// Evaluates `f` on every listed vertex.
    pub fn sample(vertices: &[VertexId], f: impl Fn(&VertexId) -> Complex64) -> Self {
        Self::from_pairs(vertices.iter().map(|x| (x.clone(), f(x))))
    }

    pub fn with_default(mut self, d: Complex64) -> Self {
        self.default = Some(d);
        self
    }

    /// Finitely supported: zero outside the listed vertices.
    pub fn finitely_supported(self) -> Self {
        self.with_default(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, x: VertexId, v: Complex64) {
        self.values.insert(x, v);
    }

    pub fn default_value(&self) -> Option<Complex64> {
        self.default
    }

    /// The listed vertices.
    pub fn support(&self) -> impl Iterator<Item = &VertexId> {
        self.values.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&VertexId, &Complex64)> {
        self.values.iter()
    }

    pub fn get(&self, x: &VertexId) -> Option<Complex64> {
        self.values.get(x).copied().or(self.default)
    }

    pub fn value(&self, x: &VertexId) -> Result<Complex64> {
        self.get(x).ok_or_else(|| Error::Coverage(x.clone()))
    }

    /// Whether the function vanishes outside its listed vertices.
    pub fn has_finite_support(&self) -> bool {
        self.default.is_none_or(|d| d == Complex64::new(0.0, 0.0))
    }

    pub fn is_real(&self) -> bool {
        self.values.values().chain(self.default.iter()).all(|v| v.im == 0.0)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        SampledFunction {
            values: self.values.iter().map(|(x, v)| (x.clone(), f(*v))).collect(),
            default: self.default.map(&f),
        }
    }
}

/// `L̃u(x)` as the literal finite sum.
pub fn apply_formal<G: GraphGenerator + ?Sized>(gen: &G, u: &SampledFunction, x: &VertexId) -> Result<Complex64> {
    let ux = u.value(x)?;
    let mut acc = ux * gen.killing(x);
    for (y, b) in gen.neighbors(x) {
        acc += (ux - u.value(&y)?) * b;
    }
    Ok(acc / gen.measure(x))
}

/// `L̃δ_x(z) = (1/m(z)) (B_z δ_x(z) - b(x,z))` with `B_z = Σ_y b(z,y) + c(z)`.
pub fn laplacian_of_delta<G: GraphGenerator + ?Sized>(gen: &G, x: &VertexId, z: &VertexId) -> f64 {
    let nbrs = gen.neighbors(z);
    let big_b: f64 = nbrs.iter().map(|(_, b)| b).sum::<f64>() + gen.killing(z);
    let bxz = nbrs.iter().find(|(y, _)| y == x).map_or(0.0, |(_, b)| *b);
    let diag = if x == z { big_b } else { 0.0 };
    (diag - bxz) / gen.measure(z)
}

/// `Deg(x) = (1/m(x)) (Σ_y b(x,y) + c(x))`.
pub fn weighted_degree<G: GraphGenerator + ?Sized>(gen: &G, x: &VertexId) -> f64 {
    let s: f64 = gen.neighbors(x).iter().map(|(_, b)| b).sum();
    (s + gen.killing(x)) / gen.measure(x)
}

/// The three members of Green's formula for finitely supported `v`:
/// the extended form `Q̃(u,v)`, `Σ L̃u·v̄·m` and `Σ u·(L̃v)‾·m`.
#[derive(Clone, Debug, Serialize)]
pub struct GreensReport {
    pub lhs: Complex64,
    pub mid: Complex64,
    pub rhs: Complex64,
    /// Largest pairwise absolute difference.
    pub deviation: f64,
    /// Largest sum of absolute values of the summands of any member.
    pub scale: f64,
}

impl GreensReport {
    pub fn relative_deviation(&self) -> f64 {
        if self.scale == 0.0 {
            self.deviation
        } else {
            self.deviation / self.scale
        }
    }
}

/// `supp(v)` together with every neighbour of it.
pub fn neighborhood<G: GraphGenerator + ?Sized>(gen: &G, set: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut out = set.clone();
    for x in set {
        out.extend(gen.neighbors(x).into_iter().filter(|(_, b)| *b > 0.0).map(|(y, _)| y));
    }
    out
}

/// `Q̃(u,v) = ½ Σ_{x,y} b(x,y)(u(x)-u(y))(v(x)-v(y))‾ + Σ_x c(x) u(x) v̄(x)`
/// for finitely supported `v`, with the sum of absolute summands.
pub fn extended_form<G: GraphGenerator + ?Sized>(
    gen: &G,
    u: &SampledFunction,
    v: &SampledFunction,
) -> Result<(Complex64, f64)> {
    let supp: BTreeSet<VertexId> = v.support().cloned().collect();
    let region = neighborhood(gen, &supp);
    let vv = |x: &VertexId| v.get(x).unwrap_or_default();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for x in &region {
        let ux = u.value(x)?;
        for (y, b) in gen.neighbors(x) {
            if !region.contains(&y) {
                continue;
            }
            let t = (ux - u.value(&y)?) * (vv(x) - vv(&y)).conj() * (0.5 * b);
            acc += t;
            abs += t.norm();
        }
    }
    for x in &supp {
        let t = u.value(x)? * vv(x).conj() * gen.killing(x);
        acc += t;
        abs += t.norm();
    }
    Ok((acc, abs))
}

/// Evaluates the three members of Green's formula. `v` is treated as zero
/// outside its listed vertices; `u` must be known on `supp(v)` and its
/// neighbours.
pub fn greens_identity_check<G: GraphGenerator + ?Sized>(
    gen: &G,
    u: &SampledFunction,
    v: &SampledFunction,
) -> Result<GreensReport> {
    let v = v.clone().finitely_supported();
    let supp: BTreeSet<VertexId> = v.support().cloned().collect();
    let region = neighborhood(gen, &supp);
    let (lhs, lhs_abs) = extended_form(gen, u, &v)?;

    let mut mid = Complex64::new(0.0, 0.0);
    let mut mid_abs = 0.0;
    for x in &supp {
        let t = apply_formal(gen, u, x)? * v.value(x)?.conj() * gen.measure(x);
        mid += t;
        mid_abs += t.norm();
    }

    let mut rhs = Complex64::new(0.0, 0.0);
    let mut rhs_abs = 0.0;
    for x in &region {
        let t = u.value(x)? * apply_formal(gen, &v, x)?.conj() * gen.measure(x);
        rhs += t;
        rhs_abs += t.norm();
    }

    let deviation = (lhs - mid).norm().max((lhs - rhs).norm()).max((mid - rhs).norm());
    Ok(GreensReport { lhs, mid, rhs, deviation, scale: lhs_abs.max(mid_abs).max(rhs_abs) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundednessVerdict {
    Bounded,
    UnboundedEvidence,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundednessReport {
    /// `sup Deg` over the vertices of each level.
    pub sup_per_level: Vec<f64>,
    pub sup: f64,
    pub argmax: VertexId,
    pub verdict: BoundednessVerdict,
}

/// Tracks `sup Deg` along the first `levels` levels of an exhaustion.
///
/// Bounded if the last level has an empty halo or the sup is unchanged
/// over the last three levels; unbounded evidence if it strictly grows over
/// them; inconclusive otherwise.
pub fn boundedness_report<G: GraphGenerator + ?Sized>(
    gen: &G,
    exhaustion: &Exhaustion,
    levels: usize,
) -> Result<BoundednessReport> {
    let levels = levels.min(exhaustion.len());
    if levels == 0 {
        return Err(Error::Parameter("boundedness report needs at least one level".into()));
    }
    let mut sups = Vec::with_capacity(levels);
    let mut best: Option<(f64, VertexId)> = None;
    for level in &exhaustion.levels()[..levels] {
        for x in &level.vertices {
            let d = weighted_degree(gen, x);
            if best.as_ref().is_none_or(|(s, _)| d > *s) {
                best = Some((d, x.clone()));
            }
        }
        sups.push(best.as_ref().map_or(0.0, |b| b.0));
    }
    let (sup, argmax) = best.ok_or(Error::EmptySet)?;
    let exhausted = exhaustion.levels()[levels - 1].halo.is_empty();
    let verdict = if exhausted {
        BoundednessVerdict::Bounded
    } else if sups.len() >= 3 {
        let tail = &sups[sups.len() - 3..];
        if tail.windows(2).all(|w| w[1] == w[0]) {
            BoundednessVerdict::Bounded
        } else if tail.windows(2).all(|w| w[1] > w[0]) {
            BoundednessVerdict::UnboundedEvidence
        } else {
            BoundednessVerdict::Inconclusive
        }
    } else {
        BoundednessVerdict::Inconclusive
    };
    Ok(BoundednessReport { sup_per_level: sups, sup, argmax, verdict })
}
