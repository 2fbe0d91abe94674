//! The path metric with edge lengths `b^{-1/2}`, rays of finite length and
//! boundary values along them, the Lipschitz bound by the energy, and
//! Cheeger constants of small vertex sets.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::completeness::{heat_mass_radial, neumann_mass_radial, HeatMassReport};
use crate::error::{Error, Result};
use crate::formal::{weighted_degree, SampledFunction};
use crate::forms::qn_partial;
use crate::graph::{build_family, combinatorial_ball, Exhaustion, Family, FamilyKind, GraphGenerator, Region, VertexId};
use crate::harmonic::{resolvent_gap_radial, ResolventGapReport, GAP_THRESHOLD};
use crate::truncation::{truncate, BoundaryCondition};

/// Largest vertex set accepted by the subset enumeration.
pub const CHEEGER_CAP: usize = 22;

#[derive(Clone, Debug, Serialize)]
pub struct PathDistance {
    /// `d(x, y)`, a lower bound when `exact` is false, `inf` when `y` is
    /// unreachable.
    pub distance: f64,
    pub exact: bool,
    pub expanded: usize,
}

#[derive(PartialEq)]
struct Entry(f64, VertexId);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Best-first search from `x` with edge lengths `b^{-1/2}`, expanding at
/// most `bound` vertices.
pub fn path_metric<G: GraphGenerator + ?Sized>(gen: &G, x: &VertexId, y: &VertexId, bound: usize) -> Result<PathDistance> {
    if bound == 0 {
        return Err(Error::Parameter("search bound must be positive".into()));
    }
    let mut best: HashMap<VertexId, f64> = HashMap::from([(x.clone(), 0.0)]);
    let mut done: HashSet<VertexId> = HashSet::new();
    let mut heap = BinaryHeap::from([Entry(0.0, x.clone())]);
    let mut expanded = 0;
    while let Some(Entry(d, v)) = heap.pop() {
        if done.contains(&v) {
            continue;
        }
        if &v == y {
            return Ok(PathDistance { distance: d, exact: true, expanded });
        }
        if expanded == bound {
            return Ok(PathDistance { distance: d, exact: false, expanded });
        }
        expanded += 1;
        for (w, b) in gen.neighbors(&v) {
            if b <= 0.0 || done.contains(&w) {
                continue;
            }
            let nd = d + b.powf(-0.5);
            if best.get(&w).is_none_or(|&old| nd < old) {
                best.insert(w.clone(), nd);
                heap.push(Entry(nd, w));
            }
        }
        done.insert(v);
    }
    Ok(PathDistance { distance: f64::INFINITY, exact: true, expanded })
}

/// A path `x_0, x_1, …` with `b(x_i, x_{i+1}) > 0`, stored up to a depth.
#[derive(Clone, Debug, Serialize)]
pub struct Ray {
    pub vertices: Vec<VertexId>,
    /// Step lengths `b(x_i, x_{i+1})^{-1/2}`.
    pub steps: Vec<f64>,
    /// Cumulative lengths, starting at 0.
    pub lengths: Vec<f64>,
}

impl Ray {
    pub fn new<G: GraphGenerator + ?Sized>(gen: &G, vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Parameter("a ray needs at least two vertices".into()));
        }
        let mut steps = Vec::with_capacity(vertices.len() - 1);
        for w in vertices.windows(2) {
            let b = gen.weight(&w[0], &w[1]);
            if !(b > 0.0) {
                return Err(Error::Parameter(format!("{} and {} are not adjacent", w[0], w[1])));
            }
            steps.push(b.powf(-0.5));
        }
        let mut lengths = vec![0.0];
        for s in &steps {
            lengths.push(lengths.last().expect("non-empty") + s);
        }
        Ok(Ray { vertices, steps, lengths })
    }

    /// The rightward ray on `Z` or the leftmost branch of a tree.
    pub fn canonical(family: &Family, depth: usize) -> Result<Self> {
        let vertices = match family.kind() {
            FamilyKind::LineZ | FamilyKind::Example4(_) => (0..=depth as i64).map(VertexId::Int).collect(),
            FamilyKind::Tree(_) => (0..=depth).map(|n| VertexId::Word(vec![0; n])).collect(),
        };
        Ray::new(family, vertices)
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RayVerdict {
    IncompleteEvidence,
    CompleteAlongRay,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct RayProbe {
    pub lengths: Vec<f64>,
    /// Estimated length beyond the last stored vertex.
    pub tail: f64,
    pub verdict: RayVerdict,
}

/// Cauchy tail below which a ray counts as having finite length.
pub const CAUCHY_TAIL: f64 = 1e-9;
const PROBE_WINDOW: usize = 5;

/// Decides from the step lengths whether the ray has finite length: a
/// geometric tail below `1e-9`, or steps that stop shrinking.
pub fn ray_completeness_probe(ray: &Ray) -> RayProbe {
    let s = &ray.steps;
    let n = s.len();
    let mut tail = f64::INFINITY;
    let mut verdict = RayVerdict::Inconclusive;
    if n > PROBE_WINDOW {
        let window = &s[n - PROBE_WINDOW - 1..];
        let ratio = window.windows(2).map(|w| w[1] / w[0]).fold(0.0f64, f64::max);
        if ratio < 1.0 {
            tail = s[n - 1] * ratio / (1.0 - ratio);
            if tail < CAUCHY_TAIL {
                verdict = RayVerdict::IncompleteEvidence;
            }
        } else if window.windows(2).all(|w| w[1] >= w[0]) {
            verdict = RayVerdict::CompleteAlongRay;
        }
    }
    RayProbe { lengths: ray.lengths.clone(), tail, verdict }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryValue {
    /// `u_∞`, the value at the last stored vertex.
    pub value: f64,
    /// `√E_n (L - L_n)` at `n = 0`, with `E_n` the energy of `u` along the
    /// ray beyond `x_n`.
    pub certificate: f64,
    /// Every `|u(x_n) - u_∞| <= √E_n (L - L_n)`.
    pub certificate_holds: bool,
}

/// The limit of `u` along a ray of finite length.
pub fn boundary_value(u: &SampledFunction, ray: &Ray) -> Result<BoundaryValue> {
    let probe = ray_completeness_probe(ray);
    if probe.verdict != RayVerdict::IncompleteEvidence {
        return Err(Error::NotCauchy(format!("ray verdict {:?}", probe.verdict)));
    }
    let vals: Vec<f64> = ray
        .vertices
        .iter()
        .map(|x| {
            let z = u.value(x)?;
            if z.im != 0.0 {
                return Err(Error::NonReal(x.clone()));
            }
            Ok(z.re)
        })
        .collect::<Result<_>>()?;
    let n = ray.depth();
    let total = ray.lengths[n];
    // energy of the tail, summed backwards
    let mut tail_energy = vec![0.0; n + 1];
    for k in (0..n).rev() {
        let du = vals[k + 1] - vals[k];
        tail_energy[k] = tail_energy[k + 1] + du * du / (ray.steps[k] * ray.steps[k]);
    }
    let value = vals[n];
    let holds = (0..=n).all(|k| {
        let bound = tail_energy[k].sqrt() * (total - ray.lengths[k]);
        (vals[k] - value).abs() <= bound * (1.0 + 1e-12) + 1e-15
    });
    Ok(BoundaryValue { value, certificate: tail_energy[0].sqrt() * total, certificate_holds: holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct LipschitzPair {
    pub x: VertexId,
    pub y: VertexId,
    pub distance: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LipschitzReport {
    pub energy: f64,
    pub energy_stabilized: bool,
    pub pairs: Vec<LipschitzPair>,
    pub max_ratio: f64,
    pub violations: usize,
}

/// `|u(x) - u(y)| / (√Q^(N)(u) d(x, y))` on sampled pairs, with the energy
/// taken from the first exhaustion level past which it grows by less than
/// `1e-12`.
pub fn lipschitz_check<G: GraphGenerator + ?Sized>(
    gen: &G,
    u: &SampledFunction,
    pairs: &[(VertexId, VertexId)],
    exhaustion: &Exhaustion,
    search_bound: usize,
) -> Result<LipschitzReport> {
    if exhaustion.is_empty() {
        return Err(Error::EmptySet);
    }
    let form = qn_partial(gen, u, exhaustion, exhaustion.len() - 1)?;
    let p = &form.partials;
    let energy_stabilized = p.len() >= 2 && (p[p.len() - 1] - p[p.len() - 2]).abs() < 1e-12;
    let energy = *p.last().expect("non-empty exhaustion");
    let mut out = Vec::with_capacity(pairs.len());
    let mut violations = 0;
    for (x, y) in pairs {
        let d = path_metric(gen, x, y, search_bound)?;
        let du = (u.value(x)? - u.value(y)?).norm();
        let ratio = if du == 0.0 {
            0.0
        } else if energy > 0.0 && d.distance > 0.0 {
            du / (energy.sqrt() * d.distance)
        } else {
            f64::INFINITY
        };
        if ratio > 1.0 + 1e-9 {
            violations += 1;
        }
        out.push(LipschitzPair { x: x.clone(), y: y.clone(), distance: d.distance, ratio });
    }
    Ok(LipschitzReport {
        energy,
        energy_stabilized,
        max_ratio: out.iter().map(|p| p.ratio).fold(0.0, f64::max),
        pairs: out,
        violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CheegerResult {
    pub alpha: f64,
    /// Boundary weight `Q^(D)(1_K)` of the minimiser.
    pub boundary: u64,
    pub minimizer: Vec<VertexId>,
    pub connected_only: bool,
    pub subsets_examined: u64,
}

/// `min Q^(D)(1_K) / #K` over non-empty `K` inside `region`, counting edges
/// that leave `region` as boundary. When the region has an empty halo (a
/// whole finite graph) the full set is excluded. Requires `b ∈ {0, 1}` and
/// `c ≡ 0`.
pub fn cheeger_bruteforce<G: GraphGenerator + ?Sized>(gen: &G, region: &Region, connected_only: bool) -> Result<CheegerResult> {
    let n = region.len();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    if n > CHEEGER_CAP {
        return Err(Error::SizeCap(format!("{n} vertices exceed the enumeration cap of {CHEEGER_CAP}")));
    }
    let op = truncate(gen, region, BoundaryCondition::Dirichlet)?;
    let mut adj = vec![0u32; n];
    let mut outside = vec![0u64; n];
    for i in 0..n {
        if op.killing()[i] != 0.0 {
            return Err(Error::Parameter(format!("killing term at {} must vanish", op.ids()[i])));
        }
        for &(j, b) in op.arcs(i) {
            if b != 1.0 {
                return Err(Error::Parameter(format!("edge weight {b} at {} must be 0 or 1", op.ids()[i])));
            }
            adj[i] |= 1 << j;
        }
        let w = op.boundary_weight()[i];
        for (y, b) in gen.neighbors(&op.ids()[i]) {
            if b != 0.0 && b != 1.0 && !region.contains(&y) {
                return Err(Error::Parameter(format!("edge weight {b} at {} must be 0 or 1", op.ids()[i])));
            }
        }
        outside[i] = w.round() as u64;
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let last = if region.halo.is_empty() { full - 1 } else { full };
    if last == 0 {
        return Err(Error::Parameter("a single vertex has no proper subset".into()));
    }
    let connected = |mask: u32| -> bool {
        let start = mask & mask.wrapping_neg();
        let mut seen = start;
        let mut frontier = start;
        while frontier != 0 {
            let i = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = adj[i] & mask & !seen;
            seen |= new;
            frontier |= new;
        }
        seen == mask
    };
    // (boundary, size, mask), minimised by ratio then mask
    let best = (1..=last)
        .into_par_iter()
        .filter(|&mask| !connected_only || connected(mask))
        .map(|mask| {
            let mut boundary = 0u64;
            let mut bits = mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                boundary += outside[i] + u64::from((adj[i] & !mask).count_ones());
            }
            (boundary, u64::from(mask.count_ones()), mask)
        })
        .reduce_with(|a, b| {
            match (a.0 * b.1).cmp(&(b.0 * a.1)) {
                Ordering::Less => a,
                Ordering::Greater => b,
                Ordering::Equal => if a.2 <= b.2 { a } else { b },
            }
        })
        .expect("at least one subset");
    let examined = if connected_only {
        (1..=last).into_par_iter().filter(|&m| connected(m)).count() as u64
    } else {
        u64::from(last)
    };
    Ok(CheegerResult {
        alpha: best.0 as f64 / best.1 as f64,
        boundary: best.0,
        minimizer: (0..n).filter(|&i| best.2 >> i & 1 == 1).map(|i| op.ids()[i].clone()).collect(),
        connected_only,
        subsets_examined: examined,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DodziukKendallSample {
    /// `½ Σ b (φ(x) - φ(y))²`.
    pub energy: f64,
    /// `(α²/2) Σ D(x) φ(x)²`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DodziukKendallReport {
    pub alpha: f64,
    pub samples: Vec<DodziukKendallSample>,
    pub violations: usize,
}

/// Evaluates `½ Σ b(φ(x) - φ(y))² >= (α²/2) Σ D(x) φ(x)²` for finitely
/// supported `φ` given on `region` (zero outside).
pub fn dodziuk_kendall_check<G: GraphGenerator + ?Sized>(
    gen: &G,
    region: &Region,
    alpha: f64,
    phis: &[Vec<f64>],
) -> Result<DodziukKendallReport> {
    let op = truncate(gen, region, BoundaryCondition::Dirichlet)?;
    let degree: Vec<f64> = op.ids().iter().map(|x| weighted_degree(gen, x)).collect();
    let mut samples = Vec::with_capacity(phis.len());
    for phi in phis {
        if phi.len() != op.len() {
            return Err(Error::Parameter(format!("function has {} values for {} vertices", phi.len(), op.len())));
        }
        let killing: f64 = (0..op.len()).map(|i| op.killing()[i] * phi[i] * phi[i]).sum();
        let energy = op.energy(phi) - killing;
        let bound = 0.5 * alpha * alpha * (0..op.len()).map(|i| degree[i] * phi[i] * phi[i]).sum::<f64>();
        samples.push(DodziukKendallSample { energy, bound, holds: energy >= bound * (1.0 - 1e-12) });
    }
    Ok(DodziukKendallReport { alpha, violations: samples.iter().filter(|s| !s.holds).count(), samples })
}

#[derive(Clone, Debug, Serialize)]
pub struct BallSequenceEntry {
    pub radius: usize,
    /// `Q(φ_R)` for `φ_R = 1` on the ball of radius `R`.
    pub energy: f64,
    /// `‖φ_R - 1‖²` in `ℓ²(m)`.
    pub distance_sq: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AppendixAReport {
    pub k: u32,
    pub q: f64,
    pub t: f64,
    /// `m(B_n)` for `n = 0..=levels`.
    pub mass_partial_sums: Vec<f64>,
    pub total_mass_error: f64,
    /// `Q^(N)(1)` on finite balls.
    pub qn_of_one: f64,
    pub one_in_l2: bool,
    pub ball_sequence: Vec<BallSequenceEntry>,
    /// The classical value `k - 2`, an external input that is never checked.
    pub alpha_external: f64,
    /// `(α²/2) D(x₀)` with the external `α`.
    pub energy_lower_bound: f64,
    /// Cheeger constants of small balls, upper bounds for the tree.
    pub cheeger_upper_bounds: Vec<(usize, f64)>,
    pub ray: RayProbe,
    pub heat_mass: HeatMassReport,
    pub neumann_mass: HeatMassReport,
    pub resolvent_gap: ResolventGapReport,
}

/// The finite-measure tree: metrically complete, with `1` in the Neumann
/// domain but not in the Dirichlet domain.
pub fn appendix_a_demo(k: u32, q: f64, t: f64, levels: usize) -> Result<AppendixAReport> {
    if k < 3 {
        return Err(Error::Parameter(format!("k = {k} must be at least 3")));
    }
    let family = build_family(&format!("fm-tree:k={k},q={q}"))?;
    let root = family.root();
    let profile = crate::graph::radial_reduce(&family, &root, levels.max(40))?;
    let mut mass_partial_sums = Vec::new();
    let mut acc = 0.0;
    for &m in profile.masses() {
        acc += m;
        mass_partial_sums.push(acc);
    }
    let total_mass_error = (1.0 - acc).abs();

    let one = SampledFunction::constant(num_complex::Complex64::new(1.0, 0.0));
    let small = Exhaustion::radii(&family, &root, 3);
    let qn_of_one = qn_partial(&family, &one, &small, small.len() - 1)?.value;

    let ball_sequence = (0..=profile.depth())
        .map(|r| BallSequenceEntry {
            radius: r,
            energy: profile.outward()[r],
            distance_sq: 1.0 - mass_partial_sums[r],
        })
        .collect();

    let alpha_external = f64::from(k) - 2.0;
    let energy_lower_bound = 0.5 * alpha_external * alpha_external * weighted_degree(&family, &root);
    let cheeger_upper_bounds = (1..=3)
        .map_while(|r| {
            let ball = combinatorial_ball(&family, &root, r);
            (ball.len() <= CHEEGER_CAP).then(|| cheeger_bruteforce(&family, &ball, true).map(|c| (r, c.alpha)))
        })
        .collect::<Result<Vec<_>>>()?;

    let ray = ray_completeness_probe(&Ray::canonical(&family, 40)?);
    let radii: Vec<usize> = (levels.saturating_sub(3).max(1)..=levels).collect();
    let heat_mass = heat_mass_radial(&family, &radii, t)?;
    let neumann_mass = neumann_mass_radial(&family, &radii, t)?;
    let gap_radii: Vec<usize> = (1..=8).map(|i| 5 * i).collect();
    let resolvent_gap = resolvent_gap_radial(&family, &gap_radii, 1.0, GAP_THRESHOLD)?;

    Ok(AppendixAReport {
        k,
        q,
        t,
        mass_partial_sums,
        total_mass_error,
        qn_of_one,
        one_in_l2: acc.is_finite(),
        ball_sequence,
        alpha_external,
        energy_lower_bound,
        cheeger_upper_bounds,
        ray,
        heat_mass,
        neumann_mass,
        resolvent_gap,
    })
}
