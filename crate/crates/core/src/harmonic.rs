//! Solutions of `(L̃ + 1)u = 0`: boundary-value problems on finite sets,
//! radial recurrences on spherically symmetric graphs, and finite-level
//! evidence for the existence of square-summable or bounded solutions.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal::{apply_formal, extended_form, SampledFunction};
use crate::graph::{radial_reduce, Exhaustion, GraphGenerator, RadialProfile, Region, VertexId};
use crate::linalg::MFactor;
use crate::truncation::{truncate, BoundaryCondition, TruncatedOperator};

/// Relative change below which a level quantity counts as stabilized.
pub const STABILIZATION_TOL: f64 = 1e-8;
/// Number of trailing levels inspected by the stabilization rule.
pub const STABILIZATION_LEVELS: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct BvpSolution {
    pub vertices: Vec<VertexId>,
    pub values: Vec<f64>,
    /// Largest `|(L̃ + 1)u|` over `K`, with `u` extended by the boundary data.
    pub residual: f64,
}

impl BvpSolution {
    /// The solution on `K` together with the boundary data on the halo.
    pub fn extended(&self, halo_values: &SampledFunction) -> SampledFunction {
        let mut out = halo_values.clone();
        for (x, v) in self.vertices.iter().zip(&self.values) {
            out.set(x.clone(), Complex64::new(*v, 0.0));
        }
        out
    }
}

fn real_at(f: &SampledFunction, x: &VertexId) -> Result<f64> {
    let z = f.value(x)?;
    if z.im != 0.0 {
        return Err(Error::NonReal(x.clone()));
    }
    Ok(z.re)
}

/// Solves `(L̃ + 1)u = 0` on `K` with `u = g` on the halo.
pub fn bvp_solve<G: GraphGenerator + ?Sized>(gen: &G, region: &Region, g: &SampledFunction) -> Result<BvpSolution> {
    let op = truncate(gen, region, BoundaryCondition::Dirichlet)?;
    let mut rhs = vec![0.0; op.len()];
    let mut halo_data = SampledFunction::new();
    for y in &region.halo {
        let gy = real_at(g, y)?;
        halo_data.set(y.clone(), Complex64::new(gy, 0.0));
        for (x, b) in gen.neighbors(y) {
            if let Some(i) = op.index_of(&x) {
                rhs[i] += b * gy / op.measure()[i];
            }
        }
    }
    let values = MFactor::new(&op, 1.0)?.solve(&rhs);
    let sol = BvpSolution { vertices: op.ids().to_vec(), values, residual: 0.0 };
    let u = sol.extended(&halo_data);
    let mut residual = 0.0f64;
    for (x, v) in sol.vertices.iter().zip(&sol.values) {
        residual = residual.max((apply_formal(gen, &u, x)?.re + v).abs());
    }
    Ok(BvpSolution { residual, ..sol })
}

#[derive(Clone, Debug, Serialize)]
pub struct RadialSolution {
    /// `u(n)`; `inf` once the value exceeds the float range.
    pub values: Vec<f64>,
    /// `ln u(n)`, exact throughout.
    pub log_values: Vec<f64>,
    /// Largest `|(J + 1)u(n)| / u(n)` over `n < N`.
    pub relative_residual: f64,
}

/// Runs the recurrence
/// `u(n+1) = u(n) + [B_{n-1}(u(n) - u(n-1)) + (C_n + M_n)u(n)] / B_n`
/// from `u(0) = 1`. It is carried out on the ratios `u(n+1)/u(n)`, which
/// keeps a log scale without overflow.
pub fn radial_solve(profile: &RadialProfile) -> Result<RadialSolution> {
    profile.check()?;
    let n = profile.depth();
    let (m, b, c) = (profile.masses(), profile.outward(), profile.killing());
    let mut ratios = Vec::with_capacity(n);
    for i in 0..n {
        let back = if i == 0 { 0.0 } else { profile.inward(i) * (1.0 - 1.0 / ratios[i - 1]) };
        ratios.push(1.0 + (back + c[i] + m[i]) / b[i]);
    }
    let mut log_values = vec![0.0];
    for r in &ratios {
        let last = *log_values.last().expect("non-empty");
        log_values.push(last + f64::ln(*r));
    }
    let mut relative_residual = 0.0f64;
    for i in 0..n {
        let back = if i == 0 { 0.0 } else { profile.inward(i) * (1.0 - 1.0 / ratios[i - 1]) };
        let r = (b[i] * (1.0 - ratios[i]) + back + c[i]) / m[i] + 1.0;
        // scale of the cancelling terms
        let s = (b[i] * ratios[i] + b[i] + back.abs() + c[i]) / m[i] + 1.0;
        relative_residual = relative_residual.max(r.abs() / s);
    }
    Ok(RadialSolution { values: log_values.iter().map(|l| l.exp()).collect(), log_values, relative_residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionClass {
    /// Cumulative `Σ u² m` up to each level.
    pub partial_l2: Vec<f64>,
    /// Cumulative supremum of `|u|` up to each level.
    pub sup_per_level: Vec<f64>,
    pub nontrivial: bool,
    pub square_summable_evidence: bool,
    pub bounded_evidence: bool,
    pub growing: bool,
    /// Mean of `ln(sup_n / sup_{n-1})` over the last levels.
    pub growth_rate: f64,
    /// False when fewer than three levels were supplied.
    pub conclusive: bool,
}

impl SolutionClass {
    /// A non-trivial square-summable solution rules out essential
    /// self-adjointness.
    pub fn esa_failure_evidence(&self) -> bool {
        self.nontrivial && self.square_summable_evidence
    }

    /// A non-trivial bounded solution rules out stochastic completeness at
    /// infinity.
    pub fn sc_failure_evidence(&self) -> bool {
        self.nontrivial && self.bounded_evidence
    }
}

fn stabilized(seq: &[f64]) -> bool {
    if seq.len() < STABILIZATION_LEVELS {
        return false;
    }
    let tail = &seq[seq.len() - STABILIZATION_LEVELS..];
    tail.iter().all(|v| v.is_finite())
        && tail.windows(2).all(|w| (w[1] - w[0]).abs() <= STABILIZATION_TOL * w[1].abs().max(f64::MIN_POSITIVE))
}

/// Classifies a solution given shell by shell: `shells[n]` lists `(u(x),
/// m(x))` for the vertices first reached at level `n`. Values are taken
/// as already normalised.
pub fn classify_solution(shells: &[Vec<(f64, f64)>]) -> SolutionClass {
    let mut partial_l2 = Vec::with_capacity(shells.len());
    let mut sup_per_level = Vec::with_capacity(shells.len());
    let (mut acc, mut sup) = (0.0f64, 0.0f64);
    for shell in shells {
        for &(u, m) in shell {
            acc += u * u * m;
            sup = sup.max(u.abs());
        }
        partial_l2.push(acc);
        sup_per_level.push(sup);
    }
    let nontrivial = sup_per_level.first().is_some_and(|s| *s > 1e-12);
    let conclusive = shells.len() >= STABILIZATION_LEVELS;
    let bounded_evidence = conclusive && stabilized(&sup_per_level);
    let square_summable_evidence = conclusive && stabilized(&partial_l2);
    let k = sup_per_level.len();
    let growing = conclusive
        && !bounded_evidence
        && sup_per_level[k - STABILIZATION_LEVELS..].windows(2).all(|w| w[1] > w[0]);
    let growth_rate = if k >= 2 {
        let span = (k - 1).min(STABILIZATION_LEVELS);
        (sup_per_level[k - 1].ln() - sup_per_level[k - 1 - span].ln()) / span as f64
    } else {
        0.0
    };
    SolutionClass {
        partial_l2,
        sup_per_level,
        nontrivial,
        square_summable_evidence,
        bounded_evidence,
        growing,
        growth_rate,
        conclusive,
    }
}

/// Shell data of a radial solution: sphere `n` carries the value `u(n)`
/// with mass `M_n`.
pub fn radial_shells(profile: &RadialProfile, sol: &RadialSolution) -> Vec<Vec<(f64, f64)>> {
    profile.masses().iter().zip(&sol.values).map(|(&m, &u)| vec![(u, m)]).collect()
}

/// Shell data of a sampled function along an exhaustion.
pub fn sampled_shells<G: GraphGenerator + ?Sized>(
    gen: &G,
    u: &SampledFunction,
    exhaustion: &Exhaustion,
) -> Result<Vec<Vec<(f64, f64)>>> {
    exhaustion
        .shells()
        .iter()
        .map(|shell| shell.iter().map(|x| Ok((real_at(u, x)?, gen.measure(x)))).collect())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapMethod {
    Direct,
    RadialQuotient,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapLevel {
    pub size: usize,
    pub sup: f64,
    /// Smallest entry; non-negative up to rounding.
    pub min: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolventGapReport {
    pub x: VertexId,
    pub beta: f64,
    pub method: GapMethod,
    pub levels: Vec<GapLevel>,
    pub threshold: f64,
    pub stabilized: bool,
    /// Evidence, not proof, that the Neumann and Dirichlet forms differ.
    pub evidence: bool,
}

/// Relative tolerance for the sup-norm trend of the resolvent gap.
pub const GAP_STABILIZATION_TOL: f64 = 1e-4;
/// Default threshold above which a stabilized gap counts as evidence.
pub const GAP_THRESHOLD: f64 = 1e-6;

fn gap_level(dir: &TruncatedOperator, beta: f64, x: usize) -> Result<GapLevel> {
    let neu = dir.with_boundary(BoundaryCondition::Neumann)?;
    let mut d = vec![0.0; dir.len()];
    d[x] = 1.0;
    let gn = MFactor::new(&neu, beta)?.solve(&d);
    let gd = MFactor::new(dir, beta)?.solve(&d);
    let diff: Vec<f64> = gn.iter().zip(&gd).map(|(a, b)| a - b).collect();
    Ok(GapLevel {
        size: dir.len(),
        sup: diff.iter().fold(0.0f64, |a, v| a.max(v.abs())),
        min: diff.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

fn gap_report(x: VertexId, beta: f64, method: GapMethod, levels: Vec<GapLevel>, threshold: f64) -> ResolventGapReport {
    let sups: Vec<f64> = levels.iter().map(|l| l.sup).collect();
    let stable = sups.len() >= STABILIZATION_LEVELS
        && sups[sups.len() - STABILIZATION_LEVELS..]
            .windows(2)
            .all(|w| (w[1] - w[0]).abs() <= GAP_STABILIZATION_TOL * w[1].abs());
    let above = sups.last().is_some_and(|s| *s > threshold);
    ResolventGapReport { x, beta, method, levels, threshold, stabilized: stable, evidence: stable && above }
}

/// `u_K = ((L^N_K + β)^{-1} - (L^D_K + β)^{-1}) δ_x` along an exhaustion.
pub fn resolvent_gap<G: GraphGenerator + ?Sized>(
    gen: &G,
    exhaustion: &Exhaustion,
    x: &VertexId,
    beta: f64,
    threshold: f64,
) -> Result<ResolventGapReport> {
    if !(beta > 0.0) {
        return Err(Error::Parameter(format!("beta = {beta} must be positive")));
    }
    let levels = exhaustion
        .levels()
        .par_iter()
        .map(|region| {
            let dir = truncate(gen, region, BoundaryCondition::Dirichlet)?;
            let i = dir.require_index(x)?;
            gap_level(&dir, beta, i)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(gap_report(x.clone(), beta, GapMethod::Direct, levels, threshold))
}

/// The resolvent gap at the root of a spherically symmetric generator,
/// on balls of the given radii. `δ_root` is radial, so both resolvents act
/// on the radial quotient.
pub fn resolvent_gap_radial<G: GraphGenerator + ?Sized>(
    gen: &G,
    radii: &[usize],
    beta: f64,
    threshold: f64,
) -> Result<ResolventGapReport> {
    if !(beta > 0.0) {
        return Err(Error::Parameter(format!("beta = {beta} must be positive")));
    }
    let max = radii.iter().copied().max().unwrap_or(0);
    let profile = radial_reduce(gen, &gen.root(), max)?;
    let levels = radii
        .par_iter()
        .map(|&r| {
            let dir = TruncatedOperator::from_profile(&profile.truncated(r), BoundaryCondition::Dirichlet)?;
            gap_level(&dir, beta, 0)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(gap_report(gen.root(), beta, GapMethod::RadialQuotient, levels, threshold))
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    /// `Q̃(w, v) + ⟨w, v⟩`.
    pub pairing: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Checks `Q̃(w, v) + ⟨w, v⟩ = 0` for a solution `w` of `(L̃ + 1)w = 0`
/// around the finite support of `v`.
pub fn orthogonality_check<G: GraphGenerator + ?Sized>(
    gen: &G,
    w: &SampledFunction,
    v: &SampledFunction,
) -> Result<OrthogonalityReport> {
    let v = v.clone().finitely_supported();
    let (q, _) = extended_form(gen, w, &v)?;
    let supp: BTreeSet<VertexId> = v.support().cloned().collect();
    let mut inner = Complex64::new(0.0, 0.0);
    let (mut vnorm, mut energy) = (0.0, 0.0);
    for x in &supp {
        let (wx, vx, m) = (w.value(x)?, v.value(x)?, gen.measure(x));
        inner += wx * vx.conj() * m;
        vnorm += vx.norm_sqr() * m;
        energy += (gen.killing(x) + m) * wx.norm_sqr();
        for (y, b) in gen.neighbors(x) {
            energy += b * (wx - w.value(&y)?).norm_sqr();
        }
    }
    let pairing = (q + inner).norm();
    let tolerance = 1e-9 * vnorm.sqrt() * energy.sqrt().max(1.0);
    Ok(OrthogonalityReport { pairing, tolerance, holds: pairing <= tolerance })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentSign {
    Zero,
    Positive,
    Violation,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxPrincipleReport {
    pub components: Vec<ComponentSign>,
    /// `u >= 0` on `K ∪ halo` and `(L̃ + 1)u >= 0` on `K`, up to 1e-12.
    pub precondition: bool,
    pub min_value: f64,
    pub holds: bool,
}

/// On every connected component of `K`, a non-negative supersolution of
/// `(L̃ + 1)u >= 0` either vanishes identically or is strictly positive.
pub fn max_principle_check<G: GraphGenerator + ?Sized>(
    gen: &G,
    region: &Region,
    u: &SampledFunction,
) -> Result<MaxPrincipleReport> {
    let op = truncate(gen, region, BoundaryCondition::Dirichlet)?;
    let vals: Vec<f64> = op.ids().iter().map(|x| real_at(u, x)).collect::<Result<_>>()?;
    let mut precondition = true;
    for y in &region.halo {
        precondition &= real_at(u, y)? >= -1e-12;
    }
    for (x, &v) in op.ids().iter().zip(&vals) {
        precondition &= v >= -1e-12 && apply_formal(gen, u, x)?.re + v >= -1e-12;
    }
    let components: Vec<ComponentSign> = op
        .components()
        .into_iter()
        .map(|comp| {
            if comp.iter().all(|&i| vals[i] == 0.0) {
                ComponentSign::Zero
            } else if comp.iter().all(|&i| vals[i] > 0.0) {
                ComponentSign::Positive
            } else {
                ComponentSign::Violation
            }
        })
        .collect();
    Ok(MaxPrincipleReport {
        holds: !components.contains(&ComponentSign::Violation),
        components,
        precondition,
        min_value: vals.iter().copied().fold(f64::INFINITY, f64::min),
    })
}
