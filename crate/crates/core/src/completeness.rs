//! Heat mass `M_t = e^{-tL}1 + ∫_0^t e^{-sL}(c/m) ds` along exhaustions,
//! stochastic completeness at infinity, the degree criterion for radial
//! trees and the worked example on `Z` with a summable measure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal::{apply_formal, SampledFunction};
use crate::graph::{
    build_family, radial_reduce, Example4, Exhaustion, GraphGenerator, RadialProfile, TreeDegrees, VertexId,
};
use crate::harmonic::{classify_solution, SolutionClass};
use crate::spectral::{semigroup_apply, semigroup_method, semigroup_with_integral, KernelMethod};
use crate::truncation::{truncate, BoundaryCondition, TruncatedOperator};

/// `1 - M` at or below this value counts as complete.
pub const SC_TOL: f64 = 1e-6;
/// `1 - M` at or above this value counts as a deficit.
pub const DEFICIT_TOL: f64 = 1e-3;
/// A deficit counts as stabilized when the levels increase with shrinking
/// steps and either the extrapolated correction or the change between two
/// consecutive extrapolations is below this fraction of it.
pub const DEFICIT_STABILIZATION: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassVerdict {
    #[serde(rename = "SC-infinity")]
    ScInfinity,
    Incomplete,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct MassLevel {
    pub size: usize,
    pub value: f64,
    pub semigroup_term: f64,
    pub killing_term: f64,
    pub method: KernelMethod,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatMassReport {
    pub t: f64,
    pub x: VertexId,
    pub boundary: &'static str,
    pub levels: Vec<MassLevel>,
    pub limit: f64,
    pub verdict: MassVerdict,
    /// `1 - limit`.
    pub delta: f64,
    pub stabilized: bool,
    /// Levels nondecreasing within 1e-10.
    pub monotone: bool,
    /// Every level inside `[0, 1 + 1e-10]`.
    pub bounded: bool,
    /// Set for Neumann truncations, which carry no monotonicity guarantee.
    pub heuristic: bool,
}

/// Aitken's Δ² on the last three values when they increase with shrinking
/// steps; the last value otherwise.
pub fn aitken_limit(values: &[f64]) -> f64 {
    let Some(&last) = values.last() else { return f64::NAN };
    if values.len() < 3 {
        return last;
    }
    let k = values.len();
    let (d1, d2) = (values[k - 2] - values[k - 3], values[k - 1] - values[k - 2]);
    if d2 == 0.0 || !(d1 > d2 && d2 > 0.0) {
        return last;
    }
    last + d2 * d2 / (d1 - d2)
}

fn mass_level(op: &TruncatedOperator, t: f64, i: usize) -> MassLevel {
    let ones = vec![1.0; op.len()];
    let rate: Vec<f64> = (0..op.len()).map(|k| op.killing()[k] / op.measure()[k]).collect();
    let semigroup_term = semigroup_apply(op, t, &ones)[i];
    let killing_term = if rate.iter().all(|&r| r == 0.0) {
        0.0
    } else {
        semigroup_with_integral(op, t, &vec![0.0; op.len()], &rate)[i]
    };
    MassLevel {
        size: op.len(),
        value: semigroup_term + killing_term,
        semigroup_term,
        killing_term,
        method: semigroup_method(op, t),
    }
}

fn mass_report(t: f64, x: VertexId, bc: &BoundaryCondition, levels: Vec<MassLevel>) -> HeatMassReport {
    let values: Vec<f64> = levels.iter().map(|l| l.value).collect();
    let k = values.len();
    // a mass cannot exceed 1; an extrapolation beyond it is not trusted and
    // leaves the levels unstabilized
    let raw = aitken_limit(&values);
    let overshoot = raw > 1.0;
    let limit = if overshoot { values[k - 1] } else { raw };
    let delta = 1.0 - limit;
    let stable = k >= 3 && !overshoot && {
        let (d1, d2) = (values[k - 2] - values[k - 3], values[k - 1] - values[k - 2]);
        let tol = DEFICIT_STABILIZATION * delta;
        // either the extrapolated correction is already small, or two
        // consecutive extrapolations agree
        let consistent = k >= 4 && (aitken_limit(&values[..k - 1]) - limit).abs() <= tol;
        d2 >= 0.0 && d2 <= d1 && ((limit - values[k - 1]).abs() <= tol || consistent)
    };
    let verdict = if k < 3 {
        MassVerdict::Inconclusive
    } else if delta <= SC_TOL {
        MassVerdict::ScInfinity
    } else if delta >= DEFICIT_TOL && stable {
        MassVerdict::Incomplete
    } else {
        MassVerdict::Inconclusive
    };
    HeatMassReport {
        t,
        x,
        boundary: bc.name(),
        monotone: values.windows(2).all(|w| w[1] >= w[0] - 1e-10),
        bounded: values.iter().all(|&v| (0.0..=1.0 + 1e-10).contains(&v)),
        heuristic: !matches!(bc, BoundaryCondition::Dirichlet),
        levels,
        limit,
        verdict,
        delta,
        stabilized: stable,
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Parameter(format!("t = {t} must be positive")));
    }
    Ok(())
}

fn mass_along<G: GraphGenerator + ?Sized>(
    gen: &G,
    exhaustion: &Exhaustion,
    t: f64,
    x: &VertexId,
    bc: BoundaryCondition,
) -> Result<HeatMassReport> {
    check_time(t)?;
    let levels = exhaustion
        .levels()
        .par_iter()
        .map(|region| {
            let op = truncate(gen, region, bc.clone())?;
            Ok(mass_level(&op, t, op.require_index(x)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mass_report(t, x.clone(), &bc, levels))
}

/// `M_t^K(x)` on the Dirichlet truncations of an exhaustion.
pub fn heat_mass<G: GraphGenerator + ?Sized>(
    gen: &G,
    exhaustion: &Exhaustion,
    t: f64,
    x: &VertexId,
) -> Result<HeatMassReport> {
    mass_along(gen, exhaustion, t, x, BoundaryCondition::Dirichlet)
}

/// The same quantity for Neumann truncations. Heuristic only.
pub fn neumann_mass<G: GraphGenerator + ?Sized>(
    gen: &G,
    exhaustion: &Exhaustion,
    t: f64,
    x: &VertexId,
) -> Result<HeatMassReport> {
    mass_along(gen, exhaustion, t, x, BoundaryCondition::Neumann)
}

fn mass_radial(profile: &RadialProfile, root: VertexId, radii: &[usize], t: f64, bc: BoundaryCondition) -> Result<HeatMassReport> {
    check_time(t)?;
    let levels = radii
        .par_iter()
        .map(|&r| {
            let op = TruncatedOperator::from_profile(&profile.truncated(r), bc.clone())?;
            Ok(mass_level(&op, t, 0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(mass_report(t, root, &bc, levels))
}

/// Heat mass at the root of a spherically symmetric generator on balls of
/// the given radii, computed on the radial quotient (`1` and `c/m` are
/// radial there).
pub fn heat_mass_radial<G: GraphGenerator + ?Sized>(gen: &G, radii: &[usize], t: f64) -> Result<HeatMassReport> {
    let depth = radii.iter().copied().max().unwrap_or(0);
    let profile = radial_reduce(gen, &gen.root(), depth)?;
    mass_radial(&profile, gen.root(), radii, t, BoundaryCondition::Dirichlet)
}

pub fn neumann_mass_radial<G: GraphGenerator + ?Sized>(gen: &G, radii: &[usize], t: f64) -> Result<HeatMassReport> {
    let depth = radii.iter().copied().max().unwrap_or(0);
    let profile = radial_reduce(gen, &gen.root(), depth)?;
    mass_radial(&profile, gen.root(), radii, t, BoundaryCondition::Neumann)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeVerdict {
    #[serde(rename = "SC")]
    Sc,
    #[serde(rename = "not-SC")]
    NotSc,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadialCriterionReport {
    pub degrees: Vec<f64>,
    /// `Σ_{k<=n} 1/d_k`.
    pub partial_sums: Vec<f64>,
    /// Estimated value of the full series, infinite when divergent.
    pub estimate: f64,
    /// Estimated exponent `p` in `d_n ~ n^p`.
    pub exponent: f64,
    /// Mean ratio `d_{n+1}/d_n` over the last levels.
    pub ratio: f64,
    pub verdict: DegreeVerdict,
}

/// `Σ 1/d_n = ∞` on a radial tree, judged from `N` terms: geometric growth
/// of `d_n` (convergent), or polynomial growth with exponent at most one
/// (divergent) or above one (convergent).
pub fn radial_tree_criterion(degrees: &TreeDegrees, n: usize) -> Result<RadialCriterionReport> {
    if n < 8 {
        return Err(Error::Parameter(format!("need at least 8 terms, got {n}")));
    }
    let d: Vec<f64> = (0..=n).map(|k| degrees.degree(k)).collect();
    if let Some(k) = (1..d.len()).find(|&k| !(d[k] >= 2.0)) {
        return Err(Error::Parameter(format!("d({k}) = {} must be at least 2", d[k])));
    }
    let mut partial_sums = Vec::with_capacity(d.len());
    let mut acc = 0.0;
    for v in &d {
        acc += 1.0 / v;
        partial_sums.push(acc);
    }
    let tail = 5;
    let ratio = (d[n] / d[n - tail]).powf(1.0 / tail as f64);
    let exponent = (d[n] / d[n / 2]).ln() / (n as f64 / (n / 2) as f64).ln();
    let geometric = (n - tail..n).all(|k| d[k + 1] / d[k] >= 1.05);
    let (verdict, estimate) = if geometric {
        // tail dominated by Σ_{k>N} 1/(d_N r^{k-N})
        (DegreeVerdict::NotSc, acc + 1.0 / (d[n] * (ratio - 1.0)))
    } else if exponent <= 1.05 {
        (DegreeVerdict::Sc, f64::INFINITY)
    } else if exponent >= 1.2 {
        let p = exponent;
        (DegreeVerdict::NotSc, acc + n as f64 / (d[n] * (p - 1.0)))
    } else {
        (DegreeVerdict::Inconclusive, f64::NAN)
    };
    Ok(RadialCriterionReport { degrees: d, partial_sums, estimate, exponent, ratio, verdict })
}

/// The radial solution of `(L̃ + 1)u = 0` on a tree classified as bounded
/// or growing.
pub fn radial_solution_class<G: GraphGenerator + ?Sized>(gen: &G, depth: usize) -> Result<SolutionClass> {
    let profile = radial_reduce(gen, &gen.root(), depth)?;
    let sol = crate::harmonic::radial_solve(&profile)?;
    Ok(classify_solution(&crate::harmonic::radial_shells(&profile, &sol)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Example4Report {
    pub rho: f64,
    pub amp: f64,
    pub window: i64,
    pub lambda: f64,
    /// `arccosh(3/2)` from the standard library, for comparison.
    pub lambda_acosh: f64,
    /// `e^λ + e^{-λ} - 2`.
    pub cosh_identity: f64,
    /// (a) `c + m = 1` at every vertex of the window.
    pub mass_identity: bool,
    /// (b) largest relative residual of `(L̃ + 1)e^{λx}` on the window.
    pub residual: f64,
    /// (c) `Σ u² m` beyond `|x| = 30`.
    pub l2_tail: f64,
    pub l2_total: f64,
    pub esa_failure_evidence: bool,
    /// (d) both exponential solutions on `(Z, 1, 0, 1)` grow without bound.
    pub sc_evidence: bool,
    /// (e) largest relative deviation of `(L̃+1)w = (1/m)(Δ̃+1)w`.
    pub equivalence_deviation: f64,
    pub checks: [bool; 5],
}

impl Example4Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|&c| c)
    }
}

/// The solution `u(x) = e^{λx}` with summable `u² m` on `Z` with
/// `m = min{1, φ/u²}` and `c = 1 - m`.
pub fn example4_verify(rho: f64, amp: f64, window: i64, seed: u64) -> Result<Example4Report> {
    if window < 31 {
        return Err(Error::Parameter(format!("window {window} must exceed 30")));
    }
    let gen = build_family(&format!("example4:rho={rho},A={amp}"))?;
    let e: &Example4 = gen.as_example4().expect("example4 family");
    let lambda = e.lambda;
    let xs: Vec<i64> = (-window..=window).collect();

    let mass_identity = xs.iter().all(|&x| e.c(x) + e.m(x) == 1.0);

    let u = SampledFunction::sample(&(-window - 1..=window + 1).map(VertexId::Int).collect::<Vec<_>>(), |x| {
        num_complex::Complex64::new(e.u(x.as_int().expect("integer vertex")), 0.0)
    });
    let mut residual = 0.0f64;
    for &x in &xs {
        let id = VertexId::Int(x);
        let r = apply_formal(&gen, &u, &id)?.re + e.u(x);
        let (ux, m) = (e.u(x), e.m(x));
        let scale = (2.0 * ux + e.u(x - 1) + e.u(x + 1) + e.c(x) * ux) / m + ux;
        residual = residual.max(r.abs() / scale);
    }

    // shells |x| = n
    let shells: Vec<Vec<(f64, f64)>> = (0..=window)
        .map(|n| {
            let mut s = vec![(e.u(n), e.m(n))];
            if n > 0 {
                s.push((e.u(-n), e.m(-n)));
            }
            s
        })
        .collect();
    let class = classify_solution(&shells);
    let l2_total = *class.partial_l2.last().expect("window is non-empty");
    let l2_tail = l2_total - class.partial_l2[30];
    let esa_failure_evidence = class.esa_failure_evidence();

    let plain = |sign: f64| -> SolutionClass {
        let shells: Vec<Vec<(f64, f64)>> = (0..=window)
            .map(|n| {
                let v = (sign * lambda * n as f64).exp();
                let w = (-sign * lambda * n as f64).exp();
                if n == 0 {
                    vec![(v, 1.0)]
                } else {
                    vec![(v, 1.0), (w, 1.0)]
                }
            })
            .collect();
        classify_solution(&shells)
    };
    let (up, down) = (plain(1.0), plain(-1.0));
    let sc_evidence = up.growing && down.growing && !up.bounded_evidence && !down.bounded_evidence;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w_vals: Vec<(VertexId, f64)> =
        (-window - 1..=window + 1).map(|x| (VertexId::Int(x), rng.random_range(-1.0..1.0))).collect();
    let w = SampledFunction::from_real(w_vals.iter().cloned());
    let wv = |x: i64| w_vals[(x + window + 1) as usize].1;
    let mut equivalence_deviation = 0.0f64;
    for &x in &xs {
        let lhs = apply_formal(&gen, &w, &VertexId::Int(x))?.re + wv(x);
        let plain_res = 2.0 * wv(x) - wv(x - 1) - wv(x + 1) + wv(x);
        let rhs = plain_res / e.m(x);
        let scale = (2.0 * wv(x).abs() + wv(x - 1).abs() + wv(x + 1).abs() + wv(x).abs()) / e.m(x);
        equivalence_deviation = equivalence_deviation.max((lhs - rhs).abs() / scale);
    }

    let lambda_acosh = 1.5f64.acosh();
    let cosh_identity = lambda.exp() + (-lambda).exp() - 2.0;
    let checks = [
        mass_identity,
        residual <= 1e-10,
        esa_failure_evidence,
        sc_evidence,
        equivalence_deviation <= 1e-12,
    ];
    Ok(Example4Report {
        rho,
        amp,
        window,
        lambda,
        lambda_acosh,
        cosh_identity,
        mass_identity,
        residual,
        l2_tail,
        l2_total,
        esa_failure_evidence,
        sc_evidence,
        equivalence_deviation,
        checks,
    })
}
