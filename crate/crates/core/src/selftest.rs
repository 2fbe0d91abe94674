//! Invariant suite over the built-in family matrix.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::completeness::heat_mass;
use crate::error::Result;
use crate::formal::{apply_formal, greens_identity_check, laplacian_of_delta, SampledFunction};
use crate::forms::dirichlet_axioms_check;
use crate::graph::{build_family, combinatorial_ball, Exhaustion, GraphGenerator};
use crate::spectral::semigroup_apply;
use crate::truncation::{ordering_check, truncate, BoundaryCondition};

pub const FAMILY_MATRIX: &[&str] = &[
    "line-Z",
    "regular-tree:k=3",
    "radial-tree:d=3",
    "radial-tree:d=n+2",
    "radial-tree:d=2^(n+2)",
    "fm-tree:k=3,q=0.5",
    "example4",
];

#[derive(Clone, Debug, Serialize)]
pub struct SelfCheck {
    pub family: String,
    pub check: &'static str,
    pub passed: bool,
    /// The measured quantity the check compares against its tolerance.
    pub measured: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub radius: usize,
    pub checks: Vec<SelfCheck>,
    pub passed: bool,
}

fn check(family: &str, name: &'static str, measured: f64, tolerance: f64) -> SelfCheck {
    SelfCheck { family: family.to_string(), check: name, passed: measured <= tolerance, measured, tolerance }
}

fn family_checks(family: &str, radius: usize, seed: u64) -> Result<Vec<SelfCheck>> {
    let g = build_family(family)?;
    let root = g.root();
    let ball = combinatorial_ball(&g, &root, radius);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut asym = 0.0f64;
    for x in &ball.vertices {
        for (y, b) in g.neighbors(x) {
            let back = g.neighbors(&y).into_iter().find(|(z, _)| z == x).map_or(f64::INFINITY, |(_, w)| w);
            asym = asym.max((back - b).abs());
        }
    }
    out.push(check(family, "neighbor-symmetry", asym, 0.0));

    let mut delta = 0.0f64;
    for x in ball.vertices.iter().take(8) {
        for z in ball.vertices.iter().take(8) {
            let formal = apply_formal(&g, &SampledFunction::delta(x.clone()), z)?;
            delta = delta.max((formal.re - laplacian_of_delta(&g, x, z)).abs());
        }
    }
    out.push(check(family, "delta-action", delta, 0.0));

    let mut rand_c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let outer = combinatorial_ball(&g, &root, radius + 1);
    let u = SampledFunction::from_pairs(outer.vertices.iter().map(|x| (x.clone(), rand_c())).collect::<Vec<_>>());
    let v = SampledFunction::from_pairs(ball.vertices.iter().map(|x| (x.clone(), rand_c())).collect::<Vec<_>>())
        .finitely_supported();
    out.push(check(family, "green-formula", greens_identity_check(&g, &u, &v)?.relative_deviation(), 1e-12));

    let ex = Exhaustion::radii(&g, &root, radius);
    out.push(check(family, "exhaustion-monotone", if ex.is_monotone() { 0.0 } else { 1.0 }, 0.0));

    let op = truncate(&g, &ball, BoundaryCondition::Dirichlet)?;
    let f: Vec<f64> = (0..op.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let joint = semigroup_apply(&op, 1.0, &f);
    let split = semigroup_apply(&op, 0.4, &semigroup_apply(&op, 0.6, &f));
    let law = joint.iter().zip(&split).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    out.push(check(family, "semigroup-law", law, 1e-9));

    let mass = semigroup_apply(&op, 1.0, &vec![1.0; op.len()]);
    let excess = mass.iter().map(|&m| (m - 1.0).max(-m)).fold(f64::NEG_INFINITY, f64::max);
    out.push(check(family, "sub-markov", excess, 1e-10));

    let ord = ordering_check(&g, &ball, None, 20, seed)?;
    let ord_measure = if ord.diagonal_difference_ok { ord.max_violation.max(0.0) } else { f64::INFINITY };
    out.push(check(family, "form-ordering", ord_measure, 1e-12));

    let u: Vec<Complex64> = (0..op.len()).map(|_| Complex64::new(rng.random_range(-2.0..2.0), 0.0)).collect();
    let ax = dirichlet_axioms_check(&op, &u, 4, seed)?;
    out.push(check(family, "contractions", ax.max_violation.max(0.0), 1e-12));

    let hm = heat_mass(&g, &ex, 1.0, &root)?;
    let drop = hm.levels.windows(2).map(|w| w[0].value - w[1].value).fold(0.0, f64::max);
    let over = hm.levels.iter().map(|l| l.value - 1.0).fold(f64::NEG_INFINITY, f64::max);
    out.push(check(family, "heat-mass-monotone", drop, 1e-10));
    out.push(check(family, "heat-mass-bounded", over, 1e-10));
    Ok(out)
}

/// Runs every check on every family of [`FAMILY_MATRIX`] over balls of the
/// given radius.
pub fn run_selftest(radius: usize, seed: u64) -> Result<SelftestReport> {
    let mut checks = Vec::new();
    for (i, family) in FAMILY_MATRIX.iter().enumerate() {
        checks.extend(family_checks(family, radius, seed.wrapping_add(i as u64))?);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(SelftestReport { seed, radius, checks, passed })
}
