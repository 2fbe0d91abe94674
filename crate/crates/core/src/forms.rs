//! Energy forms on exhaustions, Dirichlet-form axioms on finite truncations
//! and complexification of real forms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal::SampledFunction;
use crate::graph::{Exhaustion, GraphGenerator};
use crate::truncation::TruncatedOperator;

/// Partial sums above this cap with positive slope over three levels are
/// reported as divergent.
pub const DIVERGENCE_CAP: f64 = 1e12;

/// Value of a quadratic form with its exhaustion partial sums.
#[derive(Clone, Debug, Serialize)]
pub struct FormValue {
    /// Last partial sum, or `+∞` when divergence was detected.
    #[serde(serialize_with = "finite_or_inf")]
    pub value: f64,
    pub divergent: bool,
    pub partials: Vec<f64>,
    pub monotone: bool,
}

fn finite_or_inf<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

impl FormValue {
    pub fn from_partials(partials: Vec<f64>, cap: f64) -> Self {
        let monotone = partials.windows(2).all(|w| w[1] >= w[0]);
        let n = partials.len();
        let divergent = n >= 3
            && partials[n - 3..].iter().all(|&p| p > cap)
            && partials[n - 3..].windows(2).all(|w| w[1] > w[0]);
        let value = if divergent { f64::INFINITY } else { partials.last().copied().unwrap_or(0.0) };
        FormValue { value, divergent, partials, monotone }
    }
}

/// `½ Σ_{x,y∈K} b(x,y)(u(x)-u(y))(v(x)-v(y))‾ + Σ_{x∈K} c(x) u(x) v̄(x)`,
/// with an optional `Σ_K u v̄ m`.
fn level_sum<G: GraphGenerator + ?Sized>(
    gen: &G,
    u: &SampledFunction,
    v: &SampledFunction,
    level: &crate::graph::Region,
    with_mass: bool,
) -> Result<Complex64> {
    let inside: std::collections::HashSet<&crate::graph::VertexId> = level.vertices.iter().collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for x in &level.vertices {
        let (ux, vx) = (u.value(x)?, v.value(x)?);
        for (y, b) in gen.neighbors(x) {
            if x < &y && inside.contains(&y) {
                acc += (ux - u.value(&y)?) * (vx - v.value(&y)?).conj() * b;
            }
        }
        acc += ux * vx.conj() * gen.killing(x);
        if with_mass {
            acc += ux * vx.conj() * gen.measure(x);
        }
    }
    Ok(acc)
}

/// Partial sums of `Q^(N)(u,u)` over levels `0..=level`.
pub fn qn_partial<G: GraphGenerator + ?Sized>(
    gen: &G,
    u: &SampledFunction,
    exhaustion: &Exhaustion,
    level: usize,
) -> Result<FormValue> {
    if level >= exhaustion.len() {
        return Err(Error::Parameter(format!(
            "level {level} requested but the exhaustion has {} levels",
            exhaustion.len()
        )));
    }
    let partials = exhaustion.levels()[..=level]
        .iter()
        .map(|k| level_sum(gen, u, u, k, false).map(|z| z.re))
        .collect::<Result<Vec<_>>>()?;
    Ok(FormValue::from_partials(partials, DIVERGENCE_CAP))
}

/// `Q^(N)(u,v) + ⟨u,v⟩` summed over level `level`.
pub fn q_inner<G: GraphGenerator + ?Sized>(
    gen: &G,
    u: &SampledFunction,
    v: &SampledFunction,
    exhaustion: &Exhaustion,
    level: usize,
) -> Result<Complex64> {
    let k = exhaustion
        .levels()
        .get(level)
        .ok_or_else(|| Error::Parameter(format!("no exhaustion level {level}")))?;
    level_sum(gen, u, v, k, true)
}

/// Piecewise-linear `C: R -> R` with `C(0) = 0` and slopes in `[-1, 1]`,
/// hence a normal contraction.
#[derive(Clone, Debug, Serialize)]
pub struct Contraction {
    pub name: String,
    knots: Vec<f64>,
    values: Vec<f64>,
    left_slope: f64,
    right_slope: f64,
}

impl Contraction {
    /// Builds the interpolant through `(knots[i], values[i])`, which must
    /// include `(0, 0)`, extended linearly.
    pub fn new(name: &str, knots: Vec<f64>, values: Vec<f64>, left_slope: f64, right_slope: f64) -> Self {
        Contraction { name: name.to_string(), knots, values, left_slope, right_slope }
    }

    pub fn identity() -> Self {
        Self::new("identity", vec![0.0], vec![0.0], 1.0, 1.0)
    }

    /// `t ↦ max(t, 0)`.
    pub fn positive_part() -> Self {
        Self::new("positive-part", vec![0.0], vec![0.0], 0.0, 1.0)
    }

    /// `t ↦ min(t, 1)`.
    pub fn cut_at_one() -> Self {
        Self::new("min-one", vec![0.0, 1.0], vec![0.0, 1.0], 1.0, 0.0)
    }

    /// Random contraction with `pieces` interior knots spread over `[lo, hi]`.
    pub fn random(rng: &mut impl Rng, lo: f64, hi: f64, pieces: usize) -> Self {
        let mut knots: Vec<f64> = (0..pieces).map(|_| rng.random_range(lo..=hi)).collect();
        knots.push(0.0);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let slopes: Vec<f64> = (0..=knots.len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let zero = knots.iter().position(|&k| k == 0.0).expect("zero knot");
        let mut values = vec![0.0; knots.len()];
        for i in zero + 1..knots.len() {
            values[i] = values[i - 1] + slopes[i] * (knots[i] - knots[i - 1]);
        }
        for i in (0..zero).rev() {
            values[i] = values[i + 1] - slopes[i + 1] * (knots[i + 1] - knots[i]);
        }
        Self::new("random", knots, values, slopes[0], slopes[slopes.len() - 1])
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        let last = k.len() - 1;
        if t <= k[0] {
            return self.values[0] + self.left_slope * (t - k[0]);
        }
        if t >= k[last] {
            return self.values[last] + self.right_slope * (t - k[last]);
        }
        let i = k.partition_point(|&x| x <= t) - 1;
        let s = (self.values[i + 1] - self.values[i]) / (k[i + 1] - k[i]);
        self.values[i] + s * (t - k[i])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ContractionSample {
    pub name: String,
    pub q_u: f64,
    pub q_cu: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub q_u: f64,
    pub q_positive_part: f64,
    pub q_cut_at_one: f64,
    pub samples: Vec<ContractionSample>,
    /// Largest `(Q(Cu) - Q(u)) / max(1, Q(u))` over all contractions.
    pub max_violation: f64,
    pub violations: usize,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `Q(Cu) <= Q(u)` for `u₊`, `u ∧ 1`, the identity and `contractions`
/// random normal contractions, with `Q(u) = ⟨u, Tu⟩_m`.
pub fn dirichlet_axioms_check(
    op: &TruncatedOperator,
    u: &[Complex64],
    contractions: usize,
    seed: u64,
) -> Result<AxiomReport> {
    if let Some(i) = u.iter().position(|z| z.im != 0.0) {
        return Err(Error::NonReal(op.ids()[i].clone()));
    }
    let re: Vec<f64> = u.iter().map(|z| z.re).collect();
    let q_u = op.energy(&re);
    let lo = re.iter().copied().fold(0.0, f64::min) - 1.0;
    let hi = re.iter().copied().fold(0.0, f64::max) + 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = vec![Contraction::positive_part(), Contraction::cut_at_one(), Contraction::identity()];
    for _ in 0..contractions {
        let pieces = rng.random_range(1..=6);
        all.push(Contraction::random(&mut rng, lo, hi, pieces));
    }
    let mut samples = Vec::with_capacity(all.len());
    let mut max_violation = f64::NEG_INFINITY;
    let mut violations = 0;
    let scale = q_u.max(1.0);
    for c in &all {
        let cu: Vec<f64> = re.iter().map(|&t| c.eval(t)).collect();
        let q_cu = op.energy(&cu);
        let v = (q_cu - q_u) / scale;
        max_violation = max_violation.max(v);
        if v > 1e-12 {
            violations += 1;
        }
        samples.push(ContractionSample { name: c.name.clone(), q_u, q_cu });
    }
    Ok(AxiomReport {
        q_u,
        q_positive_part: samples[0].q_cu,
        q_cut_at_one: samples[1].q_cu,
        samples,
        max_violation,
        violations,
    })
}

/// Complex sesquilinear form built from a real symmetric one:
/// `Q(u₁+iv₁, u₂+iv₂) = Q_r(u₁,u₂) + Q_r(v₁,v₂) + i(Q_r(v₁,u₂) - Q_r(u₁,v₂))`.
pub struct ComplexForm<F> {
    real: F,
}

impl<F: Fn(&[f64], &[f64]) -> f64> ComplexForm<F> {
    pub fn new(real: F) -> Self {
        ComplexForm { real }
    }

    pub fn real_form(&self, u: &[f64], v: &[f64]) -> f64 {
        (self.real)(u, v)
    }

    pub fn eval(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let (u1, v1): (Vec<f64>, Vec<f64>) = a.iter().map(|z| (z.re, z.im)).unzip();
        let (u2, v2): (Vec<f64>, Vec<f64>) = b.iter().map(|z| (z.re, z.im)).unzip();
        let q = &self.real;
        Complex64::new(q(&u1, &u2) + q(&v1, &v2), q(&v1, &u2) - q(&u1, &v2))
    }
}

/// Complexification of the form `⟨u, Tv⟩_m` of a truncation.
pub fn complexify(op: &TruncatedOperator) -> ComplexForm<impl Fn(&[f64], &[f64]) -> f64 + '_> {
    ComplexForm::new(move |u: &[f64], v: &[f64]| op.bilinear(u, v))
}
