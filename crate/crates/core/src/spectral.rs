//! Resolvents, heat semigroups and heat kernels of truncated operators.
//!
//! The semigroup is evaluated by uniformization: with `η = 1.01 max T_xx`
//! and `P = I - T/η` (entrywise non-negative),
//!
//! `e^{-tT} = e^{-tη} Σ_k (tη)^k / k! P^k`.
//!
//! Long times are split into chunks with `hη <= 256` so that Poisson
//! weights stay representable; every chunk is rescaled, which keeps a log
//! scale for kernel values far below the smallest float.
//!
//! Stiff operators (`tη` beyond [`UNIFORMIZATION_BUDGET`]) of moderate size
//! go through a dense eigendecomposition instead.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formal::{apply_formal, SampledFunction};
use crate::graph::{GraphGenerator, VertexId};
use crate::linalg::{graded_eigen, lanczos_max, MFactor};
use crate::truncation::TruncatedOperator;

/// Largest Poisson parameter per chunk.
pub const CHUNK_RATE: f64 = 256.0;
/// Neglected Poisson tail mass per chunk.
pub const SERIES_TAIL: f64 = 1e-16;
/// Largest `tη` evaluated by uniformization when a dense fallback is possible.
pub const UNIFORMIZATION_BUDGET: f64 = 1e6;
/// Largest operator handed to the dense fallback (cubic cost per sweep).
pub const DENSE_LIMIT: usize = 400;

fn use_dense(op: &TruncatedOperator, t: f64) -> bool {
    t > 0.0 && op.len() <= DENSE_LIMIT && t * 1.01 * op.max_diag() > UNIFORMIZATION_BUDGET
}

/// How `e^{-tT}` is evaluated for this operator and time.
pub fn semigroup_method(op: &TruncatedOperator, t: f64) -> KernelMethod {
    if use_dense(op, t) {
        KernelMethod::Eigendecomposition
    } else {
        KernelMethod::Uniformization
    }
}

/// Dense `e^{-tT} f` and `∫_0^t e^{-sT} g ds`.
fn dense_flow(op: &TruncatedOperator, t: f64, f: &[f64], g: Option<&[f64]>) -> Vec<f64> {
    let (vals, vecs) = graded_eigen(op);
    let n = op.len();
    let m = op.measure();
    let mut out = vec![0.0; n];
    for k in 0..n {
        let col = vecs.column(k);
        let lam = vals[k];
        let mut coef = (0..n).map(|i| col[i] * f[i] * m[i]).sum::<f64>() * (-t * lam).exp();
        if let Some(g) = g {
            let w = if (t * lam).abs() < 1e-8 { t } else { -(-t * lam).exp_m1() / lam };
            coef += (0..n).map(|i| col[i] * g[i] * m[i]).sum::<f64>() * w;
        }
        for i in 0..n {
            out[i] += coef * col[i];
        }
    }
    out
}

/// `(T + β)^{-1} f`.
pub fn resolvent_apply(op: &TruncatedOperator, beta: f64, f: &[f64]) -> Result<Vec<f64>> {
    if !(beta > 0.0) {
        return Err(Error::Parameter(format!("beta = {beta} must be positive")));
    }
    let fac = MFactor::new(op, beta)?;
    let g = fac.solve(f);
    let res = residual(op, beta, &g, f);
    let fnorm = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    // backward-error scale: |T + β| |g|
    let scale = fnorm.max(g.iter().fold(0.0f64, |a, v| a.max(v.abs())) * (2.0 * op.max_diag() + beta));
    if res > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NoConvergence(format!(
            "resolvent residual {res:e} exceeds tolerance (scale {scale:e})"
        )));
    }
    Ok(g)
}

fn residual(op: &TruncatedOperator, beta: f64, g: &[f64], f: &[f64]) -> f64 {
    let tg = op.apply(g);
    (0..g.len()).fold(0.0f64, |a, i| a.max((tg[i] + beta * g[i] - f[i]).abs()))
}

/// Options for the uniformization series.
#[derive(Clone, Copy, Debug)]
pub struct SeriesOptions {
    /// Minimum number of series terms per chunk; needed to resolve
    /// `p_t(x,y) > 0` at tiny `t` for vertices `min_terms` hops apart.
    pub min_terms: usize,
    pub tail: f64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { min_terms: 0, tail: SERIES_TAIL }
    }
}

struct Uniformizer {
    eta: f64,
    off: Vec<Vec<(usize, f64)>>,
    self_weight: Vec<f64>,
}

impl Uniformizer {
    fn new(op: &TruncatedOperator) -> Self {
        let eta = 1.01 * op.max_diag();
        let n = op.len();
        let (off, self_weight) = if eta > 0.0 {
            (
                (0..n)
                    .map(|i| op.arcs(i).iter().map(|&(j, b)| (j, b / (op.measure()[i] * eta))).collect())
                    .collect(),
                (0..n).map(|i| 1.0 - op.diag()[i] / eta).collect(),
            )
        } else {
            (vec![Vec::new(); n], vec![1.0; n])
        };
        Uniformizer { eta, off, self_weight }
    }

    fn step(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..v.len() {
            let mut acc = self.self_weight[i] * v[i];
            for &(j, p) in &self.off[i] {
                acc += p * v[j];
            }
            out[i] = acc;
        }
    }

    /// Poisson weights `w_k` for `k = 0..=K` and the tail beyond `K`.
    fn weights(lambda: f64, opts: SeriesOptions) -> Vec<f64> {
        let mut w = Vec::new();
        let ln_l = lambda.ln();
        let mut lw = -lambda;
        let mut k = 0usize;
        loop {
            w.push(lw.exp());
            let next_ratio = lambda / (k + 1) as f64;
            // tail bound for k > lambda: w_k * r / (1 - r)
            let done = k as f64 > lambda
                && next_ratio < 1.0
                && lw.exp() * next_ratio / (1.0 - next_ratio) <= opts.tail
                && k >= opts.min_terms;
            if done || lambda == 0.0 && k >= opts.min_terms {
                break;
            }
            k += 1;
            lw += ln_l - (k as f64).ln();
        }
        w
    }

    /// One chunk of length `h`: returns `e^{-hT} f` and, if `g` is given,
    /// `∫_0^h e^{-sT} g ds`.
    fn chunk(&self, h: f64, f: &[f64], g: Option<&[f64]>, opts: SeriesOptions) -> (Vec<f64>, Option<Vec<f64>>) {
        let n = f.len();
        let lambda = h * self.eta;
        let w = Self::weights(lambda, opts);
        // integral weights (1/η) P(N >= k + 1), by backward summation
        let integral: Option<Vec<f64>> = g.map(|_| {
            let mut q = vec![0.0; w.len()];
            let mut tail = 0.0;
            for k in (0..w.len()).rev() {
                q[k] = tail / self.eta;
                tail += w[k];
            }
            q
        });
        let mut acc = vec![0.0; n];
        let mut iacc = g.map(|_| vec![0.0; n]);
        let mut v = f.to_vec();
        let mut vg = g.map(|x| x.to_vec());
        let mut tmp = vec![0.0; n];
        for k in 0..w.len() {
            for i in 0..n {
                acc[i] += w[k] * v[i];
            }
            if let (Some(ia), Some(vg), Some(q)) = (iacc.as_mut(), vg.as_ref(), integral.as_ref()) {
                for i in 0..n {
                    ia[i] += q[k] * vg[i];
                }
            }
            if k + 1 < w.len() {
                self.step(&v, &mut tmp);
                std::mem::swap(&mut v, &mut tmp);
                if let Some(vg) = vg.as_mut() {
                    self.step(vg, &mut tmp);
                    std::mem::swap(vg, &mut tmp);
                }
            }
        }
        (acc, iacc)
    }

    fn chunks(&self, t: f64) -> (usize, f64) {
        let total = t * self.eta;
        let count = (total / CHUNK_RATE).ceil().max(1.0) as usize;
        (count, t / count as f64)
    }
}

/// `e^{-tT} f`.
pub fn semigroup_apply(op: &TruncatedOperator, t: f64, f: &[f64]) -> Vec<f64> {
    semigroup_apply_with(op, t, f, SeriesOptions::default())
}

pub fn semigroup_apply_with(op: &TruncatedOperator, t: f64, f: &[f64], opts: SeriesOptions) -> Vec<f64> {
    let (v, log_scale) = semigroup_apply_scaled(op, t, f, opts);
    let s = log_scale.exp();
    v.into_iter().map(|x| x * s).collect()
}

/// `e^{-tT} f = v · e^{log_scale}`, with `v` rescaled after every chunk.
pub fn semigroup_apply_scaled(op: &TruncatedOperator, t: f64, f: &[f64], opts: SeriesOptions) -> (Vec<f64>, f64) {
    assert!(t >= 0.0, "time must be non-negative");
    if use_dense(op, t) {
        return (dense_flow(op, t, f, None), 0.0);
    }
    uniformized(op, t, f, opts)
}

fn uniformized(op: &TruncatedOperator, t: f64, f: &[f64], opts: SeriesOptions) -> (Vec<f64>, f64) {
    let u = Uniformizer::new(op);
    if t == 0.0 || u.eta == 0.0 {
        return (f.to_vec(), 0.0);
    }
    let (count, h) = u.chunks(t);
    let mut v = f.to_vec();
    let mut log_scale = 0.0;
    for _ in 0..count {
        v = u.chunk(h, &v, None, opts).0;
        let s = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if s > 0.0 && (s < 1e-100 || s > 1e100) {
            v.iter_mut().for_each(|x| *x /= s);
            log_scale += s.ln();
        }
    }
    (v, log_scale)
}

/// `e^{-tT} f + ∫_0^t e^{-sT} g ds`, the integral taken term by term in
/// the uniformization series.
pub fn semigroup_with_integral(op: &TruncatedOperator, t: f64, f: &[f64], g: &[f64]) -> Vec<f64> {
    if t == 0.0 {
        return f.to_vec();
    }
    if use_dense(op, t) {
        return dense_flow(op, t, f, Some(g));
    }
    uniformized_with_integral(op, t, f, g)
}

fn uniformized_with_integral(op: &TruncatedOperator, t: f64, f: &[f64], g: &[f64]) -> Vec<f64> {
    let u = Uniformizer::new(op);
    if u.eta == 0.0 {
        return f.iter().zip(g).map(|(a, b)| a + t * b).collect();
    }
    let (count, h) = u.chunks(t);
    let opts = SeriesOptions::default();
    let (_, ig) = u.chunk(h, &vec![0.0; f.len()], Some(g), opts);
    let ig = ig.expect("integral requested");
    let mut v = f.to_vec();
    for _ in 0..count {
        let (e, _) = u.chunk(h, &v, None, opts);
        v = e.iter().zip(&ig).map(|(a, b)| a + b).collect();
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMethod {
    Uniformization,
    Eigendecomposition,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatKernelSample {
    pub t: f64,
    pub x: VertexId,
    pub y: VertexId,
    pub value: f64,
    /// `ln p_t(x,y)`, `None` when the value is exactly zero.
    pub log_value: Option<f64>,
    pub method: KernelMethod,
}

/// `p_t(x,y) = (e^{-tT} δ_y)(x) / m(y)`.
pub fn heat_kernel(op: &TruncatedOperator, t: f64, x: &VertexId, y: &VertexId) -> Result<HeatKernelSample> {
    heat_kernel_with(op, t, x, y, SeriesOptions::default())
}

pub fn heat_kernel_with(
    op: &TruncatedOperator,
    t: f64,
    x: &VertexId,
    y: &VertexId,
    opts: SeriesOptions,
) -> Result<HeatKernelSample> {
    let (i, j) = (op.require_index(x)?, op.require_index(y)?);
    let mut d = vec![0.0; op.len()];
    d[j] = 1.0;
    let method = semigroup_method(op, t);
    let (v, log_scale) = semigroup_apply_scaled(op, t, &d, opts);
    let my = op.measure()[j];
    let log_value = (v[i] > 0.0).then(|| v[i].ln() + log_scale - my.ln());
    Ok(HeatKernelSample {
        t,
        x: x.clone(),
        y: y.clone(),
        value: log_value.map_or(0.0, f64::exp),
        log_value,
        method,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralBottom {
    pub component: Vec<VertexId>,
    pub e0: f64,
    /// Ground state on the whole vertex set of the operator (zero off the
    /// component), `ℓ²(m)`-normalised and non-negative.
    pub phi: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Bottom of the spectrum and ground state, per connected component, by
/// shifted inverse iteration. Shifts stay below the spectrum (checked by
/// positive pivots), so every iterate is a positive vector.
pub fn bottom_of_spectrum(op: &TruncatedOperator, tol: f64) -> Result<Vec<SpectralBottom>> {
    op.components()
        .into_iter()
        .map(|comp| {
            let sub = op.restrict(&comp)?;
            let (e0, phi_c, residual, iterations) = ground_state(&sub, tol)?;
            let mut phi = vec![0.0; op.len()];
            for (a, &i) in comp.iter().enumerate() {
                phi[i] = phi_c[a];
            }
            Ok(SpectralBottom {
                component: comp.iter().map(|&i| op.ids()[i].clone()).collect(),
                e0,
                phi,
                residual,
                iterations,
            })
        })
        .collect()
}

fn ground_state(op: &TruncatedOperator, tol: f64) -> Result<(f64, Vec<f64>, f64, usize)> {
    let n = op.len();
    let scale = op.max_diag().max(f64::MIN_POSITIVE);
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let norm = op.norm(&x);
    x.iter_mut().for_each(|v| *v /= norm);
    let mut sigma = -1e-8 * scale;
    let mut fac = MFactor::new(op, -sigma)?;
    let mut rho = op.quadratic_form(&x);
    for it in 1..=2000 {
        let mut y = fac.solve(&x);
        let ny = op.norm(&y);
        y.iter_mut().for_each(|v| *v /= ny);
        x = y;
        let tx = op.apply(&x);
        rho = op.inner(&x, &tx);
        let r: Vec<f64> = tx.iter().zip(&x).map(|(a, b)| a - rho * b).collect();
        let res = op.norm(&r);
        if res <= tol * scale {
            return Ok((rho, x, res, it));
        }
        // move the shift halfway towards the Rayleigh quotient, keeping it
        // below the spectrum
        let mut target = sigma + 0.5 * (rho - sigma);
        for _ in 0..8 {
            match MFactor::new(op, -target) {
                Ok(f) => {
                    fac = f;
                    sigma = target;
                    break;
                }
                Err(_) => target = sigma + 0.5 * (target - sigma),
            }
        }
    }
    let tx = op.apply(&x);
    let r: Vec<f64> = tx.iter().zip(&x).map(|(a, b)| a - rho * b).collect();
    Err(Error::NoConvergence(format!(
        "inverse iteration stalled with residual {:e}",
        op.norm(&r)
    )))
}

/// Spectral radius (largest eigenvalue) of `T`.
pub fn spectral_radius(op: &TruncatedOperator, tol: f64) -> f64 {
    if op.len() <= 200 {
        let (vals, _) = crate::linalg::dense_eigen(op);
        return vals.last().copied().unwrap_or(0.0);
    }
    lanczos_max(op, tol, 20 * op.len() + 100, 0x5eed).value
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityReport {
    pub times: Vec<f64>,
    pub connected: bool,
    pub improving: bool,
    /// Smallest kernel value over pairs in the same component.
    pub min_within: f64,
    /// Largest kernel value over pairs in different components.
    pub max_across: f64,
    /// Series terms used per chunk; at least the largest hop distance.
    pub terms_required: usize,
    /// Verdict agrees with connectivity, and cross-component entries vanish.
    pub consistent: bool,
}

fn hop_diameter(op: &TruncatedOperator) -> usize {
    let n = op.len();
    let mut best = 0;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &(y, b) in op.arcs(x) {
                if b > 0.0 && dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    best = best.max(dist[y]);
                    queue.push_back(y);
                }
            }
        }
    }
    best
}

/// Checks whether `e^{-tT}` is positivity improving on the sampled times:
/// every kernel entry positive. Uses at least `diameter` series terms, so
/// that `P^k δ_y` has reached every vertex of its component.
pub fn positivity_improving_check(op: &TruncatedOperator, times: &[f64]) -> Result<PositivityReport> {
    let comps = op.components();
    let mut label = vec![0; op.len()];
    for (c, comp) in comps.iter().enumerate() {
        for &i in comp {
            label[i] = c;
        }
    }
    let terms = hop_diameter(op);
    let opts = SeriesOptions { min_terms: terms, ..SeriesOptions::default() };
    let mut min_within = f64::INFINITY;
    let mut max_across = 0.0f64;
    for &t in times {
        if !(t > 0.0) {
            return Err(Error::Parameter(format!("t = {t} must be positive")));
        }
        for j in 0..op.len() {
            let mut d = vec![0.0; op.len()];
            d[j] = 1.0;
            let (v, _) = semigroup_apply_scaled(op, t, &d, opts);
            for i in 0..op.len() {
                if label[i] == label[j] {
                    min_within = min_within.min(v[i]);
                } else {
                    max_across = max_across.max(v[i].abs());
                }
            }
        }
    }
    let connected = comps.len() == 1;
    let improving = min_within > 0.0 && connected;
    Ok(PositivityReport {
        times: times.to_vec(),
        connected,
        improving,
        min_within,
        max_across,
        terms_required: terms,
        consistent: improving == connected && max_across == 0.0 && min_within > 0.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LiReport {
    pub times: Vec<f64>,
    /// `ln p_t(x,y) / t`.
    pub log_rate: Vec<f64>,
    /// `e^{tE₀} p_t(x,y)`.
    pub normalized: Vec<f64>,
    pub e0: f64,
    pub phi_x: f64,
    pub phi_y: f64,
    /// `|ln p_t/t + E₀|` at the last time.
    pub rate_deviation: f64,
    /// `|e^{tE₀} p_t - Φ(x)Φ(y)|` at the last time.
    pub limit_deviation: f64,
}

/// Long-time behaviour of `p_t(x,y)` against the bottom of the spectrum of
/// the component containing `x` and `y`.
pub fn li_asymptotics(op: &TruncatedOperator, x: &VertexId, y: &VertexId, times: &[f64]) -> Result<LiReport> {
    let (i, j) = (op.require_index(x)?, op.require_index(y)?);
    let bottoms = bottom_of_spectrum(op, 1e-13)?;
    let b = bottoms
        .iter()
        .find(|b| b.component.contains(x))
        .expect("every vertex lies in a component");
    if !b.component.contains(y) {
        return Err(Error::Parameter(format!("{x} and {y} lie in different components")));
    }
    let mut log_rate = Vec::new();
    let mut normalized = Vec::new();
    for &t in times {
        let k = heat_kernel(op, t, x, y)?;
        let lp = k.log_value.ok_or_else(|| Error::NoConvergence(format!("p_{t} vanished")))?;
        log_rate.push(lp / t);
        normalized.push((lp + t * b.e0).exp());
    }
    let pp = b.phi[i] * b.phi[j];
    Ok(LiReport {
        times: times.to_vec(),
        rate_deviation: log_rate.last().map_or(f64::NAN, |r| (r + b.e0).abs()),
        limit_deviation: normalized.last().map_or(f64::NAN, |v| (v - pp).abs()),
        log_rate,
        normalized,
        e0: b.e0,
        phi_x: b.phi[i],
        phi_y: b.phi[j],
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolventLimitReport {
    pub betas: Vec<f64>,
    /// `β⟨u - βG_β u, v⟩`.
    pub values: Vec<f64>,
    /// `⟨L̃u, v⟩`.
    pub target: f64,
    pub deviations: Vec<f64>,
    pub monotone: bool,
    /// `‖u‖ ‖v‖` in `ℓ²(K, m)`.
    pub scale: f64,
}

/// Compares `β⟨u - βG_β u, v⟩` on the truncation with `⟨L̃u, v⟩` computed
/// from the generator. `v` must vanish outside the interior of `K`.
pub fn resolvent_limit_check<G: GraphGenerator + ?Sized>(
    gen: &G,
    op: &TruncatedOperator,
    u: &SampledFunction,
    v: &SampledFunction,
    betas: &[f64],
) -> Result<ResolventLimitReport> {
    let interior: BTreeSet<&VertexId> = (0..op.len())
        .filter(|&i| op.boundary_weight()[i] == 0.0)
        .map(|i| &op.ids()[i])
        .collect();
    for (x, val) in v.entries() {
        if *val != Complex64::new(0.0, 0.0) && !interior.contains(x) {
            return Err(Error::Parameter(format!("v is not supported in the interior ({x})")));
        }
    }
    let uk: Vec<f64> = op.ids().iter().map(|x| u.value(x).map(|z| z.re)).collect::<Result<_>>()?;
    let vk: Vec<f64> = op.ids().iter().map(|x| v.get(x).unwrap_or_default().re).collect();
    let mut target = 0.0;
    for (x, val) in v.entries() {
        target += apply_formal(gen, u, x)?.re * val.re * gen.measure(x);
    }
    let mut values = Vec::new();
    let mut deviations = Vec::new();
    for &beta in betas {
        let g = resolvent_apply(op, beta, &uk)?;
        let w: Vec<f64> = uk.iter().zip(&g).map(|(a, b)| a - beta * b).collect();
        let val = beta * op.inner(&w, &vk);
        deviations.push((val - target).abs());
        values.push(val);
    }
    Ok(ResolventLimitReport {
        betas: betas.to_vec(),
        monotone: deviations.windows(2).all(|w| w[1] <= w[0]),
        values,
        target,
        deviations,
        scale: op.norm(&uk) * op.norm(&vk),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FBetaReport {
    pub beta: f64,
    /// `β⟨u - βG_β u, u⟩`.
    pub lhs: f64,
    /// `½⟨f_β, 1⟩` from the first (manifestly non-negative) form.
    pub rhs_first: f64,
    /// `½⟨f_β, 1⟩` from the second form.
    pub rhs_second: f64,
    pub f_first: Vec<f64>,
    pub f_second: Vec<f64>,
    /// Largest `|f₁(x) - f₂(x)|`.
    pub form_deviation: f64,
    /// Smallest entry of the first form.
    pub min_first: f64,
    /// `|lhs - rhs_first|` relative to `max(1, |lhs|)`.
    pub identity_deviation: f64,
}

/// Evaluates both expressions for `f_β` and the half-sum identity on a
/// truncation.
pub fn f_beta_identity_check(op: &TruncatedOperator, beta: f64, u: &[f64]) -> Result<FBetaReport> {
    if !(beta > 0.0) {
        return Err(Error::Parameter(format!("beta = {beta} must be positive")));
    }
    let n = op.len();
    let fac = MFactor::new(op, beta)?;
    // columns of G_β
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            fac.solve(&e)
        })
        .collect();
    let g_at = |x: usize, w: &dyn Fn(usize) -> f64| -> f64 { (0..n).map(|y| cols[y][x] * w(y)).sum() };
    let ones = vec![1.0; n];
    let g1 = fac.solve(&ones);
    let gu = fac.solve(u);
    let u2: Vec<f64> = u.iter().map(|v| v * v).collect();
    let gu2 = fac.solve(&u2);
    let mut f_first = Vec::with_capacity(n);
    let mut f_second = Vec::with_capacity(n);
    for x in 0..n {
        let ux = u[x];
        let a = beta * beta * g_at(x, &|y| (ux - u[y]).powi(2)) + 2.0 * beta * ux * ux * (1.0 - beta * g1[x]);
        let b = -beta * (u2[x] - beta * gu2[x])
            + 2.0 * beta * ux * (ux - beta * gu[x])
            + beta * u2[x] * (1.0 - beta * g1[x]);
        f_first.push(a);
        f_second.push(b);
    }
    let w: Vec<f64> = u.iter().zip(&gu).map(|(a, g)| a - beta * g).collect();
    let lhs = beta * op.inner(&w, u);
    let rhs_first = 0.5 * op.inner(&f_first, &ones);
    let rhs_second = 0.5 * op.inner(&f_second, &ones);
    Ok(FBetaReport {
        beta,
        lhs,
        rhs_first,
        rhs_second,
        form_deviation: f_first.iter().zip(&f_second).fold(0.0f64, |a, (p, q)| a.max((p - q).abs())),
        min_first: f_first.iter().copied().fold(f64::INFINITY, f64::min),
        identity_deviation: (lhs - rhs_first).abs().max((lhs - rhs_second).abs()) / lhs.abs().max(1.0),
        f_first,
        f_second,
    })
}
