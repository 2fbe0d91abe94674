use std::path::Path;

use lapbc_core::completeness::{
    example4_verify, heat_mass, heat_mass_radial, radial_solution_class, radial_tree_criterion, MassVerdict,
    DEFICIT_STABILIZATION, DEFICIT_TOL, SC_TOL,
};
use lapbc_core::formal::{boundedness_report, BoundednessVerdict, SampledFunction};
use lapbc_core::geometry::{appendix_a_demo, cheeger_bruteforce, path_metric, ray_completeness_probe, Ray, RayVerdict, CAUCHY_TAIL};
use lapbc_core::graph::{FamilyKind, TreeMeasure};
use lapbc_core::harmonic::{
    bvp_solve, classify_solution, resolvent_gap, resolvent_gap_radial, sampled_shells, GAP_STABILIZATION_TOL,
    GAP_THRESHOLD, STABILIZATION_TOL,
};
use lapbc_core::selftest::run_selftest;
use lapbc_core::spectral::{bottom_of_spectrum, heat_kernel, spectral_radius, SERIES_TAIL};
use lapbc_core::truncation::{truncate, BoundaryCondition};
use lapbc_core::{
    build_family, combinatorial_ball, load_graph, Exhaustion, Family, GraphGenerator, VertexId, WeightedGraph,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{AppendixArgs, Common, Example4Args, Format};
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

const DEFAULT_TOL: f64 = 1e-8;
const METRIC_SEARCH_BOUND: usize = 100_000;

/// Fully resolved parameters of one run; embedded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub graph: Option<String>,
    pub root: Option<String>,
    pub levels: usize,
    pub t: f64,
    pub beta: f64,
    pub seed: u64,
    pub tol: f64,
    pub format: Format,
    pub strict: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub extra: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub algebraic: f64,
    pub markov: f64,
    pub solver: f64,
    pub series_tail: f64,
    pub sc: f64,
    pub deficit: f64,
    pub deficit_stabilization: f64,
    pub stabilization: f64,
    pub gap_threshold: f64,
    pub gap_stabilization: f64,
    pub cauchy_tail: f64,
}

impl Tolerances {
    fn new(solver: f64) -> Self {
        Tolerances {
            algebraic: 1e-12,
            markov: 1e-10,
            solver,
            series_tail: SERIES_TAIL,
            sc: SC_TOL,
            deficit: DEFICIT_TOL,
            deficit_stabilization: DEFICIT_STABILIZATION,
            stabilization: STABILIZATION_TOL,
            gap_threshold: GAP_THRESHOLD,
            gap_stabilization: GAP_STABILIZATION_TOL,
            cauchy_tail: CAUCHY_TAIL,
        }
    }
}

/// Plot-ready columns.
#[derive(Debug, Default)]
pub struct Series {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Series {
    fn new(header: &[&'static str]) -> Self {
        Series { header: header.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub struct Outcome {
    pub config: RunConfig,
    pub verdict: Option<String>,
    pub inconclusive: bool,
    pub failed: bool,
    pub report: Value,
    pub series: Series,
}

impl Outcome {
    pub fn envelope(&self) -> Value {
        json!({
            "command": self.config.command,
            "config": self.config,
            "tolerances": Tolerances::new(self.config.tol),
            "verdict": self.verdict,
            "report": self.report,
        })
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

enum Source {
    File(WeightedGraph),
    Family(Family),
}

impl Source {
    fn gen(&self) -> &dyn GraphGenerator {
        match self {
            Source::File(g) => g,
            Source::Family(f) => f,
        }
    }

    fn family(&self) -> Option<&Family> {
        match self {
            Source::Family(f) => Some(f),
            Source::File(_) => None,
        }
    }
}

struct Loaded {
    source: Source,
    root: VertexId,
    /// Root is the centre of a declared spherical symmetry.
    radial: bool,
}

fn load(c: &Common) -> Result<Loaded> {
    let desc = c.graph.as_deref().ok_or_else(|| CliError::Usage("--graph is required for this command".into()))?;
    let path = Path::new(desc);
    let source = if path.is_file() || desc.ends_with(".json") {
        let g = load_graph(path)?;
        Source::File(match &c.root {
            Some(r) => g.with_root(&VertexId::parse(r))?,
            None => g,
        })
    } else {
        Source::Family(build_family(desc)?)
    };
    let root = c.root.as_deref().map_or_else(|| source.gen().root(), VertexId::parse);
    let radial = source.gen().is_spherically_symmetric() && root == source.gen().root();
    Ok(Loaded { source, root, radial })
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Parameter(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn config(command: &'static str, c: &Common, default_levels: usize, extra: Value) -> Result<RunConfig> {
    let levels = c.levels.unwrap_or(default_levels);
    if levels == 0 {
        return Err(CliError::Parameter("--levels must be at least 1".into()));
    }
    Ok(RunConfig {
        command,
        graph: c.graph.clone(),
        root: c.root.clone(),
        levels,
        t: positive("t", c.t.unwrap_or(1.0))?,
        beta: positive("beta", c.beta.unwrap_or(1.0))?,
        seed: c.seed.unwrap_or(0),
        tol: positive("tol", c.tol.unwrap_or(DEFAULT_TOL))?,
        format: c.format,
        strict: c.strict,
        extra,
    })
}

fn outcome(config: RunConfig, report: Value, series: Series) -> Outcome {
    Outcome { config, verdict: None, inconclusive: false, failed: false, report, series }
}

pub fn inspect(c: &Common) -> Result<Outcome> {
    let cfg = config("inspect", c, 5, Value::Null)?;
    let g = load(c)?;
    let gen = g.source.gen();
    let ex = Exhaustion::radii(gen, &g.root, cfg.levels);
    let rep = boundedness_report(gen, &ex, cfg.levels)?;
    let mut series = Series::new(&["level", "vertices", "sup_deg"]);
    for (i, (level, sup)) in ex.levels().iter().zip(&rep.sup_per_level).enumerate() {
        series.push(vec![(i + 1).to_string(), level.len().to_string(), num(*sup)]);
    }
    let warnings = g.source.family().map(|f| f.warnings().to_vec()).unwrap_or_default();
    let report = json!({
        "root": g.root.to_string(),
        "finite": gen.is_finite(),
        "spherically_symmetric": gen.is_spherically_symmetric(),
        "warnings": warnings,
        "vertices_per_level": ex.levels().iter().map(|l| l.len()).collect::<Vec<_>>(),
        "boundedness": rep,
    });
    let mut out = outcome(cfg, report, series);
    out.verdict = Some(label(&rep.verdict));
    out.inconclusive = rep.verdict == BoundednessVerdict::Inconclusive;
    Ok(out)
}

pub fn spectrum(c: &Common) -> Result<Outcome> {
    let cfg = config("spectrum", c, 5, Value::Null)?;
    let g = load(c)?;
    let gen = g.source.gen();
    let mut levels = Vec::new();
    let mut series = Series::new(&["level", "vertices", "e0", "spectral_radius"]);
    for r in 1..=cfg.levels {
        let op = truncate(gen, &combinatorial_ball(gen, &g.root, r), BoundaryCondition::Dirichlet)?;
        let bottom = bottom_of_spectrum(&op, cfg.tol)?;
        let e0 = bottom.iter().map(|b| b.e0).fold(f64::INFINITY, f64::min);
        let rho = spectral_radius(&op, cfg.tol);
        series.push(vec![r.to_string(), op.len().to_string(), num(e0), num(rho)]);
        levels.push(json!({
            "radius": r,
            "vertices": op.len(),
            "components": bottom.len(),
            "e0": e0,
            "spectral_radius": rho,
        }));
    }
    Ok(outcome(cfg, json!({ "root": g.root.to_string(), "boundary": "dirichlet", "levels": levels }), series))
}

pub fn heat(c: &Common) -> Result<Outcome> {
    let cfg = config("heat", c, 5, Value::Null)?;
    let g = load(c)?;
    let gen = g.source.gen();
    let ex = Exhaustion::radii(gen, &g.root, cfg.levels);
    let mass = heat_mass(gen, &ex, cfg.t, &g.root)?;
    let mut kernel = Vec::new();
    let mut series = Series::new(&["level", "vertices", "kernel", "mass"]);
    for (i, (level, m)) in ex.levels().iter().zip(&mass.levels).enumerate() {
        let op = truncate(gen, level, BoundaryCondition::Dirichlet)?;
        let k = heat_kernel(&op, cfg.t, &g.root, &g.root)?;
        series.push(vec![(i + 1).to_string(), level.len().to_string(), num(k.value), num(m.value)]);
        kernel.push(k);
    }
    let report = json!({ "root": g.root.to_string(), "kernel": kernel, "heat_mass": mass });
    Ok(outcome(cfg, report, series))
}

pub fn harmonic(c: &Common) -> Result<Outcome> {
    let cfg = config("harmonic", c, 8, Value::Null)?;
    let g = load(c)?;
    let gen = g.source.gen();
    let radii: Vec<usize> = (1..=cfg.levels).collect();
    let (class, gap) = if g.radial {
        (radial_solution_class(gen, cfg.levels.max(3))?, resolvent_gap_radial(gen, &radii, cfg.beta, GAP_THRESHOLD)?)
    } else {
        let ex = Exhaustion::radii(gen, &g.root, cfg.levels);
        let last = ex.last();
        let data = SampledFunction::from_real(last.halo.iter().map(|y| (y.clone(), 1.0)));
        let u = bvp_solve(gen, last, &data)?.extended(&data);
        (classify_solution(&sampled_shells(gen, &u, &ex)?), resolvent_gap(gen, &ex, &g.root, cfg.beta, GAP_THRESHOLD)?)
    };
    let mut series = Series::new(&["level", "vertices", "gap_sup", "partial_l2", "sup"]);
    for (i, l) in gap.levels.iter().enumerate() {
        let at = |v: &[f64]| v.get(i).copied().map(num).unwrap_or_default();
        series.push(vec![
            (i + 1).to_string(),
            l.size.to_string(),
            num(l.sup),
            at(&class.partial_l2),
            at(&class.sup_per_level),
        ]);
    }
    let verdict = if gap.evidence {
        "resolvents-differ"
    } else if gap.stabilized {
        "no-gap"
    } else {
        "inconclusive"
    };
    let report = json!({
        "root": g.root.to_string(),
        "method": if g.radial { "radial" } else { "direct" },
        "solution": class,
        "solution_esa_failure_evidence": class.esa_failure_evidence(),
        "solution_sc_failure_evidence": class.sc_failure_evidence(),
        "resolvent_gap": gap,
    });
    let mut out = outcome(cfg, report, series);
    out.inconclusive = verdict == "inconclusive";
    out.verdict = Some(verdict.into());
    Ok(out)
}

pub fn sc(c: &Common) -> Result<Outcome> {
    let cfg = config("sc", c, 8, Value::Null)?;
    let g = load(c)?;
    let gen = g.source.gen();
    let radii: Vec<usize> = (1..=cfg.levels).collect();
    let mut report = json!({ "root": g.root.to_string() });
    let (mass, sizes) = if g.radial {
        let mass = heat_mass_radial(gen, &radii, cfg.t)?;
        report["method"] = json!("radial");
        if let Some(FamilyKind::Tree(tree)) = g.source.family().map(|f| f.kind()) {
            if tree.measure == TreeMeasure::Unit {
                report["degree_criterion"] = to_value(&radial_tree_criterion(&tree.degrees, 60)?);
            }
        }
        // the radial solution overflows quickly on fast-branching trees
        report["radial_solution"] = to_value(&radial_solution_class(gen, cfg.levels.clamp(8, 30))?);
        report["resolvent_gap"] = to_value(&resolvent_gap_radial(gen, &radii, cfg.beta, GAP_THRESHOLD)?);
        let sizes = mass.levels.iter().map(|l| l.size).collect::<Vec<_>>();
        (mass, sizes)
    } else {
        let ex = Exhaustion::radii(gen, &g.root, cfg.levels);
        let mass = heat_mass(gen, &ex, cfg.t, &g.root)?;
        report["method"] = json!("direct");
        report["resolvent_gap"] = to_value(&resolvent_gap(gen, &ex, &g.root, cfg.beta, GAP_THRESHOLD)?);
        (mass, ex.levels().iter().map(|l| l.len()).collect())
    };
    let mut series = Series::new(&["level", "vertices", "mass", "semigroup_term", "killing_term"]);
    for (i, l) in mass.levels.iter().enumerate() {
        series.push(vec![
            (i + 1).to_string(),
            sizes[i].to_string(),
            num(l.value),
            num(l.semigroup_term),
            num(l.killing_term),
        ]);
    }
    let verdict = mass.verdict;
    report["heat_mass"] = to_value(&mass);
    let mut out = outcome(cfg, report, series);
    out.verdict = Some(label(&verdict));
    out.inconclusive = verdict == MassVerdict::Inconclusive;
    Ok(out)
}

pub fn metric(c: &Common) -> Result<Outcome> {
    let cfg = config("metric", c, 10, Value::Null)?;
    let g = load(c)?;
    let gen = g.source.gen();
    let targets: Vec<VertexId>;
    let mut report = json!({ "root": g.root.to_string() });
    let mut verdict = None;
    match g.source.family() {
        Some(f) if g.root == f.root() => {
            let ray = Ray::canonical(f, cfg.levels.max(1))?;
            let probe = ray_completeness_probe(&ray);
            verdict = Some(probe.verdict);
            targets = ray.vertices.clone();
            report["ray"] = json!({ "vertices": ray.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>(), "probe": probe });
        }
        _ => targets = combinatorial_ball(gen, &g.root, cfg.levels).vertices,
    }
    let mut series = Series::new(&["index", "vertex", "distance", "exact"]);
    let mut distances = Vec::with_capacity(targets.len());
    for (i, y) in targets.iter().enumerate() {
        let d = path_metric(gen, &g.root, y, METRIC_SEARCH_BOUND)?;
        series.push(vec![i.to_string(), y.to_string(), num(d.distance), d.exact.to_string()]);
        distances.push(json!({ "vertex": y.to_string(), "distance": d.distance, "exact": d.exact }));
    }
    report["distances"] = Value::Array(distances);
    let mut out = outcome(cfg, report, series);
    if let Some(v) = verdict {
        out.verdict = Some(label(&v));
        out.inconclusive = v == RayVerdict::Inconclusive;
    }
    Ok(out)
}

pub fn cheeger(c: &Common) -> Result<Outcome> {
    let cfg = config("cheeger", c, 3, Value::Null)?;
    let g = load(c)?;
    let gen = g.source.gen();
    let region = combinatorial_ball(gen, &g.root, cfg.levels);
    let res = cheeger_bruteforce(gen, &region, true)?;
    let mut series = Series::new(&["radius", "vertices", "alpha", "boundary", "minimizer_size"]);
    series.push(vec![
        cfg.levels.to_string(),
        region.len().to_string(),
        num(res.alpha),
        res.boundary.to_string(),
        res.minimizer.len().to_string(),
    ]);
    let report = json!({ "root": g.root.to_string(), "region_size": region.len(), "result": res });
    Ok(outcome(cfg, report, series))
}

pub fn example4(a: &Example4Args) -> Result<Outcome> {
    let amp = a.amp.unwrap_or((1.0 - a.rho) / (1.0 + a.rho));
    let extra = json!({ "rho": a.rho, "amp": amp, "window": a.window });
    let cfg = config("example4", &a.common, 1, extra)?;
    let rep = example4_verify(a.rho, amp, a.window, cfg.seed)?;
    let fam = Family::example4(a.rho, amp)?;
    let e = fam.as_example4().expect("example4 family");
    let mut series = Series::new(&["x", "u", "m", "c"]);
    for x in -a.window..=a.window {
        series.push(vec![x.to_string(), num(e.u(x)), num(e.m(x)), num(e.c(x))]);
    }
    let pass = rep.all_pass();
    let mut out = outcome(cfg, to_value(&rep), series);
    out.verdict = Some(if pass { "all-checks-pass" } else { "check-failed" }.into());
    out.failed = !pass;
    Ok(out)
}

pub fn appendix_a(a: &AppendixArgs) -> Result<Outcome> {
    let extra = json!({ "k": a.k, "q": a.q });
    let cfg = config("appendixA", &a.common, 8, extra)?;
    let rep = appendix_a_demo(a.k, a.q, cfg.t, cfg.levels)?;
    let mut series = Series::new(&["level", "vertices", "heat_mass", "neumann_mass"]);
    for (i, (h, n)) in rep.heat_mass.levels.iter().zip(&rep.neumann_mass.levels).enumerate() {
        series.push(vec![i.to_string(), h.size.to_string(), num(h.value), num(n.value)]);
    }
    let verdict = rep.heat_mass.verdict;
    let mut out = outcome(cfg, to_value(&rep), series);
    out.verdict = Some(label(&verdict));
    out.inconclusive = verdict == MassVerdict::Inconclusive;
    Ok(out)
}

pub fn selftest(c: &Common) -> Result<Outcome> {
    let cfg = config("selftest", c, 3, Value::Null)?;
    let rep = run_selftest(cfg.levels, cfg.seed)?;
    let mut series = Series::new(&["family", "check", "passed", "measured", "tolerance"]);
    for ch in &rep.checks {
        series.push(vec![ch.family.clone(), ch.check.to_string(), ch.passed.to_string(), num(ch.measured), num(ch.tolerance)]);
    }
    let passed = rep.passed;
    let mut out = outcome(cfg, to_value(&rep), series);
    out.verdict = Some(if passed { "pass" } else { "fail" }.into());
    out.failed = !passed;
    Ok(out)
}
