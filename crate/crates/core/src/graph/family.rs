//! Built-in infinite graph families.
//!
//! Descriptors: `line-Z`, `regular-tree:k=3`, `radial-tree:d=n+2`,
//! `fm-tree:k=3,q=0.5`, `example4:rho=0.5,A=0.3333333333333333`.

use std::collections::BTreeMap;

use super::{DegreeExpr, GraphGenerator, RadialProfile, VertexId};
use crate::error::{Error, Result};

/// `ln((3 + sqrt 5) / 2)`, the positive root of `e^l + e^-l - 2 = 1`.
pub fn example4_lambda() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).ln()
}

#[derive(Clone, Debug)]
pub enum TreeDegrees {
    /// Every vertex has degree `k`.
    Regular(u32),
    /// Vertices at distance `n` from the root have degree `d(n)`.
    Radial(DegreeExpr),
}

impl TreeDegrees {
    pub fn degree(&self, depth: usize) -> f64 {
        match self {
            TreeDegrees::Regular(k) => f64::from(*k),
            TreeDegrees::Radial(d) => d.eval(depth),
        }
    }

    /// Number of children of a vertex at `depth`.
    pub fn children(&self, depth: usize) -> f64 {
        let d = self.degree(depth);
        if depth == 0 {
            d
        } else {
            d - 1.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TreeMeasure {
    Unit,
    /// Sphere `n` carries total mass `(1 - q) q^n`, split equally.
    Geometric { q: f64 },
}

#[derive(Clone, Debug)]
pub struct TreeFamily {
    pub degrees: TreeDegrees,
    pub measure: TreeMeasure,
}

impl TreeFamily {
    fn depth_of(x: &VertexId) -> Option<usize> {
        match x {
            VertexId::Word(w) => Some(w.len()),
            _ => None,
        }
    }

    pub fn sphere_size(&self, depth: usize) -> f64 {
        (0..depth).map(|n| self.degrees.children(n)).product()
    }

    fn contains(&self, w: &[u32]) -> bool {
        w.iter()
            .enumerate()
            .all(|(n, &i)| f64::from(i) < self.degrees.children(n))
    }

    fn vertex_measure(&self, depth: usize) -> f64 {
        match self.measure {
            TreeMeasure::Unit => 1.0,
            TreeMeasure::Geometric { q } => (1.0 - q) * q.powi(depth as i32) / self.sphere_size(depth),
        }
    }

    fn profile(&self, depth: usize) -> RadialProfile {
        let mut masses = Vec::with_capacity(depth + 1);
        let mut outward = Vec::with_capacity(depth + 1);
        let mut size = 1.0;
        for n in 0..=depth {
            masses.push(match self.measure {
                TreeMeasure::Unit => size,
                TreeMeasure::Geometric { q } => (1.0 - q) * q.powi(n as i32),
            });
            size *= self.degrees.children(n);
            outward.push(size);
        }
        RadialProfile::new(masses, outward, vec![0.0; depth + 1])
    }
}

#[derive(Clone, Debug)]
pub struct Example4 {
    pub rho: f64,
    pub amp: f64,
    pub lambda: f64,
}

impl Example4 {
    fn log_phi(&self, x: i64) -> f64 {
        self.amp.ln() + (x.unsigned_abs() as f64) * self.rho.ln()
    }

    pub fn phi(&self, x: i64) -> f64 {
        self.amp * self.rho.powi(x.unsigned_abs() as i32)
    }

    pub fn u(&self, x: i64) -> f64 {
        (self.lambda * x as f64).exp()
    }

    /// `m(x) = min{1, phi(x)/u(x)^2}`. Falls back to log space where the
    /// literal quotient is not representable, clamped to the smallest normal
    /// float where it would underflow.
    pub fn m(&self, x: i64) -> f64 {
        let u = self.u(x);
        let lit = self.phi(x) / (u * u);
        if lit.is_normal() && u.is_normal() && (u * u).is_finite() {
            return lit.min(1.0);
        }
        let log_ratio = self.log_phi(x) - 2.0 * self.lambda * x as f64;
        if log_ratio >= 0.0 {
            1.0
        } else {
            log_ratio.exp().max(f64::MIN_POSITIVE)
        }
    }

    /// `c(x) = max{0, u^2/phi - 1} m(x)`, which equals `1 - m(x)`.
    pub fn c(&self, x: i64) -> f64 {
        1.0 - self.m(x)
    }
}

/// A built-in generator together with the descriptor it came from and any
/// parameter warnings.
#[derive(Clone, Debug)]
pub struct Family {
    descriptor: String,
    kind: FamilyKind,
    warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum FamilyKind {
    LineZ,
    Tree(TreeFamily),
    Example4(Example4),
}

impl Family {
    pub fn line_z() -> Self {
        Family { descriptor: "line-Z".into(), kind: FamilyKind::LineZ, warnings: Vec::new() }
    }

    pub fn regular_tree(k: u32) -> Result<Self> {
        build_family(&format!("regular-tree:k={k}"))
    }

    pub fn radial_tree(d: &str) -> Result<Self> {
        build_family(&format!("radial-tree:d={d}"))
    }

    pub fn fm_tree(k: u32, q: f64) -> Result<Self> {
        build_family(&format!("fm-tree:k={k},q={q}"))
    }

    pub fn example4(rho: f64, amp: f64) -> Result<Self> {
        build_family(&format!("example4:rho={rho},A={amp}"))
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn as_example4(&self) -> Option<&Example4> {
        match &self.kind {
            FamilyKind::Example4(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_tree(&self) -> Option<&TreeFamily> {
        match &self.kind {
            FamilyKind::Tree(t) => Some(t),
            _ => None,
        }
    }
}

fn params(s: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    if s.is_empty() {
        return Ok(out);
    }
    for part in s.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{part}`")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn take_f64(p: &BTreeMap<String, String>, key: &str, default: Option<f64>) -> Result<f64> {
    match p.get(key) {
        Some(v) => v
            .parse()
            .map_err(|_| Error::Parse(format!("parameter {key}={v} is not a number"))),
        None => default.ok_or_else(|| Error::Parse(format!("missing parameter `{key}`"))),
    }
}

fn take_k(p: &BTreeMap<String, String>) -> Result<u32> {
    let k = take_f64(p, "k", None)?;
    if k.fract() != 0.0 || !(2.0..=1e6).contains(&k) {
        return Err(Error::Parameter(format!("k = {k} must be an integer >= 2")));
    }
    Ok(k as u32)
}

fn check_keys(p: &BTreeMap<String, String>, allowed: &[&str]) -> Result<()> {
    match p.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Parse(format!("unknown parameter `{k}`"))),
        None => Ok(()),
    }
}

/// Parses a family descriptor into a deterministic generator.
pub fn build_family(desc: &str) -> Result<Family> {
    let desc = desc.trim();
    let (name, rest) = desc.split_once(':').unwrap_or((desc, ""));
    let p = params(rest)?;
    let mut warnings = Vec::new();
    let kind = match name {
        "line-Z" | "line-z" | "Z" => {
            check_keys(&p, &[])?;
            FamilyKind::LineZ
        }
        "regular-tree" => {
            check_keys(&p, &["k"])?;
            FamilyKind::Tree(TreeFamily {
                degrees: TreeDegrees::Regular(take_k(&p)?),
                measure: TreeMeasure::Unit,
            })
        }
        "radial-tree" => {
            check_keys(&p, &["d"])?;
            let src = p.get("d").ok_or_else(|| Error::Parse("missing parameter `d`".into()))?;
            let d = DegreeExpr::parse(src)?;
            // the sequence must describe an infinite tree
            for n in 0..64 {
                let v = d.eval(n);
                let min = if n == 0 { 1.0 } else { 2.0 };
                if !v.is_finite() || v.fract() != 0.0 || v < min {
                    return Err(Error::Parameter(format!(
                        "degree d({n}) = {v} must be an integer >= {min}"
                    )));
                }
            }
            FamilyKind::Tree(TreeFamily { degrees: TreeDegrees::Radial(d), measure: TreeMeasure::Unit })
        }
        "fm-tree" => {
            check_keys(&p, &["k", "q"])?;
            let k = take_k(&p)?;
            let q = take_f64(&p, "q", Some(0.5))?;
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::Parameter(format!("q = {q} must lie in (0, 1)")));
            }
            if k < 3 {
                warnings.push(format!(
                    "k = {k} < 3: the tree has Cheeger constant 0, so the finite-measure counterexample does not apply"
                ));
            }
            FamilyKind::Tree(TreeFamily {
                degrees: TreeDegrees::Regular(k),
                measure: TreeMeasure::Geometric { q },
            })
        }
        "example4" => {
            check_keys(&p, &["rho", "A"])?;
            let rho = take_f64(&p, "rho", Some(0.5))?;
            let amp = take_f64(&p, "A", Some(1.0 / 3.0))?;
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::Parameter(format!("rho = {rho} must lie in (0, 1)")));
            }
            if !(amp > 0.0 && amp.is_finite()) {
                return Err(Error::Parameter(format!("A = {amp} must be positive")));
            }
            FamilyKind::Example4(Example4 { rho, amp, lambda: example4_lambda() })
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    Ok(Family { descriptor: desc.to_string(), kind, warnings })
}

impl GraphGenerator for Family {
    fn root(&self) -> VertexId {
        match &self.kind {
            FamilyKind::LineZ | FamilyKind::Example4(_) => VertexId::Int(0),
            FamilyKind::Tree(_) => VertexId::Word(Vec::new()),
        }
    }

    fn neighbors(&self, x: &VertexId) -> Vec<(VertexId, f64)> {
        match (&self.kind, x) {
            (FamilyKind::LineZ | FamilyKind::Example4(_), VertexId::Int(x)) => {
                vec![(VertexId::Int(x - 1), 1.0), (VertexId::Int(x + 1), 1.0)]
            }
            (FamilyKind::Tree(t), VertexId::Word(w)) if t.contains(w) => {
                let mut out = Vec::new();
                if let Some((_, parent)) = w.split_last() {
                    out.push((VertexId::Word(parent.to_vec()), 1.0));
                }
                let children = t.degrees.children(w.len()) as u32;
                for i in 0..children {
                    let mut c = w.clone();
                    c.push(i);
                    out.push((VertexId::Word(c), 1.0));
                }
                out
            }
            _ => Vec::new(),
        }
    }

    fn measure(&self, x: &VertexId) -> f64 {
        match (&self.kind, x) {
            (FamilyKind::LineZ, VertexId::Int(_)) => 1.0,
            (FamilyKind::Example4(e), VertexId::Int(x)) => e.m(*x),
            (FamilyKind::Tree(t), _) => match TreeFamily::depth_of(x) {
                Some(n) => t.vertex_measure(n),
                None => f64::NAN,
            },
            _ => f64::NAN,
        }
    }

    fn killing(&self, x: &VertexId) -> f64 {
        match (&self.kind, x) {
            (FamilyKind::Example4(e), VertexId::Int(x)) => e.c(*x),
            _ => 0.0,
        }
    }

    fn is_spherically_symmetric(&self) -> bool {
        !matches!(self.kind, FamilyKind::Example4(_))
    }

    fn closed_form_profile(&self, depth: usize) -> Option<RadialProfile> {
        match &self.kind {
            FamilyKind::LineZ => {
                let masses = (0..=depth).map(|n| if n == 0 { 1.0 } else { 2.0 }).collect();
                Some(RadialProfile::new(masses, vec![2.0; depth + 1], vec![0.0; depth + 1]))
            }
            FamilyKind::Tree(t) => Some(t.profile(depth)),
            FamilyKind::Example4(_) => None,
        }
    }

    fn describe(&self) -> String {
        self.descriptor.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::combinatorial_ball;

    #[test]
    fn line_z_structure() {
        let g = Family::line_z();
        let n = g.neighbors(&VertexId::Int(4));
        assert_eq!(n, vec![(VertexId::Int(3), 1.0), (VertexId::Int(5), 1.0)]);
        assert_eq!(g.measure(&VertexId::Int(-9)), 1.0);
        assert_eq!(g.killing(&VertexId::Int(9)), 0.0);
    }

    #[test]
    fn regular_tree_ball_count() {
        let g = build_family("regular-tree:k=3").unwrap();
        let ball = combinatorial_ball(&g, &g.root(), 2);
        assert_eq!(ball.vertices.len(), 10);
    }

    #[test]
    fn example4_mass_identity_on_window() {
        let g = build_family("example4:rho=0.5,A=0.3333333333333333").unwrap();
        let e = g.as_example4().unwrap();
        for x in -200..=200 {
            let id = VertexId::Int(x);
            let (m, c) = (g.measure(&id), g.killing(&id));
            assert_eq!(c + m, 1.0, "x = {x}");
            assert!(m > 0.0 && m <= 1.0 && c >= 0.0);
            // literal construction formula, where it is representable
            if x.abs() <= 60 {
                let u2 = e.u(x) * e.u(x);
                let lit_m = (e.phi(x) / u2).min(1.0);
                let lit_c = (u2 / e.phi(x) - 1.0).max(0.0) * lit_m;
                assert!((m - lit_m).abs() <= 4.0 * f64::EPSILON * lit_m, "m at {x}");
                assert!((c - lit_c).abs() <= 4.0 * f64::EPSILON, "c at {x}");
            }
        }
    }

    #[test]
    fn lambda_closed_form() {
        let l = example4_lambda();
        assert!((l - 1.5f64.acosh()).abs() <= 1e-14);
        assert!((l.exp() + (-l).exp() - 2.0 - 1.0).abs() <= 1e-14);
        assert!((l - 0.9624236501).abs() < 1e-10);
    }

    #[test]
    fn descriptor_errors() {
        assert!(matches!(build_family("hypercube"), Err(Error::UnknownFamily(_))));
        assert!(matches!(build_family("regular-tree:k=1"), Err(Error::Parameter(_))));
        assert!(matches!(build_family("fm-tree:k=3,q=1.5"), Err(Error::Parameter(_))));
        assert!(matches!(build_family("radial-tree:d=1"), Err(Error::Parameter(_))));
        assert!(build_family("regular-tree:k=3,z=1").is_err());
        let f = build_family("fm-tree:k=2,q=0.5").unwrap();
        assert_eq!(f.warnings().len(), 1);
        assert!(build_family("fm-tree:k=3,q=0.5").unwrap().warnings().is_empty());
    }

    #[test]
    fn fm_tree_sphere_masses() {
        let g = build_family("fm-tree:k=3,q=0.5").unwrap();
        let ball = combinatorial_ball(&g, &g.root(), 4);
        let total: f64 = ball.vertices.iter().map(|x| g.measure(x)).sum();
        let expect: f64 = (0..=4).map(|n| 0.5 * 0.5f64.powi(n)).sum();
        assert!((total - expect).abs() < 1e-14);
    }
}
