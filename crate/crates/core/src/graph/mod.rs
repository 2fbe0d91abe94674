//! Weighted graphs `(V, b, c, m)`, lazy generators for infinite graphs,
//! built-in families, exhaustions and the on-disk format.
//!
//! A graph consists of a countable vertex set with a symmetric edge weight
//! `b >= 0` vanishing on the diagonal, a killing term `c >= 0` and a
//! vertex measure `m > 0`. Infinite graphs are accessed through
//! [`GraphGenerator`], which only ever needs finite neighbor lists.

mod exhaustion;
mod expr;
mod family;
mod io;
mod radial;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use exhaustion::{combinatorial_ball, Exhaustion, Region};
pub use expr::DegreeExpr;
pub use family::{build_family, example4_lambda, Example4, Family, FamilyKind, TreeDegrees, TreeFamily, TreeMeasure};
pub use io::{load_graph, save_graph, GraphFile};
pub use radial::{radial_reduce, RadialProfile, SPHERE_ENUMERATION_CAP};

/// Vertex label. Integers label `Z`-like families, words (paths of child
/// indices from the root) label trees, and names label vertices read from
/// files.
///
/// The derived order is the tie-breaking order used for every enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexId {
    Int(i64),
    Word(Vec<u32>),
    Name(String),
}

impl VertexId {
    pub fn int(x: i64) -> Self {
        VertexId::Int(x)
    }

    /// Integer label, if any.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            VertexId::Int(x) => Some(*x),
            _ => None,
        }
    }

    /// Canonical parse: integers become [`VertexId::Int`], `r` / `r.0.2`
    /// become tree words, anything else a name.
    pub fn parse(s: &str) -> Self {
        let s = s.trim();
        if let Ok(x) = s.parse::<i64>() {
            return VertexId::Int(x);
        }
        if s == "r" {
            return VertexId::Word(Vec::new());
        }
        if let Some(rest) = s.strip_prefix("r.") {
            let parts: Option<Vec<u32>> = rest.split('.').map(|p| p.parse().ok()).collect();
            if let Some(w) = parts {
                return VertexId::Word(w);
            }
        }
        VertexId::Name(s.to_string())
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::Int(x) => write!(f, "{x}"),
            VertexId::Word(w) => {
                write!(f, "r")?;
                for i in w {
                    write!(f, ".{i}")?;
                }
                Ok(())
            }
            VertexId::Name(s) => f.write_str(s),
        }
    }
}

impl FromStr for VertexId {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(VertexId::parse(s))
    }
}

impl From<i64> for VertexId {
    fn from(x: i64) -> Self {
        VertexId::Int(x)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId::parse(s)
    }
}

impl Serialize for VertexId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VertexId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(VertexId::parse(&s))
    }
}

/// Lazy access to a (possibly infinite) weighted graph.
///
/// Implementations must be deterministic and symmetric: `y` appears in
/// `neighbors(x)` with weight `w` iff `x` appears in `neighbors(y)` with the
/// same weight. Neighbor lists are finite and sorted by [`VertexId`].
pub trait GraphGenerator: Send + Sync {
    fn root(&self) -> VertexId;

    fn neighbors(&self, x: &VertexId) -> Vec<(VertexId, f64)>;

    fn measure(&self, x: &VertexId) -> f64;

    fn killing(&self, x: &VertexId) -> f64;

    /// Whether the graph is declared spherically symmetric about [`root`](Self::root).
    fn is_spherically_symmetric(&self) -> bool {
        false
    }

    /// Closed-form sphere data about the root, for families that know it.
    /// Used by [`radial_reduce`] once spheres get too large to enumerate.
    fn closed_form_profile(&self, _depth: usize) -> Option<RadialProfile> {
        None
    }

    /// Whether the generator is a finite graph (every vertex reachable by
    /// enumeration).
    fn is_finite(&self) -> bool {
        false
    }

    fn describe(&self) -> String;

    /// Edge weight `b(x, y)`; zero if not adjacent.
    fn weight(&self, x: &VertexId, y: &VertexId) -> f64 {
        self.neighbors(x)
            .into_iter()
            .find(|(z, _)| z == y)
            .map_or(0.0, |(_, w)| w)
    }
}

/// Finite weighted graph with vertices stored in canonical order.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    measure: Vec<f64>,
    killing: Vec<f64>,
    /// Directed arcs `(target index, weight)`, sorted by target. Symmetric
    /// for validated graphs.
    adjacency: Vec<Vec<(usize, f64)>>,
    root: usize,
}

impl WeightedGraph {
    /// Builds and validates a graph from vertex data `(id, m, c)` and
    /// undirected edges `(u, v, b)`, each listed once.
    pub fn new(
        vertices: Vec<(VertexId, f64, f64)>,
        edges: Vec<(VertexId, VertexId, f64)>,
    ) -> Result<Self> {
        let mut violations = Vec::new();
        let mut vertices = vertices;
        vertices.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in vertices.windows(2) {
            if pair[0].0 == pair[1].0 {
                violations.push(Violation::new(
                    ViolationKind::DuplicateVertex,
                    format!("vertex {} listed twice", pair[0].0),
                ));
            }
        }
        vertices.dedup_by(|a, b| a.0 == b.0);
        let ids: Vec<VertexId> = vertices.iter().map(|v| v.0.clone()).collect();
        let index: HashMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
        let mut arcs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, b) in edges {
            let (Some(&i), Some(&j)) = (index.get(&u), index.get(&v)) else {
                let missing = if index.contains_key(&u) { v } else { u };
                violations.push(Violation::new(
                    ViolationKind::UnknownVertex,
                    format!("edge references unknown vertex {missing}"),
                ));
                continue;
            };
            if arcs.contains_key(&(i, j)) {
                violations.push(Violation::new(
                    ViolationKind::DuplicateEdge,
                    format!("edge ({u}, {v}) listed twice"),
                ));
                continue;
            }
            arcs.insert((i, j), b);
            if i != j {
                arcs.insert((j, i), b);
            }
        }
        let graph = Self::from_raw_parts(
            vertices,
            arcs.into_iter().map(|((i, j), b)| (i, j, b)).collect(),
        );
        violations.extend(graph.validate().violations);
        if violations.is_empty() {
            Ok(graph)
        } else {
            Err(Error::Validation(ValidationReport { violations }))
        }
    }

    /// Unchecked constructor from sorted, deduplicated vertex data and
    /// directed arcs `(from, to, b)` by index. Invariants are not enforced;
    /// use [`validate`](Self::validate).
    pub fn from_raw_parts(vertices: Vec<(VertexId, f64, f64)>, arcs: Vec<(usize, usize, f64)>) -> Self {
        let n = vertices.len();
        let mut adjacency = vec![Vec::new(); n];
        for (i, j, b) in arcs {
            adjacency[i].push((j, b));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(j, _)| j);
        }
        let ids: Vec<VertexId> = vertices.iter().map(|v| v.0.clone()).collect();
        let index = ids.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();
        WeightedGraph {
            ids,
            index,
            measure: vertices.iter().map(|v| v.1).collect(),
            killing: vertices.iter().map(|v| v.2).collect(),
            adjacency,
            root: 0,
        }
    }

    /// Materializes the subgraph of `gen` induced on `vertices`.
    pub fn induced<G: GraphGenerator + ?Sized>(gen: &G, vertices: &[VertexId]) -> Result<Self> {
        let set: std::collections::HashSet<&VertexId> = vertices.iter().collect();
        let data = vertices
            .iter()
            .map(|x| (x.clone(), gen.measure(x), gen.killing(x)))
            .collect();
        let mut edges = Vec::new();
        for x in vertices {
            for (y, b) in gen.neighbors(x) {
                if x < &y && set.contains(&y) {
                    edges.push((x.clone(), y, b));
                }
            }
        }
        Self::new(data, edges)
    }

    pub fn with_root(mut self, root: &VertexId) -> Result<Self> {
        self.root = *self
            .index
            .get(root)
            .ok_or_else(|| Error::UnknownVertex(root.clone()))?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn index_of(&self, x: &VertexId) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn measure_at(&self, i: usize) -> f64 {
        self.measure[i]
    }

    pub fn killing_at(&self, i: usize) -> f64 {
        self.killing[i]
    }

    pub fn arcs(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// Undirected edges `(i, j, b)` with `i < j`, in canonical order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, row) in self.adjacency.iter().enumerate() {
            for &(j, b) in row {
                if i < j {
                    out.push((i, j, b));
                }
            }
        }
        out
    }

    /// Connected components as sorted index lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut label = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut comp = vec![s];
            label[s] = c;
            let mut head = 0;
            while head < comp.len() {
                let x = comp[head];
                head += 1;
                for &(y, b) in &self.adjacency[x] {
                    if b > 0.0 && label[y] == usize::MAX {
                        label[y] = c;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Reports every violated graph invariant.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (i, x) in self.ids.iter().enumerate() {
            let m = self.measure[i];
            if !m.is_finite() {
                violations.push(Violation::new(
                    ViolationKind::NonFinite,
                    format!("measure at {x} is not finite"),
                ));
            } else if m <= 0.0 {
                violations.push(Violation::new(
                    ViolationKind::NonPositiveMeasure,
                    format!("non-positive measure m({x}) = {m}"),
                ));
            }
            let c = self.killing[i];
            if !c.is_finite() {
                violations.push(Violation::new(
                    ViolationKind::NonFinite,
                    format!("killing term at {x} is not finite"),
                ));
            } else if c < 0.0 {
                violations.push(Violation::new(
                    ViolationKind::KillingSign,
                    format!("killing term sign: c({x}) = {c} < 0"),
                ));
            }
            for &(j, b) in &self.adjacency[i] {
                let y = &self.ids[j];
                if j == i {
                    violations.push(Violation::new(
                        ViolationKind::SelfLoop,
                        format!("self-loop at {x}"),
                    ));
                    continue;
                }
                if !b.is_finite() || b <= 0.0 {
                    violations.push(Violation::new(
                        ViolationKind::NonPositiveWeight,
                        format!("edge ({x}, {y}) has weight {b}"),
                    ));
                }
                let back = self.adjacency[j].iter().find(|&&(k, _)| k == i).map(|&(_, w)| w);
                if back != Some(b) && i < j || back.is_none() && i > j {
                    violations.push(Violation::new(
                        ViolationKind::Symmetry,
                        format!(
                            "symmetry: b({x}, {y}) = {b} but b({y}, {x}) = {}",
                            back.unwrap_or(0.0)
                        ),
                    ));
                }
            }
        }
        ValidationReport { violations }
    }
}

impl GraphGenerator for WeightedGraph {
    fn root(&self) -> VertexId {
        self.ids[self.root].clone()
    }

    fn neighbors(&self, x: &VertexId) -> Vec<(VertexId, f64)> {
        match self.index.get(x) {
            Some(&i) => self.adjacency[i]
                .iter()
                .map(|&(j, b)| (self.ids[j].clone(), b))
                .collect(),
            None => Vec::new(),
        }
    }

    fn measure(&self, x: &VertexId) -> f64 {
        self.index.get(x).map_or(f64::NAN, |&i| self.measure[i])
    }

    fn killing(&self, x: &VertexId) -> f64 {
        self.index.get(x).map_or(f64::NAN, |&i| self.killing[i])
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        format!("finite graph ({} vertices, {} edges)", self.len(), self.edges().len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Symmetry,
    SelfLoop,
    NonPositiveMeasure,
    KillingSign,
    NonPositiveWeight,
    NonFinite,
    DuplicateVertex,
    DuplicateEdge,
    UnknownVertex,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

impl Violation {
    fn new(kind: ViolationKind, detail: String) -> Self {
        Violation { kind, detail }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("all invariants hold");
        }
        let parts: Vec<&str> = self.violations.iter().map(|v| v.detail.as_str()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Validates a finite graph; report-only.
pub fn validate(graph: &WeightedGraph) -> ValidationReport {
    graph.validate()
}
