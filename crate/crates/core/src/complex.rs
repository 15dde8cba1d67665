//! Piecewise-Euclidean triangle complexes with exact corner angles.
//!
//! A triangle is a cyclic boundary word of three directed edges; corner `k`
//! sits at the end of side `k`, between sides `k` and `k+1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::angle::PiFraction;
use crate::graph::{self, MetricGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("duplicate vertex '{0}'")]
    DuplicateVertex(String),
    #[error("unknown edge '{0}'")]
    UnknownEdge(String),
    #[error("duplicate edge label '{0}'")]
    DuplicateEdge(String),
    #[error("triangle {0}: angles sum to {1}, not π")]
    AngleSum(usize, PiFraction),
    #[error("triangle {0}: non-positive angle")]
    NonPositiveAngle(usize),
    #[error("triangle {0}: boundary word does not close up")]
    NotClosed(usize),
    #[error("labels must be distinct, got {0:?}")]
    DuplicateLabels(Vec<String>),
    #[error("cannot identify '{0}' with '{1}': labels differ")]
    LabelMismatch(String, String),
    #[error("identified edge '{0}' is not a loop")]
    NotALoop(String),
    #[error("complex line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: String,
    pub from: usize,
    pub to: usize,
}

/// A directed side: edge index, traversed forward or backward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Side {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangle {
    pub sides: [Side; 3],
    pub angles: [PiFraction; 3],
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TriComplex {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    triangles: Vec<Triangle>,
}

impl TriComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<usize, ComplexError> {
        if self.vertices.iter().any(|v| v == name) {
            return Err(ComplexError::DuplicateVertex(name.to_string()));
        }
        self.vertices.push(name.to_string());
        Ok(self.vertices.len() - 1)
    }

    pub fn add_edge(&mut self, label: &str, from: &str, to: &str) -> Result<usize, ComplexError> {
        if self.edge_index(label).is_some() {
            return Err(ComplexError::DuplicateEdge(label.to_string()));
        }
        let from = self.vertex(from)?;
        let to = self.vertex(to)?;
        self.edges.push(Edge { label: label.to_string(), from, to });
        Ok(self.edges.len() - 1)
    }

    /// Sides given as `(label, forward)`.
    pub fn add_triangle(&mut self, sides: [(&str, bool); 3], angles: [PiFraction; 3]) -> Result<usize, ComplexError> {
        let mut s = [Side { edge: 0, forward: true }; 3];
        for (slot, (label, forward)) in s.iter_mut().zip(sides) {
            let edge = self.edge_index(label).ok_or_else(|| ComplexError::UnknownEdge(label.to_string()))?;
            *slot = Side { edge, forward };
        }
        let id = self.triangles.len();
        if angles.iter().any(|a| !a.is_positive()) {
            return Err(ComplexError::NonPositiveAngle(id));
        }
        let sum: PiFraction = angles.iter().copied().sum();
        if sum != PiFraction::PI {
            return Err(ComplexError::AngleSum(id, sum));
        }
        for k in 0..3 {
            if self.side_end(s[k]) != self.side_start(s[(k + 1) % 3]) {
                return Err(ComplexError::NotClosed(id));
            }
        }
        self.triangles.push(Triangle { sides: s, angles });
        Ok(id)
    }

    pub fn vertex(&self, name: &str) -> Result<usize, ComplexError> {
        self.vertices.iter().position(|v| v == name).ok_or_else(|| ComplexError::UnknownVertex(name.to_string()))
    }

    pub fn edge_index(&self, label: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.label == label)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn labels(&self) -> Vec<&str> {
        self.edges.iter().map(|e| e.label.as_str()).collect()
    }

    fn side_start(&self, s: Side) -> usize {
        let e = &self.edges[s.edge];
        if s.forward {
            e.from
        } else {
            e.to
        }
    }

    fn side_end(&self, s: Side) -> usize {
        let e = &self.edges[s.edge];
        if s.forward {
            e.to
        } else {
            e.from
        }
    }

    pub fn side_name(&self, s: Side) -> String {
        format!("{}{}", self.edges[s.edge].label, if s.forward { '+' } else { '-' })
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Triangles as human-readable boundary words, e.g. `[a e t1^-1]`.
    pub fn boundary_words(&self) -> Vec<String> {
        self.triangles
            .iter()
            .map(|t| {
                let parts: Vec<String> = t
                    .sides
                    .iter()
                    .map(|s| {
                        let l = &self.edges[s.edge].label;
                        if s.forward {
                            l.clone()
                        } else {
                            format!("{l}^-1")
                        }
                    })
                    .collect();
                format!("[{}]", parts.join(" "))
            })
            .collect()
    }

    /// Line format: `vertex <name>`, `edge <label> <from> <to>`,
    /// `triangle <e1±> <e2±> <e3±> <a1> <a2> <a3>` with angles `p/q` of π.
    pub fn parse(text: &str) -> Result<TriComplex, ComplexError> {
        let mut c = TriComplex::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: String| ComplexError::Syntax { line: n + 1, msg };
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                ["vertex", name] => {
                    c.add_vertex(name)?;
                }
                ["edge", label, from, to] => {
                    c.add_edge(label, from, to)?;
                }
                ["triangle", s1, s2, s3, a1, a2, a3] => {
                    let side = |s: &&str| -> Result<(String, bool), ComplexError> {
                        match s.chars().last() {
                            Some('+') => Ok((s[..s.len() - 1].to_string(), true)),
                            Some('-') => Ok((s[..s.len() - 1].to_string(), false)),
                            _ => Err(syntax(format!("side '{s}' needs a trailing + or -"))),
                        }
                    };
                    let angle = |a: &&str| -> Result<PiFraction, ComplexError> {
                        a.parse().map_err(|e: crate::angle::ParseFractionError| syntax(e.to_string()))
                    };
                    let (s1, s2, s3) = (side(s1)?, side(s2)?, side(s3)?);
                    c.add_triangle(
                        [(&s1.0, s1.1), (&s2.0, s2.1), (&s3.0, s3.1)],
                        [angle(a1)?, angle(a2)?, angle(a3)?],
                    )?;
                }
                _ => return Err(syntax(format!("cannot parse '{line}'"))),
            }
        }
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            writeln!(out, "vertex {v}").unwrap();
        }
        for e in &self.edges {
            writeln!(out, "edge {} {} {}", e.label, self.vertices[e.from], self.vertices[e.to]).unwrap();
        }
        for t in &self.triangles {
            let sides: Vec<String> = t.sides.iter().map(|&s| self.side_name(s)).collect();
            let angles: Vec<String> = t.angles.iter().map(|a| a.to_fraction_string()).collect();
            writeln!(out, "triangle {} {}", sides.join(" "), angles.join(" ")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.vertices,
            "edges": self.edges.iter().map(|e| serde_json::json!({
                "label": e.label, "from": self.vertices[e.from], "to": self.vertices[e.to],
            })).collect::<Vec<_>>(),
            "triangles": self.boundary_words(),
            "euler_characteristic": self.euler_characteristic(),
        })
    }

    /// Built-in fixtures: `ybar1`, `ybar2`, `ybar3`, `x1bar`, `digon`.
    pub fn fixture(name: &str) -> Option<TriComplex> {
        match name {
            "ybar1" => Some(ybar(1)),
            "ybar2" => Some(ybar(2)),
            "ybar3" => Some(ybar(3)),
            "x1bar" => Some(x1bar()),
            "digon" => Some(digon()),
            _ => None,
        }
    }
}

impl fmt::Display for TriComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// One vertex, loops `u, v, w, diagonal`, and equilateral triangles
/// `[u v d^-1]`, `[v w d^-1]`, `[w u d^-1]`.
pub fn brady_equilateral_with(u: &str, v: &str, w: &str, diagonal: &str) -> Result<TriComplex, ComplexError> {
    let labels = [u, v, w, diagonal];
    for i in 0..4 {
        if labels[i + 1..].contains(&labels[i]) {
            return Err(ComplexError::DuplicateLabels(labels.iter().map(|s| s.to_string()).collect()));
        }
    }
    let mut c = TriComplex::new();
    c.add_vertex("v")?;
    for l in labels {
        c.add_edge(l, "v", "v")?;
    }
    let third = [PiFraction::THIRD; 3];
    for (p, q) in [(u, v), (v, w), (w, u)] {
        c.add_triangle([(p, true), (q, true), (diagonal, false)], third)?;
    }
    Ok(c)
}

pub fn brady_equilateral(u: &str, v: &str, w: &str) -> Result<TriComplex, ComplexError> {
    brady_equilateral_with(u, v, w, "t")
}

/// Pushout of `parts` along loop edges. Each pair names the same label on
/// both sides; every part carrying that label must have it as a loop, and
/// the vertices of those loops are identified. Any other repeated edge label
/// or vertex name is an error.
pub fn glue(parts: &[TriComplex], identify: &[(&str, &str)]) -> Result<TriComplex, ComplexError> {
    let mut shared: Vec<&str> = Vec::new();
    for &(l, r) in identify {
        if l != r {
            return Err(ComplexError::LabelMismatch(l.to_string(), r.to_string()));
        }
        shared.push(l);
    }
    // global vertex ids are (part, local) flattened; union-find over them
    let offsets: Vec<usize> = parts
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.vertices.len();
            Some(o)
        })
        .collect();
    let total: usize = parts.iter().map(|p| p.vertices.len()).sum();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &label in &shared {
        let mut anchor = None;
        for (i, p) in parts.iter().enumerate() {
            let Some(e) = p.edge_index(label) else { continue };
            let e = &p.edges[e];
            if e.from != e.to {
                return Err(ComplexError::NotALoop(label.to_string()));
            }
            let g = find(&mut parent, offsets[i] + e.from);
            match anchor {
                None => anchor = Some(g),
                Some(a) => {
                    let (lo, hi) = (a.min(g), a.max(g));
                    parent[hi] = lo;
                    anchor = Some(lo);
                }
            }
        }
    }
    let mut out = TriComplex::new();
    let mut vmap: HashMap<usize, usize> = HashMap::new();
    for (i, p) in parts.iter().enumerate() {
        for (j, name) in p.vertices.iter().enumerate() {
            let root = find(&mut parent, offsets[i] + j);
            if let std::collections::hash_map::Entry::Vacant(e) = vmap.entry(root) {
                let id = out.add_vertex(name)?;
                e.insert(id);
            }
        }
    }
    let mut local_edge: Vec<Vec<usize>> = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let mut ids = Vec::new();
        for e in &p.edges {
            let id = match out.edge_index(&e.label) {
                Some(id) if shared.contains(&e.label.as_str()) => id,
                Some(_) => return Err(ComplexError::DuplicateEdge(e.label.clone())),
                None => {
                    let from = vmap[&find(&mut parent, offsets[i] + e.from)];
                    let to = vmap[&find(&mut parent, offsets[i] + e.to)];
                    out.edges.push(Edge { label: e.label.clone(), from, to });
                    out.edges.len() - 1
                }
            };
            ids.push(id);
        }
        local_edge.push(ids);
    }
    for (i, p) in parts.iter().enumerate() {
        for t in &p.triangles {
            let mut sides = t.sides;
            for s in &mut sides {
                s.edge = local_edge[i][s.edge];
            }
            out.triangles.push(Triangle { sides, angles: t.angles });
        }
    }
    Ok(out)
}

/// `Ȳ_k` for k = 1, 2, 3: the Brady equilateral complexes on
/// `(a, e, b1)`, `(e, B^, b2)`, `(B^, a, b3)`, diagonals `t1, t2, t3`.
pub fn ybar(k: usize) -> TriComplex {
    let (u, v, w, d) = match k {
        1 => ("a", "e", "b1", "t1"),
        2 => ("e", "B^", "b2", "t2"),
        3 => ("B^", "a", "b3", "t3"),
        _ => panic!("ybar index must be 1, 2 or 3"),
    };
    brady_equilateral_with(u, v, w, d).unwrap()
}

pub fn x1bar() -> TriComplex {
    glue(&[ybar(1), ybar(2), ybar(3)], &[("a", "a"), ("e", "e"), ("B^", "B^")]).unwrap()
}

/// Link of the single vertex of X̄₁.
pub fn x1bar_link() -> MetricGraph {
    vertex_link(&x1bar(), "v").unwrap()
}

pub fn ybar1_link() -> MetricGraph {
    vertex_link(&ybar(1), "v").unwrap()
}

/// Negative control: two equilateral triangles sharing the sides `p`, `q`,
/// so the link has a digon of length 2π/3.
pub fn digon() -> TriComplex {
    let mut c = TriComplex::new();
    c.add_vertex("v").unwrap();
    for l in ["p", "q", "r", "s"] {
        c.add_edge(l, "v", "v").unwrap();
    }
    let third = [PiFraction::THIRD; 3];
    c.add_triangle([("p", true), ("q", true), ("r", true)], third).unwrap();
    c.add_triangle([("p", true), ("q", true), ("s", true)], third).unwrap();
    c
}

pub fn direction_name(label: &str, outgoing: bool) -> String {
    format!("{label}{}", if outgoing { '+' } else { '-' })
}

/// Link of vertex `v`: node `g+` for each edge leaving `v`, `g-` for each
/// edge arriving; one arc per corner at `v`, from the incoming direction of
/// the corner's first side to the outgoing direction of its second.
pub fn vertex_link(c: &TriComplex, v: &str) -> Result<MetricGraph, ComplexError> {
    let v = c.vertex(v)?;
    let mut g = MetricGraph::new();
    for e in &c.edges {
        if e.from == v {
            g.add_node(&direction_name(&e.label, true)).unwrap();
        }
        if e.to == v {
            g.add_node(&direction_name(&e.label, false)).unwrap();
        }
    }
    for t in &c.triangles {
        for k in 0..3 {
            let (s, next) = (t.sides[k], t.sides[(k + 1) % 3]);
            if c.side_end(s) != v {
                continue;
            }
            let label_in = &c.edges[s.edge].label;
            let label_out = &c.edges[next.edge].label;
            let a = g.node(&direction_name(label_in, !s.forward)).unwrap();
            let b = g.node(&direction_name(label_out, next.forward)).unwrap();
            g.add_arc(a, b, t.angles[k]).unwrap();
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct VertexLinkReport {
    pub vertex: String,
    pub nodes: usize,
    pub arcs: usize,
    /// `None` is an acyclic link (infinite girth).
    pub girth: Option<PiFraction>,
    pub girth_exhaustive: Option<PiFraction>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct LinkConditionReport {
    pub threshold: PiFraction,
    pub vertices: Vec<VertexLinkReport>,
    pub pass: bool,
}

/// Gromov's condition: every vertex link has girth at least 2π.
pub fn check_link_condition(c: &TriComplex) -> LinkConditionReport {
    let vertices: Vec<VertexLinkReport> = c
        .vertices
        .iter()
        .map(|name| {
            let link = vertex_link(c, name).unwrap();
            let girth = graph::girth(&link);
            VertexLinkReport {
                vertex: name.clone(),
                nodes: link.node_count(),
                arcs: link.arc_count(),
                girth,
                girth_exhaustive: graph::girth_exhaustive(&link),
                pass: girth.is_none_or(|g| g >= PiFraction::TWO_PI),
            }
        })
        .collect();
    let pass = vertices.iter().all(|v| v.pass);
    LinkConditionReport { threshold: PiFraction::TWO_PI, vertices, pass }
}

/// A permutation of edge labels.
pub type Relabeling = BTreeMap<String, String>;

pub fn relabeling(pairs: &[(&str, &str)]) -> Relabeling {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

/// `a→e→B^→a`, `b1→b2→b3→b1`, `t1→t2→t3→t1`.
pub fn y_relabeling() -> Relabeling {
    relabeling(&[
        ("a", "e"),
        ("e", "B^"),
        ("B^", "a"),
        ("b1", "b2"),
        ("b2", "b3"),
        ("b3", "b1"),
        ("t1", "t2"),
        ("t2", "t3"),
        ("t3", "t1"),
    ])
}

/// `sigma ∘ tau`; labels missing from a map are fixed by it.
pub fn compose(sigma: &Relabeling, tau: &Relabeling) -> Relabeling {
    let apply = |m: &Relabeling, l: &str| m.get(l).cloned().unwrap_or_else(|| l.to_string());
    let mut keys: Vec<&String> = sigma.keys().chain(tau.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().map(|k| (k.clone(), apply(sigma, &apply(tau, k)))).collect()
}

/// Smallest `n ≥ 1` with `sigma^n` the identity.
pub fn relabeling_order(sigma: &Relabeling) -> usize {
    let is_id = |m: &Relabeling| m.iter().all(|(k, v)| k == v);
    let mut power = sigma.clone();
    let mut n = 1;
    while !is_id(&power) {
        power = compose(sigma, &power);
        n += 1;
    }
    n
}

/// True iff `sigma` is a bijection of the edge labels, compatible with a
/// bijection of vertices, carrying the triangle multiset (boundary words up
/// to rotation, angles along) onto itself.
pub fn relabel_check(c: &TriComplex, sigma: &Relabeling) -> bool {
    let mut image = Vec::with_capacity(c.edges.len());
    for e in &c.edges {
        let target = sigma.get(&e.label).unwrap_or(&e.label);
        match c.edge_index(target) {
            Some(i) => image.push(i),
            None => return false,
        }
    }
    let mut seen = vec![false; c.edges.len()];
    for &i in &image {
        if std::mem::replace(&mut seen[i], true) {
            return false;
        }
    }
    let mut vmap: Vec<Option<usize>> = vec![None; c.vertices.len()];
    for (e, &i) in c.edges.iter().zip(&image) {
        for (src, dst) in [(e.from, c.edges[i].from), (e.to, c.edges[i].to)] {
            match vmap[src] {
                None => vmap[src] = Some(dst),
                Some(d) if d != dst => return false,
                Some(_) => {}
            }
        }
    }
    let mut vseen = vec![false; c.vertices.len()];
    for d in vmap.iter().flatten() {
        if std::mem::replace(&mut vseen[*d], true) {
            return false;
        }
    }
    let canon = |t: &Triangle| {
        (0..3)
            .map(|r| {
                let s: Vec<(Side, PiFraction)> =
                    (0..3).map(|k| (t.sides[(k + r) % 3], t.angles[(k + r) % 3])).collect();
                s
            })
            .min()
            .unwrap()
    };
    let mut original: Vec<_> = c.triangles.iter().map(canon).collect();
    let mut mapped: Vec<_> = c
        .triangles
        .iter()
        .map(|t| {
            let mut t = t.clone();
            for s in &mut t.sides {
                s.edge = image[s.edge];
            }
            canon(&t)
        })
        .collect();
    original.sort();
    mapped.sort();
    original == mapped
}

/// Node map on `link` (a vertex link of `c`) induced by `sigma`: `g± ↦ σ(g)±`.
pub fn induced_link_map(link: &MetricGraph, sigma: &Relabeling) -> Option<Vec<usize>> {
    (0..link.node_count())
        .map(|i| {
            let name = link.name(i);
            let (label, sign) = name.split_at(name.len() - 1);
            let target = sigma.get(label).map(String::as_str).unwrap_or(label);
            link.node(&format!("{target}{sign}")).ok()
        })
        .collect()
}
