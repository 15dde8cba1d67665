//! Finite metric graphs with lengths in exact rational multiples of π.
//!
//! Parallel arcs and self-loops are allowed. A loop contributes 2 to the
//! degree of its node.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::angle::PiFraction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("duplicate node '{0}'")]
    DuplicateNode(String),
    #[error("arc {0}-{1} has non-positive length {2}")]
    NonPositiveLength(String, String, PiFraction),
    #[error("graph line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub u: usize,
    pub v: usize,
    pub len: PiFraction,
}

impl Arc {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite to `end` (0 = `u`, 1 = `v`).
    pub fn end(&self, end: usize) -> usize {
        if end == 0 {
            self.u
        } else {
            self.v
        }
    }
}

/// One end of an arc seen from its node: `(arc id, end)` with end 0 at `u`.
pub type Incidence = (usize, usize);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetricGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    arcs: Vec<Arc>,
    incidence: Vec<Vec<Incidence>>,
}

impl MetricGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: &str) -> Result<usize, GraphError> {
        if self.index.contains_key(name) {
            return Err(GraphError::DuplicateNode(name.to_string()));
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.incidence.push(Vec::new());
        Ok(id)
    }

    /// Adds the node if missing; returns its id either way.
    pub fn ensure_node(&mut self, name: &str) -> usize {
        match self.index.get(name) {
            Some(&i) => i,
            None => self.add_node(name).unwrap(),
        }
    }

    pub fn add_arc(&mut self, u: usize, v: usize, len: PiFraction) -> Result<usize, GraphError> {
        if !len.is_positive() {
            return Err(GraphError::NonPositiveLength(self.names[u].clone(), self.names[v].clone(), len));
        }
        let id = self.arcs.len();
        self.arcs.push(Arc { u, v, len });
        self.incidence[u].push((id, 0));
        self.incidence[v].push((id, 1));
        Ok(id)
    }

    pub fn add_arc_by_name(&mut self, u: &str, v: &str, len: PiFraction) -> Result<usize, GraphError> {
        let (u, v) = (self.node(u)?, self.node(v)?);
        self.add_arc(u, v, len)
    }

    pub fn node(&self, name: &str) -> Result<usize, GraphError> {
        self.index.get(name).copied().ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> Arc {
        self.arcs[id]
    }

    pub fn incidences(&self, node: usize) -> &[Incidence] {
        &self.incidence[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.incidence[node].len()
    }

    /// Node reached by leaving `node` along the given incidence.
    pub fn across(&self, (arc, end): Incidence) -> usize {
        self.arcs[arc].end(1 - end)
    }

    /// Sorted degree sequence, largest first.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.node_count()).map(|i| self.degree(i)).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    pub fn total_length(&self) -> PiFraction {
        self.arcs.iter().map(|a| a.len).sum()
    }

    /// All lengths multiplied by `factor` (positive).
    pub fn scaled(&self, factor: num_rational::Ratio<i64>) -> MetricGraph {
        let mut g = self.clone();
        for a in &mut g.arcs {
            a.len = a.len * factor;
        }
        g
    }

    /// Two-colourable with every arc joining the two colours.
    pub fn is_bipartite(&self) -> bool {
        let mut colour = vec![None; self.node_count()];
        for s in 0..self.node_count() {
            if colour[s].is_some() {
                continue;
            }
            colour[s] = Some(false);
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                let cu = colour[u].unwrap();
                for &inc in &self.incidence[u] {
                    let w = self.across(inc);
                    match colour[w] {
                        None => {
                            colour[w] = Some(!cu);
                            stack.push(w);
                        }
                        Some(cw) if cw == cu => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }

    /// Line format: `node <name>` and `arc <u> <v> <p>/<q>` (length p/q·π).
    pub fn parse(text: &str) -> Result<MetricGraph, GraphError> {
        let mut g = MetricGraph::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: String| GraphError::Syntax { line: n + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["node", name] => {
                    g.add_node(name)?;
                }
                ["arc", u, v, len] => {
                    let len: PiFraction =
                        len.parse().map_err(|e: crate::angle::ParseFractionError| syntax(e.to_string()))?;
                    g.add_arc_by_name(u, v, len)?;
                }
                _ => return Err(syntax(format!("cannot parse '{line}'"))),
            }
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.names {
            writeln!(out, "node {n}").unwrap();
        }
        for a in &self.arcs {
            writeln!(out, "arc {} {} {}", self.names[a.u], self.names[a.v], a.len.to_fraction_string()).unwrap();
        }
        out
    }

    /// Graphviz rendering with lengths as edge labels.
    pub fn to_dot(&self, title: &str) -> String {
        let mut out = format!("graph \"{title}\" {{\n");
        for n in &self.names {
            writeln!(out, "  \"{n}\";").unwrap();
        }
        for a in &self.arcs {
            writeln!(out, "  \"{}\" -- \"{}\" [label=\"{}\"];", self.names[a.u], self.names[a.v], a.len).unwrap();
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct ArcJson<'a> {
            u: &'a str,
            v: &'a str,
            length: PiFraction,
        }
        let arcs: Vec<ArcJson> =
            self.arcs.iter().map(|a| ArcJson { u: &self.names[a.u], v: &self.names[a.v], length: a.len }).collect();
        serde_json::json!({ "nodes": self.names, "arcs": arcs })
    }
}

fn dijkstra(g: &MetricGraph, source: usize, skip_arc: Option<usize>) -> Vec<Option<PiFraction>> {
    let mut dist: Vec<Option<PiFraction>> = vec![None; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(PiFraction::ZERO);
    heap.push(Reverse((PiFraction::ZERO, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|best| d > best) {
            continue;
        }
        for &(arc, end) in g.incidences(u) {
            if Some(arc) == skip_arc {
                continue;
            }
            let w = g.across((arc, end));
            let nd = d + g.arc(arc).len;
            if dist[w].is_none_or(|cur| nd < cur) {
                dist[w] = Some(nd);
                heap.push(Reverse((nd, w)));
            }
        }
    }
    dist
}

/// Shortest-path length, `None` when disconnected.
pub fn distance(g: &MetricGraph, u: &str, v: &str) -> Result<Option<PiFraction>, GraphError> {
    let (u, v) = (g.node(u)?, g.node(v)?);
    Ok(dijkstra(g, u, None)[v])
}

pub fn all_pairs_distances(g: &MetricGraph) -> Vec<Vec<Option<PiFraction>>> {
    (0..g.node_count()).map(|s| dijkstra(g, s, None)).collect()
}

/// Shortest non-trivial cycle, by deleting each arc in turn and closing it
/// with a shortest path between its ends. `None` for a forest.
pub fn girth(g: &MetricGraph) -> Option<PiFraction> {
    g.arcs()
        .iter()
        .enumerate()
        .filter_map(
            |(id, a)| {
                if a.is_loop() {
                    Some(a.len)
                } else {
                    dijkstra(g, a.u, Some(id))[a.v].map(|d| d + a.len)
                }
            },
        )
        .min()
}

/// Shortest cycle by enumerating simple cycles from each start node through
/// higher-numbered nodes only, pruned by the best length so far.
pub fn girth_exhaustive(g: &MetricGraph) -> Option<PiFraction> {
    let mut best = g.arcs().iter().filter(|a| a.is_loop()).map(|a| a.len).min();
    let mut used = vec![false; g.arc_count()];
    let mut visited = vec![false; g.node_count()];
    for s in 0..g.node_count() {
        visited[s] = true;
        cycle_dfs(g, s, s, PiFraction::ZERO, &mut used, &mut visited, &mut best);
        visited[s] = false;
    }
    best
}

fn cycle_dfs(
    g: &MetricGraph,
    start: usize,
    at: usize,
    len: PiFraction,
    used: &mut [bool],
    visited: &mut [bool],
    best: &mut Option<PiFraction>,
) {
    for &inc in g.incidences(at) {
        let arc = g.arc(inc.0);
        if used[inc.0] || arc.is_loop() {
            continue;
        }
        let total = len + arc.len;
        if best.is_some_and(|b| total >= b) {
            continue;
        }
        let w = g.across(inc);
        if w == start {
            *best = Some(total);
        } else if w > start && !visited[w] {
            used[inc.0] = true;
            visited[w] = true;
            cycle_dfs(g, start, w, total, used, visited, best);
            visited[w] = false;
            used[inc.0] = false;
        }
    }
}

/// An arc of the original graph traversed forward (`u → v`) or backward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Step {
    pub arc: usize,
    pub forward: bool,
}

/// Suppresses every degree-2 node, merging its two arcs into one. For each
/// arc of the result, also returns the walk of original arcs it replaces
/// (from its `u` end to its `v` end). Surviving nodes keep their names and
/// relative order.
pub fn smooth_with_paths(g: &MetricGraph) -> (MetricGraph, Vec<Vec<Step>>) {
    struct Work {
        u: usize,
        v: usize,
        len: PiFraction,
        path: Vec<Step>,
        alive: bool,
    }
    let mut arcs: Vec<Work> = g
        .arcs()
        .iter()
        .enumerate()
        .map(|(i, a)| Work { u: a.u, v: a.v, len: a.len, path: vec![Step { arc: i, forward: true }], alive: true })
        .collect();
    let mut node_alive = vec![true; g.node_count()];
    let reversed =
        |p: &[Step]| -> Vec<Step> { p.iter().rev().map(|s| Step { arc: s.arc, forward: !s.forward }).collect() };
    loop {
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.node_count()];
        for (i, a) in arcs.iter().enumerate().filter(|(_, a)| a.alive) {
            incident[a.u].push(i);
            incident[a.v].push(i);
        }
        let Some(n) =
            (0..g.node_count()).find(|&n| node_alive[n] && incident[n].len() == 2 && incident[n][0] != incident[n][1])
        else {
            break;
        };
        let (e1, e2) = (incident[n][0], incident[n][1]);
        // walk p -> n along e1, then n -> q along e2
        let (p, first) =
            if arcs[e1].v == n { (arcs[e1].u, arcs[e1].path.clone()) } else { (arcs[e1].v, reversed(&arcs[e1].path)) };
        let (q, second) =
            if arcs[e2].u == n { (arcs[e2].v, arcs[e2].path.clone()) } else { (arcs[e2].u, reversed(&arcs[e2].path)) };
        let len = arcs[e1].len + arcs[e2].len;
        arcs[e1].alive = false;
        arcs[e2].alive = false;
        node_alive[n] = false;
        arcs.push(Work { u: p, v: q, len, path: [first, second].concat(), alive: true });
    }
    let mut out = MetricGraph::new();
    let mut new_id = vec![usize::MAX; g.node_count()];
    for n in (0..g.node_count()).filter(|&n| node_alive[n]) {
        new_id[n] = out.add_node(g.name(n)).unwrap();
    }
    let mut paths = Vec::new();
    for a in arcs.into_iter().filter(|a| a.alive) {
        out.add_arc(new_id[a.u], new_id[a.v], a.len).unwrap();
        paths.push(a.path);
    }
    (out, paths)
}

pub fn smooth(g: &MetricGraph) -> MetricGraph {
    smooth_with_paths(g).0
}

/// True iff `map` (node ids, total) is a bijection carrying the arc multiset,
/// lengths included, onto itself.
pub fn is_automorphism(g: &MetricGraph, map: &[usize]) -> bool {
    let n = g.node_count();
    if map.len() != n {
        return false;
    }
    let mut hit = vec![false; n];
    for &m in map {
        if m >= n || hit[m] {
            return false;
        }
        hit[m] = true;
    }
    let key = |u: usize, v: usize, len: PiFraction| (u.min(v), u.max(v), len);
    let mut original: Vec<_> = g.arcs().iter().map(|a| key(a.u, a.v, a.len)).collect();
    let mut image: Vec<_> = g.arcs().iter().map(|a| key(map[a.u], map[a.v], a.len)).collect();
    original.sort();
    image.sort();
    original == image
}

/// Builds a node map from name pairs; unnamed nodes are fixed.
pub fn node_map_from_names(g: &MetricGraph, pairs: &[(&str, &str)]) -> Result<Vec<usize>, GraphError> {
    let mut map: Vec<usize> = (0..g.node_count()).collect();
    for (from, to) in pairs {
        map[g.node(from)?] = g.node(to)?;
    }
    Ok(map)
}

/// The vertex link of the Brady complex, smoothed: a Hamiltonian 8-cycle
/// `1 … 8` of arcs π/3 plus chords `k`–`k+4` of length 2π/3.
pub fn brady_link() -> MetricGraph {
    let mut g = MetricGraph::new();
    for k in 1..=8 {
        g.add_node(&k.to_string()).unwrap();
    }
    for k in 0..8 {
        g.add_arc(k, (k + 1) % 8, PiFraction::THIRD).unwrap();
    }
    for k in 0..4 {
        g.add_arc(k, k + 4, PiFraction::new(2, 3)).unwrap();
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> PiFraction {
        PiFraction::THIRD
    }

    #[test]
    fn brady_link_shape() {
        let g = brady_link();
        assert_eq!(g.node_count(), 8);
        assert_eq!(g.arc_count(), 12);
        assert!(g.degree_sequence().iter().all(|&d| d == 3));
        let cycle: PiFraction = g.arcs().iter().take(8).map(|a| a.len).sum();
        assert_eq!(cycle, PiFraction::new(8, 3));
        assert_eq!(girth(&g), Some(PiFraction::TWO_PI));
        assert_eq!(girth_exhaustive(&g), Some(PiFraction::TWO_PI));
    }

    #[test]
    fn forest_has_no_girth() {
        let mut g = MetricGraph::new();
        g.add_node("u").unwrap();
        g.add_node("v").unwrap();
        g.add_arc(0, 1, third()).unwrap();
        assert_eq!(girth(&g), None);
        assert_eq!(girth_exhaustive(&g), None);
        assert_eq!(distance(&g, "u", "u").unwrap(), Some(PiFraction::ZERO));
        assert_eq!(distance(&g, "u", "v").unwrap(), Some(third()));
        assert!(matches!(distance(&g, "u", "w"), Err(GraphError::UnknownNode(_))));
    }

    #[test]
    fn loops_and_parallel_arcs_are_cycles() {
        let mut g = MetricGraph::new();
        g.add_node("u").unwrap();
        g.add_node("v").unwrap();
        g.add_arc(0, 1, third()).unwrap();
        g.add_arc(0, 1, third() * 2).unwrap();
        assert_eq!(girth(&g), Some(PiFraction::PI));
        assert_eq!(girth_exhaustive(&g), Some(PiFraction::PI));
        g.add_arc(1, 1, PiFraction::new(1, 6)).unwrap();
        assert_eq!(girth(&g), Some(PiFraction::new(1, 6)));
        assert_eq!(girth_exhaustive(&g), Some(PiFraction::new(1, 6)));
        assert_eq!(g.degree(1), 4);
        assert!(!g.is_bipartite());
    }

    #[test]
    fn smoothing_merges_degree_two_nodes() {
        // brady link with chord midpoints
        let mut g = MetricGraph::new();
        for k in 1..=8 {
            g.add_node(&k.to_string()).unwrap();
        }
        for k in 0..8 {
            g.add_arc(k, (k + 1) % 8, third()).unwrap();
        }
        for k in 0..4 {
            let m = g.add_node(&format!("m{}", k + 1)).unwrap();
            g.add_arc(k, m, third()).unwrap();
            g.add_arc(m, k + 4, third()).unwrap();
        }
        let (s, paths) = smooth_with_paths(&g);
        assert_eq!(s.node_count(), 8);
        assert_eq!(s.arc_count(), 12);
        assert_eq!(girth(&s), girth(&g));
        assert!(is_automorphism(&s, &(0..8).collect::<Vec<_>>()));
        assert_eq!(paths.iter().filter(|p| p.len() == 2).count(), 4);
        // the merged arcs have the chord lengths
        let mut lens: Vec<PiFraction> = s.arcs().iter().map(|a| a.len).collect();
        lens.sort();
        assert_eq!(lens[11], PiFraction::new(2, 3));
        // nothing to smooth
        assert_eq!(smooth(&brady_link()), brady_link());
    }

    #[test]
    fn smoothing_a_circle_leaves_a_loop() {
        let mut g = MetricGraph::new();
        for k in 0..4 {
            g.add_node(&k.to_string()).unwrap();
        }
        for k in 0..4 {
            g.add_arc(k, (k + 1) % 4, third()).unwrap();
        }
        let s = smooth(&g);
        assert_eq!(s.node_count(), 1);
        assert_eq!(s.arc_count(), 1);
        assert_eq!(girth(&s), Some(third() * 4));
    }

    #[test]
    fn automorphisms() {
        let g = brady_link();
        let rot: Vec<usize> = (0..8).map(|k| (k + 1) % 8).collect();
        assert!(is_automorphism(&g, &rot));
        let swap = node_map_from_names(&g, &[("1", "2"), ("2", "1")]).unwrap();
        assert!(!is_automorphism(&g, &swap));
        assert!(!is_automorphism(&g, &[0; 8]));
    }

    #[test]
    fn text_round_trip() {
        let g = brady_link();
        let back = MetricGraph::parse(&g.to_text()).unwrap();
        assert_eq!(back, g);
        assert!(matches!(MetricGraph::parse("arc a b 1/3"), Err(GraphError::UnknownNode(_))));
        assert!(matches!(MetricGraph::parse("node a\nnode a"), Err(GraphError::DuplicateNode(_))));
        assert!(matches!(MetricGraph::parse("node a\narc a a 0/1"), Err(GraphError::NonPositiveLength(..))));
        assert!(matches!(MetricGraph::parse("edge a"), Err(GraphError::Syntax { line: 1, .. })));
        assert!(g.to_dot("brady").contains("\"1\" -- \"2\" [label=\"π/3\"]"));
        assert_eq!(g.to_json()["arcs"].as_array().unwrap().len(), 12);
    }
}
