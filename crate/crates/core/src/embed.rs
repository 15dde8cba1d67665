//! Exhaustive search for topological, locally isometric embeddings between
//! metric graphs.
//!
//! Source nodes go to target nodes, source arcs to simple, non-backtracking
//! arc-paths of the same length. Distinct source arcs use disjoint target
//! arcs, and path interiors avoid every node image and each other. Arc
//! disjointness already makes the map direction-injective at nodes; the
//! verifier checks it separately anyway.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::angle::{common_quantum, PiFraction};
use crate::graph::{all_pairs_distances, is_automorphism, MetricGraph, Step};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("arc lengths have no representable common unit")]
    Incommensurable,
    #[error("source node '{0}' has degree 2; smooth the source first")]
    SourceNotSmoothed(String),
    #[error("supplied map {0} is not an automorphism of the target")]
    NotAnAutomorphism(usize),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    First,
    All,
}

/// A witness: source node `i` goes to target node `nodes[i]`, source arc `j`
/// to the walk `paths[j]` starting at the image of its `u` end.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EmbeddingCertificate {
    pub nodes: Vec<usize>,
    pub paths: Vec<Vec<Step>>,
}

impl EmbeddingCertificate {
    pub fn identity(g: &MetricGraph) -> Self {
        EmbeddingCertificate {
            nodes: (0..g.node_count()).collect(),
            paths: (0..g.arc_count()).map(|a| vec![Step { arc: a, forward: true }]).collect(),
        }
    }

    /// `phi ∘ self` for a target automorphism given as a node map. Each
    /// target arc goes to the arc with the same length and mapped ends; among
    /// parallel arcs the k-th goes to the k-th.
    pub fn compose_automorphism(&self, dst: &MetricGraph, phi: &[usize]) -> EmbeddingCertificate {
        let arc_map = automorphism_arc_map(dst, phi);
        let paths = self
            .paths
            .iter()
            .map(|p| {
                p.iter()
                    .map(|s| {
                        let (a, flipped) = arc_map[s.arc];
                        Step { arc: a, forward: s.forward != flipped }
                    })
                    .collect()
            })
            .collect();
        EmbeddingCertificate { nodes: self.nodes.iter().map(|&n| phi[n]).collect(), paths }
    }

    pub fn to_json(&self, src: &MetricGraph, dst: &MetricGraph) -> serde_json::Value {
        let nodes: BTreeMap<&str, &str> =
            self.nodes.iter().enumerate().map(|(i, &n)| (src.name(i), dst.name(n))).collect();
        let arcs: Vec<serde_json::Value> = self
            .paths
            .iter()
            .enumerate()
            .map(|(j, p)| {
                serde_json::json!({
                    "arc": arc_label(src, j),
                    "path": walk_names(dst, self.nodes[src.arc(j).u], p),
                })
            })
            .collect();
        serde_json::json!({ "nodes": nodes, "arcs": arcs })
    }
}

fn automorphism_arc_map(g: &MetricGraph, phi: &[usize]) -> Vec<(usize, bool)> {
    let mut taken = vec![false; g.arc_count()];
    g.arcs()
        .iter()
        .map(|a| {
            let (u, v) = (phi[a.u], phi[a.v]);
            let hit = g
                .arcs()
                .iter()
                .enumerate()
                .find(|(i, b)| !taken[*i] && b.len == a.len && ((b.u == u && b.v == v) || (b.u == v && b.v == u)));
            let (i, b) = hit.expect("node map is not an automorphism");
            taken[i] = true;
            (i, !(b.u == u && b.v == v))
        })
        .collect()
}

pub fn arc_label(g: &MetricGraph, arc: usize) -> String {
    let a = g.arc(arc);
    format!("{}-{}", g.name(a.u), g.name(a.v))
}

/// Node names visited by a walk, start included.
pub fn walk_names(g: &MetricGraph, start: usize, path: &[Step]) -> Vec<String> {
    let mut out = vec![g.name(start).to_string()];
    for s in path {
        let a = g.arc(s.arc);
        out.push(g.name(if s.forward { a.v } else { a.u }).to_string());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    WrongShape,
    NodeOutOfRange(usize),
    NodesCollide(usize, usize),
    /// The walk is empty, does not chain, or ends at the wrong node.
    BrokenPath(usize),
    LengthMismatch {
        arc: usize,
        expected: PiFraction,
        got: PiFraction,
    },
    /// A walk revisits a node, or a non-loop arc maps to a closed walk.
    NotSimple(usize),
    ArcReused {
        target_arc: usize,
        arcs: (usize, usize),
    },
    /// A walk interior passes through a node image or another interior.
    InteriorClash {
        arc: usize,
        target_node: usize,
    },
    /// Two arc-ends at a node leave along the same target direction.
    DirectionClash {
        node: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Independent checker; empty result means the certificate is valid.
pub fn certificate_violations(cert: &EmbeddingCertificate, src: &MetricGraph, dst: &MetricGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    if cert.nodes.len() != src.node_count() || cert.paths.len() != src.arc_count() {
        return vec![Violation::WrongShape];
    }
    for &n in &cert.nodes {
        if n >= dst.node_count() {
            return vec![Violation::NodeOutOfRange(n)];
        }
    }
    for i in 0..cert.nodes.len() {
        for j in i + 1..cert.nodes.len() {
            if cert.nodes[i] == cert.nodes[j] {
                out.push(Violation::NodesCollide(i, j));
            }
        }
    }
    let mut arc_owner: Vec<Option<usize>> = vec![None; dst.arc_count()];
    let mut interior_owner: Vec<Option<usize>> = vec![None; dst.node_count()];
    let is_image: Vec<bool> = (0..dst.node_count()).map(|n| cert.nodes.contains(&n)).collect();
    // (target arc, end) leaving each source node image
    let mut first_steps: Vec<Vec<(usize, usize)>> = vec![Vec::new(); src.node_count()];
    for (j, path) in cert.paths.iter().enumerate() {
        let a = src.arc(j);
        let (start, end) = (cert.nodes[a.u], cert.nodes[a.v]);
        if path.iter().any(|s| s.arc >= dst.arc_count()) {
            out.push(Violation::BrokenPath(j));
            continue;
        }
        let mut at = start;
        let mut chained = !path.is_empty();
        let mut visited = vec![start];
        for s in path {
            let b = dst.arc(s.arc);
            let (from, to) = if s.forward { (b.u, b.v) } else { (b.v, b.u) };
            if from != at {
                chained = false;
                break;
            }
            at = to;
            visited.push(to);
        }
        if !chained || at != end {
            out.push(Violation::BrokenPath(j));
            continue;
        }
        let got: PiFraction = path.iter().map(|s| dst.arc(s.arc).len).sum();
        if got != a.len {
            out.push(Violation::LengthMismatch { arc: j, expected: a.len, got });
        }
        let interior = &visited[1..visited.len() - 1];
        let mut seen = vec![false; dst.node_count()];
        seen[start] = true;
        seen[end] = true;
        let repeats = interior.iter().any(|&n| std::mem::replace(&mut seen[n], true));
        if repeats || (start == end) != a.is_loop() {
            out.push(Violation::NotSimple(j));
        }
        for s in path {
            match arc_owner[s.arc] {
                Some(k) if k != j => out.push(Violation::ArcReused { target_arc: s.arc, arcs: (k, j) }),
                Some(_) => out.push(Violation::NotSimple(j)),
                None => arc_owner[s.arc] = Some(j),
            }
        }
        for &n in interior {
            if is_image[n] || interior_owner[n].is_some_and(|k| k != j) {
                out.push(Violation::InteriorClash { arc: j, target_node: n });
            }
            interior_owner[n] = Some(j);
        }
        let first = path[0];
        let last = path[path.len() - 1];
        first_steps[a.u].push((first.arc, if first.forward { 0 } else { 1 }));
        first_steps[a.v].push((last.arc, if last.forward { 1 } else { 0 }));
    }
    for (node, steps) in first_steps.iter_mut().enumerate() {
        let before = steps.len();
        steps.sort();
        steps.dedup();
        if steps.len() != before {
            out.push(Violation::DirectionClash { node });
        }
    }
    out
}

pub fn verify_certificate(cert: &EmbeddingCertificate, src: &MetricGraph, dst: &MetricGraph) -> bool {
    certificate_violations(cert, src, dst).is_empty()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PruneReason {
    #[serde(rename = "length mismatch")]
    LengthMismatch,
    #[serde(rename = "injectivity clash")]
    InjectivityClash,
    #[serde(rename = "local-isometry clash")]
    LocalIsometryClash,
    #[serde(rename = "distance obstruction")]
    DistanceObstruction,
}

impl fmt::Display for PruneReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PruneReason::LengthMismatch => "length mismatch",
            PruneReason::InjectivityClash => "injectivity clash",
            PruneReason::LocalIsometryClash => "local-isometry clash",
            PruneReason::DistanceObstruction => "distance obstruction",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prune {
    pub reason: PruneReason,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arc: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<PiFraction>,
    /// Target distance between the arc's end images; `None` if disconnected
    /// or not applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<PiFraction>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Children(Vec<TraceNode>),
    Pruned(Prune),
    Success(bool),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceNode {
    pub assignment: BTreeMap<String, String>,
    /// Arcs routed at this step, as target node walks.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub paths: BTreeMap<String, Vec<String>>,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl TraceNode {
    pub fn leaves(&self) -> Vec<&TraceNode> {
        match &self.outcome {
            Outcome::Children(c) if !c.is_empty() => c.iter().flat_map(|n| n.leaves()).collect(),
            _ => vec![self],
        }
    }

    pub fn size(&self) -> usize {
        match &self.outcome {
            Outcome::Children(c) => 1 + c.iter().map(|n| n.size()).sum::<usize>(),
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootCase {
    pub representative: String,
    pub orbit: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchTrace {
    pub unit: PiFraction,
    pub source_order: Vec<String>,
    pub root_cases: Vec<RootCase>,
    pub certificates: usize,
    pub tree: TraceNode,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub certificates: Vec<EmbeddingCertificate>,
    pub trace: Option<SearchTrace>,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub mode: Mode,
    /// Generators of a group of target automorphisms; root cases are reduced
    /// to one target node per orbit.
    pub automorphisms: Vec<Vec<usize>>,
    /// Source nodes forced onto given target nodes, as `(source, target)`.
    pub pinned: Vec<(usize, usize)>,
    pub trace: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { mode: Mode::All, automorphisms: Vec::new(), pinned: Vec::new(), trace: false }
    }
}

pub fn find_embeddings(
    src: &MetricGraph,
    dst: &MetricGraph,
    mode: Mode,
) -> Result<Vec<EmbeddingCertificate>, EmbedError> {
    Ok(search(src, dst, &SearchOptions { mode, ..Default::default() })?.certificates)
}

/// Exhaustive search with the pruned tree recorded.
pub fn search_trace(
    src: &MetricGraph,
    dst: &MetricGraph,
    automorphisms: &[Vec<usize>],
) -> Result<SearchTrace, EmbedError> {
    let opts =
        SearchOptions { mode: Mode::All, automorphisms: automorphisms.to_vec(), trace: true, ..Default::default() };
    Ok(search(src, dst, &opts)?.trace.unwrap())
}

struct Ctx<'a> {
    src: &'a MetricGraph,
    dst: &'a MetricGraph,
    unit: PiFraction,
    src_len: Vec<i64>,
    dst_len: Vec<i64>,
    dist: Vec<Vec<Option<i64>>>,
    order: Vec<usize>,
    /// For each depth, arcs joining `order[depth]` to earlier nodes or itself.
    back_arcs: Vec<Vec<usize>>,
    mode: Mode,
    trace: bool,
    pin: Vec<Option<usize>>,
}

#[derive(Clone)]
struct State {
    img: Vec<Option<usize>>,
    used_node: Vec<bool>,
    used_arc: Vec<bool>,
    paths: Vec<Vec<Step>>,
}

pub fn search(src: &MetricGraph, dst: &MetricGraph, opts: &SearchOptions) -> Result<SearchOutcome, EmbedError> {
    for n in 0..src.node_count() {
        let incs = src.incidences(n);
        if incs.len() == 2 && incs[0].0 != incs[1].0 {
            return Err(EmbedError::SourceNotSmoothed(src.name(n).to_string()));
        }
    }
    for (i, phi) in opts.automorphisms.iter().enumerate() {
        if !is_automorphism(dst, phi) {
            return Err(EmbedError::NotAnAutomorphism(i));
        }
    }
    let lengths: Vec<PiFraction> = src.arcs().iter().chain(dst.arcs()).map(|a| a.len).collect();
    let unit = if lengths.is_empty() {
        PiFraction::PI
    } else {
        common_quantum(&lengths).ok_or(EmbedError::Incommensurable)?
    };
    let units = |g: &MetricGraph| -> Vec<i64> { g.arcs().iter().map(|a| a.len.in_units_of(unit).unwrap()).collect() };
    let dist = all_pairs_distances(dst)
        .into_iter()
        .map(|row| row.into_iter().map(|d| d.map(|d| d.in_units_of(unit).unwrap())).collect())
        .collect();
    let mut pin = vec![None; src.node_count()];
    for &(s, d) in &opts.pinned {
        pin[s] = Some(d);
    }
    let order = source_order(src, &pin);
    let src_len = units(src);
    let back_arcs = order
        .iter()
        .enumerate()
        .map(|(depth, &n)| {
            let mut arcs: Vec<usize> = src
                .incidences(n)
                .iter()
                .map(|&(arc, _)| arc)
                .filter(|&arc| {
                    let other = src.across((arc, if src.arc(arc).u == n { 0 } else { 1 }));
                    order[..=depth].contains(&other)
                })
                .collect();
            arcs.sort_by_key(|&a| (src_len[a], a));
            arcs.dedup();
            arcs
        })
        .collect();
    let ctx = Ctx {
        src,
        dst,
        unit,
        src_len,
        dst_len: units(dst),
        dist,
        order,
        back_arcs,
        mode: opts.mode,
        trace: opts.trace,
        pin,
    };
    let orbits = orbits(dst.node_count(), &opts.automorphisms);
    let roots: Vec<usize> = match ctx.order.first().and_then(|&n| ctx.pin[n]) {
        Some(p) => vec![p],
        None => (0..dst.node_count()).filter(|&n| orbits[n] == n).collect(),
    };
    let state = State {
        img: vec![None; src.node_count()],
        used_node: vec![false; dst.node_count()],
        used_arc: vec![false; dst.arc_count()],
        paths: vec![Vec::new(); src.arc_count()],
    };
    let (tree, mut certificates) = if ctx.order.is_empty() {
        let success =
            TraceNode { assignment: BTreeMap::new(), paths: BTreeMap::new(), outcome: Outcome::Success(true) };
        (success, vec![EmbeddingCertificate { nodes: vec![], paths: vec![] }])
    } else {
        let per_root: Vec<(Vec<TraceNode>, Vec<EmbeddingCertificate>)> = roots
            .par_iter()
            .map(|&x| {
                let mut found = Vec::new();
                let mut st = state.clone();
                let nodes = try_candidate(&ctx, &mut st, 0, x, &mut found);
                (nodes, found)
            })
            .collect();
        let mut children = Vec::new();
        let mut certs = Vec::new();
        for (nodes, found) in per_root {
            children.extend(nodes);
            if ctx.mode == Mode::First && !certs.is_empty() {
                continue;
            }
            certs.extend(found);
        }
        let root =
            TraceNode { assignment: BTreeMap::new(), paths: BTreeMap::new(), outcome: Outcome::Children(children) };
        (root, certs)
    };
    if ctx.mode == Mode::All {
        certificates.sort();
    }
    let trace = ctx.trace.then(|| SearchTrace {
        unit,
        source_order: ctx.order.iter().map(|&n| src.name(n).to_string()).collect(),
        root_cases: roots
            .iter()
            .map(|&r| RootCase {
                representative: dst.name(r).to_string(),
                orbit: (0..dst.node_count()).filter(|&n| orbits[n] == r).map(|n| dst.name(n).to_string()).collect(),
            })
            .collect(),
        certificates: certificates.len(),
        tree,
    });
    Ok(SearchOutcome { certificates, trace })
}

/// Pinned nodes first, in index order; then highest degree; then repeatedly
/// the node with most arcs back to the chosen ones, ties by degree, then by
/// index.
fn source_order(src: &MetricGraph, pin: &[Option<usize>]) -> Vec<usize> {
    let n = src.node_count();
    let mut chosen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let best = (0..n)
            .filter(|&i| !chosen[i])
            .max_by_key(|&i| {
                let back = src.incidences(i).iter().filter(|&&inc| chosen[src.across(inc)]).count();
                (pin[i].is_some(), back, src.degree(i), std::cmp::Reverse(i))
            })
            .unwrap();
        chosen[best] = true;
        order.push(best);
    }
    order
}

/// Orbit representative (least index) of each node under the generated group.
fn orbits(n: usize, gens: &[Vec<usize>]) -> Vec<usize> {
    let mut rep: Vec<usize> = (0..n).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for g in gens {
            for i in 0..n {
                let m = rep[i].min(rep[g[i]]);
                if rep[i] != m || rep[g[i]] != m {
                    rep[i] = m;
                    rep[g[i]] = m;
                    changed = true;
                }
            }
        }
    }
    rep
}

fn assignment_of(ctx: &Ctx, st: &State) -> BTreeMap<String, String> {
    st.img
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|m| (ctx.src.name(i).to_string(), ctx.dst.name(m).to_string())))
        .collect()
}

fn pruned(ctx: &Ctx, st: &State, prune: Prune) -> Vec<TraceNode> {
    if !ctx.trace {
        return Vec::new();
    }
    vec![TraceNode { assignment: assignment_of(ctx, st), paths: BTreeMap::new(), outcome: Outcome::Pruned(prune) }]
}

fn other_end(ctx: &Ctx, arc: usize, n: usize) -> usize {
    let a = ctx.src.arc(arc);
    if a.u == n {
        a.v
    } else {
        a.u
    }
}

/// Tries `order[depth] ↦ x`; returns trace children (one per routing, or a
/// pruned leaf) and pushes any completed certificates.
fn try_candidate(
    ctx: &Ctx,
    st: &mut State,
    depth: usize,
    x: usize,
    found: &mut Vec<EmbeddingCertificate>,
) -> Vec<TraceNode> {
    let n = ctx.order[depth];
    let prune = |reason, arc: Option<usize>, distance: Option<i64>, detail: String| Prune {
        reason,
        arc: arc.map(|a| arc_label(ctx.src, a)),
        length: arc.map(|a| ctx.src.arc(a).len),
        distance: distance.map(|d| ctx.unit * d),
        detail,
    };
    if st.used_node[x] {
        st.img[n] = Some(x);
        let out = pruned(
            ctx,
            st,
            prune(PruneReason::InjectivityClash, None, None, format!("{} is already in the image", ctx.dst.name(x))),
        );
        st.img[n] = None;
        return out;
    }
    st.img[n] = Some(x);
    let result = (|| {
        if ctx.dst.degree(x) < ctx.src.degree(n) {
            let detail = format!("degree {} < {}", ctx.dst.degree(x), ctx.src.degree(n));
            return pruned(ctx, st, prune(PruneReason::LocalIsometryClash, None, None, detail));
        }
        for &arc in &ctx.back_arcs[depth] {
            let m = other_end(ctx, arc, n);
            if m == n {
                continue;
            }
            let y = st.img[m].unwrap();
            let d = ctx.dist[x][y];
            if d.is_none_or(|d| d > ctx.src_len[arc]) {
                let detail = format!("distance from {} to {} exceeds the arc length", ctx.dst.name(x), ctx.dst.name(y));
                return pruned(ctx, st, prune(PruneReason::DistanceObstruction, Some(arc), d, detail));
            }
        }
        st.used_node[x] = true;
        let mut children = Vec::new();
        let routed = route(ctx, st, depth, 0, found, &mut children);
        st.used_node[x] = false;
        if routed {
            return children;
        }
        // classify the failure: does any arc lack a path even in the bare target?
        let bare = State {
            img: st.img.clone(),
            used_node: vec![false; ctx.dst.node_count()],
            used_arc: vec![false; ctx.dst.arc_count()],
            paths: Vec::new(),
        };
        for &arc in &ctx.back_arcs[depth] {
            let y = st.img[other_end(ctx, arc, n)].unwrap();
            if candidate_paths(ctx, &bare, arc, x, y).is_empty() {
                let detail = format!(
                    "no simple path of length {} from {} to {}",
                    ctx.src.arc(arc).len,
                    ctx.dst.name(x),
                    ctx.dst.name(y)
                );
                return pruned(ctx, st, prune(PruneReason::LengthMismatch, Some(arc), ctx.dist[x][y], detail));
            }
        }
        pruned(
            ctx,
            st,
            prune(
                PruneReason::InjectivityClash,
                None,
                None,
                "no disjoint routing of the arcs back to assigned nodes".into(),
            ),
        )
    })();
    st.img[n] = None;
    result
}

/// Routes `back_arcs[depth][i..]`; returns whether at least one complete
/// routing existed.
fn route(
    ctx: &Ctx,
    st: &mut State,
    depth: usize,
    i: usize,
    found: &mut Vec<EmbeddingCertificate>,
    out: &mut Vec<TraceNode>,
) -> bool {
    if ctx.mode == Mode::First && !found.is_empty() {
        return true;
    }
    let arcs = &ctx.back_arcs[depth];
    if i == arcs.len() {
        let node = descend(ctx, st, depth, found);
        if ctx.trace {
            let paths = arcs
                .iter()
                .map(|&a| (arc_label(ctx.src, a), walk_names(ctx.dst, st.img[ctx.src.arc(a).u].unwrap(), &st.paths[a])))
                .collect();
            out.push(TraceNode { assignment: assignment_of(ctx, st), paths, outcome: node });
        }
        return true;
    }
    let arc = arcs[i];
    let a = ctx.src.arc(arc);
    let (x, y) = (st.img[a.u].unwrap(), st.img[a.v].unwrap());
    let mut any = false;
    for path in candidate_paths(ctx, st, arc, x, y) {
        let interior = interior_nodes(ctx.dst, &path);
        for s in &path {
            st.used_arc[s.arc] = true;
        }
        for &n in &interior {
            st.used_node[n] = true;
        }
        st.paths[arc] = path;
        any |= route(ctx, st, depth, i + 1, found, out);
        for s in &st.paths[arc] {
            st.used_arc[s.arc] = false;
        }
        for &n in &interior {
            st.used_node[n] = false;
        }
        st.paths[arc].clear();
        if ctx.mode == Mode::First && !found.is_empty() {
            break;
        }
    }
    any
}

fn descend(ctx: &Ctx, st: &mut State, depth: usize, found: &mut Vec<EmbeddingCertificate>) -> Outcome {
    if depth + 1 == ctx.order.len() {
        found
            .push(EmbeddingCertificate { nodes: st.img.iter().map(|m| m.unwrap()).collect(), paths: st.paths.clone() });
        return Outcome::Success(true);
    }
    let mut children = Vec::new();
    let next = ctx.order[depth + 1];
    for x in 0..ctx.dst.node_count() {
        if ctx.pin[next].is_some_and(|p| p != x) {
            continue;
        }
        children.extend(try_candidate(ctx, st, depth + 1, x, found));
        if ctx.mode == Mode::First && !found.is_empty() {
            break;
        }
    }
    Outcome::Children(children)
}

fn interior_nodes(g: &MetricGraph, path: &[Step]) -> Vec<usize> {
    path[..path.len().saturating_sub(1)]
        .iter()
        .map(|s| {
            let a = g.arc(s.arc);
            if s.forward {
                a.v
            } else {
                a.u
            }
        })
        .collect()
}

/// Simple walks `x → y` of exactly the arc's length over free target arcs,
/// with interiors avoiding used nodes, `x` and `y`.
fn candidate_paths(ctx: &Ctx, st: &State, arc: usize, x: usize, y: usize) -> Vec<Vec<Step>> {
    let mut out = Vec::new();
    let mut on_path = vec![false; ctx.dst.node_count()];
    let mut arc_used = st.used_arc.clone();
    let mut path = Vec::new();
    on_path[x] = true;
    walk(ctx, st, x, y, ctx.src_len[arc], &mut on_path, &mut arc_used, &mut path, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn walk(
    ctx: &Ctx,
    st: &State,
    at: usize,
    y: usize,
    remaining: i64,
    on_path: &mut [bool],
    arc_used: &mut [bool],
    path: &mut Vec<Step>,
    out: &mut Vec<Vec<Step>>,
) {
    for &(arc, end) in ctx.dst.incidences(at) {
        if arc_used[arc] {
            continue;
        }
        let len = ctx.dst_len[arc];
        if len > remaining {
            continue;
        }
        let next = ctx.dst.across((arc, end));
        let step = Step { arc, forward: end == 0 };
        let a = ctx.dst.arc(arc);
        // a loop is entered from both ends; take it once
        if a.is_loop() && end == 1 {
            continue;
        }
        if len == remaining {
            if next == y {
                path.push(step);
                out.push(path.clone());
                path.pop();
            }
            continue;
        }
        if next == y || on_path[next] || st.used_node[next] {
            continue;
        }
        if ctx.dist[next][y].is_none_or(|d| d > remaining - len) {
            continue;
        }
        on_path[next] = true;
        arc_used[arc] = true;
        path.push(step);
        walk(ctx, st, next, y, remaining - len, on_path, arc_used, path, out);
        path.pop();
        arc_used[arc] = false;
        on_path[next] = false;
    }
}

/// Obstruction found when checking a partial node assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialObstruction {
    pub reason: PruneReason,
    pub arc: String,
    pub length: PiFraction,
    pub distance: Option<PiFraction>,
}

/// Checks every source arc whose two ends are assigned: the target distance
/// between the images must not exceed the arc length, and a simple path of
/// exactly that length must exist. Also reports colliding images and degree
/// deficits. Arcs are checked in source order.
pub fn check_partial(
    src: &MetricGraph,
    dst: &MetricGraph,
    assignment: &[(&str, &str)],
) -> Result<Vec<PartialObstruction>, EmbedError> {
    let mut img: Vec<Option<usize>> = vec![None; src.node_count()];
    let mut out = Vec::new();
    for &(s, d) in assignment {
        let si = src.node(s).map_err(|_| EmbedError::UnknownNode(s.to_string()))?;
        let di = dst.node(d).map_err(|_| EmbedError::UnknownNode(d.to_string()))?;
        if img.contains(&Some(di)) {
            out.push(PartialObstruction {
                reason: PruneReason::InjectivityClash,
                arc: s.to_string(),
                length: PiFraction::ZERO,
                distance: None,
            });
        }
        if dst.degree(di) < src.degree(si) {
            out.push(PartialObstruction {
                reason: PruneReason::LocalIsometryClash,
                arc: s.to_string(),
                length: PiFraction::ZERO,
                distance: None,
            });
        }
        img[si] = Some(di);
    }
    let dist = all_pairs_distances(dst);
    let lengths: Vec<PiFraction> = src.arcs().iter().chain(dst.arcs()).map(|a| a.len).collect();
    let unit = common_quantum(&lengths).ok_or(EmbedError::Incommensurable)?;
    let ctx_paths = |arc: usize, x: usize, y: usize| -> bool {
        let ctx = Ctx {
            src,
            dst,
            unit,
            src_len: src.arcs().iter().map(|a| a.len.in_units_of(unit).unwrap()).collect(),
            dst_len: dst.arcs().iter().map(|a| a.len.in_units_of(unit).unwrap()).collect(),
            dist: dist.iter().map(|r| r.iter().map(|d| d.map(|d| d.in_units_of(unit).unwrap())).collect()).collect(),
            order: Vec::new(),
            back_arcs: Vec::new(),
            mode: Mode::First,
            trace: false,
            pin: Vec::new(),
        };
        let st = State {
            img: img.clone(),
            used_node: vec![false; dst.node_count()],
            used_arc: vec![false; dst.arc_count()],
            paths: Vec::new(),
        };
        !candidate_paths(&ctx, &st, arc, x, y).is_empty()
    };
    for (j, a) in src.arcs().iter().enumerate() {
        let (Some(x), Some(y)) = (img[a.u], img[a.v]) else { continue };
        let d = dist[x][y];
        if d.is_none_or(|d| d > a.len) {
            out.push(PartialObstruction {
                reason: PruneReason::DistanceObstruction,
                arc: arc_label(src, j),
                length: a.len,
                distance: d,
            });
        } else if !ctx_paths(j, x, y) {
            out.push(PartialObstruction {
                reason: PruneReason::LengthMismatch,
                arc: arc_label(src, j),
                length: a.len,
                distance: d,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::brady_link;

    fn path_graph(n: usize) -> MetricGraph {
        let mut g = MetricGraph::new();
        for i in 0..n {
            g.add_node(&format!("p{i}")).unwrap();
        }
        for i in 1..n {
            g.add_arc(i - 1, i, PiFraction::THIRD).unwrap();
        }
        g
    }

    #[test]
    fn identity_is_found_and_verifies() {
        let g = brady_link();
        let certs = find_embeddings(&g, &g, Mode::All).unwrap();
        assert!(certs.contains(&EmbeddingCertificate::identity(&g)));
        assert!(certs.iter().all(|c| verify_certificate(c, &g, &g)));
        // the dihedral group of the octagon with chords
        assert_eq!(certs.len(), 16);
    }

    #[test]
    fn single_arc_into_longer_path() {
        let mut src = MetricGraph::new();
        src.add_node("u").unwrap();
        src.add_node("v").unwrap();
        src.add_arc(0, 1, PiFraction::new(2, 3)).unwrap();
        let dst = path_graph(4);
        let certs = find_embeddings(&src, &dst, Mode::All).unwrap();
        // p0-p2, p1-p3 in both orientations
        assert_eq!(certs.len(), 4);
        assert!(certs.iter().all(|c| verify_certificate(c, &src, &dst)));
        assert_eq!(find_embeddings(&src, &dst, Mode::First).unwrap().len(), 1);
    }

    #[test]
    fn loops_map_to_cycles() {
        let mut src = MetricGraph::new();
        src.add_node("o").unwrap();
        src.add_arc(0, 0, PiFraction::new(4, 3)).unwrap();
        let mut dst = path_graph(4);
        dst.add_arc(3, 0, PiFraction::THIRD).unwrap();
        let certs = find_embeddings(&src, &dst, Mode::All).unwrap();
        // four base points, two directions
        assert_eq!(certs.len(), 8);
        assert!(certs.iter().all(|c| verify_certificate(c, &src, &dst)));
    }

    #[test]
    fn degree_two_source_is_rejected() {
        let g = path_graph(3);
        assert!(matches!(find_embeddings(&g, &g, Mode::All), Err(EmbedError::SourceNotSmoothed(_))));
    }

    #[test]
    fn verifier_catches_shared_arc() {
        let mut src = MetricGraph::new();
        for n in ["u", "v", "w"] {
            src.add_node(n).unwrap();
        }
        src.add_arc(0, 1, PiFraction::THIRD).unwrap();
        src.add_arc(0, 2, PiFraction::new(2, 3)).unwrap();
        let dst = path_graph(3);
        let bad = EmbeddingCertificate {
            nodes: vec![0, 1, 2],
            paths: vec![
                vec![Step { arc: 0, forward: true }],
                vec![Step { arc: 0, forward: true }, Step { arc: 1, forward: true }],
            ],
        };
        let v = certificate_violations(&bad, &src, &dst);
        assert!(v.iter().any(|x| matches!(x, Violation::ArcReused { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::InteriorClash { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::DirectionClash { .. })));
    }

    #[test]
    fn verifier_catches_wrong_length_and_broken_paths() {
        let g = brady_link();
        let mut c = EmbeddingCertificate::identity(&g);
        c.paths[0][0].forward = false;
        assert!(certificate_violations(&c, &g, &g).contains(&Violation::BrokenPath(0)));
        let mut c = EmbeddingCertificate::identity(&g);
        c.paths[0] = vec![Step { arc: 8, forward: true }];
        assert!(!verify_certificate(&c, &g, &g));
        let mut c = EmbeddingCertificate::identity(&g);
        c.nodes.swap(0, 1);
        assert!(!verify_certificate(&c, &g, &g));
        c.nodes.pop();
        assert_eq!(certificate_violations(&c, &g, &g), vec![Violation::WrongShape]);
    }

    #[test]
    fn trace_serializes_as_nested_tree() {
        let g = brady_link();
        let t = search_trace(&g, &g, &[(0..8).map(|k| (k + 1) % 8).collect()]).unwrap();
        assert_eq!(t.root_cases.len(), 1);
        assert_eq!(t.root_cases[0].orbit.len(), 8);
        assert_eq!(t.certificates, 2);
        let json = serde_json::to_value(&t.tree).unwrap();
        assert!(json["children"].is_array());
        assert!(t.tree.leaves().iter().any(|l| l.outcome == Outcome::Success(true)));
        let text = serde_json::to_string(&t).unwrap();
        assert!(text.contains("\"success\":true"));
        assert!(text.contains("\"pruned\":{\"reason\":"));
    }

    #[test]
    fn rejects_non_automorphism() {
        let g = brady_link();
        let mut swap: Vec<usize> = (0..8).collect();
        swap.swap(0, 1);
        assert_eq!(search_trace(&g, &g, &[swap]).unwrap_err(), EmbedError::NotAnAutomorphism(0));
    }
}
