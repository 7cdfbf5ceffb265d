//! Subdivisions of a parallel pair of paths: planar st-subgraphs with a
//! combinatorial embedding (left-to-right orders of incoming and outgoing
//! edges at every vertex), their faces, the refinement order, zig-zags and
//! diamonds.
//!
//! Flow runs downward. The leftmost boundary path is `alpha`, the rightmost
//! is `beta`. Faces are traced with the face on the left of the walk, using
//! the clockwise rotation `reverse(out) ++ in` at every vertex.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{dot_escape, step_label, Limits, ReductionGraph, Span};
use crate::par;
use crate::terms::Signature;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanarError {
    #[error("the span between the endpoints is not fully explored")]
    IncompleteSpan,
    #[error("the span between the endpoints contains a directed cycle")]
    CyclicSpan,
    #[error("`{0}` is not a path between the given endpoints")]
    NotAPath(String),
    #[error("search too large: {0}")]
    TooLarge(String),
    #[error("face without a unique source and target (internal consistency failure)")]
    NonMonotoneFace,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Face {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Subdivision {
    pub source: usize,
    pub target: usize,
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub edges: BTreeSet<usize>,
    /// Outgoing edges of each vertex, left to right.
    pub out_order: BTreeMap<usize, Vec<usize>>,
    /// Incoming edges of each vertex, left to right.
    pub in_order: BTreeMap<usize, Vec<usize>>,
    /// Interior faces.
    pub faces: Vec<Face>,
    /// Number of faces of the sphere embedding, the outer one included.
    pub face_count: usize,
}

impl Subdivision {
    pub fn vertices(&self) -> BTreeSet<usize> {
        self.out_order.keys().chain(self.in_order.keys()).copied().collect()
    }

    pub fn euler_ok(&self) -> bool {
        self.vertices().len() as i64 - self.edges.len() as i64 + self.face_count as i64 == 2
    }

    pub fn to_dot(&self, g: &ReductionGraph, sig: &Signature, face_labels: &[String]) -> String {
        let mut s = String::from("digraph subdivision {\n  rankdir=LR;\n");
        let rank = topo_rank(g, &self.edges);
        let mut by_rank: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in self.vertices() {
            by_rank.entry(rank.get(&v).copied().unwrap_or(0)).or_default().push(v);
            s.push_str(&format!("  v{} [label=\"{}\"];\n", v, dot_escape(&sig.print(&g.vertices[v]))));
        }
        for vs in by_rank.values() {
            let ids: Vec<String> = vs.iter().map(|v| format!("v{}", v)).collect();
            s.push_str(&format!("  {{ rank=same; {}; }}\n", ids.join("; ")));
        }
        let alpha: BTreeSet<usize> = self.alpha.iter().copied().collect();
        let beta: BTreeSet<usize> = self.beta.iter().copied().collect();
        for &e in &self.edges {
            let edge = &g.edges[e];
            let color = if alpha.contains(&e) {
                ", color=blue"
            } else if beta.contains(&e) {
                ", color=red"
            } else {
                ""
            };
            s.push_str(&format!(
                "  v{} -> v{} [label=\"{}\"{}];\n",
                edge.source,
                edge.target,
                dot_escape(&step_label(&edge.step)),
                color
            ));
        }
        for (k, f) in self.faces.iter().enumerate() {
            let label = face_labels.get(k).cloned().unwrap_or_default();
            s.push_str(&format!("  // face {}: v{} => v{} {}\n", k, f.source, f.target, label.replace('\n', " ")));
        }
        s.push_str("}\n");
        s
    }
}

fn topo_rank(g: &ReductionGraph, edges: &BTreeSet<usize>) -> BTreeMap<usize, usize> {
    let mut rank: BTreeMap<usize, usize> = BTreeMap::new();
    let mut changed = true;
    while changed {
        changed = false;
        for &e in edges {
            let (a, b) = (g.edges[e].source, g.edges[e].target);
            let ra = *rank.entry(a).or_insert(0);
            let rb = rank.entry(b).or_insert(0);
            if *rb < ra + 1 && ra < edges.len() + 1 {
                *rb = ra + 1;
                changed = true;
            }
        }
    }
    rank
}

fn check_path(g: &ReductionGraph, p: &[usize], s: usize, t: usize, name: &str) -> Result<(), PlanarError> {
    let mut v = s;
    for &e in p {
        if e >= g.edges.len() || g.edges[e].source != v {
            return Err(PlanarError::NotAPath(name.into()));
        }
        v = g.edges[e].target;
    }
    if v != t {
        return Err(PlanarError::NotAPath(name.into()));
    }
    Ok(())
}

fn path_endpoints(g: &ReductionGraph, alpha: &[usize], beta: &[usize]) -> Result<(usize, usize), PlanarError> {
    let first = alpha.first().or(beta.first());
    let (s, t) = match (first, alpha.last().or(beta.last())) {
        (Some(&a), Some(&b)) => (g.edges[a].source, g.edges[b].target),
        _ => return Err(PlanarError::NotAPath("empty paths".into())),
    };
    check_path(g, alpha, s, t, "alpha")?;
    check_path(g, beta, s, t, "beta")?;
    Ok((s, t))
}

fn usable_span(g: &ReductionGraph, s: usize, t: usize) -> Result<Span, PlanarError> {
    let span = g.span(s, t);
    if !span.complete {
        return Err(PlanarError::IncompleteSpan);
    }
    if !span.acyclic {
        return Err(PlanarError::CyclicSpan);
    }
    Ok(span)
}

/// All subdivisions of the pair `⟨alpha, beta⟩` in `g`, in a deterministic order.
pub fn enumerate_subdivisions(
    g: &ReductionGraph,
    alpha: &[usize],
    beta: &[usize],
    lim: &Limits,
) -> Result<Vec<Subdivision>, PlanarError> {
    let (s, t) = path_endpoints(g, alpha, beta)?;
    let span = usable_span(g, s, t)?;
    let base: BTreeSet<usize> = alpha.iter().chain(beta).copied().collect();
    let others: Vec<usize> = span.edges.iter().copied().filter(|e| !base.contains(e)).collect();
    if others.len() > 20 {
        return Err(PlanarError::TooLarge(format!("{} optional edges in the span", others.len())));
    }
    let subsets: Vec<u64> = (0..(1u64 << others.len())).collect();
    let results = par::map(&subsets, |&mask| {
        let mut edges = base.clone();
        for (k, &e) in others.iter().enumerate() {
            if mask & (1 << k) != 0 {
                edges.insert(e);
            }
        }
        if !covered(g, &edges, s, t) {
            return Ok(Vec::new());
        }
        let mut budget = lim.max_search_states;
        embeddings(g, s, t, alpha, beta, &edges, &mut budget, false)
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    out.sort();
    Ok(out)
}

/// The first planar embedding of `edges` with boundary `alpha` (left) and
/// `beta` (right), if any.
pub fn first_embedding(
    g: &ReductionGraph,
    alpha: &[usize],
    beta: &[usize],
    edges: &BTreeSet<usize>,
    lim: &Limits,
) -> Result<Option<Subdivision>, PlanarError> {
    let (s, t) = path_endpoints(g, alpha, beta)?;
    let mut budget = lim.max_search_states;
    Ok(embeddings(g, s, t, alpha, beta, edges, &mut budget, true)?.into_iter().next())
}

/// Every edge of `edges` lies on an `s → t` path inside `edges`.
pub fn covered(g: &ReductionGraph, edges: &BTreeSet<usize>, s: usize, t: usize) -> bool {
    let reach = |start: usize, fwd: bool| -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut q = VecDeque::from([start]);
        while let Some(v) = q.pop_front() {
            for &e in edges {
                let (a, b) = (g.edges[e].source, g.edges[e].target);
                let (from, to) = if fwd { (a, b) } else { (b, a) };
                if from == v && seen.insert(to) {
                    q.push_back(to);
                }
            }
        }
        seen
    };
    let f = reach(s, true);
    let b = reach(t, false);
    edges.iter().all(|&e| f.contains(&g.edges[e].source) && b.contains(&g.edges[e].target))
}

fn constrained_perms(items: &[usize], first: Option<usize>, last: Option<usize>) -> Vec<Vec<usize>> {
    if let (Some(a), Some(b)) = (first, last) {
        if a == b && items.len() > 1 {
            return Vec::new();
        }
    }
    let middle: Vec<usize> = items.iter().copied().filter(|&e| Some(e) != first && Some(e) != last).collect();
    let mut out = Vec::new();
    permute(&mut middle.clone(), 0, &mut |p| {
        let mut v = Vec::with_capacity(items.len());
        v.extend(first);
        v.extend_from_slice(p);
        if last != first {
            v.extend(last);
        }
        out.push(v);
    });
    out
}

fn permute(xs: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == xs.len() {
        f(xs);
        return;
    }
    for i in k..xs.len() {
        xs.swap(k, i);
        permute(xs, k + 1, f);
        xs.swap(k, i);
    }
}

/// All planar rotation systems of the edge set with `alpha` leftmost and
/// `beta` rightmost. `budget` bounds the number of rotation systems tried.
#[allow(clippy::too_many_arguments)]
fn embeddings(
    g: &ReductionGraph,
    s: usize,
    t: usize,
    alpha: &[usize],
    beta: &[usize],
    edges: &BTreeSet<usize>,
    budget: &mut usize,
    first_only: bool,
) -> Result<Vec<Subdivision>, PlanarError> {
    let mut outs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut ins: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in edges {
        outs.entry(g.edges[e].source).or_default().push(e);
        ins.entry(g.edges[e].target).or_default().push(e);
    }
    let alpha_set: BTreeSet<usize> = alpha.iter().copied().collect();
    let beta_set: BTreeSet<usize> = beta.iter().copied().collect();
    let pick = |list: &[usize], set: &BTreeSet<usize>| list.iter().copied().find(|e| set.contains(e));
    // Choice lists, one per (vertex, direction).
    let mut slots: Vec<(usize, bool, Vec<Vec<usize>>)> = Vec::new();
    for (&v, list) in &outs {
        let perms = constrained_perms(list, pick(list, &alpha_set), pick(list, &beta_set));
        if perms.is_empty() {
            return Ok(Vec::new());
        }
        slots.push((v, true, perms));
    }
    for (&v, list) in &ins {
        let perms = constrained_perms(list, pick(list, &alpha_set), pick(list, &beta_set));
        if perms.is_empty() {
            return Ok(Vec::new());
        }
        slots.push((v, false, perms));
    }
    let mut choice = vec![0usize; slots.len()];
    let mut out = Vec::new();
    loop {
        if *budget == 0 {
            return Err(PlanarError::TooLarge("rotation systems".into()));
        }
        *budget -= 1;
        let mut out_order = BTreeMap::new();
        let mut in_order = BTreeMap::new();
        for (k, (v, is_out, perms)) in slots.iter().enumerate() {
            let p = perms[choice[k]].clone();
            if *is_out {
                out_order.insert(*v, p);
            } else {
                in_order.insert(*v, p);
            }
        }
        if let Some(sub) = build(g, s, t, alpha, beta, edges, out_order, in_order)? {
            out.push(sub);
            if first_only {
                return Ok(out);
            }
        }
        // Odometer increment.
        let mut k = 0;
        loop {
            if k == slots.len() {
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < slots[k].2.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Traces faces of a rotation system; returns a subdivision if the system is
/// planar with the required outer boundary.
#[allow(clippy::too_many_arguments)]
fn build(
    g: &ReductionGraph,
    s: usize,
    t: usize,
    alpha: &[usize],
    beta: &[usize],
    edges: &BTreeSet<usize>,
    out_order: BTreeMap<usize, Vec<usize>>,
    in_order: BTreeMap<usize, Vec<usize>>,
) -> Result<Option<Subdivision>, PlanarError> {
    let mut cw: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let vertices: BTreeSet<usize> = out_order.keys().chain(in_order.keys()).copied().collect();
    for &v in &vertices {
        let mut r: Vec<usize> = out_order.get(&v).map(|o| o.iter().rev().copied().collect()).unwrap_or_default();
        r.extend(in_order.get(&v).cloned().unwrap_or_default());
        cw.insert(v, r);
    }
    // Dart = (edge, forward).
    let next = |(e, fwd): (usize, bool)| -> (usize, bool) {
        let v = if fwd { g.edges[e].target } else { g.edges[e].source };
        let rot = &cw[&v];
        let i = rot.iter().position(|&x| x == e).expect("edge in rotation");
        let e2 = rot[(i + 1) % rot.len()];
        (e2, g.edges[e2].source == v)
    };
    let mut seen: BTreeSet<(usize, bool)> = BTreeSet::new();
    let mut orbits: Vec<Vec<(usize, bool)>> = Vec::new();
    for &e in edges {
        for fwd in [true, false] {
            if seen.contains(&(e, fwd)) {
                continue;
            }
            let mut orbit = Vec::new();
            let mut d = (e, fwd);
            while seen.insert(d) {
                orbit.push(d);
                d = next(d);
            }
            orbits.push(orbit);
        }
    }
    if vertices.len() as i64 - edges.len() as i64 + orbits.len() as i64 != 2 {
        return Ok(None);
    }
    let outer_start = (beta[0], true);
    let expected: BTreeSet<(usize, bool)> =
        beta.iter().map(|&e| (e, true)).chain(alpha.iter().map(|&e| (e, false))).collect();
    let mut faces = Vec::new();
    let mut outer_ok = false;
    for orbit in &orbits {
        if orbit.contains(&outer_start) {
            let got: BTreeSet<(usize, bool)> = orbit.iter().copied().collect();
            outer_ok = got == expected && orbit.len() == expected.len();
            continue;
        }
        faces.push(face_of_orbit(g, orbit)?);
    }
    if !outer_ok {
        return Ok(None);
    }
    faces.sort();
    Ok(Some(Subdivision {
        source: s,
        target: t,
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
        edges: edges.clone(),
        out_order,
        in_order,
        face_count: orbits.len(),
        faces,
    }))
}

fn face_of_orbit(g: &ReductionGraph, orbit: &[(usize, bool)]) -> Result<Face, PlanarError> {
    let n = orbit.len();
    let starts: Vec<usize> = (0..n).filter(|&i| orbit[i].1 && !orbit[(i + n - 1) % n].1).collect();
    let [start] = starts.as_slice() else { return Err(PlanarError::NonMonotoneFace) };
    let rotated: Vec<(usize, bool)> = (0..n).map(|k| orbit[(start + k) % n]).collect();
    let split = rotated.iter().position(|d| !d.1).ok_or(PlanarError::NonMonotoneFace)?;
    let left: Vec<usize> = rotated[..split].iter().map(|d| d.0).collect();
    let mut right: Vec<usize> = rotated[split..].iter().map(|d| d.0).collect();
    right.reverse();
    let source = g.edges[left[0]].source;
    let target = g.edges[*left.last().unwrap()].target;
    if g.edges[right[0]].source != source || g.edges[*right.last().unwrap()].target != target {
        return Err(PlanarError::NonMonotoneFace);
    }
    Ok(Face { left, right, source, target })
}

/// Interior faces of a subdivision.
pub fn faces_of(sub: &Subdivision) -> &[Face] {
    &sub.faces
}

/// `s1 ⪯ s2`: `s1` is obtained from `s2` by deleting edges, with the
/// surviving edges in the same left-to-right orders.
pub fn refinement_leq(s1: &Subdivision, s2: &Subdivision) -> bool {
    if s1.alpha != s2.alpha || s1.beta != s2.beta || !s1.edges.is_subset(&s2.edges) {
        return false;
    }
    let restrict = |order: &BTreeMap<usize, Vec<usize>>, keep: &BTreeSet<usize>| -> BTreeMap<usize, Vec<usize>> {
        order
            .iter()
            .map(|(&v, es)| (v, es.iter().copied().filter(|e| keep.contains(e)).collect::<Vec<_>>()))
            .filter(|(_, es)| !es.is_empty())
            .collect()
    };
    restrict(&s2.out_order, &s1.edges) == s1.out_order && restrict(&s2.in_order, &s1.edges) == s1.in_order
}

pub fn maximal_subdivisions(subs: &[Subdivision]) -> Vec<Subdivision> {
    subs.iter()
        .filter(|a| !subs.iter().any(|b| b != *a && refinement_leq(a, b) && !refinement_leq(b, a)))
        .cloned()
        .collect()
}

fn interior(g: &ReductionGraph, p: &[usize]) -> BTreeSet<usize> {
    p.iter().skip(1).map(|&e| g.edges[e].source).collect()
}

/// Whether the subdivision has an undirected connection between interior
/// vertices of its two boundary paths avoiding the endpoints.
pub fn has_zigzag(g: &ReductionGraph, sub: &Subdivision) -> bool {
    let a = interior(g, &sub.alpha);
    let b = interior(g, &sub.beta);
    if a.is_empty() || b.is_empty() {
        return false;
    }
    let blocked = BTreeSet::from([sub.source, sub.target]);
    undirected_path(g, &sub.edges, &a, &b, &blocked).is_some()
}

/// Shortest undirected path (as edge list) from a vertex of `from` to a vertex
/// of `to`, avoiding `blocked` vertices.
fn undirected_path(
    g: &ReductionGraph,
    edges: &BTreeSet<usize>,
    from: &BTreeSet<usize>,
    to: &BTreeSet<usize>,
    blocked: &BTreeSet<usize>,
) -> Option<Vec<usize>> {
    if !from.is_disjoint(to) {
        return Some(Vec::new());
    }
    let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &e in edges {
        let (x, y) = (g.edges[e].source, g.edges[e].target);
        if blocked.contains(&x) || blocked.contains(&y) {
            continue;
        }
        adj.entry(x).or_default().push((y, e));
        adj.entry(y).or_default().push((x, e));
    }
    let mut prev: BTreeMap<usize, Option<(usize, usize)>> = from.iter().map(|&v| (v, None)).collect();
    let mut q: VecDeque<usize> = from.iter().copied().collect();
    while let Some(v) = q.pop_front() {
        if to.contains(&v) {
            let mut path = Vec::new();
            let mut x = v;
            while let Some(Some((p, e))) = prev.get(&x) {
                path.push(*e);
                x = *p;
            }
            path.reverse();
            return Some(path);
        }
        for &(w, edge) in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if let std::collections::btree_map::Entry::Vacant(slot) = prev.entry(w) {
                slot.insert(Some((v, edge)));
                q.push_back(w);
            }
        }
    }
    None
}

/// Shortest directed path inside `span` between two vertices.
fn directed_path(g: &ReductionGraph, span: &Span, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut prev: BTreeMap<usize, Option<usize>> = BTreeMap::from([(from, None)]);
    let mut q = VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        if v == to {
            let mut path = Vec::new();
            let mut x = v;
            while let Some(Some(e)) = prev.get(&x) {
                path.push(*e);
                x = g.edges[*e].source;
            }
            path.reverse();
            return Some(path);
        }
        for &e in g.out_edges(v) {
            let w = g.edges[e].target;
            if span.vertices.contains(&w) && !prev.contains_key(&w) {
                prev.insert(w, Some(e));
                q.push_back(w);
            }
        }
    }
    None
}

/// A parallel pair is a diamond iff none of its subdivisions has a zig-zag.
pub fn is_diamond(g: &ReductionGraph, alpha: &[usize], beta: &[usize], lim: &Limits) -> Result<bool, PlanarError> {
    let (s, t) = path_endpoints(g, alpha, beta)?;
    let span = usable_span(g, s, t)?;
    diamond_in_span(g, &span, alpha, beta, lim)
}

fn diamond_in_span(
    g: &ReductionGraph,
    span: &Span,
    alpha: &[usize],
    beta: &[usize],
    lim: &Limits,
) -> Result<bool, PlanarError> {
    let (s, t) = (span.source, span.target);
    let a = interior(g, alpha);
    let b = interior(g, beta);
    if !a.is_disjoint(&b) {
        return Ok(false);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(true);
    }
    let blocked = BTreeSet::from([s, t]);
    let span_edges: BTreeSet<usize> = span.edges.iter().copied().collect();
    let Some(chord) = undirected_path(g, &span_edges, &a, &b, &blocked) else {
        return Ok(true);
    };
    // Try the shortest connection with shortest supporting paths first.
    let mut edges: BTreeSet<usize> = alpha.iter().chain(beta).copied().collect();
    for &e in &chord {
        let (x, y) = (g.edges[e].source, g.edges[e].target);
        edges.insert(e);
        if let (Some(p), Some(q)) = (directed_path(g, span, s, x), directed_path(g, span, y, t)) {
            edges.extend(p);
            edges.extend(q);
        }
    }
    let mut budget = lim.max_search_states;
    if covered(g, &edges, s, t) && !embeddings(g, s, t, alpha, beta, &edges, &mut budget, true)?.is_empty() {
        return Ok(false);
    }
    let subs = enumerate_subdivisions(g, alpha, beta, lim)?;
    Ok(!subs.iter().any(|sub| has_zigzag(g, sub)))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diamond {
    pub target: usize,
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiamondScan {
    pub diamonds: Vec<Diamond>,
    /// Some target was skipped or some path set was cut off by the limits.
    pub truncated: bool,
    pub targets_scanned: usize,
}

/// All diamonds with the given source, over every target whose span is fully
/// explored, one per unordered pair of paths.
pub fn enumerate_diamonds(g: &ReductionGraph, source: usize, lim: &Limits) -> DiamondScan {
    let targets: Vec<usize> = g.reachable_from(source).into_iter().filter(|&v| v != source).collect();
    let per_target = par::map(&targets, |&t| diamonds_to(g, source, t, lim));
    let mut scan = DiamondScan::default();
    for r in per_target {
        match r {
            Some((ds, trunc)) => {
                scan.targets_scanned += 1;
                scan.truncated |= trunc;
                scan.diamonds.extend(ds);
            }
            None => scan.truncated = true,
        }
    }
    scan.diamonds.sort();
    scan
}

fn diamonds_to(g: &ReductionGraph, s: usize, t: usize, lim: &Limits) -> Option<(Vec<Diamond>, bool)> {
    let span = g.span(s, t);
    if !span.complete || !span.acyclic {
        return None;
    }
    let paths = g.hom_paths(s, t, lim);
    let mut truncated = paths.truncated;
    // Component of each path's interior in the span minus its endpoints.
    let comp = components(g, &span);
    let class: Vec<Option<usize>> = paths.paths.iter().map(|p| interior(g, p).iter().next().map(|v| comp[v])).collect();
    let mut out = Vec::new();
    for i in 0..paths.paths.len() {
        for j in (i + 1)..paths.paths.len() {
            let (p, q) = (&paths.paths[i], &paths.paths[j]);
            let diamond = match (class[i], class[j]) {
                (None, _) | (_, None) => true,
                (Some(x), Some(y)) if x != y => true,
                _ => match diamond_in_span(g, &span, p, q, lim) {
                    Ok(d) => d,
                    Err(_) => {
                        truncated = true;
                        false
                    }
                },
            };
            if diamond {
                out.push(Diamond { target: t, alpha: p.clone(), beta: q.clone() });
            }
        }
    }
    Some((out, truncated))
}

fn components(g: &ReductionGraph, span: &Span) -> BTreeMap<usize, usize> {
    let blocked = [span.source, span.target];
    let mut comp: BTreeMap<usize, usize> = BTreeMap::new();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in &span.edges {
        let (x, y) = (g.edges[e].source, g.edges[e].target);
        if blocked.contains(&x) || blocked.contains(&y) {
            continue;
        }
        adj.entry(x).or_default().push(y);
        adj.entry(y).or_default().push(x);
    }
    let mut next_id = 0;
    for &v in &span.vertices {
        if blocked.contains(&v) || comp.contains_key(&v) {
            continue;
        }
        let mut q = VecDeque::from([v]);
        comp.insert(v, next_id);
        while let Some(x) = q.pop_front() {
            for &y in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if let std::collections::btree_map::Entry::Vacant(e) = comp.entry(y) {
                    e.insert(next_id);
                    q.push_back(y);
                }
            }
        }
        next_id += 1;
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_structure;
    use crate::rewriting::TwoStructure;

    /// A square S ⇒ T through L and R, plus the given extra rules.
    fn square(extra: &str) -> (TwoStructure, ReductionGraph) {
        let text = format!(
            "signature:\n  S : 0\n  L : 0\n  R : 0\n  M : 0\n  T : 0\nrules:\n  sl : S -> L\n  sr : S -> R\n  lt : L -> T\n  rt : R -> T\n{}",
            extra
        );
        let s = parse_structure(&text).unwrap();
        let g = crate::graph::explore(&[s.parse_canonical("S").unwrap()], &s, &Limits::default());
        (s, g)
    }

    fn edge(s: &TwoStructure, g: &ReductionGraph, a: &str, b: &str) -> usize {
        let (a, b) =
            (g.vertex(&s.parse_canonical(a).unwrap()).unwrap(), g.vertex(&s.parse_canonical(b).unwrap()).unwrap());
        (0..g.edges.len()).find(|&e| g.edges[e].source == a && g.edges[e].target == b).unwrap()
    }

    fn legs(s: &TwoStructure, g: &ReductionGraph) -> (Vec<usize>, Vec<usize>) {
        (vec![edge(s, g, "S", "L"), edge(s, g, "L", "T")], vec![edge(s, g, "S", "R"), edge(s, g, "R", "T")])
    }

    #[test]
    fn single_edge_pair() {
        let (s, g) = square("");
        let e = vec![edge(&s, &g, "S", "L")];
        let subs = enumerate_subdivisions(&g, &e, &e, &Limits::default()).unwrap();
        assert_eq!(subs.len(), 1);
        assert!(faces_of(&subs[0]).is_empty());
        assert!(subs[0].euler_ok());
        assert!(is_diamond(&g, &e, &e, &Limits::default()).unwrap());
    }

    #[test]
    fn bare_square_is_one_face() {
        let (s, g) = square("");
        let (a, b) = legs(&s, &g);
        let subs = enumerate_subdivisions(&g, &a, &b, &Limits::default()).unwrap();
        assert_eq!(subs.len(), 1);
        let f = &faces_of(&subs[0])[0];
        assert_eq!((f.left.clone(), f.right.clone()), (a.clone(), b.clone()));
        assert!(refinement_leq(&subs[0], &subs[0]));
        assert_eq!(maximal_subdivisions(&subs), subs);
        assert!(is_diamond(&g, &a, &b, &Limits::default()).unwrap());
    }

    #[test]
    fn interior_route_splits_the_face() {
        let (s, g) = square("  sm : S -> M\n  mt : M -> T\n");
        let (a, b) = legs(&s, &g);
        let subs = enumerate_subdivisions(&g, &a, &b, &Limits::default()).unwrap();
        assert_eq!(subs.len(), 2);
        let (bare, full) =
            if subs[0].edges.len() < subs[1].edges.len() { (&subs[0], &subs[1]) } else { (&subs[1], &subs[0]) };
        assert_eq!(faces_of(full).len(), 2);
        assert!(full.euler_ok() && bare.euler_ok());
        assert!(refinement_leq(bare, full));
        assert!(!refinement_leq(full, bare));
        assert_eq!(maximal_subdivisions(&subs), vec![full.clone()]);
        // The middle route touches no interior vertex of either leg.
        assert!(!has_zigzag(&g, full));
        assert!(is_diamond(&g, &a, &b, &Limits::default()).unwrap());
    }

    #[test]
    fn cross_edge_is_a_zigzag() {
        let (s, g) = square("  lr : L -> R\n");
        let (a, b) = legs(&s, &g);
        let subs = enumerate_subdivisions(&g, &a, &b, &Limits::default()).unwrap();
        assert!(subs.iter().any(|sub| has_zigzag(&g, sub)));
        assert!(!is_diamond(&g, &a, &b, &Limits::default()).unwrap());
        let scan = enumerate_diamonds(&g, g.vertex(&s.parse_canonical("S").unwrap()).unwrap(), &Limits::default());
        // The outer square is not among them.
        assert!(scan.diamonds.iter().all(|d| !(d.alpha == a && d.beta == b) && !(d.alpha == b && d.beta == a)));
    }

    #[test]
    fn mismatched_ends_are_rejected() {
        let (s, g) = square("");
        let (a, _) = legs(&s, &g);
        let other = vec![edge(&s, &g, "S", "R")];
        assert!(enumerate_subdivisions(&g, &a, &other, &Limits::default()).is_err());
    }
}
