//! Reduction graphs: bounded exploration, path enumeration between vertices,
//! spans, quasicycle detection and ranking certificates.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::par;
use crate::rewriting::TwoStructure;
use crate::steps::{PathStep, Step, Stepper};
use crate::terms::{canonicalize, CanonicalTerm, ObjectTheory, Signature, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_vertices: usize,
    pub max_depth: usize,
    pub max_path_length: usize,
    pub unit_budget: usize,
    pub recursion_depth: usize,
    /// Cap on states visited by path and subdivision searches.
    pub max_search_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vertices: 20_000,
            max_depth: 64,
            max_path_length: 24,
            unit_budget: 4,
            recursion_depth: 3,
            max_search_states: 200_000,
        }
    }
}

impl Limits {
    /// Defaults with the unit budget set to the largest rule pattern's
    /// variable count.
    pub fn for_structure(s: &TwoStructure) -> Self {
        let budget = s.rules.iter().map(|r| r.vars.len()).max().unwrap_or(0);
        Limits { unit_budget: budget, ..Limits::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub step: Step,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReductionGraph {
    pub vertices: Vec<CanonicalTerm>,
    pub edges: Vec<Edge>,
    /// Vertices whose out-edges may be incomplete.
    pub frontier: BTreeSet<usize>,
    /// BFS depth of each vertex.
    pub depth: Vec<usize>,
    #[serde(skip)]
    index: HashMap<CanonicalTerm, usize>,
    #[serde(skip)]
    out: Vec<Vec<usize>>,
    #[serde(skip)]
    inc: Vec<Vec<usize>>,
    /// Symbol weights under which no step decreases the weight of a term,
    /// so no vertex can reach a lighter one.
    pub weights: Option<Weights>,
}

impl ReductionGraph {
    pub fn vertex(&self, t: &CanonicalTerm) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn is_complete(&self) -> bool {
        self.frontier.is_empty()
    }

    fn add_vertex(&mut self, t: CanonicalTerm, depth: usize) -> usize {
        let id = self.vertices.len();
        self.index.insert(t.clone(), id);
        self.vertices.push(t);
        self.out.push(Vec::new());
        self.inc.push(Vec::new());
        self.depth.push(depth);
        id
    }

    fn add_edge(&mut self, source: usize, target: usize, step: Step) {
        let id = self.edges.len();
        self.edges.push(Edge { source, target, step });
        self.out[source].push(id);
        self.inc[target].push(id);
    }

    pub fn path_step(&self, e: usize) -> PathStep {
        let edge = &self.edges[e];
        PathStep {
            source: self.vertices[edge.source].clone(),
            rule: edge.step.rule.clone(),
            subst: edge.step.subst.clone(),
            target: self.vertices[edge.target].clone(),
        }
    }

    pub fn path_steps(&self, path: &[usize]) -> Vec<PathStep> {
        path.iter().map(|&e| self.path_step(e)).collect()
    }

    pub fn reachable_from(&self, v: usize) -> BTreeSet<usize> {
        self.closure(v, |g, x| g.out[x].iter().map(|&e| g.edges[e].target).collect())
    }

    pub fn coreachable_to(&self, v: usize) -> BTreeSet<usize> {
        self.closure(v, |g, x| g.inc[x].iter().map(|&e| g.edges[e].source).collect())
    }

    fn closure(&self, v: usize, next: impl Fn(&Self, usize) -> Vec<usize>) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([v]);
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for y in next(self, x) {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// The subgraph of vertices lying on some path `src → tgt`.
    pub fn span(&self, src: usize, tgt: usize) -> Span {
        let fwd = self.reachable_from(src);
        let bwd = self.coreachable_to(tgt);
        let vertices: BTreeSet<usize> = fwd.intersection(&bwd).copied().collect();
        let edges: Vec<usize> = (0..self.edges.len())
            .filter(|&e| vertices.contains(&self.edges[e].source) && vertices.contains(&self.edges[e].target))
            .collect();
        let complete = fwd.iter().filter(|v| self.frontier.contains(v)).all(|&v| {
            self.weights.as_ref().is_some_and(|w| {
                let (fw, tw) = (w.weight(self.vertices[v].term()), w.weight(self.vertices[tgt].term()));
                fw > tw || (w.strict && v != tgt && fw == tw)
            })
        });
        let acyclic = is_acyclic(&vertices, &edges, self);
        Span { source: src, target: tgt, vertices, edges, complete, acyclic }
    }

    /// All edge paths `src → tgt` of length at most `lim.max_path_length`,
    /// sorted by their printed step sequence.
    pub fn hom_paths(&self, src: usize, tgt: usize, lim: &Limits) -> PathSet {
        let useful = self.coreachable_to(tgt);
        let mut out = Vec::new();
        let mut truncated = false;
        let mut states = 0usize;
        let mut stack = vec![(src, Vec::<usize>::new())];
        while let Some((v, path)) = stack.pop() {
            states += 1;
            if states > lim.max_search_states {
                truncated = true;
                break;
            }
            if v == tgt {
                out.push(path.clone());
            }
            if path.len() >= lim.max_path_length {
                if self.out[v].iter().any(|&e| useful.contains(&self.edges[e].target)) {
                    truncated = true;
                }
                continue;
            }
            for &e in self.out[v].iter().rev() {
                let w = self.edges[e].target;
                if useful.contains(&w) {
                    let mut p = path.clone();
                    p.push(e);
                    stack.push((w, p));
                }
            }
        }
        out.sort_by_cached_key(|p| self.path_steps(p));
        PathSet { paths: out, truncated }
    }

    /// Graphviz rendering, vertices labelled with printed terms and edges with
    /// `label@position`.
    pub fn to_dot(&self, sig: &Signature) -> String {
        let mut s = String::from("digraph reduction {\n  rankdir=LR;\n");
        for (i, t) in self.vertices.iter().enumerate() {
            let style = if self.frontier.contains(&i) { ", style=dashed" } else { "" };
            s.push_str(&format!("  v{} [label=\"{}\"{}];\n", i, dot_escape(&sig.print(t)), style));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "  v{} -> v{} [label=\"{}\"];\n",
                e.source,
                e.target,
                dot_escape(&step_label(&e.step))
            ));
        }
        s.push_str("}\n");
        s
    }
}

pub fn step_label(step: &Step) -> String {
    let pos: Vec<String> = step.position.iter().map(|p| p.to_string()).collect();
    let mut label = format!("{}@{}", step.rule, if pos.is_empty() { "ε".to_string() } else { pos.join(".") });
    if let Some((a, l)) = step.span {
        label.push_str(&format!("[{}..{}]", a, a + l));
    }
    label
}

pub(crate) fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn is_acyclic(vertices: &BTreeSet<usize>, edges: &[usize], g: &ReductionGraph) -> bool {
    let mut indeg: BTreeMap<usize, usize> = vertices.iter().map(|&v| (v, 0)).collect();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in edges {
        let (a, b) = (g.edges[e].source, g.edges[e].target);
        *indeg.get_mut(&b).unwrap() += 1;
        adj.entry(a).or_default().push(b);
    }
    let mut queue: Vec<usize> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indeg.get_mut(&w).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push(w);
            }
        }
    }
    seen == vertices.len()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub source: usize,
    pub target: usize,
    pub vertices: BTreeSet<usize>,
    pub edges: Vec<usize>,
    /// No truncated vertex can lie on a path from source to target.
    pub complete: bool,
    pub acyclic: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSet {
    pub paths: Vec<Vec<usize>>,
    pub truncated: bool,
}

/// Weighted term size: each symbol node counts its weight, leaves count 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Weights {
    pub symbols: BTreeMap<String, u64>,
    /// Every step strictly increases the weight.
    pub strict: bool,
}

impl Weights {
    pub fn weight(&self, t: &Term) -> u64 {
        match t {
            Term::App(f, args) if !args.is_empty() => {
                self.symbols.get(f).copied().unwrap_or(1) + args.iter().map(|a| self.weight(a)).sum::<u64>()
            }
            _ => 1,
        }
    }

    /// Least weight gain of a rule over all instances, if it never loses
    /// weight. Variables weigh at least 1 and extra right-hand copies only
    /// add, so the gain with every variable at weight 1 is the minimum.
    fn gain(&self, r: &crate::rewriting::Rule) -> Option<i64> {
        if r.vars.iter().any(|x| r.rhs.var_occurrences(x) < r.lhs.var_occurrences(x)) {
            return None;
        }
        let gain = self.weight(&r.rhs) as i64 - self.weight(&r.lhs) as i64;
        (gain >= 0).then_some(gain)
    }
}

/// Symbol weights in `1..=3` under which every rule is weight non-decreasing
/// on all instances, preferring weights that make every step strictly
/// heavier. Only for the empty object theory, where canonical forms are the
/// terms themselves.
pub fn monotone_weights(s: &TwoStructure) -> Option<Weights> {
    if !s.theory.is_empty() {
        return None;
    }
    let names: Vec<String> = s.sig.symbols.iter().filter(|(_, d)| d.arity > 0).map(|(n, _)| n.clone()).collect();
    let plain = Weights { symbols: names.iter().map(|n| (n.clone(), 1)).collect(), strict: false };
    let check = |w: &Weights| -> Option<bool> {
        let gains: Option<Vec<i64>> = s.rules.iter().map(|r| w.gain(r)).collect();
        gains.map(|g| g.iter().all(|&x| x > 0))
    };
    let plain_ok = check(&plain);
    if names.len() <= 8 {
        let mut choice = vec![1u64; names.len()];
        loop {
            let w = Weights { symbols: names.iter().cloned().zip(choice.iter().copied()).collect(), strict: false };
            if check(&w) == Some(true) {
                return Some(Weights { strict: true, ..w });
            }
            let mut k = 0;
            while k < choice.len() && choice[k] == 3 {
                choice[k] = 1;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
            choice[k] += 1;
        }
    }
    plain_ok.map(|_| plain)
}

/// True iff no step makes a term lighter under some symbol weighting (in
/// particular when no rule shrinks the term size).
pub fn size_monotone(s: &TwoStructure) -> bool {
    monotone_weights(s).is_some()
}

/// Breadth-first closure of `seeds` under single steps, bounded by `lim`.
/// Each BFS level is expanded in parallel and merged in vertex order, so the
/// result does not depend on the thread count.
pub fn explore(seeds: &[CanonicalTerm], s: &TwoStructure, lim: &Limits) -> ReductionGraph {
    explore_bounded(seeds, None, s, lim)
}

/// Like [`explore`], but when the structure has monotone weights, vertices
/// too heavy to lie on a path to `target` are left unexpanded (and marked as
/// frontier). Spans ending at `target` are the same as with [`explore`].
pub fn explore_toward(
    seeds: &[CanonicalTerm],
    target: &CanonicalTerm,
    s: &TwoStructure,
    lim: &Limits,
) -> ReductionGraph {
    explore_bounded(seeds, Some(target), s, lim)
}

fn explore_bounded(
    seeds: &[CanonicalTerm],
    target: Option<&CanonicalTerm>,
    s: &TwoStructure,
    lim: &Limits,
) -> ReductionGraph {
    let mut g = ReductionGraph { weights: monotone_weights(s), ..ReductionGraph::default() };
    let cap = match (target, &g.weights) {
        (Some(t), Some(w)) => Some((t.clone(), w.weight(t.term()), w.strict)),
        _ => None,
    };
    let weights = g.weights.clone();
    let too_heavy = |t: &CanonicalTerm| match (&cap, &weights) {
        (Some((goal, tw, strict)), Some(w)) => {
            let fw = w.weight(t.term());
            fw > *tw || (*strict && fw == *tw && t != goal)
        }
        _ => false,
    };
    let mut level = Vec::new();
    for t in seeds {
        if g.vertex(t).is_none() && g.vertices.len() < lim.max_vertices.max(1) {
            level.push(g.add_vertex(t.clone(), 0));
        }
    }
    let stepper = Stepper::new(s, lim.unit_budget);
    let mut depth = 0;
    while !level.is_empty() {
        let terms: Vec<CanonicalTerm> = level.iter().map(|&v| g.vertices[v].clone()).collect();
        let heavy: Vec<bool> = terms.iter().map(too_heavy).collect();
        let expanded = par::map(&terms, |t| if too_heavy(t) { Vec::new() } else { stepper.steps(t) });
        let mut next = Vec::new();
        for ((&v, steps), heavy) in level.iter().zip(expanded).zip(heavy) {
            if heavy {
                g.frontier.insert(v);
                continue;
            }
            if depth >= lim.max_depth {
                if !steps.is_empty() {
                    g.frontier.insert(v);
                }
                continue;
            }
            for step in steps {
                let w = match g.vertex(&step.target) {
                    Some(w) => w,
                    None if g.vertices.len() < lim.max_vertices => {
                        let w = g.add_vertex(step.target.clone(), depth + 1);
                        next.push(w);
                        w
                    }
                    None => {
                        g.frontier.insert(v);
                        continue;
                    }
                };
                g.add_edge(v, w, step);
            }
        }
        level = next;
        depth += 1;
    }
    g
}

/// A termination measure on canonical terms.
pub trait Ranking: Sync {
    fn name(&self) -> String;
    fn rank(&self, t: &CanonicalTerm) -> u64;
}

/// A ranking given by a plain function.
pub struct FnRanking<F> {
    pub name: String,
    pub f: F,
}

impl<F: Fn(&CanonicalTerm) -> u64 + Sync> Ranking for FnRanking<F> {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn rank(&self, t: &CanonicalTerm) -> u64 {
        (self.f)(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingCheck {
    pub ok: bool,
    pub terms_checked: usize,
    pub steps_checked: usize,
    /// `(source, rule, target)` of a step that does not decrease the rank.
    pub counterexample: Option<(CanonicalTerm, String, CanonicalTerm)>,
}

/// Checks that `r` strictly decreases across every step out of every term
/// in `terms`.
pub fn verify_ranking_on(
    s: &TwoStructure,
    r: &dyn Ranking,
    terms: &[CanonicalTerm],
    unit_budget: usize,
) -> RankingCheck {
    let stepper = Stepper::new(s, unit_budget);
    let results = par::map(terms, |t| {
        let rt = r.rank(t);
        let steps = stepper.steps(t);
        let bad =
            steps.iter().find(|st| r.rank(&st.target) >= rt).map(|st| (t.clone(), st.rule.clone(), st.target.clone()));
        (steps.len(), bad)
    });
    let steps_checked = results.iter().map(|(n, _)| n).sum();
    let counterexample = results.into_iter().find_map(|(_, b)| b);
    RankingCheck { ok: counterexample.is_none(), terms_checked: terms.len(), steps_checked, counterexample }
}

/// Checks `r` on every ground term of size at most `max_size` built from the
/// signature's symbols over the given leaves.
pub fn verify_ranking(
    s: &TwoStructure,
    r: &dyn Ranking,
    leaves: &[Term],
    max_size: usize,
    unit_budget: usize,
) -> RankingCheck {
    let terms = ground_terms(&s.sig, &s.theory, leaves, max_size);
    verify_ranking_on(s, r, &terms, unit_budget)
}

/// All canonical forms of ground terms of size ≤ `max_size` over `leaves`
/// and the signature's non-nullary symbols, sorted and duplicate-free.
pub fn ground_terms(sig: &Signature, th: &ObjectTheory, leaves: &[Term], max_size: usize) -> Vec<CanonicalTerm> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1] = leaves.to_vec();
    }
    let symbols: Vec<(&String, usize)> =
        sig.symbols.iter().filter(|(_, d)| d.arity > 0).map(|(n, d)| (n, d.arity)).collect();
    for size in 2..=max_size {
        let mut here = Vec::new();
        for (f, arity) in &symbols {
            for args in sized_tuples(&by_size, *arity, size - 1) {
                here.push(Term::App((*f).clone(), args));
            }
        }
        by_size[size] = here;
    }
    let set: BTreeSet<CanonicalTerm> = by_size.iter().flatten().map(|t| canonicalize(t, th)).collect();
    set.into_iter().collect()
}

fn sized_tuples(by_size: &[Vec<Term>], arity: usize, total: usize) -> Vec<Vec<Term>> {
    if arity == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(arity - 1) {
        for t in &by_size[first] {
            for mut rest in sized_tuples(by_size, arity - 1, total - first) {
                rest.insert(0, t.clone());
                out.push(rest);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    Ranking(String),
    ExhaustedAcyclic,
}

/// A cycle reachable from a seed: every vertex of the infinite chain that
/// walks around the cycle reaches the cycle's first vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasicycleWitness {
    /// Steps from a seed to the cycle.
    pub stem: Vec<PathStep>,
    /// Steps of the cycle, ending where they start.
    pub cycle: Vec<PathStep>,
    /// The common vertex reached by every chain element.
    pub target: CanonicalTerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuasicycleVerdict {
    Free(Certificate),
    Found(QuasicycleWitness),
    Unknown(String),
}

/// Looks for a quasicycle in the region explored from `seeds`.
pub fn detect_quasicycle(
    s: &TwoStructure,
    seeds: &[CanonicalTerm],
    lim: &Limits,
    ranking: Option<(&dyn Ranking, &[CanonicalTerm])>,
) -> QuasicycleVerdict {
    let g = explore(seeds, s, lim);
    if let Some(w) = find_cycle(&g) {
        return QuasicycleVerdict::Found(w);
    }
    if let Some((r, sample)) = ranking {
        let on_graph = g.edges.iter().all(|e| r.rank(&g.vertices[e.source]) > r.rank(&g.vertices[e.target]));
        if on_graph && verify_ranking_on(s, r, sample, lim.unit_budget).ok {
            return QuasicycleVerdict::Free(Certificate::Ranking(r.name()));
        }
    }
    if g.is_complete() {
        return QuasicycleVerdict::Free(Certificate::ExhaustedAcyclic);
    }
    QuasicycleVerdict::Unknown(format!(
        "exploration stopped at {} vertices with {} truncated vertices and no cycle; no ranking certificate",
        g.vertices.len(),
        g.frontier.len()
    ))
}

/// First directed cycle found by depth-first search from the seeds, with the
/// stem leading to it.
pub fn find_cycle(g: &ReductionGraph) -> Option<QuasicycleWitness> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let n = g.vertices.len();
    let mut mark = vec![Mark::New; n];
    let mut parent_edge: Vec<Option<usize>> = vec![None; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        mark[root] = Mark::Open;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < g.out[v].len() {
                let e = g.out[v][*i];
                *i += 1;
                let w = g.edges[e].target;
                match mark[w] {
                    Mark::New => {
                        mark[w] = Mark::Open;
                        parent_edge[w] = Some(e);
                        stack.push((w, 0));
                    }
                    Mark::Open => {
                        let mut cycle = vec![e];
                        let mut x = v;
                        while x != w {
                            let pe = parent_edge[x].expect("open vertex has a parent");
                            cycle.push(pe);
                            x = g.edges[pe].source;
                        }
                        cycle.reverse();
                        let mut stem = Vec::new();
                        let mut x = w;
                        while let Some(pe) = parent_edge[x] {
                            stem.push(pe);
                            x = g.edges[pe].source;
                        }
                        stem.reverse();
                        return Some(QuasicycleWitness {
                            stem: g.path_steps(&stem),
                            cycle: g.path_steps(&cycle),
                            target: g.vertices[w].clone(),
                        });
                    }
                    Mark::Done => {}
                }
            } else {
                mark[v] = Mark::Done;
                stack.pop();
            }
        }
    }
    None
}
