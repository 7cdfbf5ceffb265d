//! Commutativity of parallel reduction paths: a face-recognition search over
//! the paths of the reduction graph, and an independent generative oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{explore, explore_toward, Limits, ReductionGraph};
use crate::planar::{covered, first_embedding, PlanarError, Subdivision};
use crate::rewriting::{Morphism, MorphismError, TwoStructure};
use crate::steps::{context_of, fill, sites, Justification, PathStep, Stepper};
use crate::terms::{match_modulo, CanonicalTerm, Substitution, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoherenceError {
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error("the span contains a directed cycle, so the structure is not quasicycle-free there")]
    Cyclic,
    #[error("step {0} of a path is not an edge of the reduction graph")]
    MissingEdge(String),
    #[error(transparent)]
    Planar(#[from] PlanarError),
}

/// One face replacement: `segment` of the current path replaced by `replacement`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceMove {
    pub segment: Vec<PathStep>,
    pub replacement: Vec<PathStep>,
    pub justification: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EqualWitness {
    /// Face replacements turning the first path into the second.
    pub moves: Vec<FaceMove>,
    /// Planar embedding of the union of all paths visited by the moves, when
    /// one exists with the two paths as its boundary.
    pub subdivision: Option<Subdivision>,
    /// One justification per interior face of `subdivision`, present when
    /// every face is a single generating equation.
    pub faces: Option<Vec<Justification>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub paths_in_span: usize,
    pub class_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Equal(EqualWitness),
    NotEqual(SearchRecord),
    ResourceExhausted(String),
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal(_))
    }
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Equal(_) => "Equal",
            Verdict::NotEqual(_) => "NotEqual",
            Verdict::ResourceExhausted(_) => "ResourceExhausted",
        }
    }
}

/// Longest face side that any generating equation can produce.
pub fn max_face_len(s: &TwoStructure) -> usize {
    let nat = s
        .rules
        .iter()
        .flat_map(|r| r.vars.iter().map(move |x| 1 + r.lhs.var_occurrences(x).max(r.rhs.var_occurrences(x))))
        .max()
        .unwrap_or(0);
    let ax = s
        .axioms
        .iter()
        .flat_map(|a| [&a.lhs, &a.rhs])
        .filter_map(|m| s.linearize(m).ok())
        .flat_map(|ls| ls.into_iter().map(|l| l.len()))
        .max()
        .unwrap_or(0);
    2.max(nat).max(ax)
}

type FaceCache = HashMap<(Vec<usize>, Vec<usize>), Option<Justification>>;
type LocalPaths = HashMap<(usize, usize), Vec<Vec<usize>>>;

/// A path one face replacement away: `(new path, start, end, replacement, why)`.
pub type Neighbour = (Vec<usize>, usize, usize, Vec<usize>, Justification);

/// Face checks and path lists shared across searches in one graph.
pub struct FaceOracle<'a> {
    pub s: &'a TwoStructure,
    pub g: &'a ReductionGraph,
    pub lim: Limits,
    pub face_len: usize,
    faces: Mutex<FaceCache>,
    local_paths: Mutex<LocalPaths>,
}

impl<'a> FaceOracle<'a> {
    pub fn new(s: &'a TwoStructure, g: &'a ReductionGraph, lim: &Limits) -> Self {
        FaceOracle {
            s,
            g,
            lim: lim.clone(),
            face_len: max_face_len(s),
            faces: Mutex::new(HashMap::new()),
            local_paths: Mutex::new(HashMap::new()),
        }
    }

    fn target_of(&self, path: &[usize], start: usize) -> usize {
        path.last().map_or(start, |&e| self.g.edges[e].target)
    }

    fn short_paths(&self, u: usize, w: usize) -> Vec<Vec<usize>> {
        if let Some(p) = self.local_paths.lock().unwrap().get(&(u, w)) {
            return p.clone();
        }
        let lim = Limits { max_path_length: self.face_len, ..self.lim.clone() };
        let ps = self.g.hom_paths(u, w, &lim).paths;
        self.local_paths.lock().unwrap().insert((u, w), ps.clone());
        ps
    }

    /// Justification of the face formed by two parallel edge paths.
    pub fn face(&self, a: &[usize], b: &[usize]) -> Option<Justification> {
        let key = if a <= b { (a.to_vec(), b.to_vec()) } else { (b.to_vec(), a.to_vec()) };
        if let Some(j) = self.faces.lock().unwrap().get(&key) {
            return j.clone();
        }
        let first = a.first().or(b.first()).expect("non-empty face");
        let u = self.g.edges[*first].source;
        let w = self.target_of(a, u);
        let j = self.s.face_of_paths(
            &self.g.vertices[u],
            &self.g.vertices[w],
            &self.g.path_steps(a),
            &self.g.path_steps(b),
            self.lim.unit_budget,
        );
        self.faces.lock().unwrap().insert(key, j.clone());
        j
    }

    /// All paths reachable from `path` by one justified face replacement.
    pub fn neighbours(&self, path: &[usize], start: usize) -> Vec<Neighbour> {
        let mut verts = vec![start];
        verts.extend(path.iter().map(|&e| self.g.edges[e].target));
        let mut out = Vec::new();
        for i in 0..path.len() {
            for j in (i + 1)..=path.len().min(i + self.face_len) {
                let seg = &path[i..j];
                for alt in self.short_paths(verts[i], verts[j]) {
                    if alt == seg {
                        continue;
                    }
                    if let Some(jf) = self.face(seg, &alt) {
                        let mut np = path[..i].to_vec();
                        np.extend(&alt);
                        np.extend(&path[j..]);
                        out.push((np, i, j, alt, jf));
                    }
                }
            }
        }
        out
    }

    /// Equivalence classes of the given `src → tgt` paths under face replacement.
    pub fn classes(&self, src: usize, paths: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let index: BTreeMap<&Vec<usize>, usize> = paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut parent: Vec<usize> = (0..paths.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let n = p[y];
                p[y] = r;
                y = n;
            }
            r
        }
        let nbrs = crate::par::map(paths, |p| self.neighbours(p, src));
        for (i, ns) in nbrs.into_iter().enumerate() {
            for (np, ..) in ns {
                if let Some(&j) = index.get(&np) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..paths.len() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Breadth-first face-replacement search from `alpha` to `beta`.
    pub fn decide(&self, alpha: &[usize], beta: &[usize], src: usize, tgt: usize) -> Verdict {
        if alpha == beta {
            return Verdict::Equal(self.witness(Vec::new(), &[alpha.to_vec()], alpha, beta, src, tgt));
        }
        let span = self.g.span(src, tgt);
        let mut prev: HashMap<Vec<usize>, Option<(Vec<usize>, FaceMove)>> = HashMap::new();
        prev.insert(alpha.to_vec(), None);
        let mut queue = VecDeque::from([alpha.to_vec()]);
        let mut exhausted = false;
        while let Some(p) = queue.pop_front() {
            if p.as_slice() == beta {
                let mut moves = Vec::new();
                let mut visited = vec![p.clone()];
                let mut cur = p;
                while let Some(Some((before, mv))) = prev.get(&cur) {
                    moves.push(mv.clone());
                    visited.push(before.clone());
                    cur = before.clone();
                }
                moves.reverse();
                return Verdict::Equal(self.witness(moves, &visited, alpha, beta, src, tgt));
            }
            if prev.len() > self.lim.max_search_states {
                exhausted = true;
                break;
            }
            for (np, i, j, alt, jf) in self.neighbours(&p, src) {
                if prev.contains_key(&np) {
                    continue;
                }
                if np.len() > self.lim.max_path_length {
                    exhausted = true;
                    continue;
                }
                let mv = FaceMove {
                    segment: self.g.path_steps(&p[i..j]),
                    replacement: self.g.path_steps(&alt),
                    justification: jf,
                };
                prev.insert(np.clone(), Some((p.clone(), mv)));
                queue.push_back(np);
            }
        }
        if exhausted || !span.complete {
            return Verdict::ResourceExhausted(format!("face search stopped after {} paths", prev.len()));
        }
        let total = self.g.hom_paths(src, tgt, &self.lim);
        if total.truncated {
            return Verdict::ResourceExhausted("path enumeration truncated".into());
        }
        Verdict::NotEqual(SearchRecord { paths_in_span: total.paths.len(), class_size: prev.len() })
    }

    fn witness(
        &self,
        moves: Vec<FaceMove>,
        paths: &[Vec<usize>],
        alpha: &[usize],
        beta: &[usize],
        src: usize,
        tgt: usize,
    ) -> EqualWitness {
        let subdivision = self.embed(paths, alpha, beta, src, tgt);
        let faces = subdivision
            .as_ref()
            .and_then(|sub| sub.faces.iter().map(|f| self.face(&f.left, &f.right)).collect::<Option<Vec<_>>>());
        EqualWitness { moves, subdivision, faces }
    }

    fn embed(
        &self,
        paths: &[Vec<usize>],
        alpha: &[usize],
        beta: &[usize],
        src: usize,
        tgt: usize,
    ) -> Option<Subdivision> {
        let edges: BTreeSet<usize> = paths.iter().flatten().copied().collect();
        if !covered(self.g, &edges, src, tgt) {
            return None;
        }
        first_embedding(self.g, alpha, beta, &edges, &self.lim).ok().flatten()
    }
}

/// Maps a step sequence onto graph edges.
pub fn edge_path(g: &ReductionGraph, steps: &[PathStep]) -> Result<Vec<usize>, CoherenceError> {
    steps
        .iter()
        .map(|st| {
            let v = g.vertex(&st.source).ok_or_else(|| CoherenceError::MissingEdge(st.rule.clone()))?;
            g.out_edges(v)
                .iter()
                .copied()
                .find(|&e| {
                    g.edges[e].step.rule == st.rule
                        && g.edges[e].step.subst == st.subst
                        && g.vertices[g.edges[e].target] == st.target
                })
                .ok_or_else(|| CoherenceError::MissingEdge(st.rule.clone()))
        })
        .collect()
}

/// Decides whether two parallel morphisms are equal in the free 2-structure.
pub fn decide_commutes(
    s: &TwoStructure,
    m1: &Morphism,
    m2: &Morphism,
    lim: &Limits,
) -> Result<Verdict, CoherenceError> {
    let (s1, t1) = s.source_target(m1)?;
    let (s2, t2) = s.source_target(m2)?;
    if s1 != s2 || t1 != t2 {
        return Err(MorphismError::EndpointMismatch(format!(
            "{} -> {} versus {} -> {}",
            s.print(&s1),
            s.print(&t1),
            s.print(&s2),
            s.print(&t2)
        ))
        .into());
    }
    let l1 = s.linearize(m1)?;
    let l2 = s.linearize(m2)?;
    let g = explore_toward(std::slice::from_ref(&s1), &t1, s, lim);
    let src = g.vertex(&s1).expect("seed is a vertex");
    let Some(tgt) = g.vertex(&t1) else {
        return Ok(Verdict::ResourceExhausted("target not reached within the limits".into()));
    };
    let span = g.span(src, tgt);
    if !span.acyclic {
        return Err(CoherenceError::Cyclic);
    }
    let alpha = edge_path(&g, &l1[0])?;
    let beta = edge_path(&g, &l2[0])?;
    if l1.iter().any(|p| l2.contains(p)) {
        let oracle = FaceOracle::new(s, &g, lim);
        return Ok(Verdict::Equal(oracle.witness(Vec::new(), std::slice::from_ref(&alpha), &alpha, &alpha, src, tgt)));
    }
    let oracle = FaceOracle::new(s, &g, lim);
    Ok(oracle.decide(&alpha, &beta, src, tgt))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleResult {
    Equal,
    NotEqual,
    LimitsExceeded,
}

/// Generative equality check: closes the step sequence of `m1` under
/// replacement of segments by the other side of a whiskered instance of a
/// functoriality, naturality or stored equation, and looks for `m2`.
pub fn brute_force_equal(
    s: &TwoStructure,
    m1: &Morphism,
    m2: &Morphism,
    lim: &Limits,
) -> Result<OracleResult, CoherenceError> {
    let (s1, t1) = s.source_target(m1)?;
    let (s2, t2) = s.source_target(m2)?;
    if s1 != s2 || t1 != t2 {
        return Err(MorphismError::EndpointMismatch("brute force on non-parallel morphisms".into()).into());
    }
    let starts = s.linearize(m1)?;
    let goals: BTreeSet<Vec<PathStep>> = s.linearize(m2)?.into_iter().collect();
    Ok(brute_force_paths(s, &starts, &goals, lim))
}

pub fn brute_force_paths(
    s: &TwoStructure,
    starts: &[Vec<PathStep>],
    goals: &BTreeSet<Vec<PathStep>>,
    lim: &Limits,
) -> OracleResult {
    BruteForce::new(s, lim).search(starts, goals)
}

/// The full class of `start` under generated face replacements, or `None`
/// when the limits cut the closure short.
pub fn brute_force_class(s: &TwoStructure, start: &[PathStep], lim: &Limits) -> Option<BTreeSet<Vec<PathStep>>> {
    BruteForce::new(s, lim).class(start)
}

/// The generative oracle with its step and equation caches kept between
/// queries on the same structure.
pub struct BruteForce<'a> {
    gen: Generator<'a>,
    lim: Limits,
}

impl<'a> BruteForce<'a> {
    pub fn new(s: &'a TwoStructure, lim: &Limits) -> Self {
        BruteForce { gen: Generator::new(s, lim.unit_budget), lim: lim.clone() }
    }

    /// Closes `starts` under generated moves until a goal turns up.
    pub fn search(&mut self, starts: &[Vec<PathStep>], goals: &BTreeSet<Vec<PathStep>>) -> OracleResult {
        let mut seen: BTreeSet<Vec<PathStep>> = starts.iter().cloned().collect();
        let mut queue: VecDeque<Vec<PathStep>> = starts.iter().cloned().collect();
        while let Some(p) = queue.pop_front() {
            if goals.contains(&p) {
                return OracleResult::Equal;
            }
            if seen.len() > self.lim.max_search_states {
                return OracleResult::LimitsExceeded;
            }
            for np in self.gen.moves(&p) {
                if np.len() <= self.lim.max_path_length && seen.insert(np.clone()) {
                    queue.push_back(np);
                }
            }
        }
        OracleResult::NotEqual
    }

    /// The whole class of `start`, or `None` when the limits are hit.
    pub fn class(&mut self, start: &[PathStep]) -> Option<BTreeSet<Vec<PathStep>>> {
        let mut seen = BTreeSet::from([start.to_vec()]);
        let mut queue = VecDeque::from([start.to_vec()]);
        while let Some(p) = queue.pop_front() {
            if seen.len() > self.lim.max_search_states {
                return None;
            }
            for np in self.gen.moves(&p) {
                if np.len() <= self.lim.max_path_length && seen.insert(np.clone()) {
                    queue.push_back(np);
                }
            }
        }
        Some(seen)
    }
}

/// The two step sequences of an equation instance.
type EquationSides = (Vec<PathStep>, Vec<PathStep>);

/// Produces the other sides of generating equations, independently of any
/// reduction graph.
struct Generator<'a> {
    s: &'a TwoStructure,
    stepper: Stepper<'a>,
    /// Source pattern and matching budget of every stored equation.
    patterns: Vec<(usize, CanonicalTerm, usize)>,
    matches: HashMap<(bool, Term), Vec<(usize, Substitution)>>,
    steps: HashMap<CanonicalTerm, Arc<Vec<PathStep>>>,
    axiom_sides: HashMap<CanonicalTerm, Arc<Vec<EquationSides>>>,
}

impl<'a> Generator<'a> {
    fn new(s: &'a TwoStructure, budget: usize) -> Self {
        let patterns = s
            .axioms
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.identity_instance)
            .filter_map(|(k, a)| {
                let (pat, _) = s.source_target(&a.lhs).ok()?;
                Some((k, pat, budget.max(a.lhs.term_vars().len())))
            })
            .collect();
        Generator {
            s,
            stepper: Stepper::new(s, budget),
            patterns,
            matches: HashMap::new(),
            steps: HashMap::new(),
            axiom_sides: HashMap::new(),
        }
    }

    fn steps_from(&mut self, t: &CanonicalTerm) -> Arc<Vec<PathStep>> {
        if let Some(v) = self.steps.get(t) {
            return v.clone();
        }
        let v: Arc<Vec<PathStep>> = Arc::new(
            self.stepper
                .steps(t)
                .into_iter()
                .map(|st| PathStep { source: t.clone(), rule: st.rule, subst: st.subst, target: st.target })
                .collect(),
        );
        self.steps.insert(t.clone(), v.clone());
        v
    }

    /// Stored-equation matches at one subject, as (axiom index, substitution).
    fn axiom_matches(&mut self, subject: &Term, span: bool) -> Vec<(usize, Substitution)> {
        let key = (span, subject.clone());
        if let Some(m) = self.matches.get(&key) {
            return m.clone();
        }
        let canonical = CanonicalTerm::assume(subject.clone());
        let mut found = Vec::new();
        for (k, pat, budget) in &self.patterns {
            if span && pat.head() != canonical.head() {
                continue;
            }
            found.extend(match_modulo(pat, &canonical, &self.s.theory, *budget).into_iter().map(|sg| (*k, sg)));
        }
        self.matches.insert(key, found.clone());
        found
    }

    /// Whiskered instances of every stored equation with source `t`, as pairs
    /// of linearized sides (each side listed against every other).
    fn axioms_at(&mut self, t: &CanonicalTerm) -> Arc<Vec<(Vec<PathStep>, Vec<PathStep>)>> {
        if let Some(v) = self.axiom_sides.get(t) {
            return v.clone();
        }
        let s = self.s;
        let mut out = Vec::new();
        for (site, subject) in sites(t, s) {
            let found = self.axiom_matches(&subject, site.span.is_some());
            if found.is_empty() {
                continue;
            }
            let ctx = context_of(t, &site);
            for (k, sigma) in found {
                let ax = &s.axioms[k];
                let place = |m: &Morphism| -> Vec<Vec<PathStep>> {
                    s.linearize(&m.substitute(&sigma))
                        .unwrap_or_default()
                        .into_iter()
                        .map(|p| {
                            p.into_iter()
                                .map(|st| PathStep {
                                    source: s.canon(&fill(&ctx, &st.source)),
                                    rule: st.rule,
                                    subst: st.subst,
                                    target: s.canon(&fill(&ctx, &st.target)),
                                })
                                .collect()
                        })
                        .collect()
                };
                let (ls, rs) = (place(&ax.lhs), place(&ax.rhs));
                for l in &ls {
                    for r in &rs {
                        out.push((l.clone(), r.clone()));
                        out.push((r.clone(), l.clone()));
                    }
                }
                // Different linearizations of one side are equal too.
                for side in [&ls, &rs] {
                    for a in side.iter() {
                        for b in side.iter() {
                            if a != b {
                                out.push((a.clone(), b.clone()));
                            }
                        }
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.axiom_sides.insert(t.clone(), out.clone());
        out
    }

    fn moves(&mut self, p: &[PathStep]) -> Vec<Vec<PathStep>> {
        let mut out = Vec::new();
        let splice = |i: usize, j: usize, with: &[PathStep]| -> Vec<PathStep> {
            let mut v = p[..i].to_vec();
            v.extend_from_slice(with);
            v.extend_from_slice(&p[j..]);
            v
        };
        // Functoriality: swap two adjacent steps acting on independent redexes.
        for i in 0..p.len().saturating_sub(1) {
            let (a, b) = (&p[i], &p[i + 1]);
            for b2 in self.steps_from(&a.source).iter() {
                if b2.key() != b.key() || b2 == a {
                    continue;
                }
                for a2 in self.steps_from(&b2.target).iter() {
                    if a2.key() == a.key() && a2.target == b.target {
                        out.push(splice(i, i + 2, &[b2.clone(), a2.clone()]));
                    }
                }
            }
        }
        // Naturality in both directions.
        for i in 0..p.len() {
            out.extend(self.nat_forward(p, i).into_iter().map(|(j, w)| splice(i, j, &w)));
            out.extend(self.nat_backward(p, i).into_iter().map(|(j, w)| splice(i, j, &w)));
        }
        // Stored equations.
        for i in 0..p.len() {
            for (l, r) in self.axioms_at(&p[i].source).iter() {
                if !l.is_empty() && p.len() >= i + l.len() && p[i..i + l.len()] == l[..] {
                    out.push(splice(i, i + l.len(), r));
                }
            }
        }
        out
    }

    /// `outer(σ) ; inner^m` at position `i` rewritten to `inner^k ; outer(σ')`.
    fn nat_forward(&mut self, p: &[PathStep], i: usize) -> Vec<(usize, Vec<PathStep>)> {
        let s = self.s;
        let outer = &p[i];
        let Some(rule) = s.rule(&outer.rule) else { return Vec::new() };
        let mut out = Vec::new();
        for x in &rule.vars {
            let Some(img) = outer.subst.get(x) else { continue };
            let (k, m) = (rule.lhs.var_occurrences(x), rule.rhs.var_occurrences(x));
            if p.len() < i + 1 + m {
                continue;
            }
            for inner in self.steps_from(&s.canon(img)).iter() {
                if !p[i + 1..i + 1 + m].iter().all(|st| st.key() == inner.key()) {
                    continue;
                }
                let mut sigma2 = outer.subst.clone();
                sigma2.insert(x, inner.target.term().clone());
                let end = &p[i + m].target;
                for seq in self.chains(&outer.source, inner.key(), k) {
                    let from = seq.last().map_or(&outer.source, |st| &st.target).clone();
                    let closing = self.steps_from(&from);
                    for c in closing.iter() {
                        if c.rule == outer.rule && c.subst == sigma2 && &c.target == end {
                            let mut w = seq.clone();
                            w.push(c.clone());
                            out.push((i + 1 + m, w));
                        }
                    }
                }
            }
        }
        out
    }

    /// `inner^k ; outer(σ')` at position `i` rewritten to `outer(σ) ; inner^m`.
    fn nat_backward(&mut self, p: &[PathStep], i: usize) -> Vec<(usize, Vec<PathStep>)> {
        let s = self.s;
        let inner_key = (p[i].rule.clone(), p[i].subst.clone());
        let mut k = 0;
        while i + k < p.len() && p[i + k].rule == inner_key.0 && p[i + k].subst == inner_key.1 {
            k += 1;
        }
        let mut out = Vec::new();
        for kk in 1..=k {
            let Some(outer) = p.get(i + kk) else { break };
            let Some(rule) = s.rule(&outer.rule) else { continue };
            for open in self.steps_from(&p[i].source).iter() {
                if open.rule != outer.rule {
                    continue;
                }
                let differing: Vec<&String> =
                    rule.vars.iter().filter(|x| open.subst.get(x) != outer.subst.get(x)).collect();
                let [x] = differing.as_slice() else { continue };
                if rule.lhs.var_occurrences(x) != kk {
                    continue;
                }
                let m = rule.rhs.var_occurrences(x);
                let Some(img) = open.subst.get(x) else { continue };
                let linked = self.steps_from(&s.canon(img)).iter().any(|st| {
                    st.rule == inner_key.0 && st.subst == inner_key.1 && Some(st.target.term()) == outer.subst.get(x)
                });
                if !linked {
                    continue;
                }
                let end = &outer.target;
                for seq in self.chains(&open.target, (&inner_key.0, &inner_key.1), m) {
                    if seq.last().map_or(&open.target, |st| &st.target) == end {
                        let mut w = vec![open.clone()];
                        w.extend(seq);
                        out.push((i + kk + 1, w));
                    }
                }
            }
        }
        out
    }

    /// All sequences of `n` steps from `t` that all have the given key.
    fn chains(&mut self, t: &CanonicalTerm, key: (&str, &Substitution), n: usize) -> Vec<Vec<PathStep>> {
        let mut acc: Vec<Vec<PathStep>> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for seq in &acc {
                let from = seq.last().map_or(t, |st| &st.target).clone();
                for st in self.steps_from(&from).iter() {
                    if st.key() == key {
                        let mut v = seq.clone();
                        v.push(st.clone());
                        next.push(v);
                    }
                }
            }
            acc = next;
        }
        acc
    }
}

/// A diamond whose legs are not equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub source: CanonicalTerm,
    pub target: CanonicalTerm,
    pub left: Vec<PathStep>,
    pub right: Vec<PathStep>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacLaneReport {
    pub sources_scanned: usize,
    pub diamonds: usize,
    /// Diamonds whose two legs are in general position.
    pub general_position: usize,
    pub commuting: usize,
    pub counterexamples: Vec<Counterexample>,
    /// Diamonds left undecided by the limits.
    pub unresolved: usize,
    pub truncated: bool,
}

impl MacLaneReport {
    pub fn all_commute(&self) -> bool {
        self.counterexamples.is_empty() && self.unresolved == 0 && !self.truncated
    }
}

/// The morphism expression denoted by a graph path.
pub fn path_morphism(s: &TwoStructure, g: &ReductionGraph, path: &[usize]) -> Option<Morphism> {
    Morphism::comp_all(
        path.iter().map(|&e| s.step_morphism(&g.vertices[g.edges[e].source], &g.edges[e].step)).collect(),
    )
}

/// Scans diamonds out of the given sources and decides every one whose legs
/// are in general position.
pub fn maclane_report_on(s: &TwoStructure, sources: &[CanonicalTerm], lim: &Limits) -> MacLaneReport {
    let parts = crate::par::map(sources, |src| {
        let g = explore(std::slice::from_ref(src), s, lim);
        let v = g.vertex(src).expect("seed is a vertex");
        let scan = crate::planar::enumerate_diamonds(&g, v, lim);
        let oracle = FaceOracle::new(s, &g, lim);
        let mut r =
            MacLaneReport { sources_scanned: 1, truncated: scan.truncated || !g.is_complete(), ..Default::default() };
        for d in &scan.diamonds {
            r.diamonds += 1;
            let gp = |p: &[usize]| path_morphism(s, &g, p).is_some_and(|m| s.is_general_position(&m).unwrap_or(false));
            if !(gp(&d.alpha) && gp(&d.beta)) {
                continue;
            }
            r.general_position += 1;
            match oracle.decide(&d.alpha, &d.beta, v, d.target) {
                Verdict::Equal(_) => r.commuting += 1,
                Verdict::NotEqual(_) => r.counterexamples.push(Counterexample {
                    source: src.clone(),
                    target: g.vertices[d.target].clone(),
                    left: g.path_steps(&d.alpha),
                    right: g.path_steps(&d.beta),
                }),
                Verdict::ResourceExhausted(_) => r.unresolved += 1,
            }
        }
        r
    });
    let mut total = MacLaneReport::default();
    for p in parts {
        total.sources_scanned += p.sources_scanned;
        total.diamonds += p.diamonds;
        total.general_position += p.general_position;
        total.commuting += p.commuting;
        total.counterexamples.extend(p.counterexamples);
        total.unresolved += p.unresolved;
        total.truncated |= p.truncated;
    }
    total
}

/// Mac Lane scan over every ground term of size ≤ `max_term_size` built from
/// `leaves` generators `A, B, …`.
pub fn maclane_report(s: &TwoStructure, leaves: usize, max_term_size: usize, lim: &Limits) -> MacLaneReport {
    let names: Vec<crate::terms::Term> = (0..)
        .map(generator_name)
        .filter(|n| s.sig.arity(n).is_none())
        .take(leaves)
        .map(|n| crate::terms::Term::gen(&n))
        .collect();
    let sources = crate::graph::ground_terms(&s.sig, &s.theory, &names, max_term_size);
    maclane_report_on(s, &sources, lim)
}

/// `A`, `B`, …, `Z`, then `A1`, `B1`, ….
pub fn generator_name(k: usize) -> String {
    let c = (b'A' + (k % 26) as u8) as char;
    if k < 26 {
        c.to_string()
    } else {
        format!("{}{}", c, k / 26)
    }
}
