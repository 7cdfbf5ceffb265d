//! Irreducible steps, linearization of morphism expressions into step
//! sequences, and recognition of single commuting faces.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::rewriting::{identity_pattern, Morphism, MorphismError, TwoStructure};
use crate::terms::{match_many, match_modulo, CanonicalTerm, Position, Substitution, Term};

/// One rule application at a node (or at a contiguous run of children of a
/// flattened associative node) of a canonical term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Step {
    pub rule: String,
    pub position: Position,
    /// `(start, len)` when the redex is a proper run of children of the node.
    pub span: Option<(usize, usize)>,
    pub subst: Substitution,
    /// Units inserted by matching beyond those present in the redex.
    pub units: usize,
    pub target: CanonicalTerm,
}

/// A step with both endpoints; the unit of comparison between paths.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathStep {
    pub source: CanonicalTerm,
    pub rule: String,
    pub subst: Substitution,
    pub target: CanonicalTerm,
}

impl PathStep {
    pub fn key(&self) -> (&str, &Substitution) {
        (&self.rule, &self.subst)
    }
}

pub(crate) const HOLE: &str = "\u{25a1}";

/// Rule index and substitution of every match at a subject.
type Matches = Arc<Vec<(usize, Substitution)>>;

/// Step enumeration with the matches at each subject remembered, for
/// callers that expand many terms sharing subterms.
pub struct Stepper<'a> {
    s: &'a TwoStructure,
    budget: usize,
    patterns: Vec<CanonicalTerm>,
    memo: Mutex<HashMap<(bool, Term), Matches>>,
}

impl<'a> Stepper<'a> {
    pub fn new(s: &'a TwoStructure, unit_budget: usize) -> Self {
        let patterns = s.rules.iter().map(|r| s.canon(&r.lhs)).collect();
        Stepper { s, budget: unit_budget, patterns, memo: Mutex::new(HashMap::new()) }
    }

    pub fn structure(&self) -> &'a TwoStructure {
        self.s
    }

    /// Non-identity rule matches at a subject, as (rule index, substitution).
    fn matches(&self, subject: &Term, span: bool) -> Arc<Vec<(usize, Substitution)>> {
        let key = (span, subject.clone());
        if let Some(m) = self.memo.lock().expect("memo lock").get(&key) {
            return m.clone();
        }
        let s = self.s;
        let canonical = CanonicalTerm::assume(subject.clone());
        let mut found = Vec::new();
        for (ri, pat) in self.patterns.iter().enumerate() {
            if span && pat.head() != canonical.head() {
                continue;
            }
            for sigma in match_modulo(pat, &canonical, &s.theory, self.budget) {
                if !s.is_identity_instance(&s.rules[ri].label, &sigma) {
                    found.push((ri, sigma));
                }
            }
        }
        let found = Arc::new(found);
        self.memo.lock().expect("memo lock").insert(key, found.clone());
        found
    }

    /// All non-identity steps out of `t`, sorted and duplicate-free.
    pub fn steps(&self, t: &CanonicalTerm) -> Vec<Step> {
        let s = self.s;
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (site, subject) in sites(t, s) {
            let found = self.matches(&subject, site.span.is_some());
            if found.is_empty() {
                continue;
            }
            let present = unit_leaves(&subject, s);
            let ctx = context_of(t, &site);
            for (ri, sigma) in found.iter() {
                let r = &s.rules[*ri];
                let target = s.canon(&fill(&ctx, &sigma.apply(&r.rhs)));
                if !seen.insert((r.label.clone(), sigma.clone(), target.clone())) {
                    continue;
                }
                let bound_units = sigma.iter().filter(|(_, v)| s.theory.is_unit(v)).count();
                out.push(Step {
                    rule: r.label.clone(),
                    position: site.position.clone(),
                    span: site.span,
                    units: bound_units.saturating_sub(present),
                    subst: sigma.clone(),
                    target,
                });
            }
        }
        out.sort();
        out
    }
}

/// A redex site: node position and optional child span.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Site {
    pub position: Position,
    pub span: Option<(usize, usize)>,
}

/// Every redex site of `t` with the subject term found there. Proper spans
/// (length ≥ 2) are produced only for associative nodes.
pub fn sites(t: &Term, s: &TwoStructure) -> Vec<(Site, Term)> {
    let mut out = Vec::new();
    for p in t.positions() {
        let node = t.subterm_at(&p).expect("position from positions()");
        out.push((Site { position: p.clone(), span: None }, node.clone()));
        if let Term::App(f, cs) = node {
            if s.theory.unit_of(f).is_some() {
                let m = cs.len();
                for start in 0..m {
                    for len in 2..=(m - start) {
                        if len == m {
                            continue;
                        }
                        out.push((
                            Site { position: p.clone(), span: Some((start, len)) },
                            Term::App(f.clone(), cs[start..start + len].to_vec()),
                        ));
                    }
                }
            }
        }
    }
    out
}

/// The term with the site replaced by a hole variable.
pub fn context_of(t: &Term, site: &Site) -> Term {
    let hole = Term::Var(HOLE.to_string());
    let node = t.subterm_at(&site.position).expect("valid site");
    let replacement = match (site.span, node) {
        (Some((start, len)), Term::App(f, cs)) => {
            let mut kids = cs[..start].to_vec();
            kids.push(hole);
            kids.extend_from_slice(&cs[start + len..]);
            Term::App(f.clone(), kids)
        }
        _ => hole,
    };
    t.replace_at(&site.position, replacement).expect("valid site")
}

pub fn fill(ctx: &Term, with: &Term) -> Term {
    let sigma: Substitution = std::iter::once((HOLE.to_string(), with.clone())).collect();
    sigma.apply(ctx)
}

fn unit_leaves(t: &Term, s: &TwoStructure) -> usize {
    if s.theory.is_unit(t) {
        1
    } else {
        t.children().iter().map(|c| unit_leaves(c, s)).sum()
    }
}

impl TwoStructure {
    /// True iff the rule instance is declared equal to an identity.
    pub fn is_identity_instance(&self, rule: &str, subst: &Substitution) -> bool {
        let Some(r) = self.rule(rule) else { return false };
        self.axioms.iter().filter(|a| a.identity_instance).any(|ax| {
            let Some((label, args)) = identity_pattern(ax) else { return false };
            if label != rule || args.len() != r.vars.len() {
                return false;
            }
            let pairs: Vec<(Term, CanonicalTerm)> = args
                .iter()
                .zip(&r.vars)
                .map(|(p, x)| {
                    let img = subst.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone()));
                    ((*p).clone(), self.canon(&img))
                })
                .collect();
            !match_many(&pairs, &self.theory, 0).is_empty()
        })
    }

    /// All non-identity steps out of `t`, sorted and duplicate-free.
    pub fn enumerate_steps(&self, t: &CanonicalTerm, unit_budget: usize) -> Vec<Step> {
        Stepper::new(self, unit_budget).steps(t)
    }

    /// Rebuilds the target of a step from its recorded data.
    pub fn replay_step(&self, source: &CanonicalTerm, step: &Step) -> Option<CanonicalTerm> {
        let r = self.rule(&step.rule)?;
        let site = Site { position: step.position.clone(), span: step.span };
        source.subterm_at(&site.position).ok()?;
        let ctx = context_of(source, &site);
        let lhs = self.canon(&fill(&ctx, &step.subst.apply(&r.lhs)));
        if &lhs != source {
            return None;
        }
        Some(self.canon(&fill(&ctx, &step.subst.apply(&r.rhs))))
    }

    /// The whiskered morphism expression of a step.
    pub fn step_morphism(&self, source: &CanonicalTerm, step: &Step) -> Morphism {
        let r = self.rule(&step.rule).expect("step of a known rule");
        let args = r
            .vars
            .iter()
            .map(|x| Morphism::Id(step.subst.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone()))))
            .collect();
        let lift = Morphism::Lift(step.rule.clone(), args);
        whisker(source, &step.position, step.span, lift)
    }

    /// Every step sequence denoted by `m` up to the bookkeeping equations
    /// (identities, associativity of composition, interleaving of parallel
    /// components, and both naturality orders for rule applications).
    pub fn linearize(&self, m: &Morphism) -> Result<Vec<Vec<PathStep>>, MorphismError> {
        self.source_target(m)?;
        let mut out: Vec<Vec<PathStep>> = self.lin(m).into_iter().collect();
        out.sort();
        Ok(out)
    }

    fn lin(&self, m: &Morphism) -> BTreeSet<Vec<PathStep>> {
        match m {
            Morphism::Id(_) => std::iter::once(Vec::new()).collect(),
            Morphism::Comp(a, b) => {
                let (la, lb) = (self.lin(a), self.lin(b));
                let mut out = BTreeSet::new();
                for x in &la {
                    for y in &lb {
                        let mut v = x.clone();
                        v.extend(y.iter().cloned());
                        out.insert(v);
                    }
                }
                out
            }
            Morphism::App(f, args) => {
                let sources: Vec<Term> =
                    args.iter().map(|a| self.source_target(a).expect("typed").0.into_term()).collect();
                let choices: Vec<Vec<Vec<PathStep>>> = args.iter().map(|a| self.lin(a).into_iter().collect()).collect();
                let mut out = BTreeSet::new();
                for combo in cartesian(&choices) {
                    for order in interleavings(&combo.iter().map(|v| v.len()).collect::<Vec<_>>()) {
                        let mut states = sources.clone();
                        let mut idx = vec![0usize; combo.len()];
                        let mut path = Vec::with_capacity(order.len());
                        for &i in &order {
                            let st = &combo[i][idx[i]];
                            idx[i] += 1;
                            let mut kids = states.clone();
                            kids[i] = Term::Var(HOLE.to_string());
                            let ctx = Term::App(f.clone(), kids);
                            path.push(PathStep {
                                source: self.canon(&fill(&ctx, &st.source)),
                                rule: st.rule.clone(),
                                subst: st.subst.clone(),
                                target: self.canon(&fill(&ctx, &st.target)),
                            });
                            states[i] = st.target.term().clone();
                        }
                        out.insert(path);
                    }
                }
                out
            }
            Morphism::Lift(label, args) => {
                let r = self.rule(label).expect("typed");
                let mut ss = Substitution::new();
                let mut ts = Substitution::new();
                let mut fs = Vec::new();
                for (x, a) in r.vars.iter().zip(args) {
                    let (s, t) = self.source_target(a).expect("typed");
                    ss.insert(x, s.into_term());
                    ts.insert(x, t.into_term());
                    fs.push((x.clone(), a.clone()));
                }
                let atom = |sigma: &Substitution| -> Vec<PathStep> {
                    if self.is_identity_instance(label, sigma) {
                        return Vec::new();
                    }
                    vec![PathStep {
                        source: self.canon(&sigma.apply(&r.lhs)),
                        rule: label.clone(),
                        subst: sigma.clone(),
                        target: self.canon(&sigma.apply(&r.rhs)),
                    }]
                };
                let mut out = BTreeSet::new();
                let first = atom(&ss);
                for tail in self.lin(&pattern_morphism(&r.rhs, &fs)) {
                    let mut v = first.clone();
                    v.extend(tail);
                    out.insert(v);
                }
                let last = atom(&ts);
                for mut head in self.lin(&pattern_morphism(&r.lhs, &fs)) {
                    head.extend(last.iter().cloned());
                    out.insert(head);
                }
                out
            }
        }
    }

    /// Decides whether two parallel morphisms form a single commuting face.
    pub fn face_instance(
        &self,
        left: &Morphism,
        right: &Morphism,
        unit_budget: usize,
    ) -> Result<Option<Justification>, MorphismError> {
        let (s1, t1) = self.source_target(left)?;
        let (s2, t2) = self.source_target(right)?;
        if s1 != s2 || t1 != t2 {
            return Err(MorphismError::EndpointMismatch(format!(
                "{} -> {} versus {} -> {}",
                self.print(&s1),
                self.print(&t1),
                self.print(&s2),
                self.print(&t2)
            )));
        }
        let ls = self.linearize(left)?;
        let rs = self.linearize(right)?;
        let mut identity = false;
        for l in &ls {
            for r in &rs {
                if l == r {
                    identity = true;
                    continue;
                }
                if let Some(j) = self.face_of_paths(&s1, &t1, l, r, unit_budget) {
                    return Ok(Some(j));
                }
            }
        }
        Ok(identity.then_some(Justification::IdentityFace))
    }

    /// Single-face check on two step sequences with common endpoints.
    pub fn face_of_paths(
        &self,
        source: &CanonicalTerm,
        target: &CanonicalTerm,
        l: &[PathStep],
        r: &[PathStep],
        unit_budget: usize,
    ) -> Option<Justification> {
        if l == r {
            return Some(Justification::IdentityFace);
        }
        if l.len() == 2 && r.len() == 2 && l[0].key() == r[1].key() && l[1].key() == r[0].key() {
            return Some(Justification::Functoriality);
        }
        if let Some(j) = self.naturality(l, r, unit_budget).or_else(|| self.naturality(r, l, unit_budget)) {
            return Some(j);
        }
        self.axiom_face(source, target, l, r, unit_budget)
    }

    fn naturality(&self, l: &[PathStep], r: &[PathStep], unit_budget: usize) -> Option<Justification> {
        if l.len() < 2 || r.len() < 2 {
            return None;
        }
        let (outer_l, outer_r) = (&l[0], &r[r.len() - 1]);
        if outer_l.rule != outer_r.rule {
            return None;
        }
        let inner = &l[1];
        let same_inner = |s: &PathStep| s.key() == inner.key();
        if !l[1..].iter().all(same_inner) || !r[..r.len() - 1].iter().all(same_inner) {
            return None;
        }
        let rule = self.rule(&outer_l.rule)?;
        let differing: Vec<&String> =
            rule.vars.iter().filter(|x| outer_l.subst.get(x) != outer_r.subst.get(x)).collect();
        let [x] = differing.as_slice() else { return None };
        if l.len() - 1 != rule.rhs.var_occurrences(x) || r.len() - 1 != rule.lhs.var_occurrences(x) {
            return None;
        }
        let from = self.canon(outer_l.subst.get(x)?);
        let to = self.canon(outer_r.subst.get(x)?);
        let ok = self
            .enumerate_steps(&from, unit_budget)
            .iter()
            .any(|st| st.rule == inner.rule && st.subst == inner.subst && st.target == to);
        ok.then(|| Justification::Naturality {
            outer: outer_l.rule.clone(),
            inner: inner.rule.clone(),
            var: (*x).clone(),
        })
    }

    fn axiom_face(
        &self,
        source: &CanonicalTerm,
        target: &CanonicalTerm,
        l: &[PathStep],
        r: &[PathStep],
        unit_budget: usize,
    ) -> Option<Justification> {
        for ax in self.axioms.iter().filter(|a| !a.identity_instance) {
            let Ok((ax_src, _)) = self.raw_axiom_endpoints(&ax.lhs) else { continue };
            let Ok((_, ax_tgt)) = self.raw_axiom_endpoints(&ax.rhs) else { continue };
            let budget = unit_budget.max(ax.lhs.term_vars().len());
            let pat = self.canon(&ax_src);
            for (site, subject) in sites(source, self) {
                if site.span.is_some() && pat.head() != subject.head() {
                    continue;
                }
                let subject = CanonicalTerm::assume(subject);
                for sigma in match_modulo(&pat, &subject, &self.theory, budget) {
                    let ctx = context_of(source, &site);
                    if &self.canon(&fill(&ctx, &sigma.apply(&ax_tgt))) != target {
                        continue;
                    }
                    let place = |m: &Morphism| -> BTreeSet<Vec<PathStep>> {
                        self.lin(&m.substitute(&sigma))
                            .into_iter()
                            .map(|p| {
                                p.into_iter()
                                    .map(|st| PathStep {
                                        source: self.canon(&fill(&ctx, &st.source)),
                                        rule: st.rule,
                                        subst: st.subst,
                                        target: self.canon(&fill(&ctx, &st.target)),
                                    })
                                    .collect()
                            })
                            .collect()
                    };
                    let (al, ar) = (place(&ax.lhs), place(&ax.rhs));
                    let forward = al.contains(l) && ar.contains(r);
                    let backward = al.contains(r) && ar.contains(l);
                    if forward || backward {
                        return Some(Justification::Axiom { name: ax.name.clone(), subst: sigma });
                    }
                }
            }
        }
        None
    }

    fn raw_axiom_endpoints(&self, m: &Morphism) -> Result<(Term, Term), MorphismError> {
        let (s, t) = self.source_target(m)?;
        Ok((s.into_term(), t.into_term()))
    }
}

/// Why a face commutes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Justification {
    IdentityFace,
    Functoriality,
    Naturality {
        outer: String,
        inner: String,
        var: String,
    },
    Axiom {
        name: String,
        subst: Substitution,
    },
    /// Closed by a nested subdivision whose faces are all justified.
    Composite(Vec<Justification>),
}

impl Justification {
    pub fn kind(&self) -> &'static str {
        match self {
            Justification::IdentityFace => "identity",
            Justification::Functoriality => "functoriality",
            Justification::Naturality { .. } => "naturality",
            Justification::Axiom { .. } => "axiom",
            Justification::Composite(_) => "composite",
        }
    }
}

/// Morphism obtained from a term pattern by placing `fs[x]` at each
/// occurrence of variable `x` and identities elsewhere.
fn pattern_morphism(p: &Term, fs: &[(String, Morphism)]) -> Morphism {
    match p {
        Term::Var(x) => {
            fs.iter().find(|(y, _)| y == x).map(|(_, m)| m.clone()).unwrap_or_else(|| Morphism::Id(p.clone()))
        }
        Term::App(f, a) if !a.is_empty() => {
            Morphism::App(f.clone(), a.iter().map(|c| pattern_morphism(c, fs)).collect())
        }
        _ => Morphism::Id(p.clone()),
    }
}

/// Places `inner` at `position`/`span` of `t`, with identities elsewhere.
pub fn whisker(t: &Term, position: &[usize], span: Option<(usize, usize)>, inner: Morphism) -> Morphism {
    match position.split_first() {
        None => match (span, t) {
            (Some((start, len)), Term::App(f, cs)) => {
                let mut kids: Vec<Morphism> = cs[..start].iter().cloned().map(Morphism::Id).collect();
                kids.push(inner);
                kids.extend(cs[start + len..].iter().cloned().map(Morphism::Id));
                Morphism::App(f.clone(), kids)
            }
            _ => inner,
        },
        Some((&i, rest)) => {
            let Term::App(f, cs) = t else { return inner };
            let kids = cs
                .iter()
                .enumerate()
                .map(|(k, c)| if k == i { whisker(c, rest, span, inner.clone()) } else { Morphism::Id(c.clone()) })
                .collect();
            Morphism::App(f.clone(), kids)
        }
    }
}

fn cartesian<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![Vec::new()];
    for opts in choices {
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for prefix in &acc {
            for o in opts {
                let mut v = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// All merges of sequences with the given lengths, as lists of sequence indices.
fn interleavings(lens: &[usize]) -> Vec<Vec<usize>> {
    fn go(rem: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem.iter().all(|&r| r == 0) {
            out.push(cur.clone());
            return;
        }
        for i in 0..rem.len() {
            if rem[i] > 0 {
                rem[i] -= 1;
                cur.push(i);
                go(rem, cur, out);
                cur.pop();
                rem[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut lens.to_vec(), &mut Vec::new(), &mut out);
    out
}
