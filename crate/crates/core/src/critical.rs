//! Classification of initial spans and enumeration of critical peaks.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::graph::Limits;
use crate::rewriting::TwoStructure;
use crate::steps::Step;
use crate::terms::{au_node, CanonicalTerm, ObjectTheory, Substitution, Term};

/// Two overlapping steps out of one term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CriticalPeak {
    pub peak: CanonicalTerm,
    pub left: Step,
    pub right: Step,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpanClass {
    Disjoint,
    Nested,
    Overlap(Box<CriticalPeak>),
}

impl SpanClass {
    pub fn kind(&self) -> &'static str {
        match self {
            SpanClass::Disjoint => "Disjoint",
            SpanClass::Nested => "Nested",
            SpanClass::Overlap(_) => "Overlap",
        }
    }
}

/// The redex term of a step, with a child span collapsed into its own node.
fn redex(s: &TwoStructure, t: &Term, st: &Step) -> Option<Term> {
    let node = t.subterm_at(&st.position).ok()?;
    match (st.span, node) {
        (Some((a, l)), Term::App(f, cs)) => {
            let unit = s.theory.unit_of(f)?;
            Some(au_node(f, unit, cs.get(a..a + l)?.to_vec()))
        }
        _ => Some(node.clone()),
    }
}

/// `needle` occurs in `hay` as a subterm or as a contiguous run of children
/// of an associative node.
fn occurs(s: &TwoStructure, needle: &Term, hay: &Term) -> bool {
    if needle == hay {
        return true;
    }
    let Term::App(f, cs) = hay else { return false };
    if let (Some(_), Term::App(g, ns)) = (s.theory.unit_of(f), needle) {
        if g == f && ns.len() < cs.len() && cs.windows(ns.len()).any(|w| w == ns.as_slice()) {
            return true;
        }
    }
    cs.iter().any(|c| occurs(s, needle, c))
}

/// The child index range covered by a step at its node.
fn covers(st: &Step, child: usize) -> bool {
    st.span.is_none_or(|(a, l)| a <= child && child < a + l)
}

fn inside(s: &TwoStructure, t: &Term, outer: &Step, inner: &Step) -> bool {
    let Some(r) = redex(s, t, inner) else { return false };
    outer.subst.iter().any(|(_, img)| occurs(s, &r, s.canon(img).term()))
}

/// Classifies the initial span formed by two steps out of `source`.
pub fn classify_span(s: &TwoStructure, source: &CanonicalTerm, a: &Step, b: &Step) -> SpanClass {
    let t = source.term();
    let (pa, pb) = (&a.position, &b.position);
    let prefix = |p: &[usize], q: &[usize]| q.len() >= p.len() && q[..p.len()] == *p;
    let disjoint = if pa == pb {
        match (a.span, b.span) {
            (Some((x, l)), Some((y, m))) => x + l <= y || y + m <= x,
            _ => false,
        }
    } else if prefix(pa, pb) {
        !covers(a, pb[pa.len()])
    } else if prefix(pb, pa) {
        !covers(b, pa[pb.len()])
    } else {
        true
    };
    if disjoint {
        return SpanClass::Disjoint;
    }
    let nested = (prefix(pa, pb) && inside(s, t, a, b)) || (prefix(pb, pa) && inside(s, t, b, a));
    if nested && a != b {
        return SpanClass::Nested;
    }
    SpanClass::Overlap(Box::new(CriticalPeak { peak: source.clone(), left: a.clone(), right: b.clone() }))
}

/// Renames variables in order of first occurrence.
fn normalize_vars(t: &Term) -> Term {
    let order = t.vars_ordered();
    let map: BTreeMap<String, String> =
        order.iter().enumerate().map(|(k, x)| (x.clone(), format!("x{}", k + 1))).collect();
    t.rename_vars(&|x| map.get(x).cloned().unwrap_or_else(|| x.to_string()))
}

/// Overlapping step pairs out of instances of rule sources in which at most
/// two variables are replaced by a unit or expanded by one symbol. A peak is
/// kept only when undoing any one replacement loses the overlap of the same
/// two rules.
pub fn critical_spans(s: &TwoStructure, lim: &Limits) -> Vec<CriticalPeak> {
    let units: BTreeSet<String> = match &s.theory {
        ObjectTheory::Empty => BTreeSet::new(),
        ObjectTheory::AssocUnit(v) => v.iter().map(|(_, u)| u.clone()).collect(),
    };
    let symbols: Vec<(String, usize)> =
        s.sig.symbols.iter().filter(|(_, d)| d.arity > 0).map(|(n, d)| (n.clone(), d.arity)).collect();
    let mut out = BTreeSet::new();
    for rule in &s.rules {
        let options: Vec<Vec<Term>> = rule
            .vars
            .iter()
            .map(|x| {
                let mut opts = vec![Term::var(x)];
                opts.extend(units.iter().map(|u| Term::gen(u)));
                for (f, k) in &symbols {
                    opts.push(Term::app(f, (0..*k).map(|i| Term::var(&format!("{}_{}", x, i + 1))).collect()));
                }
                opts
            })
            .collect();
        let choices = sparse_choices(&options.iter().map(Vec::len).collect::<Vec<_>>(), 2);
        let peaks_of = |choice: &[usize]| -> (CanonicalTerm, Vec<(Step, Step)>) {
            let sigma: BTreeMap<String, Term> =
                rule.vars.iter().zip(choice).map(|(x, &c)| (x.clone(), options_at(&options, x, rule, c))).collect();
            let t = s.canon(&Substitution(sigma).apply(&rule.lhs));
            let t = CanonicalTerm::assume(normalize_vars(t.term()));
            let steps = s.enumerate_steps(&t, lim.unit_budget);
            let mut pairs = Vec::new();
            for a in steps.iter().filter(|a| a.position.is_empty() && a.rule == rule.label) {
                for b in steps.iter().filter(|b| *b != a) {
                    if matches!(classify_span(s, &t, a, b), SpanClass::Overlap(_)) {
                        pairs.push((a.clone(), b.clone()));
                    }
                }
            }
            (t, pairs)
        };
        let computed: Vec<(CanonicalTerm, Vec<(Step, Step)>)> = crate::par::map(&choices, |c| peaks_of(c));
        let keys: BTreeMap<&Vec<usize>, BTreeSet<(String, String)>> = choices
            .iter()
            .zip(&computed)
            .map(|(c, (_, ps))| (c, ps.iter().map(|(a, b)| (a.rule.clone(), b.rule.clone())).collect()))
            .collect();
        for (choice, (t, pairs)) in choices.iter().zip(&computed) {
            for (a, b) in pairs {
                let key = (a.rule.clone(), b.rule.clone());
                let reducible = (0..choice.len()).filter(|&k| choice[k] != 0).any(|k| {
                    let mut smaller = choice.clone();
                    smaller[k] = 0;
                    keys.get(&smaller).is_some_and(|ks| ks.contains(&key))
                });
                if !reducible {
                    let (l, r) = if a <= b { (a, b) } else { (b, a) };
                    out.insert(CriticalPeak { peak: t.clone(), left: l.clone(), right: r.clone() });
                }
            }
        }
    }
    out.into_iter().collect()
}

fn options_at(options: &[Vec<Term>], x: &str, rule: &crate::rewriting::Rule, c: usize) -> Term {
    let k = rule.vars.iter().position(|v| v == x).expect("rule variable");
    options[k][c].clone()
}

/// Index vectors with at most `max_nonzero` nonzero entries.
fn sparse_choices(sizes: &[usize], max_nonzero: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        let mut next = Vec::new();
        for prefix in &out {
            let used = prefix.iter().filter(|&&c| c != 0).count();
            for c in 0..n {
                if c == 0 || used < max_nonzero {
                    let mut v = prefix.clone();
                    v.push(c);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_structure;

    fn root_steps<'a>(steps: &'a [Step], rule: &str) -> Vec<&'a Step> {
        steps.iter().filter(|st| st.position.is_empty() && st.rule == rule).collect()
    }

    #[test]
    fn disjoint_and_nested_spans() {
        let s = crate::corpus::load("ex-disjoint").unwrap();
        let t = s.parse_canonical("(I(A) ot1 I(A))").unwrap();
        let steps = s.enumerate_steps(&t, 0);
        assert_eq!(steps.len(), 2);
        assert_eq!(classify_span(&s, &t, &steps[0], &steps[1]), SpanClass::Disjoint);

        let s = crate::corpus::load("ex-nested").unwrap();
        let t = s.parse_canonical("I(I(A))").unwrap();
        let steps = s.enumerate_steps(&t, 0);
        let outer = root_steps(&steps, "iota")[0];
        let inner = steps.iter().find(|st| st.position == vec![0]).unwrap();
        assert_eq!(classify_span(&s, &t, outer, inner).kind(), "Nested");
        assert_eq!(classify_span(&s, &t, inner, outer).kind(), "Nested");
    }

    #[test]
    fn interchange_against_associativity_overlaps() {
        let s = crate::imc::build_imc(3);
        let t = s.parse_canonical("((A ot2 B) ot1 (C ot2 D ot2 E))").unwrap();
        let steps = s.enumerate_steps(&t, 4);
        let roots = root_steps(&steps, "eta12");
        let split: Vec<&&Step> = roots.iter().filter(|st| st.units == 0).collect();
        assert_eq!(split.len(), 2, "C|D⊗E and C⊗D|E");
        assert_eq!(classify_span(&s, &t, split[0], split[1]).kind(), "Overlap");
    }

    #[test]
    fn pentagon_peak() {
        let s = crate::corpus::load("monoidal").unwrap();
        let peaks = critical_spans(&s, &Limits::for_structure(&s));
        assert_eq!(peaks.len(), 1);
        assert_eq!(s.print(peaks[0].peak.term()), "(x1 ot1 (x2 ot1 (x3 ot1 x4)))");
        let p = &peaks[0];
        assert_ne!(p.left.position, p.right.position);
    }

    #[test]
    fn hexagon_peak_between_interchanges() {
        let s = crate::imc::build_imc(3);
        let peaks = critical_spans(&s, &Limits::for_structure(&s));
        let mixed = |a: &str, b: &str| {
            peaks.iter().any(|p| p.left.rule == a && p.right.rule == b || p.left.rule == b && p.right.rule == a)
        };
        assert!(mixed("eta12", "eta23"));
        for p in &peaks {
            assert_eq!(s.replay_step(&p.peak, &p.left).as_ref(), Some(&p.left.target));
            assert_eq!(s.replay_step(&p.peak, &p.right).as_ref(), Some(&p.right.target));
            assert_eq!(classify_span(&s, &p.peak, &p.left, &p.right).kind(), "Overlap");
        }
    }

    #[test]
    fn distinct_heads_have_no_peaks() {
        let s = parse_structure(
            "signature:\n  F : 1\n  G : 1\n  H : 1\nrules:\n  f(x) : F(x) -> H(x)\n  g(x) : G(x) -> H(x)\n",
        )
        .unwrap();
        assert!(critical_spans(&s, &Limits::default()).is_empty());
    }

    #[test]
    fn sparse_choices_bound_nonzero_entries() {
        let cs = sparse_choices(&[3, 3, 3], 2);
        assert_eq!(cs.len(), 27 - 8);
        assert!(cs.iter().all(|c| c.iter().filter(|&&x| x != 0).count() <= 2));
    }
}
