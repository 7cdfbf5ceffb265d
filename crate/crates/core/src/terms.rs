//! Object-level terms: signatures, canonical forms modulo the object theory,
//! substitution, matching modulo associativity/unit, and syntactic unification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Cursor, SyntaxError, Tok};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("syntax error at {0}")]
    Syntax(SyntaxError),
    #[error("unknown function symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` expects {expected} argument(s), found {found}")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("`{0}` is not a declared infix binary symbol")]
    NotInfix(String),
    #[error("position {0:?} does not address a node of the term")]
    InvalidPosition(Vec<usize>),
    #[error("syntactic unification requires the empty object theory")]
    NonEmptyTheory,
    #[error("name `{0}` is used for more than one kind of identifier")]
    NameClash(String),
}

impl From<SyntaxError> for TermError {
    fn from(e: SyntaxError) -> Self {
        TermError::Syntax(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDecl {
    pub arity: usize,
    pub infix: bool,
}

/// Graded function symbols plus the declared generators.
///
/// Identifiers that are neither symbols nor declared generators are classified
/// by case when parsed: a leading uppercase letter makes a generator, anything
/// else a variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub symbols: BTreeMap<String, SymbolDecl>,
    pub generators: BTreeSet<String>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_symbol(mut self, name: &str, arity: usize, infix: bool) -> Self {
        self.add_symbol(name, arity, infix);
        self
    }

    pub fn add_symbol(&mut self, name: &str, arity: usize, infix: bool) {
        self.symbols.insert(name.to_string(), SymbolDecl { arity, infix: infix && arity == 2 });
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols.get(name).map(|d| d.arity)
    }

    pub fn is_infix(&self, name: &str) -> bool {
        self.symbols.get(name).is_some_and(|d| d.infix)
    }

    pub fn check_disjoint(&self) -> Result<(), TermError> {
        match self.generators.iter().find(|g| self.symbols.get(*g).is_some_and(|d| d.arity > 0)) {
            Some(g) => Err(TermError::NameClash(g.clone())),
            None => Ok(()),
        }
    }

    fn classify(&self, name: &str) -> Term {
        if self.symbols.contains_key(name) || self.generators.contains(name) {
            return Term::Gen(name.to_string());
        }
        if name.chars().next().is_some_and(char::is_uppercase) {
            Term::Gen(name.to_string())
        } else {
            Term::Var(name.to_string())
        }
    }

    pub fn parse(&self, text: &str) -> Result<Term, TermError> {
        let mut cur = Cursor::new(text)?;
        let t = self.parse_from(&mut cur)?;
        if !cur.at_eof() {
            return Err(cur.error(format!("unexpected {} after term", cur.peek())).into());
        }
        Ok(t)
    }

    /// Parses one term from the cursor, leaving it after the term.
    pub fn parse_from(&self, cur: &mut Cursor) -> Result<Term, TermError> {
        match cur.peek().clone() {
            Tok::LParen => {
                cur.next();
                let first = self.parse_from(cur)?;
                if *cur.peek() == Tok::RParen {
                    cur.next();
                    return Ok(first);
                }
                let op = cur.ident()?;
                if !self.is_infix(&op) {
                    return Err(TermError::NotInfix(op));
                }
                let mut acc = first;
                loop {
                    let rhs = self.parse_from(cur)?;
                    acc = Term::App(op.clone(), vec![acc, rhs]);
                    match cur.peek().clone() {
                        Tok::RParen => {
                            cur.next();
                            return Ok(acc);
                        }
                        Tok::Ident(o) if o == op => {
                            cur.next();
                        }
                        other => return Err(cur.error(format!("expected `)` or `{}`, found {}", op, other)).into()),
                    }
                }
            }
            Tok::Ident(name) => {
                cur.next();
                if *cur.peek() == Tok::LParen {
                    let arity = self.arity(&name).ok_or_else(|| TermError::UnknownSymbol(name.clone()))?;
                    cur.next();
                    let mut args = vec![self.parse_from(cur)?];
                    while *cur.peek() == Tok::Comma {
                        cur.next();
                        args.push(self.parse_from(cur)?);
                    }
                    cur.expect(&Tok::RParen)?;
                    if args.len() != arity {
                        return Err(TermError::Arity { symbol: name, expected: arity, found: args.len() });
                    }
                    Ok(Term::App(name, args))
                } else {
                    match self.arity(&name) {
                        Some(a) if a > 0 => Err(TermError::Arity { symbol: name, expected: a, found: 0 }),
                        _ => Ok(self.classify(&name)),
                    }
                }
            }
            other => Err(cur.error(format!("expected a term, found {}", other)).into()),
        }
    }

    /// Fully parenthesized infix for infix symbols, prefix otherwise. Flattened
    /// associative nodes print as a chain `(a op b op c)`.
    pub fn print(&self, t: &Term) -> String {
        let mut s = String::new();
        self.print_into(t, &mut s);
        s
    }

    fn print_into(&self, t: &Term, out: &mut String) {
        match t {
            Term::Var(x) | Term::Gen(x) => out.push_str(x),
            Term::App(f, args) if self.is_infix(f) && args.len() >= 2 => {
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push(' ');
                        out.push_str(f);
                        out.push(' ');
                    }
                    self.print_into(a, out);
                }
                out.push(')');
            }
            Term::App(f, args) => {
                out.push_str(f);
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    self.print_into(a, out);
                }
                out.push(')');
            }
        }
    }
}

/// Object equations: none, or strict associativity with a unit for each listed
/// binary symbol. Several symbols may share one unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectTheory {
    #[default]
    Empty,
    AssocUnit(Vec<(String, String)>),
}

impl ObjectTheory {
    pub fn is_empty(&self) -> bool {
        match self {
            ObjectTheory::Empty => true,
            ObjectTheory::AssocUnit(v) => v.is_empty(),
        }
    }

    /// Unit of `sym` if `sym` is associative.
    pub fn unit_of(&self, sym: &str) -> Option<&str> {
        match self {
            ObjectTheory::Empty => None,
            ObjectTheory::AssocUnit(v) => v.iter().find(|(s, _)| s == sym).map(|(_, u)| u.as_str()),
        }
    }

    pub fn is_unit(&self, t: &Term) -> bool {
        match (self, t) {
            (ObjectTheory::AssocUnit(v), Term::Gen(g)) => v.iter().any(|(_, u)| u == g),
            _ => false,
        }
    }

    pub fn validate(&self, sig: &Signature) -> Result<(), String> {
        let ObjectTheory::AssocUnit(v) = self else { return Ok(()) };
        let mut seen = BTreeSet::new();
        for (s, u) in v {
            if sig.arity(s) != Some(2) {
                return Err(format!("associative symbol `{}` must be a declared binary symbol", s));
            }
            if sig.arity(u).is_some_and(|a| a != 0) {
                return Err(format!("unit `{}` must be nullary", u));
            }
            if !seen.insert(s) {
                return Err(format!("symbol `{}` listed twice in the object theory", s));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Gen(String),
    App(String, Vec<Term>),
}

pub type Position = Vec<usize>;

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn gen(g: &str) -> Term {
        Term::Gen(g.to_string())
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.to_string(), args)
    }

    pub fn children(&self) -> &[Term] {
        match self {
            Term::App(_, a) => a,
            _ => &[],
        }
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            Term::App(f, _) => Some(f),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(Term::size).sum::<usize>()
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Gen(_) => true,
            Term::App(_, a) => a.iter().all(Term::is_ground),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_leaves(&mut |t| {
            if let Term::Var(x) = t {
                out.insert(x.clone());
            }
        });
        out
    }

    /// Variables in left-to-right order of first occurrence.
    pub fn vars_ordered(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit_leaves(&mut |t| {
            if let Term::Var(x) = t {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
        });
        out
    }

    pub fn var_occurrences(&self, x: &str) -> usize {
        let mut n = 0;
        self.visit_leaves(&mut |t| {
            if matches!(t, Term::Var(y) if y == x) {
                n += 1;
            }
        });
        n
    }

    pub fn leaves(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
            match t {
                Term::App(_, a) if !a.is_empty() => a.iter().for_each(|c| go(c, out)),
                _ => out.push(t),
            }
        }
        go(self, &mut out);
        out
    }

    fn visit_leaves(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Term::App(_, a) => a.iter().for_each(|c| c.visit_leaves(f)),
            _ => f(self),
        }
    }

    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        fn go(t: &Term, p: &mut Position, out: &mut Vec<Position>) {
            out.push(p.clone());
            for (i, c) in t.children().iter().enumerate() {
                p.push(i);
                go(c, p, out);
                p.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn subterm_at(&self, p: &[usize]) -> Result<&Term, TermError> {
        let mut t = self;
        for &i in p {
            t = t.children().get(i).ok_or_else(|| TermError::InvalidPosition(p.to_vec()))?;
        }
        Ok(t)
    }

    pub fn replace_at(&self, p: &[usize], new: Term) -> Result<Term, TermError> {
        match p.split_first() {
            None => Ok(new),
            Some((&i, rest)) => match self {
                Term::App(f, args) if i < args.len() => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_at(rest, new)?;
                    Ok(Term::App(f.clone(), args))
                }
                _ => Err(TermError::InvalidPosition(p.to_vec())),
            },
        }
    }

    pub fn rename_vars(&self, f: &impl Fn(&str) -> String) -> Term {
        match self {
            Term::Var(x) => Term::Var(f(x)),
            Term::Gen(_) => self.clone(),
            Term::App(g, a) => Term::App(g.clone(), a.iter().map(|c| c.rename_vars(f)).collect()),
        }
    }
}

/// Prefix rendering without signature information.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) | Term::Gen(x) => f.write_str(x),
            Term::App(g, a) => {
                write!(f, "{}(", g)?;
                for (k, c) in a.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", c)?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A term in canonical form for some object theory.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalTerm(Term);

impl CanonicalTerm {
    /// Wraps a term already known to be canonical.
    pub fn assume(t: Term) -> Self {
        CanonicalTerm(t)
    }

    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn into_term(self) -> Term {
        self.0
    }
}

impl Deref for CanonicalTerm {
    type Target = Term;
    fn deref(&self) -> &Term {
        &self.0
    }
}

impl fmt::Display for CanonicalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn canonicalize(t: &Term, th: &ObjectTheory) -> CanonicalTerm {
    CanonicalTerm(canon(t, th))
}

fn canon(t: &Term, th: &ObjectTheory) -> Term {
    match t {
        Term::App(f, args) => {
            let args: Vec<Term> = args.iter().map(|a| canon(a, th)).collect();
            match th.unit_of(f) {
                Some(u) => au_node(f, u, args),
                None => Term::App(f.clone(), args),
            }
        }
        _ => t.clone(),
    }
}

/// Builds the canonical `f`-node over already canonical children.
pub(crate) fn au_node(f: &str, unit: &str, args: Vec<Term>) -> Term {
    let mut flat = Vec::with_capacity(args.len());
    for a in args {
        match a {
            Term::App(g, cs) if g == f => flat.extend(cs),
            Term::Gen(ref g) if g == unit => {}
            other => flat.push(other),
        }
    }
    match flat.len() {
        0 => Term::Gen(unit.to_string()),
        1 => flat.pop().unwrap(),
        _ => Term::App(f.to_string(), flat),
    }
}

pub fn term_eq(s: &Term, t: &Term, th: &ObjectTheory) -> bool {
    canonicalize(s, th) == canonicalize(t, th)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Substitution(pub BTreeMap<String, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: &str, t: Term) {
        self.0.insert(x.to_string(), t);
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(x) => self.0.get(x).cloned().unwrap_or_else(|| t.clone()),
            Term::Gen(_) => t.clone(),
            Term::App(f, a) => Term::App(f.clone(), a.iter().map(|c| self.apply(c)).collect()),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (x, t)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} := {}", x, t)?;
        }
        f.write_str("}")
    }
}

fn count_units(t: &Term, th: &ObjectTheory) -> usize {
    if th.is_unit(t) {
        return 1;
    }
    t.children().iter().map(|c| count_units(c, th)).sum()
}

struct Matcher<'a> {
    th: &'a ObjectTheory,
    budget: usize,
    present_units: usize,
}

impl Matcher<'_> {
    fn inserted(&self, sigma: &Substitution) -> usize {
        let bound_to_unit = sigma.0.values().filter(|t| self.th.is_unit(t)).count();
        bound_to_unit.saturating_sub(self.present_units)
    }

    fn solve(&self, goals: &[(Term, Term)], sigma: Substitution, out: &mut BTreeSet<Substitution>) {
        if self.inserted(&sigma) > self.budget {
            return;
        }
        let Some(((p, s), rest)) = goals.split_first() else {
            out.insert(sigma);
            return;
        };
        match p {
            Term::Var(x) => match sigma.get(x) {
                Some(b) if b == s => self.solve(rest, sigma, out),
                Some(_) => {}
                None => {
                    let mut sigma = sigma;
                    sigma.insert(x, s.clone());
                    self.solve(rest, sigma, out);
                }
            },
            Term::Gen(_) => {
                if p == s {
                    self.solve(rest, sigma, out)
                }
            }
            Term::App(f, ps) => match self.th.unit_of(f) {
                None => {
                    if let Term::App(g, ss) = s {
                        if g == f && ss.len() == ps.len() {
                            let mut next: Vec<(Term, Term)> = ps.iter().cloned().zip(ss.iter().cloned()).collect();
                            next.extend_from_slice(rest);
                            self.solve(&next, sigma, out);
                        }
                    }
                }
                Some(u) => {
                    let seq: Vec<Term> = match s {
                        Term::App(g, ss) if g == f => ss.clone(),
                        _ if self.th.is_unit(s) && matches!(s, Term::Gen(g) if g == u) => Vec::new(),
                        _ => vec![s.clone()],
                    };
                    let k = ps.len();
                    let mut cuts = vec![0usize; k + 1];
                    cuts[k] = seq.len();
                    self.segments(f, u, ps, &seq, &mut cuts, 1, rest, &sigma, out);
                }
            },
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn segments(
        &self,
        f: &str,
        u: &str,
        ps: &[Term],
        seq: &[Term],
        cuts: &mut Vec<usize>,
        idx: usize,
        rest: &[(Term, Term)],
        sigma: &Substitution,
        out: &mut BTreeSet<Substitution>,
    ) {
        let k = ps.len();
        if idx == k {
            let mut next: Vec<(Term, Term)> = (0..k)
                .map(|i| {
                    let seg = seq[cuts[i]..cuts[i + 1]].to_vec();
                    (ps[i].clone(), au_node(f, u, seg))
                })
                .collect();
            next.extend_from_slice(rest);
            self.solve(&next, sigma.clone(), out);
            return;
        }
        for c in cuts[idx - 1]..=seq.len() {
            cuts[idx] = c;
            self.segments(f, u, ps, seq, cuts, idx + 1, rest, sigma, out);
        }
    }
}

/// All substitutions σ with `canonicalize(σ(pattern)) == subject`, inserting at
/// most `unit_budget` unit constants beyond those already present in `subject`.
///
/// Variables occurring in `subject` are treated as constants.
pub fn match_modulo(
    pattern: &Term,
    subject: &CanonicalTerm,
    th: &ObjectTheory,
    unit_budget: usize,
) -> Vec<Substitution> {
    match_many(&[(pattern.clone(), subject.clone())], th, unit_budget)
}

/// Simultaneous matching of several (pattern, subject) pairs.
pub fn match_many(pairs: &[(Term, CanonicalTerm)], th: &ObjectTheory, unit_budget: usize) -> Vec<Substitution> {
    let goals: Vec<(Term, Term)> = pairs.iter().map(|(p, s)| (canon(p, th), s.term().clone())).collect();
    let present_units = pairs.iter().map(|(_, s)| count_units(s, th)).sum();
    let m = Matcher { th, budget: unit_budget, present_units };
    let mut out = BTreeSet::new();
    m.solve(&goals, Substitution::new(), &mut out);
    out.into_iter().collect()
}

/// Most general unifier over the empty theory, or `None` if the terms do not unify.
pub fn unify_syntactic(s: &Term, t: &Term, th: &ObjectTheory) -> Result<Option<Substitution>, TermError> {
    if !th.is_empty() {
        return Err(TermError::NonEmptyTheory);
    }
    Ok(unify_all(vec![(s.clone(), t.clone())]))
}

/// Robinson unification of a list of equations; result is idempotent.
pub(crate) fn unify_all(mut eqs: Vec<(Term, Term)>) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    while let Some((a, b)) = eqs.pop() {
        let a = sigma.apply(&a);
        let b = sigma.apply(&b);
        if a == b {
            continue;
        }
        match (a, b) {
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.vars().contains(&x) {
                    return None;
                }
                let single: Substitution = std::iter::once((x.clone(), t.clone())).collect();
                for v in sigma.0.values_mut() {
                    *v = single.apply(v);
                }
                sigma.insert(&x, t);
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                eqs.extend(xs.into_iter().zip(ys));
            }
            _ => return None,
        }
    }
    Some(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monoidal() -> (Signature, ObjectTheory) {
        let sig = Signature::new().with_symbol("ot1", 2, true).with_symbol("ot2", 2, true).with_symbol("I", 0, false);
        let th = ObjectTheory::AssocUnit(vec![("ot1".into(), "I".into()), ("ot2".into(), "I".into())]);
        (sig, th)
    }

    #[test]
    fn parses_nested_infix() {
        let (sig, _) = monoidal();
        let t = sig.parse("(A ot1 (B ot1 (C ot1 D)))").unwrap();
        let expect = Term::app(
            "ot1",
            vec![
                Term::gen("A"),
                Term::app("ot1", vec![Term::gen("B"), Term::app("ot1", vec![Term::gen("C"), Term::gen("D")])]),
            ],
        );
        assert_eq!(t, expect);
        assert_eq!(sig.parse(&sig.print(&t)).unwrap(), t);
    }

    #[test]
    fn nullary_symbol_is_generator() {
        let (sig, _) = monoidal();
        assert_eq!(sig.parse("I").unwrap(), Term::gen("I"));
        assert_eq!(sig.parse("x").unwrap(), Term::var("x"));
    }

    #[test]
    fn rejects_unknown_symbol_and_bad_arity() {
        let (sig, _) = monoidal();
        assert!(matches!(sig.parse("F(x)"), Err(TermError::UnknownSymbol(_))));
        assert!(matches!(sig.parse("ot1(A)"), Err(TermError::Arity { .. })));
        assert!(matches!(sig.parse("(A ot1"), Err(TermError::Syntax(_))));
    }

    #[test]
    fn canonical_forms() {
        let (sig, th) = monoidal();
        let t = sig.parse("((A ot1 I) ot1 (B ot1 C))").unwrap();
        assert_eq!(
            canonicalize(&t, &th).term(),
            &Term::app("ot1", vec![Term::gen("A"), Term::gen("B"), Term::gen("C")])
        );
        let e = sig.parse("(A ot1 (B ot1 C))").unwrap();
        assert_eq!(canonicalize(&e, &ObjectTheory::Empty).term(), &e);
        assert_eq!(canonicalize(&sig.parse("(A ot2 I)").unwrap(), &th).term(), &Term::gen("A"));
        assert!(term_eq(&sig.parse("(I ot1 A)").unwrap(), &Term::gen("A"), &th));
        assert!(!term_eq(&sig.parse("(A ot1 B)").unwrap(), &sig.parse("(A ot2 B)").unwrap(), &th));
        assert_eq!(canonicalize(&sig.parse("(I ot1 I)").unwrap(), &th).term(), &Term::gen("I"));
    }

    #[test]
    fn chained_infix_prints_and_reparses() {
        let (sig, th) = monoidal();
        let c = canonicalize(&sig.parse("((A ot1 B) ot1 (C ot2 D))").unwrap(), &th);
        let printed = sig.print(&c);
        assert_eq!(printed, "(A ot1 B ot1 (C ot2 D))");
        assert_eq!(canonicalize(&sig.parse(&printed).unwrap(), &th), c);
    }

    #[test]
    fn empty_theory_match() {
        let sig = Signature::new().with_symbol("ot1", 2, true);
        let p = sig.parse("(x ot1 (y ot1 z))").unwrap();
        let s = canonicalize(&sig.parse("(A ot1 (B ot1 (C ot1 D)))").unwrap(), &ObjectTheory::Empty);
        let ms = match_modulo(&p, &s, &ObjectTheory::Empty, 0);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].get("z").unwrap(), &sig.parse("(C ot1 D)").unwrap());
    }

    #[test]
    fn unit_insertion_respects_budget() {
        let (sig, th) = monoidal();
        let p = sig.parse("((a ot2 b) ot1 (c ot2 d))").unwrap();
        let s = canonicalize(&sig.parse("(P ot1 Q)").unwrap(), &th);
        let ms = match_modulo(&p, &s, &th, 2);
        let iota: Substitution = [("a", "P"), ("b", "I"), ("c", "I"), ("d", "Q")]
            .iter()
            .map(|(x, g)| (x.to_string(), Term::gen(g)))
            .collect();
        let tau: Substitution = [("a", "I"), ("b", "P"), ("c", "Q"), ("d", "I")]
            .iter()
            .map(|(x, g)| (x.to_string(), Term::gen(g)))
            .collect();
        assert!(ms.contains(&iota));
        assert!(ms.contains(&tau));
        assert!(match_modulo(&p, &s, &th, 0).is_empty());
    }

    #[test]
    fn unification() {
        let sig = Signature::new().with_symbol("F", 1, false).with_symbol("G", 1, false);
        let e = ObjectTheory::Empty;
        let u = unify_syntactic(&sig.parse("F(x)").unwrap(), &sig.parse("F(G(y))").unwrap(), &e).unwrap().unwrap();
        assert_eq!(u.get("x").unwrap(), &sig.parse("G(y)").unwrap());
        assert!(unify_syntactic(&Term::var("x"), &sig.parse("F(x)").unwrap(), &e).unwrap().is_none());
        assert!(unify_syntactic(&sig.parse("F(x)").unwrap(), &sig.parse("G(y)").unwrap(), &e).unwrap().is_none());
        let (_, th) = monoidal();
        assert!(unify_syntactic(&Term::var("x"), &Term::var("y"), &th).is_err());
    }

    #[test]
    fn positions_and_subterms() {
        let (sig, _) = monoidal();
        let t = sig.parse("(A ot1 B)").unwrap();
        assert_eq!(t.positions(), vec![vec![], vec![0], vec![1]]);
        let u = sig.parse("(A ot1 (B ot1 C))").unwrap();
        assert_eq!(u.subterm_at(&[1]).unwrap(), &sig.parse("(B ot1 C)").unwrap());
        assert!(Term::gen("A").subterm_at(&[0]).is_err());
    }
}
