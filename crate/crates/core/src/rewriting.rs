//! Labelled rules, 2-structures, morphism expressions and their calculus:
//! endpoints, shapes, variables and general position.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Cursor, Tok};
use crate::terms::{canonicalize, unify_all, CanonicalTerm, ObjectTheory, Signature, Substitution, Term, TermError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("unknown rule label `{0}`")]
    UnknownRule(String),
    #[error("`{name}` expects {expected} argument(s), found {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("cannot compose: target {left_target} differs from source {right_source}")]
    CompMismatch { left_target: String, right_source: String },
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub label: String,
    /// Argument order for `label(m1, ..., mn)`.
    pub vars: Vec<String>,
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    /// A rule whose argument order is the order of first occurrence in `lhs`.
    pub fn new(label: &str, lhs: Term, rhs: Term) -> Self {
        let vars = lhs.vars_ordered();
        Rule { label: label.to_string(), vars, lhs, rhs }
    }

    pub fn with_vars(label: &str, vars: &[&str], lhs: Term, rhs: Term) -> Self {
        Rule { label: label.to_string(), vars: vars.iter().map(|v| v.to_string()).collect(), lhs, rhs }
    }
}

/// A stored equation between two parallel morphisms. When `identity_instance`
/// is set, one side is an identity and the other a rule instance; matching
/// rule instances are treated as identities and never become edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axiom {
    pub name: String,
    pub lhs: Morphism,
    pub rhs: Morphism,
    pub identity_instance: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoStructure {
    pub sig: Signature,
    pub theory: ObjectTheory,
    pub rules: Vec<Rule>,
    pub axioms: Vec<Axiom>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Morphism {
    Id(Term),
    Lift(String, Vec<Morphism>),
    App(String, Vec<Morphism>),
    Comp(Box<Morphism>, Box<Morphism>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ShapeTree {
    Hole,
    Rule(String, Vec<ShapeTree>),
    Sym(String, Vec<ShapeTree>),
    Comp(Box<ShapeTree>, Box<ShapeTree>),
}

impl fmt::Display for ShapeTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeTree::Hole => f.write_str("∘"),
            ShapeTree::Rule(n, a) | ShapeTree::Sym(n, a) => {
                write!(f, "{}(", n)?;
                for (k, c) in a.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", c)?;
                }
                f.write_str(")")
            }
            ShapeTree::Comp(a, b) => write!(f, "{}·{}", a, b),
        }
    }
}

impl Morphism {
    pub fn id(t: Term) -> Self {
        Morphism::Id(t)
    }

    pub fn comp(a: Morphism, b: Morphism) -> Self {
        Morphism::Comp(Box::new(a), Box::new(b))
    }

    /// Left-nested composite of a non-empty list.
    pub fn comp_all(ms: Vec<Morphism>) -> Option<Morphism> {
        ms.into_iter().reduce(Morphism::comp)
    }

    pub fn shape(&self) -> ShapeTree {
        match self {
            Morphism::Id(_) => ShapeTree::Hole,
            Morphism::Lift(l, a) => ShapeTree::Rule(l.clone(), a.iter().map(Morphism::shape).collect()),
            Morphism::App(f, a) => {
                let kids: Vec<ShapeTree> = a.iter().map(Morphism::shape).collect();
                if kids.iter().all(|k| *k == ShapeTree::Hole) {
                    ShapeTree::Hole
                } else {
                    ShapeTree::Sym(f.clone(), kids)
                }
            }
            Morphism::Comp(a, b) => ShapeTree::Comp(Box::new(a.shape()), Box::new(b.shape())),
        }
    }

    /// The leaf identities: atoms (generators and variables) of every identity
    /// sub-expression. Units and other constants of the signature are excluded.
    pub fn vars(&self, sig: &Signature) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.visit_ids(&mut |t| {
            for leaf in t.leaves() {
                if is_atom(leaf, sig) {
                    out.insert(leaf.clone());
                }
            }
        });
        out
    }

    fn visit_ids(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Morphism::Id(t) => f(t),
            Morphism::Lift(_, a) | Morphism::App(_, a) => a.iter().for_each(|m| m.visit_ids(f)),
            Morphism::Comp(a, b) => {
                a.visit_ids(f);
                b.visit_ids(f);
            }
        }
    }

    fn map_ids(&self, f: &mut impl FnMut(&Term) -> Term) -> Morphism {
        match self {
            Morphism::Id(t) => Morphism::Id(f(t)),
            Morphism::Lift(l, a) => Morphism::Lift(l.clone(), a.iter().map(|m| m.map_ids(f)).collect()),
            Morphism::App(s, a) => Morphism::App(s.clone(), a.iter().map(|m| m.map_ids(f)).collect()),
            Morphism::Comp(a, b) => Morphism::comp(a.map_ids(f), b.map_ids(f)),
        }
    }

    pub fn substitute(&self, sigma: &Substitution) -> Morphism {
        self.map_ids(&mut |t| sigma.apply(t))
    }

    pub fn term_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_ids(&mut |t| out.extend(t.vars()));
        out
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Morphism::Id(_) => true,
            Morphism::App(_, a) => a.iter().all(Morphism::is_identity),
            Morphism::Lift(..) => false,
            Morphism::Comp(a, b) => a.is_identity() && b.is_identity(),
        }
    }
}

fn is_atom(t: &Term, sig: &Signature) -> bool {
    match t {
        Term::Var(_) => true,
        Term::Gen(g) => !sig.symbols.contains_key(g),
        Term::App(..) => false,
    }
}

/// `1_t` unfolded along the structure of `t`.
pub fn identity_of(t: &Term) -> Morphism {
    match t {
        Term::App(f, a) if !a.is_empty() => Morphism::App(f.clone(), a.iter().map(identity_of).collect()),
        _ => Morphism::Id(t.clone()),
    }
}

impl TwoStructure {
    pub fn rule(&self, label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.label == label)
    }

    pub fn canon(&self, t: &Term) -> CanonicalTerm {
        canonicalize(t, &self.theory)
    }

    pub fn parse_term(&self, text: &str) -> Result<Term, TermError> {
        self.sig.parse(text)
    }

    pub fn parse_canonical(&self, text: &str) -> Result<CanonicalTerm, TermError> {
        Ok(self.canon(&self.sig.parse(text)?))
    }

    pub fn print(&self, t: &Term) -> String {
        self.sig.print(t)
    }

    /// Endpoints of a morphism expression.
    pub fn source_target(&self, m: &Morphism) -> Result<(CanonicalTerm, CanonicalTerm), MorphismError> {
        let (s, t) = self.raw_endpoints(m)?;
        Ok((self.canon(&s), self.canon(&t)))
    }

    fn raw_endpoints(&self, m: &Morphism) -> Result<(Term, Term), MorphismError> {
        match m {
            Morphism::Id(t) => Ok((t.clone(), t.clone())),
            Morphism::Lift(l, args) => {
                let r = self.rule(l).ok_or_else(|| MorphismError::UnknownRule(l.clone()))?;
                if args.len() != r.vars.len() {
                    return Err(MorphismError::Arity { name: l.clone(), expected: r.vars.len(), found: args.len() });
                }
                let mut ss = Substitution::new();
                let mut ts = Substitution::new();
                for (x, a) in r.vars.iter().zip(args) {
                    let (s, t) = self.raw_endpoints(a)?;
                    ss.insert(x, s);
                    ts.insert(x, t);
                }
                Ok((ss.apply(&r.lhs), ts.apply(&r.rhs)))
            }
            Morphism::App(f, args) => {
                self.check_app_arity(f, args.len())?;
                let mut ss = Vec::new();
                let mut ts = Vec::new();
                for a in args {
                    let (s, t) = self.raw_endpoints(a)?;
                    ss.push(s);
                    ts.push(t);
                }
                Ok((Term::App(f.clone(), ss), Term::App(f.clone(), ts)))
            }
            Morphism::Comp(a, b) => {
                let (s, u) = self.raw_endpoints(a)?;
                let (u2, t) = self.raw_endpoints(b)?;
                if self.canon(&u) != self.canon(&u2) {
                    return Err(MorphismError::CompMismatch {
                        left_target: self.print(&u),
                        right_source: self.print(&u2),
                    });
                }
                Ok((s, t))
            }
        }
    }

    fn check_app_arity(&self, f: &str, n: usize) -> Result<(), MorphismError> {
        let arity = self.sig.arity(f).ok_or_else(|| TermError::UnknownSymbol(f.to_string()))?;
        let ok = if self.theory.unit_of(f).is_some() { n >= 2 } else { n == arity };
        if ok {
            Ok(())
        } else {
            Err(MorphismError::Arity { name: f.to_string(), expected: arity, found: n })
        }
    }

    /// True iff relabelling every leaf identity of `m` apart cannot increase
    /// the number of distinct leaves without breaking well-typedness.
    pub fn is_general_position(&self, m: &Morphism) -> Result<bool, MorphismError> {
        self.source_target(m)?;
        let mut counter = 0usize;
        let sig = &self.sig;
        let fresh = m.map_ids(&mut |t| relabel_atoms(t, sig, &mut counter));
        let mut eqs = Vec::new();
        self.comp_constraints(&fresh, &mut eqs)?;
        let Some(mgu) = unify_all(eqs) else {
            // The original labelling is itself a unifier, so this cannot happen
            // for a well-typed input.
            return Ok(false);
        };
        let classes: BTreeSet<Term> = (0..counter).map(|k| mgu.apply(&Term::Var(fresh_name(k)))).collect();
        Ok(classes.len() == m.vars(&self.sig).len())
    }

    fn comp_constraints(&self, m: &Morphism, eqs: &mut Vec<(Term, Term)>) -> Result<(), MorphismError> {
        match m {
            Morphism::Id(_) => Ok(()),
            Morphism::Lift(_, a) | Morphism::App(_, a) => a.iter().try_for_each(|x| self.comp_constraints(x, eqs)),
            Morphism::Comp(a, b) => {
                self.comp_constraints(a, eqs)?;
                self.comp_constraints(b, eqs)?;
                let (_, u) = self.raw_endpoints_unchecked(a)?;
                let (u2, _) = self.raw_endpoints_unchecked(b)?;
                eqs.push((self.canon(&u).into_term(), self.canon(&u2).into_term()));
                Ok(())
            }
        }
    }

    /// Endpoints without the composability check.
    fn raw_endpoints_unchecked(&self, m: &Morphism) -> Result<(Term, Term), MorphismError> {
        match m {
            Morphism::Comp(a, b) => {
                let (s, _) = self.raw_endpoints_unchecked(a)?;
                let (_, t) = self.raw_endpoints_unchecked(b)?;
                Ok((s, t))
            }
            Morphism::Lift(l, args) => {
                let r = self.rule(l).ok_or_else(|| MorphismError::UnknownRule(l.clone()))?;
                let mut ss = Substitution::new();
                let mut ts = Substitution::new();
                for (x, a) in r.vars.iter().zip(args) {
                    let (s, t) = self.raw_endpoints_unchecked(a)?;
                    ss.insert(x, s);
                    ts.insert(x, t);
                }
                Ok((ss.apply(&r.lhs), ts.apply(&r.rhs)))
            }
            Morphism::App(f, args) => {
                let mut ss = Vec::new();
                let mut ts = Vec::new();
                for a in args {
                    let (s, t) = self.raw_endpoints_unchecked(a)?;
                    ss.push(s);
                    ts.push(t);
                }
                Ok((Term::App(f.clone(), ss), Term::App(f.clone(), ts)))
            }
            Morphism::Id(t) => Ok((t.clone(), t.clone())),
        }
    }

    pub fn parse_morphism(&self, text: &str) -> Result<Morphism, MorphismError> {
        let mut cur = Cursor::new(text).map_err(TermError::from)?;
        let m = self.parse_morphism_from(&mut cur)?;
        if !cur.at_eof() {
            return Err(TermError::Syntax(cur.error(format!("unexpected {} after morphism", cur.peek()))).into());
        }
        Ok(m)
    }

    /// Parses `m ; m ; ...` (left-associative) from the cursor.
    pub fn parse_morphism_from(&self, cur: &mut Cursor) -> Result<Morphism, MorphismError> {
        let mut acc = self.parse_morphism_atom(cur)?;
        while *cur.peek() == Tok::Semi {
            cur.next();
            let rhs = self.parse_morphism_atom(cur)?;
            acc = Morphism::comp(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_morphism_atom(&self, cur: &mut Cursor) -> Result<Morphism, MorphismError> {
        match cur.peek().clone() {
            Tok::IdPrefix => {
                cur.next();
                Ok(Morphism::Id(self.sig.parse_from(cur)?))
            }
            Tok::LParen => {
                cur.next();
                let first = self.parse_morphism_from(cur)?;
                if *cur.peek() == Tok::RParen {
                    cur.next();
                    return Ok(first);
                }
                let op = cur.ident().map_err(TermError::from)?;
                if !self.sig.is_infix(&op) {
                    return Err(TermError::NotInfix(op).into());
                }
                let mut acc = first;
                loop {
                    let rhs = self.parse_morphism_from(cur)?;
                    acc = Morphism::App(op.clone(), vec![acc, rhs]);
                    match cur.peek().clone() {
                        Tok::RParen => {
                            cur.next();
                            return Ok(acc);
                        }
                        Tok::Ident(o) if o == op => {
                            cur.next();
                        }
                        other => {
                            return Err(TermError::Syntax(
                                cur.error(format!("expected `)` or `{}`, found {}", op, other)),
                            )
                            .into())
                        }
                    }
                }
            }
            Tok::Ident(name) => {
                cur.next();
                cur.expect(&Tok::LParen).map_err(TermError::from)?;
                let mut args = vec![self.parse_morphism_from(cur)?];
                while *cur.peek() == Tok::Comma {
                    cur.next();
                    args.push(self.parse_morphism_from(cur)?);
                }
                cur.expect(&Tok::RParen).map_err(TermError::from)?;
                if let Some(r) = self.rule(&name) {
                    if r.vars.len() != args.len() {
                        return Err(MorphismError::Arity { name, expected: r.vars.len(), found: args.len() });
                    }
                    Ok(Morphism::Lift(name, args))
                } else if self.sig.arity(&name).is_some() {
                    self.check_app_arity(&name, args.len())?;
                    Ok(Morphism::App(name, args))
                } else {
                    Err(MorphismError::UnknownRule(name))
                }
            }
            other => Err(TermError::Syntax(cur.error(format!("expected a morphism, found {}", other))).into()),
        }
    }

    pub fn print_morphism(&self, m: &Morphism) -> String {
        let mut s = String::new();
        self.print_morphism_into(m, false, &mut s);
        s
    }

    fn print_morphism_into(&self, m: &Morphism, nested: bool, out: &mut String) {
        match m {
            Morphism::Id(t) => {
                out.push_str("1_");
                out.push_str(&self.print(t));
            }
            Morphism::Lift(n, a) => self.print_call(n, a, out),
            Morphism::App(f, a) if self.sig.is_infix(f) && a.len() >= 2 => {
                out.push('(');
                for (k, c) in a.iter().enumerate() {
                    if k > 0 {
                        out.push(' ');
                        out.push_str(f);
                        out.push(' ');
                    }
                    self.print_morphism_into(c, true, out);
                }
                out.push(')');
            }
            Morphism::App(f, a) => self.print_call(f, a, out),
            Morphism::Comp(a, b) => {
                if nested {
                    out.push('(');
                }
                self.print_morphism_into(a, false, out);
                out.push_str(" ; ");
                self.print_morphism_into(b, true, out);
                if nested {
                    out.push(')');
                }
            }
        }
    }

    fn print_call(&self, name: &str, args: &[Morphism], out: &mut String) {
        out.push_str(name);
        out.push('(');
        for (k, c) in args.iter().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            self.print_morphism_into(c, true, out);
        }
        out.push(')');
    }
}

fn fresh_name(k: usize) -> String {
    format!("_g{}", k)
}

fn relabel_atoms(t: &Term, sig: &Signature, counter: &mut usize) -> Term {
    match t {
        Term::App(f, a) => Term::App(f.clone(), a.iter().map(|c| relabel_atoms(c, sig, counter)).collect()),
        leaf if is_atom(leaf, sig) => {
            *counter += 1;
            Term::Var(fresh_name(*counter - 1))
        }
        leaf => leaf.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationIssue {
    DuplicateLabel(String),
    LabelClashesWithSymbol(String),
    RuleVariables { label: String, detail: String },
    RuleTerm { label: String, detail: String },
    Theory(String),
    Signature(String),
    AxiomIllTyped { name: String, detail: String },
    AxiomEndpoints { name: String, detail: String },
    AxiomIdentityFlag { name: String, detail: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::DuplicateLabel(l) => write!(f, "rule label `{}` names more than one rule", l),
            ValidationIssue::LabelClashesWithSymbol(l) => write!(f, "rule label `{}` is also a function symbol", l),
            ValidationIssue::RuleVariables { label, detail } => write!(f, "rule `{}`: {}", label, detail),
            ValidationIssue::RuleTerm { label, detail } => write!(f, "rule `{}`: {}", label, detail),
            ValidationIssue::Theory(d) => write!(f, "object theory: {}", d),
            ValidationIssue::Signature(d) => write!(f, "signature: {}", d),
            ValidationIssue::AxiomIllTyped { name, detail } => write!(f, "axiom `{}` is ill-typed: {}", name, detail),
            ValidationIssue::AxiomEndpoints { name, detail } => write!(
                f,
                "axiom `{}` equates morphisms with different endpoints (both sides must share source and target): {}",
                name, detail
            ),
            ValidationIssue::AxiomIdentityFlag { name, detail } => {
                write!(f, "axiom `{}` cannot be an identity instance: {}", name, detail)
            }
        }
    }
}

fn check_term(t: &Term, s: &TwoStructure) -> Result<(), String> {
    if let Term::App(f, a) = t {
        match s.sig.arity(f) {
            None => return Err(format!("unknown symbol `{}`", f)),
            Some(n) if n != a.len() => {
                return Err(format!("symbol `{}` applied to {} argument(s), expected {}", f, a.len(), n))
            }
            _ => {}
        }
        for c in a {
            check_term(c, s)?;
        }
    }
    Ok(())
}

pub fn validate_structure(s: &TwoStructure) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    if let Err(e) = s.sig.check_disjoint() {
        issues.push(ValidationIssue::Signature(e.to_string()));
    }
    if let Err(e) = s.theory.validate(&s.sig) {
        issues.push(ValidationIssue::Theory(e));
    }
    let mut seen = BTreeSet::new();
    for r in &s.rules {
        if !seen.insert(r.label.as_str()) {
            issues.push(ValidationIssue::DuplicateLabel(r.label.clone()));
        }
        if s.sig.symbols.contains_key(&r.label) {
            issues.push(ValidationIssue::LabelClashesWithSymbol(r.label.clone()));
        }
        for t in [&r.lhs, &r.rhs] {
            if let Err(detail) = check_term(t, s) {
                issues.push(ValidationIssue::RuleTerm { label: r.label.clone(), detail });
            }
        }
        let declared: BTreeSet<String> = r.vars.iter().cloned().collect();
        if declared.len() != r.vars.len() {
            issues.push(ValidationIssue::RuleVariables {
                label: r.label.clone(),
                detail: "argument variables are not distinct".into(),
            });
        }
        let (lv, rv) = (r.lhs.vars(), r.rhs.vars());
        if lv != declared || rv != declared {
            issues.push(ValidationIssue::RuleVariables {
                label: r.label.clone(),
                detail: "both sides must contain exactly the argument variables".into(),
            });
        }
    }
    for ax in &s.axioms {
        let l = s.source_target(&ax.lhs);
        let r = s.source_target(&ax.rhs);
        match (l, r) {
            (Err(e), _) | (_, Err(e)) => {
                issues.push(ValidationIssue::AxiomIllTyped { name: ax.name.clone(), detail: e.to_string() })
            }
            (Ok((s1, t1)), Ok((s2, t2))) => {
                if s1 != s2 || t1 != t2 {
                    issues.push(ValidationIssue::AxiomEndpoints {
                        name: ax.name.clone(),
                        detail: format!(
                            "{} -> {} versus {} -> {}",
                            s.print(&s1),
                            s.print(&t1),
                            s.print(&s2),
                            s.print(&t2)
                        ),
                    });
                }
            }
        }
        if ax.identity_instance && identity_pattern(ax).is_none() {
            issues.push(ValidationIssue::AxiomIdentityFlag {
                name: ax.name.clone(),
                detail: "one side must be an identity and the other a rule applied to identities".into(),
            });
        }
    }
    issues
}

/// For an identity-instance axiom, the rule label and the argument terms.
pub fn identity_pattern(ax: &Axiom) -> Option<(&str, Vec<&Term>)> {
    let lift = match (&ax.lhs, &ax.rhs) {
        (l @ Morphism::Lift(..), r) if r.is_identity() => l,
        (l, r @ Morphism::Lift(..)) if l.is_identity() => r,
        _ => return None,
    };
    let Morphism::Lift(label, args) = lift else { return None };
    let terms: Option<Vec<&Term>> = args
        .iter()
        .map(|a| match a {
            Morphism::Id(t) => Some(t),
            _ => None,
        })
        .collect();
    Some((label.as_str(), terms?))
}

/// Variables of an axiom paired with a default ordering (first occurrence).
pub fn axiom_vars(ax: &Axiom) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for v in ax.lhs.term_vars().into_iter().chain(ax.rhs.term_vars()) {
        let n = out.len();
        out.entry(v).or_insert(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assoc() -> TwoStructure {
        let sig = Signature::new().with_symbol("ot1", 2, true);
        let p = |s: &str| sig.parse(s).unwrap();
        let alpha = Rule::new("alpha", p("(x ot1 (y ot1 z))"), p("((x ot1 y) ot1 z)"));
        let beta = Rule::new("beta", p("(x ot1 x)"), p("x"));
        TwoStructure { sig: sig.clone(), theory: ObjectTheory::Empty, rules: vec![alpha, beta], axioms: vec![] }
    }

    #[test]
    fn derivation_endpoints() {
        let s = assoc();
        let m = s.parse_morphism("(1_A ot1 alpha(1_B, 1_C, 1_D))").unwrap();
        let (src, tgt) = s.source_target(&m).unwrap();
        assert_eq!(s.print(&src), "(A ot1 (B ot1 (C ot1 D)))");
        assert_eq!(s.print(&tgt), "(A ot1 ((B ot1 C) ot1 D))");
        assert_eq!(s.parse_morphism(&s.print_morphism(&m)).unwrap(), m);
    }

    #[test]
    fn shape_and_vars() {
        let s = assoc();
        let m1 = s.parse_morphism("alpha(1_A, 1_B, 1_C)").unwrap();
        let m2 = s.parse_morphism("alpha(1_A, 1_A, 1_A)").unwrap();
        assert_eq!(m1.shape().to_string(), "alpha(∘,∘,∘)");
        assert_eq!(m1.shape(), m2.shape());
        assert_eq!(m1.vars(&s.sig).len(), 3);
        assert_eq!(m2.vars(&s.sig).len(), 1);
        assert_eq!(Morphism::Id(s.parse_term("(A ot1 A)").unwrap()).vars(&s.sig).len(), 1);
    }

    #[test]
    fn general_position() {
        let s = assoc();
        let m = s.parse_morphism("alpha(1_A, 1_A, 1_B) ; (beta(1_A) ot1 1_B)").unwrap();
        assert!(s.is_general_position(&m).unwrap());
        let a = s.parse_morphism("alpha(1_A, 1_A, 1_B)").unwrap();
        assert!(!s.is_general_position(&a).unwrap());
        let b = s.parse_morphism("alpha(1_A, 1_B, 1_C)").unwrap();
        assert!(s.is_general_position(&b).unwrap());
    }

    #[test]
    fn comp_mismatch_is_error() {
        let s = assoc();
        let m = s.parse_morphism("alpha(1_A, 1_B, 1_C) ; alpha(1_A, 1_B, 1_C)");
        assert!(matches!(m.and_then(|m| s.source_target(&m)), Err(MorphismError::CompMismatch { .. })));
    }

    #[test]
    fn identity_unfolds() {
        let s = assoc();
        let t = s.parse_term("(A ot1 B)").unwrap();
        assert_eq!(
            identity_of(&t),
            Morphism::App("ot1".into(), vec![Morphism::Id(Term::gen("A")), Morphism::Id(Term::gen("B"))])
        );
        assert!(identity_of(&t).is_identity());
    }

    #[test]
    fn validation_reports() {
        let mut s = assoc();
        assert!(validate_structure(&s).is_empty());
        s.rules.push(s.rules[0].clone());
        assert!(validate_structure(&s).iter().any(|i| matches!(i, ValidationIssue::DuplicateLabel(_))));
        let mut s = assoc();
        s.axioms.push(Axiom {
            name: "bad".into(),
            lhs: s.parse_morphism("alpha(1_A, 1_B, 1_C)").unwrap(),
            rhs: s.parse_morphism("1_(A ot1 (B ot1 C))").unwrap(),
            identity_instance: false,
        });
        assert!(validate_structure(&s).iter().any(|i| matches!(i, ValidationIssue::AxiomEndpoints { .. })));
    }
}
