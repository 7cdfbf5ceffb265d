//! Iterated monoidal categories: the structure, its rankings, the map
//! existence criterion and the derived unit maps.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coherence::{decide_commutes, CoherenceError, Verdict};
use crate::format::parse_structure;
use crate::graph::{explore, Limits};
use crate::rewriting::{Morphism, TwoStructure};
use crate::terms::{CanonicalTerm, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImcError {
    #[error("need 1 <= i < j <= n, got i = {i}, j = {j}, n = {n}")]
    Indices { i: usize, j: usize, n: usize },
    #[error("variable {0} does not occur in the term")]
    UnknownVariable(String),
    #[error("terms have different variables: {0:?} versus {1:?}")]
    VariableMismatch(BTreeSet<String>, BTreeSet<String>),
    #[error(transparent)]
    Coherence(#[from] CoherenceError),
}

pub const UNIT: &str = "I";

pub fn tensor(i: usize) -> String {
    format!("ot{}", i)
}

pub fn interchange(i: usize, j: usize) -> String {
    format!("eta{}{}", i, j)
}

/// Index of a tensor symbol `ot<i>`.
pub fn tensor_index(f: &str) -> Option<usize> {
    f.strip_prefix("ot")?.parse().ok()
}

/// The structure file text of the n-fold monoidal structure.
pub fn imc_source(n: usize) -> String {
    let mut out = format!("# {}-fold monoidal categories\nsignature:\n", n);
    for i in 1..=n {
        out.push_str(&format!("  {} : 2 infix\n", tensor(i)));
    }
    out.push_str(&format!("  {} : 0\n", UNIT));
    let decls: Vec<String> = (1..=n).map(|i| format!("{} {}", tensor(i), UNIT)).collect();
    out.push_str(&format!("theory: assoc-unit {}\nrules:\n", decls.join(", ")));
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| ((i + 1)..=n).map(move |j| (i, j))).collect();
    for &(i, j) in &pairs {
        out.push_str(&format!(
            "  {e}(a, b, c, d) : ((a ot{j} b) ot{i} (c ot{j} d)) -> ((a ot{i} c) ot{j} (b ot{i} d))\n",
            e = interchange(i, j)
        ));
    }
    if pairs.is_empty() {
        return out;
    }
    out.push_str("axioms:\n");
    for &(i, j) in &pairs {
        let e = interchange(i, j);
        out.push_str(&format!("  internal-unit-{i}{j}a : {e}(1_a, 1_b, 1_I, 1_I) = 1_(a ot{j} b) [identity]\n"));
        out.push_str(&format!("  internal-unit-{i}{j}b : {e}(1_I, 1_I, 1_a, 1_b) = 1_(a ot{j} b) [identity]\n"));
        out.push_str(&format!("  external-unit-{i}{j}a : {e}(1_a, 1_I, 1_b, 1_I) = 1_(a ot{i} b) [identity]\n"));
        out.push_str(&format!("  external-unit-{i}{j}b : {e}(1_I, 1_a, 1_I, 1_b) = 1_(a ot{i} b) [identity]\n"));
        out.push_str(&format!(
            "  internal-assoc-{i}{j} : ({e}(1_a, 1_b, 1_c, 1_d) ot{i} 1_(e ot{j} f)) ; {e}(1_(a ot{i} c), 1_(b ot{i} d), 1_e, 1_f) \
             = (1_(a ot{j} b) ot{i} {e}(1_c, 1_d, 1_e, 1_f)) ; {e}(1_a, 1_b, 1_(c ot{i} e), 1_(d ot{i} f))\n"
        ));
        out.push_str(&format!(
            "  external-assoc-{i}{j} : {e}(1_(a ot{j} b), 1_c, 1_(d ot{j} e), 1_f) ; ({e}(1_a, 1_b, 1_d, 1_e) ot{j} 1_(c ot{i} f)) \
             = {e}(1_a, 1_(b ot{j} c), 1_d, 1_(e ot{j} f)) ; (1_(a ot{i} d) ot{j} {e}(1_b, 1_c, 1_e, 1_f))\n"
        ));
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            for k in (j + 1)..=n {
                let (eij, eik, ejk) = (interchange(i, j), interchange(i, k), interchange(j, k));
                out.push_str(&format!(
                    "  hexagon-{i}{j}{k} : \
                     ({ejk}(1_a, 1_b, 1_c, 1_d) ot{i} {ejk}(1_e, 1_f, 1_g, 1_h)) ; \
                     {eik}(1_(a ot{j} c), 1_(b ot{j} d), 1_(e ot{j} g), 1_(f ot{j} h)) ; \
                     ({eij}(1_a, 1_c, 1_e, 1_g) ot{k} {eij}(1_b, 1_d, 1_f, 1_h)) \
                     = {eij}(1_(a ot{k} b), 1_(c ot{k} d), 1_(e ot{k} f), 1_(g ot{k} h)) ; \
                     ({eik}(1_a, 1_b, 1_e, 1_f) ot{j} {eik}(1_c, 1_d, 1_g, 1_h)) ; \
                     {ejk}(1_(a ot{i} e), 1_(b ot{i} f), 1_(c ot{i} g), 1_(d ot{i} h))\n"
                ));
            }
        }
    }
    out
}

/// The n-fold monoidal 2-structure.
pub fn build_imc(n: usize) -> TwoStructure {
    assert!(n >= 1, "n-fold monoidal structure needs n >= 1");
    parse_structure(&imc_source(n)).expect("generated structure is valid")
}

fn node_index(t: &Term) -> usize {
    t.head().and_then(tensor_index).unwrap_or(0)
}

/// ρ̂ with generators ranked 0; variadic nodes are read left-nested.
pub fn rho_hat(t: &Term) -> u64 {
    match t {
        Term::App(f, args) if !args.is_empty() => {
            let i = tensor_index(f).unwrap_or(0) as u64;
            let mut acc = rho_hat(&args[0]);
            for a in &args[1..] {
                acc = i + acc + 2 * rho_hat(a);
            }
            acc
        }
        _ => 0,
    }
}

/// ρ: the least ρ̂ over all bracketings of the unit-free canonical form.
pub fn rho(t: &CanonicalTerm) -> u64 {
    fn go(t: &Term) -> u64 {
        let Term::App(f, args) = t else { return 0 };
        if args.is_empty() {
            return 0;
        }
        let i = tensor_index(f).unwrap_or(0) as u64;
        let r: Vec<u64> = args.iter().map(go).collect();
        let m = r.len();
        // best[a][b]: cheapest bracketing of children a..=b.
        let mut best = vec![vec![0u64; m]; m];
        for a in 0..m {
            best[a][a] = r[a];
        }
        for len in 2..=m {
            for a in 0..=(m - len) {
                let b = a + len - 1;
                best[a][b] = (a..b).map(|c| i + best[a][c] + 2 * best[c + 1][b]).min().unwrap();
            }
        }
        best[0][m - 1]
    }
    go(t.term())
}

/// Join indices of leaf pairs, keyed by (left leaf, right leaf) in
/// left-to-right order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinProfile {
    pub joins: BTreeMap<(String, String), usize>,
}

impl JoinProfile {
    pub fn of(t: &Term) -> Self {
        fn leaves(t: &Term, out: &mut Vec<String>) {
            match t {
                Term::Var(x) | Term::Gen(x) => {
                    if x != UNIT {
                        out.push(x.clone())
                    }
                }
                Term::App(_, args) => args.iter().for_each(|a| leaves(a, out)),
            }
        }
        fn go(t: &Term, p: &mut JoinProfile) {
            let Term::App(_, args) = t else { return };
            let i = node_index(t);
            let groups: Vec<Vec<String>> = args
                .iter()
                .map(|a| {
                    let mut v = Vec::new();
                    leaves(a, &mut v);
                    v
                })
                .collect();
            for (x, gx) in groups.iter().enumerate() {
                for gy in &groups[x + 1..] {
                    for a in gx {
                        for b in gy {
                            p.joins.insert((a.clone(), b.clone()), i);
                        }
                    }
                }
            }
            args.iter().for_each(|a| go(a, p));
        }
        let mut p = JoinProfile::default();
        go(t, &mut p);
        p
    }

    /// Join index of `a` left of `b`, if both occur in that order.
    pub fn get(&self, a: &str, b: &str) -> Option<usize> {
        self.joins.get(&(a.to_string(), b.to_string())).copied()
    }
}

/// Σ over leaf pairs of (n + 1 − join index); strictly decreases along
/// every non-identity interchange step.
pub fn verified_ranking(t: &Term, n: usize) -> u64 {
    JoinProfile::of(t).joins.values().map(|&i| (n + 1 - i) as u64).sum()
}

/// Non-unit leaves of a term.
pub fn leaf_names(t: &Term) -> BTreeSet<String> {
    t.leaves()
        .into_iter()
        .filter_map(|l| match l {
            Term::Var(x) | Term::Gen(x) if x != UNIT => Some(x.clone()),
            _ => None,
        })
        .collect()
}

fn replace_leaves(t: &Term, xs: &BTreeSet<String>) -> Term {
    match t {
        Term::Var(x) | Term::Gen(x) if xs.contains(x) => Term::gen(UNIT),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| replace_leaves(a, xs)).collect()),
        _ => t.clone(),
    }
}

/// `A − X`: every leaf in `X` replaced by the unit.
pub fn subtract(s: &TwoStructure, a: &CanonicalTerm, xs: &BTreeSet<String>) -> Result<CanonicalTerm, ImcError> {
    let vars = leaf_names(a.term());
    if let Some(x) = xs.iter().find(|x| !vars.contains(*x)) {
        return Err(ImcError::UnknownVariable(x.clone()));
    }
    Ok(s.canon(&replace_leaves(a.term(), xs)))
}

/// `B ∈ A`: some subtraction of `A` equals `B`.
pub fn occurs_in(s: &TwoStructure, b: &CanonicalTerm, a: &CanonicalTerm) -> bool {
    let (va, vb) = (leaf_names(a.term()), leaf_names(b.term()));
    if !vb.is_subset(&va) {
        return false;
    }
    if vb.len() == 2 && node_index(b.term()) > 0 {
        let [x, y] = b.term().children() else { return false };
        let (x, y) = (leaf_names(x), leaf_names(y));
        let (x, y) = (x.first().unwrap(), y.first().unwrap());
        return JoinProfile::of(a.term()).get(x, y) == Some(node_index(b.term()));
    }
    // Only X = Var(A) \ Var(B) can leave exactly the leaves of B.
    let xs: BTreeSet<String> = va.difference(&vb).cloned().collect();
    subtract(s, a, &xs).map(|r| &r == b).unwrap_or(false)
}

/// The map existence criterion on repetition-free terms.
pub fn map_exists(a: &Term, b: &Term) -> Result<bool, ImcError> {
    let (va, vb) = (leaf_names(a), leaf_names(b));
    if va != vb {
        return Err(ImcError::VariableMismatch(va, vb));
    }
    let (pa, pb) = (JoinProfile::of(a), JoinProfile::of(b));
    Ok(pa.joins.iter().all(|((x, y), &i)| pb.get(x, y).is_some_and(|j| j >= i) || pb.get(y, x).is_some_and(|j| j > i)))
}

/// All canonical unit-free terms whose leaves are exactly `leaves`, each used once.
pub fn imc_terms(n: usize, leaves: &[&str]) -> Vec<CanonicalTerm> {
    let k = leaves.len();
    assert!(k < 16, "too many leaves");
    let mut memo: BTreeMap<(u32, usize), Vec<Term>> = BTreeMap::new();
    let full = (1u32 << k) - 1;
    if k == 0 {
        return vec![CanonicalTerm::assume(Term::gen(UNIT))];
    }
    let mut out: Vec<CanonicalTerm> =
        terms_over(full, 0, n, leaves, &mut memo).into_iter().map(CanonicalTerm::assume).collect();
    out.sort();
    out
}

fn terms_over(
    set: u32,
    forbid: usize,
    n: usize,
    leaves: &[&str],
    memo: &mut BTreeMap<(u32, usize), Vec<Term>>,
) -> Vec<Term> {
    if let Some(v) = memo.get(&(set, forbid)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if set.count_ones() == 1 {
        out.push(Term::gen(leaves[set.trailing_zeros() as usize]));
    } else {
        for partition in ordered_partitions(set) {
            if partition.len() < 2 {
                continue;
            }
            for i in (1..=n).filter(|&i| i != forbid) {
                let choices: Vec<Vec<Term>> = partition.iter().map(|&b| terms_over(b, i, n, leaves, memo)).collect();
                for combo in product(&choices) {
                    out.push(Term::app(&tensor(i), combo));
                }
            }
        }
    }
    memo.insert((set, forbid), out.clone());
    out
}

fn ordered_partitions(set: u32) -> Vec<Vec<u32>> {
    if set == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // Enumerate nonempty submasks as the first block.
    let mut sub = set;
    while sub != 0 {
        for mut rest in ordered_partitions(set & !sub) {
            rest.insert(0, sub);
            out.push(rest);
        }
        sub = (sub - 1) & set;
    }
    out
}

fn product(choices: &[Vec<Term>]) -> Vec<Vec<Term>> {
    let mut acc: Vec<Vec<Term>> = vec![Vec::new()];
    for c in choices {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    acc
}

/// The unit-degenerate interchange instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivedKind {
    /// `A ⊗ᵢ B → A ⊗ⱼ B`
    Iota,
    /// `A ⊗ᵢ B → B ⊗ⱼ A`
    Tau,
    /// `A ⊗ᵢ (B ⊗ⱼ C) → (A ⊗ᵢ B) ⊗ⱼ C`
    Delta,
    /// `A ⊗ᵢ (B ⊗ⱼ C) → B ⊗ⱼ (A ⊗ᵢ C)`
    DeltaTwisted,
    /// `(A ⊗ⱼ B) ⊗ᵢ C → A ⊗ⱼ (B ⊗ᵢ C)`
    Gamma,
    /// `(A ⊗ⱼ B) ⊗ᵢ C → (A ⊗ᵢ C) ⊗ⱼ B`
    GammaTwisted,
}

pub fn check_indices(i: usize, j: usize, n: usize) -> Result<(), ImcError> {
    if 1 <= i && i < j && j <= n {
        Ok(())
    } else {
        Err(ImcError::Indices { i, j, n })
    }
}

/// The interchange instance behind a derived map; `args` are the two or three
/// objects in the order they appear in the source.
pub fn derived_map(kind: DerivedKind, i: usize, j: usize, n: usize, args: &[Term]) -> Result<Morphism, ImcError> {
    check_indices(i, j, n)?;
    let u = Term::gen(UNIT);
    let arg = |k: usize| args.get(k).cloned().unwrap_or_else(|| u.clone());
    let slots = match kind {
        DerivedKind::Iota => [arg(0), u.clone(), u.clone(), arg(1)],
        DerivedKind::Tau => [u.clone(), arg(0), arg(1), u.clone()],
        DerivedKind::Delta => [arg(0), u.clone(), arg(1), arg(2)],
        DerivedKind::DeltaTwisted => [u.clone(), arg(0), arg(1), arg(2)],
        DerivedKind::Gamma => [arg(0), arg(1), u.clone(), arg(2)],
        DerivedKind::GammaTwisted => [arg(0), arg(1), arg(2), u.clone()],
    };
    Ok(Morphism::Lift(interchange(i, j), slots.into_iter().map(Morphism::id).collect()))
}

/// The span `ι: A⊗ᵢB → A⊗ₙB`, `τ: A⊗ᵢB → B⊗ₙA` and the reducts of its two ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonConfluence {
    pub source: CanonicalTerm,
    pub left: CanonicalTerm,
    pub right: CanonicalTerm,
    pub left_reducts: Vec<CanonicalTerm>,
    pub right_reducts: Vec<CanonicalTerm>,
    /// Both reduct sets were computed completely.
    pub exhaustive: bool,
    pub joinable: bool,
}

pub fn non_confluence_witness(s: &TwoStructure, n: usize, i: usize, lim: &Limits) -> Result<NonConfluence, ImcError> {
    check_indices(i, n, n)?;
    let (a, b) = (Term::gen("A"), Term::gen("B"));
    let source = s.canon(&Term::app(&tensor(i), vec![a.clone(), b.clone()]));
    let iota = derived_map(DerivedKind::Iota, i, n, n, &[a.clone(), b.clone()])?;
    let tau = derived_map(DerivedKind::Tau, i, n, n, &[a, b])?;
    let (_, left) = s.source_target(&iota).map_err(CoherenceError::from)?;
    let (_, right) = s.source_target(&tau).map_err(CoherenceError::from)?;
    let gl = explore(std::slice::from_ref(&left), s, lim);
    let gr = explore(std::slice::from_ref(&right), s, lim);
    let left_reducts = gl.vertices.clone();
    let right_reducts = gr.vertices.clone();
    let ls: BTreeSet<&CanonicalTerm> = left_reducts.iter().collect();
    let joinable = right_reducts.iter().any(|t| ls.contains(t));
    Ok(NonConfluence {
        source,
        left,
        right,
        left_reducts,
        right_reducts,
        exhaustive: gl.is_complete() && gr.is_complete(),
        joinable,
    })
}

/// One of the four unit triangles between `⊗ᵢ`, `⊗ⱼ` and `⊗ₖ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub name: String,
    pub two_step: Morphism,
    pub direct: Morphism,
    /// The hexagon source instance the triangle comes from.
    pub hexagon_source: Term,
    pub verdict: Verdict,
}

pub fn eckmann_hilton_triangles(
    s: &TwoStructure,
    n: usize,
    i: usize,
    j: usize,
    k: usize,
    lim: &Limits,
) -> Result<Vec<Triangle>, ImcError> {
    check_indices(i, j, n)?;
    check_indices(j, k, n)?;
    use DerivedKind::{Iota, Tau};
    let (a, b) = (Term::gen("A"), Term::gen("B"));
    let u = Term::gen(UNIT);
    let ab = [a.clone(), b.clone()];
    let ba = [b.clone(), a.clone()];
    // (first leg, second leg args, second kind, direct kind, hexagon leaves)
    let cases = [
        ("iota-iota", Iota, Iota, &ab, Iota, [&a, &u, &u, &u, &u, &u, &u, &b]),
        ("tau-tau", Tau, Tau, &ba, Iota, [&u, &u, &a, &u, &u, &b, &u, &u]),
        ("iota-tau", Iota, Tau, &ab, Tau, [&u, &a, &u, &u, &u, &u, &b, &u]),
        ("tau-iota", Tau, Iota, &ba, Tau, [&u, &u, &u, &a, &b, &u, &u, &u]),
    ];
    let mut out = Vec::new();
    for (name, k1, k2, second, kd, leaves) in cases {
        let first = derived_map(k1, i, j, n, &ab)?;
        let then = derived_map(k2, j, k, n, second)?;
        let two_step = Morphism::comp(first, then);
        let direct = derived_map(kd, i, k, n, &ab)?;
        let pair = |x: &Term, y: &Term, f: usize| Term::app(&tensor(f), vec![x.clone(), y.clone()]);
        let q: Vec<Term> = leaves.chunks(2).map(|c| pair(c[0], c[1], k)).collect();
        let hexagon_source = pair(&pair(&q[0], &q[1], j), &pair(&q[2], &q[3], j), i);
        let verdict = decide_commutes(s, &two_step, &direct, lim)?;
        out.push(Triangle { name: name.to_string(), two_step, direct, hexagon_source, verdict });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_sizes() {
        let s1 = build_imc(1);
        assert!(s1.rules.is_empty() && s1.axioms.is_empty());
        let s2 = build_imc(2);
        assert_eq!(s2.rules.len(), 1);
        assert!(s2.axioms.iter().all(|a| !a.name.starts_with("hexagon")));
        let s3 = build_imc(3);
        assert_eq!(s3.rules.len(), 3);
        assert_eq!(s3.axioms.iter().filter(|a| a.name.starts_with("hexagon")).count(), 1);
    }

    #[test]
    fn rho_values() {
        let s = build_imc(2);
        assert_eq!(rho_hat(&Term::gen(UNIT)), 0);
        assert_eq!(rho_hat(&s.parse_term("(A ot1 B)").unwrap()), 1);
        let l = s.parse_canonical("(A ot1 (B ot1 C))").unwrap();
        let r = s.parse_canonical("((A ot1 B) ot1 C)").unwrap();
        assert_eq!(rho(&l), rho(&r));
        assert_eq!(verified_ranking(&s.parse_term("(A ot1 B)").unwrap(), 2), 2);
    }

    #[test]
    fn derived_endpoints() {
        let s = build_imc(2);
        let [a, b, c] = ["A", "B", "C"].map(Term::gen);
        let cases = [
            (DerivedKind::Iota, vec![a.clone(), b.clone()], "(A ot1 B)", "(A ot2 B)"),
            (DerivedKind::Tau, vec![a.clone(), b.clone()], "(A ot1 B)", "(B ot2 A)"),
            (DerivedKind::Delta, vec![a.clone(), b.clone(), c.clone()], "(A ot1 (B ot2 C))", "((A ot1 B) ot2 C)"),
            (
                DerivedKind::DeltaTwisted,
                vec![a.clone(), b.clone(), c.clone()],
                "(A ot1 (B ot2 C))",
                "(B ot2 (A ot1 C))",
            ),
            (DerivedKind::Gamma, vec![a.clone(), b.clone(), c.clone()], "((A ot2 B) ot1 C)", "(A ot2 (B ot1 C))"),
            (
                DerivedKind::GammaTwisted,
                vec![a.clone(), b.clone(), c.clone()],
                "((A ot2 B) ot1 C)",
                "((A ot1 C) ot2 B)",
            ),
        ];
        for (kind, args, src, tgt) in cases {
            let m = derived_map(kind, 1, 2, 2, &args).unwrap();
            let (x, y) = s.source_target(&m).unwrap();
            assert_eq!(x, s.parse_canonical(src).unwrap(), "{:?}", kind);
            assert_eq!(y, s.parse_canonical(tgt).unwrap(), "{:?}", kind);
        }
        assert!(derived_map(DerivedKind::Iota, 2, 1, 2, &[a, b]).is_err());
    }

    #[test]
    fn subtraction_and_membership() {
        let s = build_imc(2);
        let t = s.parse_canonical("((A ot1 B) ot2 (C ot1 E))").unwrap();
        let xs: BTreeSet<String> = ["B", "E"].map(String::from).into();
        assert_eq!(subtract(&s, &t, &xs).unwrap(), s.parse_canonical("(A ot2 C)").unwrap());
        assert!(occurs_in(&s, &s.parse_canonical("(A ot2 C)").unwrap(), &t));
        assert!(occurs_in(&s, &s.parse_canonical("(A ot1 B)").unwrap(), &t));
        assert!(!occurs_in(&s, &s.parse_canonical("(B ot1 A)").unwrap(), &t));
        assert!(occurs_in(&s, &t, &t));
        assert!(occurs_in(&s, &s.parse_canonical("I").unwrap(), &t));
        assert!(subtract(&s, &t, &["Z".to_string()].into()).is_err());
    }

    #[test]
    fn map_criterion_examples() {
        let s = build_imc(2);
        let p = |x: &str| s.parse_term(x).unwrap();
        assert!(map_exists(&p("(A ot1 B)"), &p("(A ot2 B)")).unwrap());
        assert!(!map_exists(&p("(A ot2 B)"), &p("(A ot1 B)")).unwrap());
        assert!(map_exists(&p("((A ot2 B) ot1 (C ot2 D))"), &p("((A ot1 C) ot2 (B ot1 D))")).unwrap());
        assert!(map_exists(&p("(A ot1 B)"), &p("(A ot1 C)")).is_err());
    }

    #[test]
    fn term_counts() {
        // Two leaves: A⊗ᵢB and B⊗ᵢA for each i.
        assert_eq!(imc_terms(2, &["A", "B"]).len(), 4);
        // Three leaves, one tensor: the 6 orders of a flat product.
        assert_eq!(imc_terms(1, &["A", "B", "C"]).len(), 6);
    }
}
