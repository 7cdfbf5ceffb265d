//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line
//! with its runtime against the pinned limit.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use cohere::coherence::*;
use cohere::corpus::load;
use cohere::graph::*;
use cohere::imc::*;
use cohere::planar::*;
use cohere::rewriting::{Morphism, TwoStructure};
use cohere::terms::{CanonicalTerm, Substitution, Term};

/// Runs one criterion, prints its verdict line and fails the test on a
/// failed check or an exceeded time limit.
fn gate(name: &str, limit: Duration, check: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    let (ok, detail) = match &outcome {
        Ok(d) if elapsed <= limit => (true, d.clone()),
        Ok(d) => (false, format!("{} (over time)", d)),
        Err(e) => (false, e.clone()),
    };
    // Written to the real stdout so the line shows without --nocapture.
    let line = format!(
        "{} {}: {} [{:.2}s / limit {}s]\n",
        if ok { "PASS" } else { "FAIL" },
        name,
        detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(ok, "{}", line.trim_end());
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus(name: &str) -> TwoStructure {
    load(name).unwrap_or_else(|| panic!("corpus entry {}", name))
}

fn term(s: &TwoStructure, text: &str) -> CanonicalTerm {
    s.parse_canonical(text).unwrap_or_else(|e| panic!("{}: {}", text, e))
}

fn morphism(s: &TwoStructure, text: &str) -> Morphism {
    s.parse_morphism(text).unwrap_or_else(|e| panic!("{}: {}", text, e))
}

const LETTERS: [&str; 5] = ["A", "B", "C", "D", "E"];

#[test]
fn c01_associativity_derivation_and_shape() {
    gate("1 derivation, Shape and Var", Duration::from_secs(1), || {
        let s = corpus("monoidal");
        let m = morphism(&s, "(1_A ot1 alpha(1_B, 1_C, 1_D))");
        let (src, tgt) = s.source_target(&m).map_err(|e| e.to_string())?;
        ensure(s.print(src.term()) == "(A ot1 (B ot1 (C ot1 D)))", || format!("source {}", s.print(src.term())))?;
        ensure(s.print(tgt.term()) == "(A ot1 ((B ot1 C) ot1 D))", || format!("target {}", s.print(tgt.term())))?;
        let g = explore(std::slice::from_ref(&src), &s, &Limits::for_structure(&s));
        let v = g.vertex(&src).ok_or("source missing")?;
        let lin = s.linearize(&m).map_err(|e| e.to_string())?;
        let as_edge = g.out_edges(v).iter().any(|&e| lin.iter().any(|p| *p == g.path_steps(&[e])));
        ensure(as_edge, || "derivation is not an enumerated step".into())?;
        let displayed = term(&s, "((A ot1 B) ot1 (C ot1 D))");
        let w = g.vertex(&displayed).ok_or("displayed target unreachable")?;
        let paths = g.hom_paths(v, w, &Limits::default()).paths;
        ensure(paths.len() == 1, || format!("{} paths to the displayed target", paths.len()))?;
        let root = path_morphism(&s, &g, &paths[0]).ok_or("empty path")?;
        ensure(s.print_morphism(&root) == "alpha(1_A, 1_B, 1_(C ot1 D))", || s.print_morphism(&root))?;

        let general = morphism(&s, "alpha(1_A, 1_B, 1_C)");
        let diagonal = morphism(&s, "alpha(1_A, 1_A, 1_A)");
        ensure(general.shape().to_string() == "alpha(∘,∘,∘)", || general.shape().to_string())?;
        ensure(general.shape() == diagonal.shape(), || "shapes differ".into())?;
        let show = |m: &Morphism| -> String {
            let vs: Vec<String> = m.vars(&s.sig).iter().map(|t| format!("1_{}", s.print(t))).collect();
            format!("{{{}}}", vs.join(","))
        };
        ensure(show(&general) == "{1_A,1_B,1_C}", || show(&general))?;
        ensure(show(&diagonal) == "{1_A}", || show(&diagonal))?;
        Ok("derivation typed and enumerated; alpha(∘,∘,∘), {1_A,1_B,1_C}, {1_A}".into())
    });
}

/// Vertices and labelled edges of an explored graph, printed.
fn drawn(s: &TwoStructure, g: &ReductionGraph) -> (BTreeSet<String>, BTreeSet<(String, String, String)>) {
    let vs = g.vertices.iter().map(|v| s.print(v.term())).collect();
    let es = g
        .edges
        .iter()
        .map(|e| (s.print(g.vertices[e.source].term()), e.step.rule.clone(), s.print(g.vertices[e.target].term())))
        .collect();
    (vs, es)
}

fn set<T: Ord + Clone>(xs: &[T]) -> BTreeSet<T> {
    xs.iter().cloned().collect()
}

fn triples(xs: &[(&str, &str, &str)]) -> BTreeSet<(String, String, String)> {
    xs.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect()
}

/// Checks the drawn graph, both diamonds and the two decisions for one of
/// the nested/disjoint structures.
fn drawn_example(
    s: &TwoStructure,
    seed: &str,
    vertices: &[&str],
    edges: &[(&str, &str, &str)],
    square: (&str, &str),
    h_pair: (&str, &str),
) -> Result<(), String> {
    let lim = Limits::for_structure(s);
    let src = term(s, seed);
    let g = explore(std::slice::from_ref(&src), s, &lim);
    let (vs, es) = drawn(s, &g);
    let want_vs: BTreeSet<String> = vertices.iter().map(|v| v.to_string()).collect();
    ensure(vs == want_vs, || format!("vertices {:?}", vs))?;
    ensure(es == triples(edges), || format!("edges {:?}", es))?;
    let v = g.vertex(&src).ok_or("seed missing")?;
    let scan = enumerate_diamonds(&g, v, &lim);
    let targets: BTreeSet<String> = scan.diamonds.iter().map(|d| s.print(g.vertices[d.target].term())).collect();
    let (sq_target, h_target) = {
        let (_, t1) = s.source_target(&morphism(s, square.0)).map_err(|e| e.to_string())?;
        let (_, t2) = s.source_target(&morphism(s, h_pair.0)).map_err(|e| e.to_string())?;
        (s.print(t1.term()), s.print(t2.term()))
    };
    ensure(scan.diamonds.len() == 2 && targets == set(&[sq_target, h_target]), || {
        format!("{} diamonds to {:?}", scan.diamonds.len(), targets)
    })?;
    let sq = decide_commutes(s, &morphism(s, square.0), &morphism(s, square.1), &lim).map_err(|e| e.to_string())?;
    ensure(sq.is_equal(), || format!("square: {}", sq.kind()))?;
    let h = decide_commutes(s, &morphism(s, h_pair.0), &morphism(s, h_pair.1), &lim).map_err(|e| e.to_string())?;
    ensure(matches!(h, Verdict::NotEqual(_)), || format!("H(A) pair: {}", h.kind()))
}

#[test]
fn c02_nested_and_disjoint_examples() {
    gate("2 nested and disjoint examples", Duration::from_secs(5), || {
        drawn_example(
            &corpus("ex-nested"),
            "I(I(A))",
            &["I(I(A))", "J(I(A))", "I(J(A))", "J(J(A))", "H(A)"],
            &[
                ("I(I(A))", "iota", "J(I(A))"),
                ("I(I(A))", "iota", "I(J(A))"),
                ("J(I(A))", "iota", "J(J(A))"),
                ("I(J(A))", "iota", "J(J(A))"),
                ("I(J(A))", "kappa", "H(A)"),
                ("J(I(A))", "lambda", "H(A)"),
            ],
            ("iota(1_I(A)) ; J(iota(1_A))", "I(iota(1_A)) ; iota(1_J(A))"),
            ("I(iota(1_A)) ; kappa(1_A)", "iota(1_I(A)) ; lambda(1_A)"),
        )
        .map_err(|e| format!("nested: {}", e))?;
        drawn_example(
            &corpus("ex-disjoint"),
            "(I(A) ot1 I(A))",
            &["(I(A) ot1 I(A))", "(J(A) ot1 I(A))", "(I(A) ot1 J(A))", "(J(A) ot1 J(A))", "H(A)"],
            &[
                ("(I(A) ot1 I(A))", "iota", "(J(A) ot1 I(A))"),
                ("(I(A) ot1 I(A))", "iota", "(I(A) ot1 J(A))"),
                ("(J(A) ot1 I(A))", "iota", "(J(A) ot1 J(A))"),
                ("(I(A) ot1 J(A))", "iota", "(J(A) ot1 J(A))"),
                ("(J(A) ot1 I(A))", "kappa", "H(A)"),
                ("(I(A) ot1 J(A))", "lambda", "H(A)"),
            ],
            ("(iota(1_A) ot1 1_I(A)) ; (1_J(A) ot1 iota(1_A))", "(1_I(A) ot1 iota(1_A)) ; (iota(1_A) ot1 1_J(A))"),
            ("(iota(1_A) ot1 1_I(A)) ; kappa(1_A)", "(1_I(A) ot1 iota(1_A)) ; lambda(1_A)"),
        )
        .map_err(|e| format!("disjoint: {}", e))?;
        Ok("graphs as drawn, 2 diamonds each, squares Equal, H(A) pairs NotEqual".into())
    });
}

#[test]
fn c03_quasicycles() {
    gate("3 quasicycle detection", Duration::from_secs(5), || {
        let s = corpus("undecidable-loop");
        let lim = Limits::for_structure(&s);
        let v = detect_quasicycle(&s, &[term(&s, "F(A)")], &lim, None);
        ensure(matches!(v, QuasicycleVerdict::Found(_)), || format!("loop structure: {:?}", v))?;
        let s = build_imc(2);
        let lim = Limits::for_structure(&s);
        let r = FnRanking { name: "join-index ranking".into(), f: |t: &CanonicalTerm| verified_ranking(t.term(), 2) };
        let sample: Vec<CanonicalTerm> = (1..=3).flat_map(|k| imc_terms(2, &LETTERS[..k])).collect();
        let seeds = imc_terms(2, &LETTERS[..3]);
        let v = detect_quasicycle(&s, &seeds, &lim, Some((&r, &sample)));
        ensure(matches!(v, QuasicycleVerdict::Free(Certificate::Ranking(_))), || format!("imc2: {:?}", v))?;
        Ok("loop: Found; imc2: Free(Ranking)".into())
    });
}

/// `H(H(…I(A)…))` with `k` copies of `H`.
fn h_power(k: usize) -> String {
    format!("{}I(A){}", "H(".repeat(k), ")".repeat(k))
}

#[test]
fn c04_no_finite_basis_of_diamonds() {
    gate("4 diamond counts grow with depth", Duration::from_secs(30), || {
        let s = corpus("prop-nfca");
        let seed = term(&s, "I(A)");
        let mut counts = Vec::new();
        let mut h_targets = Vec::new();
        for depth in 2..=6 {
            let lim = Limits { max_depth: depth, ..Limits::for_structure(&s) };
            let g = explore(std::slice::from_ref(&seed), &s, &lim);
            let scans: Vec<DiamondScan> = (0..g.vertices.len()).map(|v| enumerate_diamonds(&g, v, &lim)).collect();
            counts.push(scans.iter().map(|sc| sc.diamonds.len()).sum::<usize>());
            let hs: BTreeSet<usize> = scans
                .iter()
                .flat_map(|sc| &sc.diamonds)
                .filter_map(|d| (1..=depth).find(|&k| s.print(g.vertices[d.target].term()) == h_power(k)))
                .collect();
            h_targets.push(hs.into_iter().max().unwrap_or(0));
        }
        ensure(counts.windows(2).all(|w| w[0] < w[1]), || format!("counts {:?}", counts))?;
        // Frozen from the exhaustive span scan.
        ensure(counts == [0, 3, 25, 146, 686], || format!("counts {:?}", counts))?;
        ensure(h_targets.windows(2).all(|w| w[0] <= w[1]) && h_targets[4] > h_targets[1], || {
            format!("largest H-power diamond target per depth {:?}", h_targets)
        })?;
        Ok(format!("counts {:?}, largest H^k(I(A)) target per depth {:?}", counts, h_targets))
    });
}

#[test]
fn c05_interchange_ranking_decreases() {
    gate("5 ranking decreases on every step", Duration::from_secs(120), || {
        let mut summary = Vec::new();
        for n in [2usize, 3] {
            let s = build_imc(n);
            let lim = Limits::for_structure(&s);
            let terms: Vec<CanonicalTerm> = (1..=5).flat_map(|k| imc_terms(n, &LETTERS[..k])).collect();
            let r = FnRanking {
                name: "join-index ranking".into(),
                f: move |t: &CanonicalTerm| verified_ranking(t.term(), n),
            };
            let c = verify_ranking_on(&s, &r, &terms, lim.unit_budget);
            ensure(c.ok, || format!("n={}: {:?}", n, c.counterexample))?;
            summary.push(format!("n={}: {} terms, {} steps", n, c.terms_checked, c.steps_checked));
        }
        Ok(summary.join("; "))
    });
}

#[test]
fn c06_map_criterion_matches_reachability() {
    gate("6 map criterion vs reachability", Duration::from_secs(300), || {
        let mut summary = Vec::new();
        for n in [2usize, 3] {
            let s = build_imc(n);
            let lim = Limits::for_structure(&s);
            let (mut pairs, mut maps) = (0usize, 0usize);
            for k in 1..=4 {
                let terms = imc_terms(n, &LETTERS[..k]);
                for a in &terms {
                    let g = explore(std::slice::from_ref(a), &s, &lim);
                    ensure(g.is_complete(), || format!("exploration of {} truncated", s.print(a.term())))?;
                    let reach: BTreeSet<&CanonicalTerm> = g.vertices.iter().collect();
                    for b in &terms {
                        let m = map_exists(a.term(), b.term()).map_err(|e| e.to_string())?;
                        ensure(m == reach.contains(b), || {
                            format!(
                                "n={}: {} -> {}: criterion {}, reachable {}",
                                n,
                                s.print(a.term()),
                                s.print(b.term()),
                                m,
                                !m
                            )
                        })?;
                        pairs += 1;
                        maps += m as usize;
                    }
                }
            }
            summary.push(format!("n={}: {} pairs, {} maps, 0 discrepancies", n, pairs, maps));
        }
        Ok(summary.join("; "))
    });
}

#[test]
fn c08_interchange_is_not_confluent() {
    gate("8 non-confluence of the unit span", Duration::from_secs(1), || {
        let s = build_imc(2);
        let w = non_confluence_witness(&s, 2, 1, &Limits::for_structure(&s)).map_err(|e| e.to_string())?;
        let show = |ts: &[CanonicalTerm]| ts.iter().map(|t| s.print(t.term())).collect::<BTreeSet<_>>();
        let (l, r) = (show(&w.left_reducts), show(&w.right_reducts));
        ensure(w.exhaustive, || "reduct sets truncated".into())?;
        ensure(s.print(w.left.term()) == "(A ot2 B)" && s.print(w.right.term()) == "(B ot2 A)", || {
            format!("span ends {} / {}", s.print(w.left.term()), s.print(w.right.term()))
        })?;
        ensure(l.is_disjoint(&r), || format!("reducts meet: {:?} / {:?}", l, r))?;
        ensure(!w.joinable, || "span reported joinable".into())?;
        Ok(format!("reducts {:?} and {:?} disjoint; span non-joinable", l, r))
    });
}

/// A corpus structure explored from seeds within `lim`, with parallel path
/// pairs `(first path, other path)` for every hom-set out of each seed.
struct Region {
    name: &'static str,
    s: TwoStructure,
    g: ReductionGraph,
    pairs: Vec<(Vec<usize>, Vec<usize>)>,
}

fn region(name: &'static str, s: TwoStructure, lim: Limits, seeds: &[CanonicalTerm]) -> Region {
    let g = explore(seeds, &s, &lim);
    let mut pairs = Vec::new();
    for seed in seeds {
        let v = g.vertex(seed).expect("seed is a vertex");
        for w in g.reachable_from(v) {
            let paths = g.hom_paths(v, w, &lim).paths;
            for p in paths.iter().skip(1) {
                pairs.push((paths[0].clone(), p.clone()));
            }
        }
    }
    Region { name, s, g, pairs }
}

fn corpus_regions() -> Vec<Region> {
    let mut out = Vec::new();
    let s = corpus("monoidal");
    let seeds = vec![term(&s, "(A ot1 (B ot1 (C ot1 D)))"), term(&s, "(A ot1 (B ot1 (C ot1 (D ot1 E))))")];
    out.push(region("monoidal", s.clone(), Limits::for_structure(&s), &seeds));
    let s = corpus("ex-nested");
    out.push(region("ex-nested", s.clone(), Limits::for_structure(&s), &[term(&s, "I(I(A))")]));
    let s = corpus("ex-disjoint");
    out.push(region("ex-disjoint", s.clone(), Limits::for_structure(&s), &[term(&s, "(I(A) ot1 I(A))")]));
    let s = corpus("prop-nfca");
    let lim = Limits { max_depth: 4, ..Limits::for_structure(&s) };
    out.push(region("prop-nfca", s.clone(), lim, &[term(&s, "I(A)")]));
    let s = build_imc(2);
    out.push(region("imc2", s.clone(), Limits::for_structure(&s), &imc_terms(2, &LETTERS[..3])));
    out
}

/// Both sides of every stored hexagon with distinct generators, and every
/// unit triangle, for three tensors.
type Named = (String, Morphism, Morphism);

fn imc3_instances() -> Result<(TwoStructure, Vec<Named>), String> {
    let s = build_imc(3);
    let lim = Limits::for_structure(&s);
    let mut out = Vec::new();
    for ax in s.axioms.iter().filter(|a| a.name.starts_with("hexagon")) {
        let sigma: Substitution =
            ax.lhs.term_vars().into_iter().enumerate().map(|(k, x)| (x, Term::gen(&generator_name(k)))).collect();
        out.push((ax.name.clone(), ax.lhs.substitute(&sigma), ax.rhs.substitute(&sigma)));
    }
    for t in eckmann_hilton_triangles(&s, 3, 1, 2, 3, &lim).map_err(|e| e.to_string())? {
        out.push((format!("triangle {}", t.name), t.two_step, t.direct));
    }
    Ok((s, out))
}

fn agree(s: &TwoStructure, bf: &mut BruteForce, lim: &Limits, m1: &Morphism, m2: &Morphism) -> Result<bool, String> {
    let decided = decide_commutes(s, m1, m2, lim).map_err(|e| e.to_string())?;
    let starts = s.linearize(m1).map_err(|e| e.to_string())?;
    let goals: BTreeSet<_> = s.linearize(m2).map_err(|e| e.to_string())?.into_iter().collect();
    let brute = bf.search(&starts, &goals);
    match (&decided, brute) {
        (Verdict::Equal(_), OracleResult::Equal) => Ok(true),
        (Verdict::NotEqual(_), OracleResult::NotEqual) => Ok(false),
        (d, b) => Err(format!(
            "{} vs {}: decide {}, brute force {:?}",
            s.print_morphism(m1),
            s.print_morphism(m2),
            d.kind(),
            b
        )),
    }
}

#[test]
fn c09_decision_agrees_with_brute_force() {
    gate("9 decision vs brute force on the corpus", Duration::from_secs(600), || {
        let (mut total, mut equal) = (0usize, 0usize);
        let mut per = Vec::new();
        for r in corpus_regions() {
            // The region limits only bound which pairs are drawn; both
            // procedures get the structure's own limits.
            let lim = Limits::for_structure(&r.s);
            let mut bf = BruteForce::new(&r.s, &lim);
            for (a, b) in &r.pairs {
                let m1 = path_morphism(&r.s, &r.g, a).ok_or("empty path")?;
                let m2 = path_morphism(&r.s, &r.g, b).ok_or("empty path")?;
                equal += agree(&r.s, &mut bf, &lim, &m1, &m2).map_err(|e| format!("{}: {}", r.name, e))? as usize;
            }
            total += r.pairs.len();
            per.push(format!("{} {}", r.name, r.pairs.len()));
        }
        let (s, instances) = imc3_instances()?;
        let lim = Limits::for_structure(&s);
        let mut bf = BruteForce::new(&s, &lim);
        for (name, m1, m2) in &instances {
            let eq = agree(&s, &mut bf, &lim, m1, m2).map_err(|e| format!("imc3 {}: {}", name, e))?;
            ensure(eq, || format!("imc3 {} not Equal", name))?;
            equal += 1;
        }
        total += instances.len();
        per.push(format!("imc3 hexagons and triangles {}", instances.len()));
        ensure(total >= 200, || format!("only {} pairs", total))?;
        Ok(format!("{} pairs agree ({} Equal): {}", total, equal, per.join(", ")))
    });
}

/// Each face's boundary has exactly one vertex without incoming boundary
/// edges and one without outgoing ones, and they are the face's ends.
fn single_source_and_target(g: &ReductionGraph, f: &Face) -> bool {
    let edges: Vec<usize> = f.left.iter().chain(&f.right).copied().collect();
    let verts: BTreeSet<usize> = edges.iter().flat_map(|&e| [g.edges[e].source, g.edges[e].target]).collect();
    let sources: Vec<usize> =
        verts.iter().copied().filter(|&v| !edges.iter().any(|&e| g.edges[e].target == v)).collect();
    let sinks: Vec<usize> = verts.iter().copied().filter(|&v| !edges.iter().any(|&e| g.edges[e].source == v)).collect();
    sources == [f.source] && sinks == [f.target]
}

#[test]
fn c10_subdivision_properties() {
    gate("10 Euler, single source/target faces, maximal faces are diamonds", Duration::from_secs(120), || {
        let (mut subs, mut maximal_faces, mut skipped) = (0usize, 0usize, 0usize);
        let mut not_diamonds: Vec<String> = Vec::new();
        for r in corpus_regions() {
            // Each pair is analysed in the graph explored toward its target,
            // where its span is complete even if the region's is not.
            let lim = Limits::for_structure(&r.s);
            for (a, b) in &r.pairs {
                let (src, tgt) = (r.g.edges[a[0]].source, r.g.edges[*a.last().unwrap()].target);
                let g = explore_toward(&[r.g.vertices[src].clone()], &r.g.vertices[tgt], &r.s, &lim);
                let a = edge_path(&g, &r.g.path_steps(a)).map_err(|e| e.to_string())?;
                let b = edge_path(&g, &r.g.path_steps(b)).map_err(|e| e.to_string())?;
                let all = match enumerate_subdivisions(&g, &a, &b, &lim) {
                    Ok(all) => all,
                    Err(PlanarError::TooLarge(_)) => {
                        skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(format!("{}: {}", r.name, e)),
                };
                for sub in &all {
                    ensure(sub.euler_ok(), || format!("{}: Euler check fails", r.name))?;
                    ensure(faces_of(sub).iter().all(|f| single_source_and_target(&g, f)), || {
                        format!("{}: face with several sources or targets", r.name)
                    })?;
                }
                subs += all.len();
                for sub in maximal_subdivisions(&all) {
                    for f in faces_of(&sub) {
                        if !is_diamond(&g, &f.left, &f.right, &lim).map_err(|e| e.to_string())? {
                            let show = |p: &[usize]| {
                                path_morphism(&r.s, &g, p).map(|m| r.s.print_morphism(&m)).unwrap_or_default()
                            };
                            not_diamonds.push(format!("{}: {} vs {}", r.name, show(&f.left), show(&f.right)));
                        }
                        maximal_faces += 1;
                    }
                }
            }
        }
        ensure(subs > 0, || "no subdivisions enumerated".into())?;
        ensure(not_diamonds.is_empty(), || {
            let mut by_region = std::collections::BTreeMap::new();
            for d in &not_diamonds {
                *by_region.entry(d.split(':').next().unwrap_or("")).or_insert(0usize) += 1;
            }
            format!(
                "{} of {} faces of maximal subdivisions are not diamonds {:?}, first {}",
                not_diamonds.len(),
                maximal_faces,
                by_region,
                not_diamonds[0]
            )
        })?;
        Ok(format!("{} subdivisions, {} maximal faces, {} pairs over the size cap", subs, maximal_faces, skipped))
    });
}

#[test]
fn c07_interchange_coherence() {
    gate("7 at most one map between terms (n=2)", Duration::from_secs(600), || {
        let s = build_imc(2);
        let lim = Limits::for_structure(&s);
        let mut bf = BruteForce::new(&s, &lim);
        let (mut homs, mut pairs, mut largest) = (0usize, 0usize, 0usize);
        for k in 1..=4 {
            for a in imc_terms(2, &LETTERS[..k]) {
                let g = explore(std::slice::from_ref(&a), &s, &lim);
                ensure(g.is_complete(), || format!("exploration of {} truncated", s.print(a.term())))?;
                let v = g.vertex(&a).ok_or("seed missing")?;
                let oracle = FaceOracle::new(&s, &g, &lim);
                for w in g.reachable_from(v) {
                    let ps = g.hom_paths(v, w, &lim);
                    ensure(!ps.truncated, || "path enumeration truncated".into())?;
                    homs += 1;
                    largest = largest.max(ps.paths.len());
                    if ps.paths.len() < 2 {
                        continue;
                    }
                    pairs += ps.paths.len() - 1;
                    // One class means every pair is decided Equal.
                    let classes = oracle.classes(v, &ps.paths);
                    ensure(classes.len() == 1, || {
                        format!("{} classes {} -> {}", classes.len(), s.print(a.term()), s.print(g.vertices[w].term()))
                    })?;
                    let class = bf.class(&g.path_steps(&ps.paths[0])).ok_or("brute force hit its limits")?;
                    ensure(ps.paths.iter().all(|p| class.contains(&g.path_steps(p))), || {
                        format!("brute force splits {} -> {}", s.print(a.term()), s.print(g.vertices[w].term()))
                    })?;
                }
            }
        }
        Ok(format!(
            "{} nonempty hom-sets, each one class; {} pairs Equal, brute force agrees; up to {} paths",
            homs, pairs, largest
        ))
    });
}
