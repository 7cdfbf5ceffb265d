use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cohere::coherence::{decide_commutes, generator_name, maclane_report_on, path_morphism, FaceOracle, Verdict};
use cohere::format::{parse_structure, parse_structure_unchecked};
use cohere::graph::{
    detect_quasicycle, explore, explore_toward, ground_terms, Limits, QuasicycleVerdict, ReductionGraph,
};
use cohere::planar::enumerate_diamonds;
use cohere::rewriting::{validate_structure, TwoStructure};
use cohere::CanonicalTerm;

mod imc_suite;

/// Exit codes shared by every subcommand.
const OK: u8 = 0;
const ERROR: u8 = 1;
const NEGATIVE: u8 = 2;
const RESOURCES: u8 = 3;
const TRUNCATED: u8 = 4;

#[derive(Parser)]
#[command(name = "cohere", version, about = "Coherence checking for 2-structures given as labelled rewriting systems")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Opts {
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    #[arg(long, global = true)]
    max_vertices: Option<usize>,
    #[arg(long, global = true)]
    max_path_length: Option<usize>,
    #[arg(long, global = true)]
    unit_budget: Option<usize>,
    #[arg(long, global = true)]
    recursion_depth: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a structure file.
    Check { file: String },
    /// Decide whether two parallel morphisms are equal.
    Decide { file: String, left: String, right: String },
    /// Decide every diamond in general position out of small ground terms.
    Maclane {
        file: String,
        /// Number of distinct generators.
        #[arg(long, default_value_t = 3)]
        leaves: usize,
        /// Largest source term size.
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        /// Only sources in which no generator repeats.
        #[arg(long)]
        distinct: bool,
    },
    /// List the diamonds out of a term.
    Diamonds {
        file: String,
        term: String,
        /// Scan every vertex of the explored region, not just the term.
        #[arg(long)]
        region: bool,
    },
    /// Look for quasicycles in the region explored from the seeds.
    Quasicycle {
        file: String,
        #[arg(required = true)]
        seeds: Vec<String>,
    },
    /// Paths between two terms and their classes under the 2-cell equations.
    Hom { file: String, source: String, target: String },
    /// The reduction graph explored from the seeds.
    Graph {
        file: String,
        #[arg(required = true)]
        seeds: Vec<String>,
    },
    /// Checks on the iterated monoidal structure with `n` tensors.
    Imc {
        n: usize,
        #[arg(long, value_enum, default_value_t = imc_suite::Suite::All)]
        suite: imc_suite::Suite,
        /// Largest number of distinct variables.
        #[arg(long, default_value_t = 3)]
        vars: usize,
    },
}

/// A rendered report and the exit code it implies.
struct Report {
    text: String,
    json: Value,
    dot: Option<String>,
    code: u8,
}

fn fail(msg: impl std::fmt::Display) -> String {
    msg.to_string()
}

/// Reads a structure file, falling back to the bundled corpus by name.
fn read_source(file: &str) -> Result<String, String> {
    let path = Path::new(file);
    if path.exists() {
        return std::fs::read_to_string(path).map_err(|e| format!("{}: {}", file, e));
    }
    let name = file.trim_end_matches(".struct");
    cohere::corpus::source(name)
        .map(str::to_string)
        .ok_or_else(|| format!("{}: no such file or bundled structure", file))
}

fn load(file: &str) -> Result<TwoStructure, String> {
    parse_structure(&read_source(file)?).map_err(|e| format!("{}: {}", file, e))
}

fn limits(s: &TwoStructure, o: &Opts) -> Result<Limits, String> {
    let mut lim = Limits::for_structure(s);
    let set = |slot: &mut usize, v: Option<usize>, name: &str| -> Result<(), String> {
        match v {
            Some(0) if name != "unit-budget" => Err(format!("--{} must be positive", name)),
            Some(v) => {
                *slot = v;
                Ok(())
            }
            None => Ok(()),
        }
    };
    set(&mut lim.max_depth, o.max_depth, "max-depth")?;
    set(&mut lim.max_vertices, o.max_vertices, "max-vertices")?;
    set(&mut lim.max_path_length, o.max_path_length, "max-path-length")?;
    set(&mut lim.unit_budget, o.unit_budget, "unit-budget")?;
    set(&mut lim.recursion_depth, o.recursion_depth, "recursion-depth")?;
    Ok(lim)
}

fn term(s: &TwoStructure, text: &str) -> Result<CanonicalTerm, String> {
    s.parse_canonical(text).map_err(|e| format!("term `{}`: {}", text, e))
}

fn show(s: &TwoStructure, t: &CanonicalTerm) -> String {
    s.print(t.term())
}

/// A graph path as a composite morphism expression.
fn show_path(s: &TwoStructure, g: &ReductionGraph, path: &[usize]) -> String {
    match path_morphism(s, g, path) {
        Some(m) => s.print_morphism(&m),
        None => "(empty path)".into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(ERROR);
        }
    };
    let body = match cli.opts.format {
        Format::Text => report.text,
        Format::Json => serde_json::to_string_pretty(&report.json).expect("json") + "\n",
        Format::Dot => match report.dot {
            Some(d) => d,
            None => {
                eprintln!("error: this command has no DOT output");
                return ExitCode::from(ERROR);
            }
        },
    };
    match &cli.opts.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: {}: {}", path.display(), e);
                return ExitCode::from(ERROR);
            }
        }
        None => print!("{}", body),
    }
    ExitCode::from(report.code)
}

fn run(cli: &Cli) -> Result<Report, String> {
    let o = &cli.opts;
    match &cli.cmd {
        Cmd::Check { file } => check(file),
        Cmd::Decide { file, left, right } => decide(file, left, right, o),
        Cmd::Maclane { file, leaves, max_size, distinct } => maclane(file, *leaves, *max_size, *distinct, o),
        Cmd::Diamonds { file, term, region } => diamonds(file, term, *region, o),
        Cmd::Quasicycle { file, seeds } => quasicycle(file, seeds, o),
        Cmd::Hom { file, source, target } => hom(file, source, target, o),
        Cmd::Graph { file, seeds } => graph(file, seeds, o),
        Cmd::Imc { n, suite, vars } => imc_suite::run(*n, *suite, *vars, o),
    }
}

fn check(file: &str) -> Result<Report, String> {
    let s = parse_structure_unchecked(&read_source(file)?).map_err(|e| format!("{}: {}", file, e))?;
    let issues: Vec<String> = validate_structure(&s).iter().map(|i| i.to_string()).collect();
    let text = if issues.is_empty() {
        format!("valid: {} rules, {} axioms\n", s.rules.len(), s.axioms.len())
    } else {
        issues.iter().map(|i| format!("invalid: {}\n", i)).collect()
    };
    Ok(Report {
        text,
        json: json!({ "valid": issues.is_empty(), "issues": issues, "rules": s.rules.len(), "axioms": s.axioms.len() }),
        dot: None,
        code: if issues.is_empty() { OK } else { ERROR },
    })
}

fn decide(file: &str, left: &str, right: &str, o: &Opts) -> Result<Report, String> {
    let s = load(file)?;
    let lim = limits(&s, o)?;
    let m1 = s.parse_morphism(left).map_err(fail)?;
    let m2 = s.parse_morphism(right).map_err(fail)?;
    let verdict = decide_commutes(&s, &m1, &m2, &lim).map_err(fail)?;
    let (code, text) = match &verdict {
        Verdict::Equal(w) => {
            let mut t = format!("Equal ({} face replacements)\n", w.moves.len());
            for mv in &w.moves {
                t.push_str(&format!("  by {}\n", mv.justification.kind()));
            }
            (OK, t)
        }
        Verdict::NotEqual(r) => (
            NEGATIVE,
            format!(
                "NotEqual: the class of the left path has {} of the {} paths in the span\n",
                r.class_size, r.paths_in_span
            ),
        ),
        Verdict::ResourceExhausted(why) => (RESOURCES, format!("ResourceExhausted: {}\n", why)),
    };
    let dot = match &verdict {
        Verdict::Equal(w) => w.subdivision.as_ref().map(|sub| {
            let (src, tgt) = s.source_target(&m1).expect("checked by decide");
            let g = explore_toward(&[src], &tgt, &s, &lim);
            let labels: Vec<String> = match &w.faces {
                Some(js) => js.iter().map(|j| j.kind().to_string()).collect(),
                None => Vec::new(),
            };
            sub.to_dot(&g, &s.sig, &labels)
        }),
        _ => None,
    };
    Ok(Report { text, json: json!({ "kind": verdict.kind(), "verdict": verdict }), dot, code })
}

fn maclane(file: &str, leaves: usize, max_size: usize, distinct: bool, o: &Opts) -> Result<Report, String> {
    let s = load(file)?;
    let lim = limits(&s, o)?;
    let names: Vec<cohere::Term> = (0..)
        .map(generator_name)
        .filter(|n| s.sig.arity(n).is_none())
        .take(leaves)
        .map(|n| cohere::Term::gen(&n))
        .collect();
    let mut sources = ground_terms(&s.sig, &s.theory, &names, max_size);
    if distinct {
        sources.retain(|t| {
            let leaves: Vec<&cohere::Term> = t.term().leaves().into_iter().filter(|l| names.contains(l)).collect();
            leaves.iter().collect::<BTreeSet<_>>().len() == leaves.len()
        });
    }
    let r = maclane_report_on(&s, &sources, &lim);
    let mut text = format!(
        "{} sources, {} diamonds, {} in general position, {} commute, {} do not, {} undecided{}\n",
        r.sources_scanned,
        r.diamonds,
        r.general_position,
        r.commuting,
        r.counterexamples.len(),
        r.unresolved,
        if r.truncated { ", scan truncated" } else { "" }
    );
    for c in &r.counterexamples {
        text.push_str(&format!("  does not commute: {} => {}\n", show(&s, &c.source), show(&s, &c.target)));
    }
    if r.all_commute() {
        text.push_str("all diamonds commute\n");
    }
    let code = if !r.counterexamples.is_empty() {
        NEGATIVE
    } else if r.unresolved > 0 {
        RESOURCES
    } else if r.truncated {
        TRUNCATED
    } else {
        OK
    };
    Ok(Report { text, json: serde_json::to_value(&r).map_err(fail)?, dot: None, code })
}

fn diamonds(file: &str, seed: &str, region: bool, o: &Opts) -> Result<Report, String> {
    let s = load(file)?;
    let lim = limits(&s, o)?;
    let src = term(&s, seed)?;
    let g = explore(std::slice::from_ref(&src), &s, &lim);
    let sources: Vec<usize> =
        if region { (0..g.vertices.len()).collect() } else { vec![g.vertex(&src).expect("seed")] };
    let mut truncated = !g.is_complete();
    let mut found = Vec::new();
    let mut text = String::new();
    for &v in &sources {
        let scan = enumerate_diamonds(&g, v, &lim);
        truncated |= scan.truncated;
        for d in scan.diamonds {
            let (l, r) = (show_path(&s, &g, &d.alpha), show_path(&s, &g, &d.beta));
            text.push_str(&format!(
                "{} => {}\n  {}\n  {}\n",
                show(&s, &g.vertices[v]),
                show(&s, &g.vertices[d.target]),
                l,
                r
            ));
            found.push(json!({
                "source": show(&s, &g.vertices[v]),
                "target": show(&s, &g.vertices[d.target]),
                "left": l,
                "right": r,
            }));
        }
    }
    text.push_str(&format!("{} diamonds{}\n", found.len(), if truncated { " (region truncated)" } else { "" }));
    Ok(Report {
        text,
        json: json!({ "count": found.len(), "diamonds": found, "truncated": truncated }),
        dot: Some(g.to_dot(&s.sig)),
        code: if truncated { TRUNCATED } else { OK },
    })
}

fn quasicycle(file: &str, seeds: &[String], o: &Opts) -> Result<Report, String> {
    let s = load(file)?;
    let lim = limits(&s, o)?;
    let seeds: Vec<CanonicalTerm> = seeds.iter().map(|t| term(&s, t)).collect::<Result<_, _>>()?;
    let v = detect_quasicycle(&s, &seeds, &lim, None);
    let (code, text) = match &v {
        QuasicycleVerdict::Found(w) => {
            let steps: Vec<String> = w
                .cycle
                .iter()
                .map(|st| format!("{} -{}-> {}", show(&s, &st.source), st.rule, show(&s, &st.target)))
                .collect();
            (NEGATIVE, format!("Found: cycle {}\n", steps.join(", ")))
        }
        QuasicycleVerdict::Free(c) => (OK, format!("Free: {:?}\n", c)),
        QuasicycleVerdict::Unknown(why) => (RESOURCES, format!("Unknown: {}\n", why)),
    };
    let kind = match &v {
        QuasicycleVerdict::Found(_) => "Found",
        QuasicycleVerdict::Free(_) => "Free",
        QuasicycleVerdict::Unknown(_) => "Unknown",
    };
    Ok(Report { text, json: json!({ "kind": kind, "verdict": v }), dot: None, code })
}

fn hom(file: &str, source: &str, target: &str, o: &Opts) -> Result<Report, String> {
    let s = load(file)?;
    let lim = limits(&s, o)?;
    let (a, b) = (term(&s, source)?, term(&s, target)?);
    let g = explore(std::slice::from_ref(&a), &s, &lim);
    let v = g.vertex(&a).expect("seed");
    let Some(w) = g.vertex(&b) else {
        let code = if g.is_complete() { OK } else { TRUNCATED };
        return Ok(Report {
            text: "0 paths\n".into(),
            json: json!({ "paths": [], "classes": [], "truncated": code == TRUNCATED }),
            dot: None,
            code,
        });
    };
    if !g.span(v, w).acyclic {
        return Err("the span between the terms has a cycle".into());
    }
    let ps = g.hom_paths(v, w, &lim);
    let classes = FaceOracle::new(&s, &g, &lim).classes(v, &ps.paths);
    let paths: Vec<String> = ps.paths.iter().map(|p| show_path(&s, &g, p)).collect();
    let truncated = ps.truncated || !g.is_complete();
    let mut text = String::new();
    for (k, c) in classes.iter().enumerate() {
        text.push_str(&format!("class {}:\n", k + 1));
        for &i in c {
            text.push_str(&format!("  {}\n", paths[i]));
        }
    }
    text.push_str(&format!(
        "{} paths in {} classes{}\n",
        paths.len(),
        classes.len(),
        if truncated { " (truncated)" } else { "" }
    ));
    Ok(Report {
        text,
        json: json!({ "paths": paths, "classes": classes, "truncated": truncated }),
        dot: None,
        code: if truncated { TRUNCATED } else { OK },
    })
}

fn graph(file: &str, seeds: &[String], o: &Opts) -> Result<Report, String> {
    let s = load(file)?;
    let lim = limits(&s, o)?;
    let seeds: Vec<CanonicalTerm> = seeds.iter().map(|t| term(&s, t)).collect::<Result<_, _>>()?;
    let g = explore(&seeds, &s, &lim);
    let vertices: Vec<String> = g.vertices.iter().map(|v| show(&s, v)).collect();
    let edges: Vec<Value> = g
        .edges
        .iter()
        .map(|e| json!({ "source": e.source, "target": e.target, "label": cohere::graph::step_label(&e.step) }))
        .collect();
    let frontier: BTreeSet<usize> = g.frontier.iter().copied().collect();
    let mut text = String::new();
    for e in &g.edges {
        text.push_str(&format!("{} -{}-> {}\n", vertices[e.source], e.step.rule, vertices[e.target]));
    }
    text.push_str(&format!(
        "{} vertices, {} edges{}\n",
        vertices.len(),
        edges.len(),
        if g.is_complete() { "" } else { ", exploration truncated" }
    ));
    Ok(Report {
        text,
        json: json!({ "vertices": vertices, "edges": edges, "frontier": frontier, "complete": g.is_complete() }),
        dot: Some(g.to_dot(&s.sig)),
        code: if g.is_complete() { OK } else { TRUNCATED },
    })
}
