//! The `imc` subcommand: termination, the map criterion and hom-set sizes
//! for the iterated monoidal structure with `n` tensors.

use std::collections::BTreeSet;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use cohere::coherence::FaceOracle;
use cohere::graph::{explore, verify_ranking_on, FnRanking};
use cohere::imc::{build_imc, imc_terms, map_exists, verified_ranking};
use cohere::CanonicalTerm;

use crate::{limits, Opts, Report, NEGATIVE, OK, TRUNCATED};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Ranking,
    Maps,
    Coherence,
    All,
}

const LETTERS: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];

pub fn run(n: usize, suite: Suite, vars: usize, o: &Opts) -> Result<Report, String> {
    if n == 0 {
        return Err("n must be at least 1".into());
    }
    if vars == 0 || vars > LETTERS.len() {
        return Err(format!("--vars must be between 1 and {}", LETTERS.len()));
    }
    let s = build_imc(n);
    let lim = limits(&s, o)?;
    let mut out = Map::new();
    let mut text = String::new();
    let (mut failed, mut truncated) = (false, false);
    out.insert("n".into(), json!(n));
    out.insert("vars".into(), json!(vars));

    if matches!(suite, Suite::Ranking | Suite::All) {
        let terms: Vec<CanonicalTerm> = (1..=vars).flat_map(|k| imc_terms(n, &LETTERS[..k])).collect();
        let r = FnRanking { name: "join-index".into(), f: move |t: &CanonicalTerm| verified_ranking(t.term(), n) };
        let c = verify_ranking_on(&s, &r, &terms, lim.unit_budget);
        failed |= !c.ok;
        text.push_str(&format!(
            "ranking: {} terms, {} steps, {}\n",
            c.terms_checked,
            c.steps_checked,
            if c.ok { "decreases on every step" } else { "FAILS" }
        ));
        out.insert("ranking".into(), serde_json::to_value(&c).map_err(|e| e.to_string())?);
    }

    let terms = imc_terms(n, &LETTERS[..vars]);
    let names: Vec<String> = terms.iter().map(|t| s.print(t.term())).collect();
    let needs_graphs = matches!(suite, Suite::Maps | Suite::Coherence | Suite::All);
    if needs_graphs {
        out.insert("terms".into(), json!(names));
    }
    let (mut matrix, mut sizes) = (Vec::new(), Vec::new());
    let mut discrepancies = Vec::new();
    if needs_graphs {
        for (i, a) in terms.iter().enumerate() {
            let g = explore(std::slice::from_ref(a), &s, &lim);
            truncated |= !g.is_complete();
            let v = g.vertex(a).expect("seed");
            let oracle = FaceOracle::new(&s, &g, &lim);
            let (mut row, mut size_row) = (Vec::new(), Vec::new());
            for (j, b) in terms.iter().enumerate() {
                let reach = g.vertex(b);
                if matches!(suite, Suite::Maps | Suite::All) {
                    let m = map_exists(a.term(), b.term()).map_err(|e| e.to_string())?;
                    if m != reach.is_some() {
                        discrepancies.push(json!([i, j]));
                    }
                    row.push(m);
                }
                if matches!(suite, Suite::Coherence | Suite::All) {
                    size_row.push(match reach {
                        None => 0,
                        Some(w) => {
                            let ps = g.hom_paths(v, w, &lim);
                            truncated |= ps.truncated;
                            oracle.classes(v, &ps.paths).len()
                        }
                    });
                }
            }
            matrix.push(row);
            sizes.push(size_row);
        }
    }
    if matches!(suite, Suite::Maps | Suite::All) {
        failed |= !discrepancies.is_empty();
        let maps = matrix.iter().flatten().filter(|&&m| m).count();
        text.push_str(&format!(
            "maps: {} pairs over {} terms, {} maps, {} disagreements with reachability\n",
            terms.len() * terms.len(),
            terms.len(),
            maps,
            discrepancies.len()
        ));
        out.insert("map_exists".into(), json!(matrix));
        out.insert("map_discrepancies".into(), json!(discrepancies));
    }
    if matches!(suite, Suite::Coherence | Suite::All) {
        let values: BTreeSet<usize> = sizes.iter().flatten().copied().collect();
        let ok = values.iter().all(|&k| k <= 1);
        failed |= !ok;
        text.push_str(&format!(
            "coherence: hom-set sizes after quotient {:?}{}\n",
            values,
            if ok { ", at most one map between any two terms" } else { "" }
        ));
        out.insert("hom_sizes".into(), json!(sizes));
    }
    if truncated {
        text.push_str("some exploration was truncated by the limits\n");
    }
    out.insert("ok".into(), json!(!failed));
    out.insert("truncated".into(), json!(truncated));
    let code = if failed {
        NEGATIVE
    } else if truncated {
        TRUNCATED
    } else {
        OK
    };
    Ok(Report { text, json: Value::Object(out), dot: None, code })
}
