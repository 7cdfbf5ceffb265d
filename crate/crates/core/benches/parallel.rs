use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cohere::coherence::maclane_report_on;
use cohere::corpus::load;
use cohere::graph::{verify_ranking_on, FnRanking, Limits};
use cohere::imc::{build_imc, imc_terms, verified_ranking};
use cohere::par;
use cohere::CanonicalTerm;

const MODES: [(&str, bool); 2] = [("parallel", true), ("sequential", false)];

fn ranking(c: &mut Criterion) {
    let s = build_imc(3);
    let lim = Limits::for_structure(&s);
    let terms: Vec<CanonicalTerm> = (1..=4).flat_map(|k| imc_terms(3, &["A", "B", "C", "D"][..k])).collect();
    let r = FnRanking { name: "join-index".into(), f: |t: &CanonicalTerm| verified_ranking(t.term(), 3) };
    let mut group = c.benchmark_group("ranking_imc3_4vars");
    group.sample_size(10);
    for (name, on) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_parallel(on);
            b.iter(|| verify_ranking_on(&s, &r, &terms, lim.unit_budget))
        });
    }
    group.finish();
    par::set_parallel(true);
}

fn maclane(c: &mut Criterion) {
    let s = load("monoidal").expect("corpus entry");
    let lim = Limits::for_structure(&s);
    let sources: Vec<CanonicalTerm> =
        ["(A ot1 (B ot1 (C ot1 D)))", "((A ot1 (B ot1 C)) ot1 D)", "(A ot1 ((B ot1 C) ot1 D))"]
            .iter()
            .map(|t| s.parse_canonical(t).expect("term"))
            .collect();
    let mut group = c.benchmark_group("maclane_monoidal");
    group.sample_size(10);
    for (name, on) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_parallel(on);
            b.iter(|| maclane_report_on(&s, &sources, &lim))
        });
    }
    group.finish();
    par::set_parallel(true);
}

criterion_group!(benches, ranking, maclane);
criterion_main!(benches);
