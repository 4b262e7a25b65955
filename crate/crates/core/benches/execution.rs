use std::collections::BTreeMap;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use trf_core::{
    enumerate_terms_with, parse_inline_rules, subseries_limit_form_with, subseries_tables, CensusOptions,
    ClosedFormOptions, Execution, Rational, RecurrenceSpec,
};

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn spec() -> RecurrenceSpec {
    let rules = parse_inline_rules("A=(n+2)/(2*n+3); B=(1-n)/(n+4)", &BTreeMap::new()).unwrap();
    RecurrenceSpec::canonical(rules).unwrap()
}

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_terms n=22 arity=3");
    for (name, execution) in POLICIES {
        let options = CensusOptions {
            execution,
            ..Default::default()
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| enumerate_terms_with(22, 3, &options).unwrap())
        });
    }
    group.finish();
}

fn closed_form(c: &mut Criterion) {
    let spec = spec();
    let mut group = c.benchmark_group("closed form");
    group.sample_size(20);
    for (name, execution) in POLICIES {
        let options = ClosedFormOptions {
            execution,
            ..Default::default()
        };
        group.bench_function(BenchmarkId::new("subseries_tables k=16 exact", name), |b| {
            b.iter(|| subseries_tables::<Rational>(&spec, 16, &options).unwrap())
        });
        group.bench_function(BenchmarkId::new("limit form N=4 n=10 exact", name), |b| {
            b.iter(|| subseries_limit_form_with::<Rational>(&spec, 4, 10, &options).unwrap())
        });
        group.bench_function(BenchmarkId::new("subseries_tables k=24 f64", name), |b| {
            b.iter(|| subseries_tables::<f64>(&spec, 24, &options).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, census, closed_form);
criterion_main!(benches);
