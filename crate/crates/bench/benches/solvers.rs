use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use setout_bench::{database, geometric};
use setout_core::cso_general::dense_system;
use setout_core::gcso::{solve_gcso, GcsoConfig};
use setout_core::mwu::{mwu_solve, MwuConfig};
use setout_core::outliers::rcto1::{solve_rcto1, Rcto1Config};
use setout_core::relational::Query;
use setout_core::{Params, SetSystem};

fn mwu(c: &mut Criterion) {
    let mut g = c.benchmark_group("mwu");
    g.sample_size(20);
    for n in [100, 400] {
        let inst = geometric(n, 2, 4, 2, 8);
        let elems: Vec<usize> = (0..inst.len()).collect();
        let sets: Vec<usize> = (0..inst.num_sets()).collect();
        let sys = dense_system(&inst, &elems, &sets, 2.0);
        g.bench_function(BenchmarkId::new("dense", n), |b| b.iter(|| mwu_solve(&mut sys.clone(), 4, 2, 0.2, &MwuConfig::default())));
    }
    g.finish();
}

fn gcso(c: &mut Criterion) {
    let mut g = c.benchmark_group("gcso");
    g.sample_size(10);
    for n in [100, 200] {
        let inst = geometric(n, 2, 3, 2, 6);
        let p = Params::new(3, 2, 0.3).unwrap();
        g.bench_function(BenchmarkId::new("solve", n), |b| b.iter(|| solve_gcso(black_box(&inst), &p, &GcsoConfig::default()).unwrap()));
    }
    g.finish();
}

fn rcto1(c: &mut Criterion) {
    let mut g = c.benchmark_group("rcto1");
    g.sample_size(10);
    for rows in [20, 60] {
        let db = database(3, rows, 2);
        let q = Query::new(&db).unwrap();
        let p = Params::new(2, 2, 0.3).unwrap();
        g.bench_function(BenchmarkId::new("solve", rows), |b| b.iter(|| solve_rcto1(black_box(&q), &p, &Rcto1Config::default()).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, mwu, gcso, rcto1);
criterion_main!(benches);
