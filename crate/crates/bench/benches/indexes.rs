use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use setout_bench::{cloud, database};
use setout_core::geo::{BbdTree, RangeTree};
use setout_core::relational::{count_rect, yannakakis_count, Query};
use setout_core::Rect;

fn bbd(c: &mut Criterion) {
    let mut g = c.benchmark_group("bbd");
    for n in [1_000, 10_000] {
        let pts = cloud(n, 2);
        g.bench_with_input(BenchmarkId::new("build", n), &pts, |b, p| b.iter(|| BbdTree::build(black_box(p))));
        let tree = BbdTree::build(&pts);
        g.bench_with_input(BenchmarkId::new("ball_query", n), &pts, |b, p| {
            let mut i = 0;
            b.iter(|| {
                i = (i + 1) % p.len();
                tree.ball_query(&p[i], 1.0, 0.1)
            })
        });
    }
    g.finish();
}

fn range(c: &mut Criterion) {
    let mut g = c.benchmark_group("range_tree");
    for n in [1_000, 10_000] {
        let pts = cloud(n, 2);
        let tree = RangeTree::build(&pts);
        let lo: Vec<f64> = pts[0].iter().map(|v| v - 2.0).collect();
        let hi: Vec<f64> = pts[0].iter().map(|v| v + 2.0).collect();
        let rect = Rect::from_f64(&lo, &hi);
        assert!(tree.count(&rect).unwrap() > 1);
        g.bench_with_input(BenchmarkId::new("count", n), &rect, |b, r| b.iter(|| tree.count(black_box(r)).unwrap()));
    }
    g.finish();
}

fn join(c: &mut Criterion) {
    let mut g = c.benchmark_group("join");
    for rows in [50, 200] {
        let db = database(4, rows, 2);
        let q = Query::new(&db).unwrap();
        let half = Rect::from_f64(&vec![0.0; q.dim()], &vec![f64::INFINITY; q.dim()]);
        g.bench_function(BenchmarkId::new("count", rows), |b| b.iter(|| yannakakis_count(black_box(&q))));
        g.bench_function(BenchmarkId::new("count_rect", rows), |b| b.iter(|| count_rect(black_box(&q), &half)));
    }
    g.finish();
}

criterion_group!(benches, bbd, range, join);
criterion_main!(benches);
