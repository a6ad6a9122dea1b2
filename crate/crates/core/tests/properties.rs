use proptest::prelude::*;

use setout_core::geo::bbd::BbdTree;
use setout_core::geo::complement::cube_partition;
use setout_core::geo::range_tree::RangeTree;
use setout_core::instance::{instance_from_json, instance_to_json};
use setout_core::metric::{brute_force_cso, brute_force_kcenter, gonzalez_kcenter};
use setout_core::relational::join::{count_rect, yannakakis_count, yannakakis_materialize, Query};
use setout_core::relational::oracle::nested_loop_join;
use setout_core::gen::{planted_database, random_general, RelGen};
use setout_core::{Bound, GeneralInstance, Instance, Metric, Rect, SetSystem};

fn points(n: std::ops::Range<usize>, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    // Small integer grid so ties and shared coordinates show up.
    prop::collection::vec(prop::collection::vec((0i32..12).prop_map(f64::from), d), n)
}

fn rect(d: usize) -> impl Strategy<Value = Rect> {
    prop::collection::vec((0i32..12, 0i32..12), d).prop_map(|iv| {
        let lo: Vec<f64> = iv.iter().map(|&(a, b)| f64::from(a.min(b))).collect();
        let hi: Vec<f64> = iv.iter().map(|&(a, b)| f64::from(a.max(b))).collect();
        Rect::from_f64(&lo, &hi)
    })
}

/// A general instance with its elements renamed by `perm`.
fn relabel(inst: &GeneralInstance, perm: &[usize]) -> GeneralInstance {
    let n = inst.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[perm[i]][perm[j]] = inst.dist(i, j);
        }
    }
    let sets = (0..inst.num_sets()).map(|j| inst.set(j).iter().map(|&i| perm[i]).collect()).collect();
    GeneralInstance::new(Metric::Matrix(d), sets).unwrap()
}

fn rel_db(seed: u64, g: usize, rows: usize) -> setout_core::relational::schema::Database {
    planted_database(seed, &RelGen { g, d: g + 1, rows, clusters: 2, bad: 1, bad_rel: 0 }).unwrap().instance
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn general_json_round_trip(seed in any::<u64>(), n in 2usize..10, m in 1usize..5) {
        let inst = Instance::General(random_general(seed, n, m.min(n), 2, 2).unwrap());
        let text = instance_to_json(&inst);
        let back = instance_from_json(&text).unwrap();
        prop_assert_eq!(instance_to_json(&back), text);
        let (a, b) = (inst.as_set_system(), back.as_set_system());
        for i in 0..n {
            prop_assert_eq!(a.sets_of(i), b.sets_of(i));
            for j in 0..n {
                prop_assert_eq!(a.dist(i, j), b.dist(i, j));
            }
        }
    }

    #[test]
    fn optimum_ignores_labels(seed in any::<u64>(), n in 3usize..8, m in 1usize..4, k in 1usize..3, z in 1usize..3, shuffle in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let inst = random_general(seed, n, m.min(n), 2, 2).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(shuffle));
        let (a, _) = brute_force_cso(&inst, k, z, 1_000_000).unwrap();
        let (b, _) = brute_force_cso(&relabel(&inst, &perm), k, z, 1_000_000).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn farthest_first_is_a_two_approximation(pts in points(2..10, 2), k in 1usize..4) {
        let n = pts.len();
        let dist = |i: usize, j: usize| setout_core::instance::euclid(&pts[i], &pts[j]);
        let all: Vec<usize> = (0..n).collect();
        let mut last = f64::INFINITY;
        for kk in 1..=k {
            let (centers, cost) = gonzalez_kcenter(&all, dist, kk);
            prop_assert!(centers.len() <= kk);
            prop_assert!(cost <= 2.0 * brute_force_kcenter(n, dist, kk) + 1e-9);
            // More centers never hurt: the prefix of a longer run is a shorter run.
            prop_assert!(cost <= last);
            last = cost;
        }
    }

    #[test]
    fn bbd_query_is_sandwiched(pts in points(1..60, 2), q in points(1..2, 2), r in 0.0f64..8.0, eps in 0.05f64..1.0) {
        let tree = BbdTree::build(&pts);
        let got = tree.ball_query(&q[0], r, eps);
        let hits = tree.collect(&got);
        let mut seen = vec![false; pts.len()];
        for &i in &hits {
            prop_assert!(!seen[i], "point {} reported twice", i);
            seen[i] = true;
            prop_assert!(setout_core::instance::euclid(&pts[i], &q[0]) <= (1.0 + eps) * r + 1e-9);
        }
        for i in tree.scan(&q[0], r) {
            prop_assert!(seen[i], "point {} inside the ball was missed", i);
        }
    }

    #[test]
    fn range_tree_matches_scan(pts in points(1..60, 3), r in rect(3)) {
        let tree = RangeTree::build(&pts);
        let mut want: Vec<usize> = (0..pts.len()).filter(|&i| r.contains(&pts[i])).collect();
        let mut got = tree.report(&r).unwrap();
        got.sort_unstable();
        want.sort_unstable();
        prop_assert_eq!(tree.count(&r).unwrap(), want.len());
        prop_assert_eq!(got, want);
    }

    #[test]
    fn cube_cells_partition_space(boxes in prop::collection::vec(rect(2), 1..5), probes in points(1..80, 2)) {
        let (free, covered) = cube_partition(&boxes);
        for p in &probes {
            // Shift off the grid so boundary conventions do not matter.
            let p: Vec<f64> = p.iter().map(|v| v + 0.5).collect();
            let inside = boxes.iter().any(|b| b.contains(&p));
            let f = free.iter().filter(|c| c.contains(&p)).count();
            let c = covered.iter().filter(|c| c.contains(&p)).count();
            prop_assert_eq!(f + c, 1);
            prop_assert_eq!(c == 1, inside);
        }
    }

    #[test]
    fn join_count_matches_nested_loops(seed in any::<u64>(), g in 1usize..4, rows in 1usize..6) {
        let db = rel_db(seed, g, rows);
        let q = Query::new(&db).unwrap();
        let naive = nested_loop_join(&db, &db.full_mask());
        prop_assert_eq!(yannakakis_count(&q), naive.len() as u128);
        prop_assert_eq!(yannakakis_materialize(&q, usize::MAX).unwrap().len(), naive.len());
    }

    #[test]
    fn rect_counts_add_up(seed in any::<u64>(), g in 1usize..4, rows in 1usize..6, cut in prop::sample::select(vec![-1.0, 0.0, 0.5, 1.0, 2.0, 3.5, 7.0])) {
        let db = rel_db(seed, g, rows);
        let q = Query::new(&db).unwrap();
        let d = q.dim();
        let mut lo = Rect::full(d);
        let mut hi = Rect::full(d);
        let mut plane = Rect::full(d);
        lo.hi[0] = Bound::Finite(cut);
        hi.lo[0] = Bound::Finite(cut);
        plane.lo[0] = Bound::Finite(cut);
        plane.hi[0] = Bound::Finite(cut);
        // Closed halves overlap exactly on the cutting plane.
        prop_assert_eq!(count_rect(&q, &lo) + count_rect(&q, &hi), yannakakis_count(&q) + count_rect(&q, &plane));
    }

    #[test]
    fn removing_tuples_never_adds_results(seed in any::<u64>(), rows in 1usize..6, drop in any::<prop::sample::Index>()) {
        let db = rel_db(seed, 3, rows);
        let q = Query::new(&db).unwrap();
        let ids: Vec<_> = db.tuple_ids().collect();
        let gone = ids[drop.index(ids.len())];
        let sub = q.without(&[gone]);
        let kept = yannakakis_materialize(&sub, usize::MAX).unwrap();
        prop_assert!(kept.len() as u128 <= yannakakis_count(&q));
        for res in &kept {
            prop_assert!(res.rows[gone.rel] != gone.row);
        }
        // The semijoin-reduced mask keeps exactly the tuples in some result.
        let reduced = sub.semijoin_reduce();
        for (rel, mask) in reduced.iter().enumerate() {
            for (row, &keep) in mask.iter().enumerate() {
                prop_assert_eq!(keep, kept.iter().any(|r| r.rows[rel] == row));
            }
        }
    }
}

#[test]
fn json_floats_survive_exactly() {
    // This instance once came back with a coordinate off by one ulp.
    let inst = Instance::General(random_general(9762259439865614437, 4, 1, 2, 2).unwrap());
    let text = instance_to_json(&inst);
    assert_eq!(instance_to_json(&instance_from_json(&text).unwrap()), text);
}
