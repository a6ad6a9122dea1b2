//! Fixed inputs shared by the benchmarks.

use setout_core::gen::{planted_database, planted_geometric, PointGen, RelGen};
use setout_core::relational::Database;
use setout_core::GeometricInstance;

/// Planted clusters in `d` dimensions with rectangle outlier sets.
pub fn geometric(n: usize, d: usize, k: usize, z: usize, m: usize) -> GeometricInstance {
    planted_geometric(7, &PointGen { n, d, k, z, m }, false).expect("valid generator parameters").instance
}

/// Grid-free point cloud taken from the planted generator.
pub fn cloud(n: usize, d: usize) -> Vec<Vec<f64>> {
    geometric(n, d, 4, 1, 2).points().to_vec()
}

/// Acyclic database of `g` relations with `rows` rows each.
pub fn database(g: usize, rows: usize, bad: usize) -> Database {
    planted_database(11, &RelGen { g, d: g + 1, rows, clusters: 3, bad, bad_rel: 0 }).expect("valid generator parameters").instance
}
