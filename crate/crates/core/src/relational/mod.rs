//! Acyclic join queries over real-valued relations: join trees, exact
//! counting, uniform sampling and enumeration inside rectangles, distance
//! selection and k-center over the join result.

pub mod cluster;
pub mod distance;
pub mod join;
pub mod oracle;
pub mod schema;

pub use cluster::{rel_cluster, ClusterOracle, RelClusters};
pub use distance::{linf_candidates, linf_kth_distance};
pub use join::{build_join_tree, count_rect, sample_rect, yannakakis_count, yannakakis_materialize, JoinResult, JoinTree, Query};
pub use schema::{Database, Mask, Relation, TupleId};
