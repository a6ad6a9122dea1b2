//! Geometric indexes: BBD tree, range tree, WSPD distances and box
//! complements.

pub mod bbd;
pub mod complement;
pub mod range_tree;
pub mod wspd;

pub use bbd::{ActiveSet, BbdNode, BbdTree, Life, NodeSlots};
pub use complement::{cube_complement, cube_partition};
pub use range_tree::RangeTree;
pub use wspd::{wspd_distances, wspd_worst_error};
