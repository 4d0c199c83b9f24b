//! Graph-based texture features: the symmetric local graph structure
//! transform and the block-wise graph shortest path descriptors.

pub mod gsp;
pub mod lgs;

pub use gsp::{
    block_paths, build_block_graph, gsp_features, shortest_path, DirectionStats, GspConfig,
    PixelGraph,
};
pub use lgs::{lgs_features, lgs_transform, LgsFeatures, LGS_PATTERN_BITS, LGS_PATTERN_MAX};
