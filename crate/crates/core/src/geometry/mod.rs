//! Straight-line layouts, crossing enumeration and classification, and stub
//! kinematics.

mod groups;
mod intersect;
mod kinematics;
mod layout;

use thiserror::Error;

pub use groups::morphing_groups;
pub use intersect::{
    classify_all, compute_intersections, IntersectionRecord, PassKind, PointClass,
};
pub use kinematics::{kinematics, pass_period, MorphProfile, PointMotion, Reach, StubMotion};
pub use layout::{
    generate_circle_layout, generate_random_layout, Edge, EdgeId, GraphLayout, Node, NodeId,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("need at least 3 nodes, got {0}")]
    TooFewNodes(u32),
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("node {0:?} has a non-finite coordinate")]
    NonFinite(NodeId),
    #[error("duplicate node id {0:?}")]
    DuplicateNode(NodeId),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(EdgeId),
    #[error("edge {0:?} is a self loop")]
    SelfLoop(EdgeId),
    #[error("edge {0:?} references unknown node {1:?}")]
    UnknownNode(EdgeId, NodeId),
    #[error("edge {0:?} duplicates an existing node pair")]
    ParallelEdge(EdgeId),
    #[error("nodes {0:?} and {1:?} coincide")]
    CoincidentNodes(NodeId, NodeId),
    #[error("node {0:?} lies inside edge {1:?}")]
    NodeOnEdge(NodeId, EdgeId),
    #[error("edges {0:?} and {1:?} overlap collinearly")]
    CollinearOverlap(EdgeId, EdgeId),
    #[error("invalid morph profile: delta={delta}, eta={eta}, speed={speed}, pause={pause}")]
    BadProfile {
        delta: f64,
        eta: f64,
        speed: f64,
        pause: i64,
    },
    #[error("layout json: {0}")]
    Json(String),
}

/// Exact orientation of `r` relative to the directed line `p -> q`.
pub(crate) fn orient(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> f64 {
    let c = |(x, y): (f64, f64)| robust::Coord { x, y };
    robust::orient2d(c(p), c(q), c(r))
}
