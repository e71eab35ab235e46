use thiserror::Error;

use crate::topology::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown node id {0}")]
    UnknownNode(NodeId),

    #[error("node {0} is not processing-capable")]
    NotProcessingCapable(NodeId),

    #[error("node {0} is not an IoT device; demands originate only at the IoT layer")]
    NotIotSource(NodeId),

    #[error("invalid profile {name}: {reason}")]
    InvalidProfile { name: String, reason: String },

    #[error("capacity exceeded on node {node} ({subsystem}): load {load} > capacity {capacity}")]
    CapacityExceeded {
        node: NodeId,
        subsystem: &'static str,
        load: f64,
        capacity: f64,
    },

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("instance exceeds the brute-force oracle size cap: {0}")]
    OracleCap(String),

    #[error("config error (line {line}): {msg}")]
    Config { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
