use thiserror::Error;

use crate::topology::{LinkId, NodeId};

/// Errors produced by topology loading, spectrum bookkeeping and planning.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema: {0}")]
    Schema(String),
    #[error("dangling endpoint: link {link} references unknown node {node}")]
    DanglingEndpoint { link: u32, node: u32 },
    #[error("duplicate node id {0}")]
    DuplicateNode(u32),
    #[error("duplicate link id {0}")]
    DuplicateLink(u32),
    #[error("link {0} joins a node to itself")]
    SelfLoop(u32),
    #[error("link {0} has an empty span list")]
    EmptySpans(u32),
    #[error("link {0} has a span with non-positive length or loss")]
    BadSpan(u32),
    #[error("topology is not connected")]
    Disconnected,
    #[error("topology has no nodes")]
    EmptyTopology,
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("unknown demand pair ({0}, {1})")]
    UnknownPair(NodeId, NodeId),
    #[error("year {0} is outside the growth profile range")]
    YearOutOfRange(i32),
    #[error("growth profile is invalid: {0}")]
    BadProfile(String),
    #[error("fiber pair index {0} out of range")]
    UnknownFiberPair(usize),
    #[error("slot range [{start}, {start}+{len}) out of range")]
    SlotOutOfRange { start: usize, len: usize },
    #[error("slot range [{start}, {start}+{len}) overlaps an existing allocation")]
    SlotOverlap { start: usize, len: usize },
    #[error("slot range [{start}, {start}+{len}) is not fully allocated")]
    SlotNotAllocated { start: usize, len: usize },
    #[error("path has no spans")]
    EmptyPath,
    #[error("channel bandwidth must be positive")]
    ZeroBandwidth,
    #[error("no path between {0} and {1}")]
    NoPath(NodeId, NodeId),
    #[error("empty candidate path list")]
    NoCandidates,
    #[error("grid/ledger mismatch on link {link}: {detail}")]
    LedgerMismatch { link: LinkId, detail: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
