use std::collections::BTreeSet;
use std::path::PathBuf;

use crate::model::{Asn, NodeId};

/// Errors produced by graph construction, analysis and placement.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("edge endpoint {0} is not a vertex of the graph")]
    UnknownEndpoint(NodeId),
    #[error("node {0} is not present in the graph")]
    UnknownNode(NodeId),
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("graph is empty")]
    EmptyGraph,
    #[error("graph is disconnected: no path between {0} and {1}")]
    Disconnected(Asn, Asn),
    #[error("{0} and {1} are not co-located at any IXP")]
    NotColocated(Asn, Asn),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("operation requires an {expected} multigraph")]
    WrongNodeClass { expected: crate::model::NodeClass },
    #[error("target {0} is not an AS of the graph")]
    UnknownTarget(Asn),
    #[error("universe cannot be covered; uncovered: {}", fmt_residue(.residue))]
    Uncoverable { residue: BTreeSet<Asn> },
    #[error("instance has {candidates} candidates, exhaustive search is limited to {limit}")]
    TooLarge { candidates: usize, limit: usize },
    #[error("no IXP in the graph carries location data")]
    NoLocationData,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}

fn fmt_residue(residue: &BTreeSet<Asn>) -> String {
    residue
        .iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
