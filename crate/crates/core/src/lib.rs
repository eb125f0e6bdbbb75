//! Construction and analysis of the bipartite graph linking Internet
//! exchange points (IXPs) to their member autonomous systems (ASes).
//!
//! - [`ingest`] merges and sanitizes membership datasets into a graph.
//! - [`projection`] derives IXP and AS multigraphs.
//! - [`metrics`] computes degree, path, multiplicity and gain statistics.
//! - [`placement`] solves IXP placement and remote-peering problems.
//! - [`cli`] implements the `ixpgraph` command.

pub mod cli;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod placement;
pub mod projection;

pub use error::{Error, Result};
pub use model::{Asn, BipartiteGraph, IxpId, NodeClass, NodeId};
