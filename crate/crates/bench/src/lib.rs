//! Shared fixtures for the benches under `benches/`.

use cdsample::generate::preferential_attachment;
use cdsample::Graph;

/// Preferential-attachment graph with four edges per new node.
pub fn social_graph(nodes: usize) -> Graph {
    preferential_attachment(nodes, 4, 17).expect("valid generator parameters")
}
