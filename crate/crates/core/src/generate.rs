//! Synthetic graphs for tests, benches and experiments.

use std::collections::HashSet;

use rand::Rng;

use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::rng::seeded;

/// Preferential attachment: start from a clique on `m + 1` nodes, then every
/// new node links to `m` distinct existing nodes chosen with probability
/// proportional to degree.
pub fn preferential_attachment(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || n < m + 1 {
        return domain(format!(
            "preferential attachment needs m ≥ 1 and n ≥ m + 1 (n={n}, m={m})"
        ));
    }
    let mut rng = seeded(seed);
    let mut edges = Vec::with_capacity(m * (m + 1) / 2 + (n - m - 1) * m);
    // Every edge endpoint, so a uniform pick is degree-proportional.
    let mut ends = Vec::with_capacity(2 * edges.capacity());
    for i in 0..=m {
        for j in i + 1..=m {
            edges.push((i, j));
            ends.extend([i, j]);
        }
    }
    let mut targets = HashSet::with_capacity(m);
    let mut picked = Vec::with_capacity(m);
    for v in m + 1..n {
        targets.clear();
        picked.clear();
        while picked.len() < m {
            let t = ends[rng.random_range(0..ends.len())];
            if targets.insert(t) {
                picked.push(t);
            }
        }
        for &t in &picked {
            edges.push((t, v));
            ends.extend([t, v]);
        }
    }
    Graph::from_edges(n, edges)
}
