//! Undirected simple graphs, SNAP-style edge-list I/O and induced subgraphs.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{domain, Error, Result};

/// Immutable undirected simple graph over dense node indices `0..n`.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted. Adjacency is kept
/// in CSR form with every neighbor list sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

/// Counts gathered while normalizing raw input into a simple graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub raw_edges: usize,
    pub self_loops: usize,
    pub duplicates: usize,
    pub nodes: usize,
    pub edges: usize,
}

impl Graph {
    /// Build a graph from arbitrary pairs: symmetrizes, drops self-loops and
    /// duplicate edges.
    pub fn from_edges<I>(node_count: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges_with_report(node_count, pairs).map(|(g, _)| g)
    }

    pub fn from_edges_with_report<I>(node_count: usize, pairs: I) -> Result<(Self, LoadReport)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut report = LoadReport::default();
        let mut edges = Vec::new();
        for (u, v) in pairs {
            report.raw_edges += 1;
            if u >= node_count || v >= node_count {
                return domain(format!("edge ({u}, {v}) out of range for {node_count} nodes"));
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        report.duplicates = before - edges.len();
        report.nodes = node_count;
        report.edges = edges.len();
        Ok((Self::from_sorted_unique(node_count, edges), report))
    }

    /// `edges` must be sorted, unique, with `u < v < node_count`.
    pub(crate) fn from_sorted_unique(node_count: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut degree = vec![0usize; node_count];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..node_count].to_vec();
        let mut targets = vec![0usize; 2 * edges.len()];
        // Sorted input leaves every neighbor list sorted: entries (w, v) with
        // w < v precede all entries (v, x).
        for &(u, v) in &edges {
            targets[cursor[u]] = v;
            cursor[u] += 1;
            targets[cursor[v]] = u;
            cursor[v] += 1;
        }
        let g = Graph {
            edges,
            offsets,
            targets,
        };
        assert_eq!(
            g.degrees().sum::<usize>(),
            2 * g.edge_count(),
            "handshake identity violated"
        );
        g
    }

    pub fn empty(node_count: usize) -> Self {
        Self::from_sorted_unique(node_count, Vec::new())
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    /// Sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count() && v < self.node_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Position of edge `{u, v}` in [`Graph::edges`].
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Degree multiset, one entry per node in index order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        self.degrees().collect()
    }

    /// Subgraph on `nodes` with every edge of `self` between them.
    ///
    /// Nodes are reindexed densely in ascending original order; duplicates
    /// in `nodes` are ignored.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<InducedSubgraph> {
        let n = self.node_count();
        let mut original: Vec<usize> = nodes.to_vec();
        original.sort_unstable();
        original.dedup();
        if let Some(&bad) = original.iter().find(|&&v| v >= n) {
            return domain(format!("node {bad} out of range for {n} nodes"));
        }
        let mut local = vec![usize::MAX; n];
        for (i, &v) in original.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in original.iter().enumerate() {
            for &w in self.neighbors(v) {
                let j = local[w];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        edges.sort_unstable();
        Ok(InducedSubgraph {
            graph: Graph::from_sorted_unique(original.len(), edges),
            original,
        })
    }
}

/// An induced subgraph together with the original index of each local node.
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub graph: Graph,
    pub original: Vec<usize>,
}

/// Bijection between external node ids (as read from input) and dense
/// internal indices, assigned in first-seen order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeIdMap {
    external: Vec<u64>,
    internal: HashMap<u64, usize>,
}

impl NodeIdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity map over `0..n`.
    pub fn identity(n: usize) -> Self {
        let mut map = Self::new();
        for v in 0..n as u64 {
            map.intern(v);
        }
        map
    }

    pub fn intern(&mut self, id: u64) -> usize {
        if let Some(&idx) = self.internal.get(&id) {
            return idx;
        }
        let idx = self.external.len();
        self.external.push(id);
        self.internal.insert(id, idx);
        idx
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.internal.get(&id).copied()
    }

    pub fn external_id(&self, index: usize) -> Option<u64> {
        self.external.get(index).copied()
    }

    pub fn len(&self) -> usize {
        self.external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }
}

/// Parse a SNAP-style edge list.
///
/// Lines starting with `#` and blank lines are skipped; every other line must
/// hold exactly two whitespace-separated unsigned integers.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<(Graph, NodeIdMap, LoadReport)> {
    let mut ids = NodeIdMap::new();
    let mut pairs = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected two node ids, got {trimmed:?}"),
                })
            }
        };
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("invalid node id {tok:?}"),
            })
        };
        let (a, b) = (parse(a)?, parse(b)?);
        pairs.push((ids.intern(a), ids.intern(b)));
    }
    let (graph, report) = Graph::from_edges_with_report(ids.len(), pairs)?;
    Ok((graph, ids, report))
}

pub fn load_edge_list_file(path: &std::path::Path) -> Result<(Graph, NodeIdMap, LoadReport)> {
    let file = std::fs::File::open(path)?;
    load_edge_list(std::io::BufReader::new(file))
}

/// Write `# nodes: N edges: M` followed by the sorted edge pairs.
///
/// With an id map the pairs are written with external ids (each pair as
/// `min max`, sorted), otherwise with internal indices.
pub fn write_edge_list<W: Write>(g: &Graph, ids: Option<&NodeIdMap>, out: &mut W) -> Result<()> {
    writeln!(out, "# nodes: {} edges: {}", g.node_count(), g.edge_count())?;
    for (u, v) in external_pairs(g.edges().iter().copied(), ids) {
        writeln!(out, "{u}\t{v}")?;
    }
    Ok(())
}

pub(crate) fn external_pairs(
    edges: impl Iterator<Item = (usize, usize)>,
    ids: Option<&NodeIdMap>,
) -> Vec<(u64, u64)> {
    let ext = |v: usize| ids.and_then(|m| m.external_id(v)).unwrap_or(v as u64);
    let mut pairs: Vec<(u64, u64)> = edges
        .map(|(u, v)| {
            let (a, b) = (ext(u), ext(v));
            (a.min(b), a.max(b))
        })
        .collect();
    pairs.sort_unstable();
    pairs
}
