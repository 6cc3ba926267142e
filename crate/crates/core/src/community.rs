//! Greedy agglomerative modularity maximization and the community dendrogram.
//!
//! Communities start as singletons. The pair of adjacent communities with the
//! largest modularity gain is merged repeatedly; the partition at the first
//! point where no merge has a positive gain is the max-modularity cut and
//! becomes the set of dendrogram leaves. Merging then continues past the cut
//! (adjacent pairs first, then whole components by smallest degree product)
//! until one root covers the graph. Only merges above the cut are kept in the
//! dendrogram.
//!
//! Gains are compared exactly in integers: merging `i` and `j` changes Q by
//! `(2m·L_ij − d_i·d_j) / 2m²`, so the numerator alone orders candidates. Ties
//! go to the lexicographically smallest `(lo, hi)` pair of community labels,
//! where a community's label is its smallest node index.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::io::Write;

use crate::error::{domain, Result};
use crate::graph::{Graph, NodeIdMap};

/// Disjoint covering of a graph's nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    communities: Vec<Vec<usize>>,
}

impl Partition {
    /// Build from per-node labels. Communities are renumbered by their
    /// smallest member.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &l) in labels.iter().enumerate() {
            by_label.entry(l).or_default().push(v);
        }
        let mut communities: Vec<Vec<usize>> = by_label.into_values().collect();
        communities.sort_unstable_by_key(|c| c[0]);
        Self::from_communities(labels.len(), communities)
    }

    fn from_communities(n: usize, communities: Vec<Vec<usize>>) -> Self {
        let mut labels = vec![usize::MAX; n];
        for (c, members) in communities.iter().enumerate() {
            for &v in members {
                labels[v] = c;
            }
        }
        debug_assert!(labels.iter().all(|&l| l != usize::MAX));
        Partition { labels, communities }
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn whole(n: usize) -> Self {
        Self::from_labels(&vec![0; n])
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn communities(&self) -> &[Vec<usize>] {
        &self.communities
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }
}

/// `Q = Σ_c [L_c/m − (d_c/2m)²]`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    if p.labels.len() != g.node_count() {
        return domain("partition does not cover the graph");
    }
    let m = g.edge_count();
    if m == 0 {
        return domain("modularity is undefined on an edgeless graph");
    }
    let k = p.len();
    let mut internal = vec![0usize; k];
    let mut degree = vec![0usize; k];
    for &(u, v) in g.edges() {
        if p.labels[u] == p.labels[v] {
            internal[p.labels[u]] += 1;
        }
    }
    for (v, d) in g.degrees().enumerate() {
        degree[p.labels[v]] += d;
    }
    let m = m as f64;
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(&l, &d)| l as f64 / m - (d as f64 / (2.0 * m)).powi(2))
        .sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Leaf { community: usize },
    Merge { left: usize, right: usize, order: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DendrogramNode {
    pub kind: NodeKind,
    /// Node count of the subgraph this dendrogram node covers.
    pub node_count: usize,
    /// Edge count of the induced subgraph on those nodes.
    pub edge_count: usize,
}

/// Binary merge tree over the extracted communities.
///
/// Ids `0..leaf_count` are the leaves (community `i` is leaf `i`); merges
/// follow in merge order, so every child id is smaller than its parent's and
/// the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dendrogram {
    nodes: Vec<DendrogramNode>,
    leaf_members: Vec<Vec<usize>>,
}

impl Dendrogram {
    /// One leaf covering the whole graph.
    pub fn single(g: &Graph) -> Self {
        Dendrogram {
            nodes: vec![DendrogramNode {
                kind: NodeKind::Leaf { community: 0 },
                node_count: g.node_count(),
                edge_count: g.edge_count(),
            }],
            leaf_members: vec![(0..g.node_count()).collect()],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_members.len()
    }

    pub fn node(&self, id: usize) -> &DendrogramNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[DendrogramNode] {
        &self.nodes
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        id < self.leaf_count()
    }

    pub fn children(&self, id: usize) -> Option<(usize, usize)> {
        match self.nodes[id].kind {
            NodeKind::Merge { left, right, .. } => Some((left, right)),
            NodeKind::Leaf { .. } => None,
        }
    }

    pub fn leaf_members(&self, leaf: usize) -> &[usize] {
        &self.leaf_members[leaf]
    }

    /// All graph nodes covered by dendrogram node `id`, sorted.
    pub fn members(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes[id].node_count);
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            match self.nodes[x].kind {
                NodeKind::Leaf { community } => out.extend_from_slice(&self.leaf_members[community]),
                NodeKind::Merge { left, right, .. } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Merge nodes in ascending merge order (children before parents).
    pub fn merges(&self) -> impl Iterator<Item = usize> + '_ {
        self.leaf_count()..self.len()
    }

    /// One line per node: `leaf <id> <node-count> <edge-count> : <nodes>` or
    /// `merge <id> <left> <right> <order>`.
    pub fn lines(&self, ids: Option<&NodeIdMap>) -> Vec<String> {
        let ext = |v: usize| ids.and_then(|m| m.external_id(v)).unwrap_or(v as u64);
        self.nodes
            .iter()
            .enumerate()
            .map(|(id, node)| match node.kind {
                NodeKind::Leaf { community } => {
                    let list: Vec<String> = self.leaf_members[community]
                        .iter()
                        .map(|&v| ext(v).to_string())
                        .collect();
                    format!(
                        "leaf {id} {} {} : {}",
                        node.node_count,
                        node.edge_count,
                        list.join(" ")
                    )
                }
                NodeKind::Merge { left, right, order } => {
                    format!("merge {id} {left} {right} {order}")
                }
            })
            .collect()
    }

    pub fn write<W: Write>(&self, ids: Option<&NodeIdMap>, out: &mut W) -> Result<()> {
        for line in self.lines(ids) {
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Result of [`extract_hierarchy`].
#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub partition: Partition,
    pub dendrogram: Dendrogram,
    /// Modularity at the cut; `None` for edgeless graphs.
    pub modularity: Option<f64>,
}

struct Community {
    label: usize,
    degree: u64,
    internal: u64,
    members: Vec<usize>,
    neighbors: HashMap<usize, u64>,
}

/// Heap entry: larger gain first, then smaller (lo, hi) label pair.
type Candidate = (i128, Reverse<usize>, Reverse<usize>, usize, usize);

struct Agglomerator {
    two_m: i128,
    slots: Vec<Option<Community>>,
    heap: BinaryHeap<Candidate>,
}

impl Agglomerator {
    fn new(g: &Graph) -> Self {
        let slots = (0..g.node_count())
            .map(|v| {
                Some(Community {
                    label: v,
                    degree: g.degree(v) as u64,
                    internal: 0,
                    members: vec![v],
                    neighbors: g.neighbors(v).iter().map(|&w| (w, 1)).collect(),
                })
            })
            .collect();
        let mut agg = Agglomerator {
            two_m: 2 * g.edge_count() as i128,
            slots,
            heap: BinaryHeap::new(),
        };
        for &(u, v) in g.edges() {
            let c = agg.candidate(u, v);
            agg.heap.push(c);
        }
        agg
    }

    fn community(&self, s: usize) -> &Community {
        self.slots[s].as_ref().expect("dead community slot")
    }

    fn candidate(&self, a: usize, b: usize) -> Candidate {
        let (ca, cb) = (self.community(a), self.community(b));
        let between = ca.neighbors.get(&b).copied().unwrap_or(0) as i128;
        let gain = self.two_m * between - (ca.degree as i128) * (cb.degree as i128);
        let (lo, hi) = (ca.label.min(cb.label), ca.label.max(cb.label));
        (gain, Reverse(lo), Reverse(hi), a, b)
    }

    fn is_current(&self, c: &Candidate) -> bool {
        let (a, b) = (c.3, c.4);
        match (&self.slots[a], &self.slots[b]) {
            (Some(ca), Some(_)) => ca.neighbors.contains_key(&b) && self.candidate(a, b) == *c,
            _ => false,
        }
    }

    /// Best valid adjacent pair, left on the heap.
    fn peek_best(&mut self) -> Option<Candidate> {
        while let Some(top) = self.heap.peek() {
            if self.is_current(top) {
                return Some(*top);
            }
            self.heap.pop();
        }
        None
    }

    /// Merge two communities; returns (survivor slot, edges between them).
    fn merge(&mut self, a: usize, b: usize) -> (usize, u64) {
        let size = |s: usize| self.community(s).neighbors.len();
        let (survivor, dead) = if size(a) >= size(b) { (a, b) } else { (b, a) };
        let dead_c = self.slots[dead].take().expect("dead community slot");
        let between = dead_c.neighbors.get(&survivor).copied().unwrap_or(0);
        for (&k, &w) in &dead_c.neighbors {
            if k == survivor {
                continue;
            }
            let ck = self.slots[k].as_mut().expect("dead neighbor slot");
            ck.neighbors.remove(&dead);
            *ck.neighbors.entry(survivor).or_insert(0) += w;
        }
        {
            let sc = self.slots[survivor].as_mut().expect("dead community slot");
            sc.neighbors.remove(&dead);
            for (&k, &w) in &dead_c.neighbors {
                if k != survivor {
                    *sc.neighbors.entry(k).or_insert(0) += w;
                }
            }
            sc.internal += dead_c.internal + between;
            sc.degree += dead_c.degree;
            sc.label = sc.label.min(dead_c.label);
            sc.members.extend(dead_c.members);
        }
        let fresh: Vec<Candidate> = self
            .community(survivor)
            .neighbors
            .keys()
            .map(|&k| self.candidate(survivor, k))
            .collect();
        self.heap.extend(fresh);
        (survivor, between)
    }
}

struct TreeBuilder {
    nodes: Vec<DendrogramNode>,
    node_of_slot: HashMap<usize, usize>,
    label_of_node: Vec<usize>,
    merges: usize,
}

impl TreeBuilder {
    fn record(&mut self, a: usize, b: usize, survivor: usize, between: u64) {
        let (na, nb) = (self.node_of_slot[&a], self.node_of_slot[&b]);
        let (left, right) = if self.label_of_node[na] <= self.label_of_node[nb] {
            (na, nb)
        } else {
            (nb, na)
        };
        let id = self.nodes.len();
        let order = self.merges;
        self.merges += 1;
        self.nodes.push(DendrogramNode {
            kind: NodeKind::Merge { left, right, order },
            node_count: self.nodes[left].node_count + self.nodes[right].node_count,
            edge_count: self.nodes[left].edge_count + self.nodes[right].edge_count + between as usize,
        });
        self.label_of_node.push(self.label_of_node[left]);
        self.node_of_slot.remove(&a);
        self.node_of_slot.remove(&b);
        self.node_of_slot.insert(survivor, id);
    }
}

/// Greedy modularity communities plus the dendrogram above the cut.
pub fn extract_hierarchy(g: &Graph) -> Result<Hierarchy> {
    let n = g.node_count();
    if n == 0 {
        return domain("cannot extract communities from an empty graph");
    }
    let mut agg = Agglomerator::new(g);

    // Ascent: merge while some adjacent pair strictly increases Q.
    while let Some(best) = agg.peek_best() {
        if best.0 <= 0 {
            break;
        }
        agg.heap.pop();
        agg.merge(best.3, best.4);
    }

    let mut alive: Vec<usize> = (0..n).filter(|&s| agg.slots[s].is_some()).collect();
    alive.sort_unstable_by_key(|&s| agg.community(s).label);
    let mut leaf_members = Vec::with_capacity(alive.len());
    let mut builder = TreeBuilder {
        nodes: Vec::new(),
        node_of_slot: HashMap::new(),
        label_of_node: Vec::new(),
        merges: 0,
    };
    for (leaf, &s) in alive.iter().enumerate() {
        let c = agg.community(s);
        let mut members = c.members.clone();
        members.sort_unstable();
        builder.nodes.push(DendrogramNode {
            kind: NodeKind::Leaf { community: leaf },
            node_count: members.len(),
            edge_count: c.internal as usize,
        });
        builder.label_of_node.push(c.label);
        builder.node_of_slot.insert(s, leaf);
        leaf_members.push(members);
    }
    let partition = Partition::from_communities(n, leaf_members.clone());
    let q = modularity(g, &partition).ok();

    // Forced merges: remaining adjacent pairs by gain, even when negative.
    while let Some(best) = agg.peek_best() {
        agg.heap.pop();
        let (a, b) = (best.3, best.4);
        let (survivor, between) = agg.merge(a, b);
        builder.record(a, b, survivor, between);
    }

    // Only disconnected components remain; their gain is −d_a·d_b.
    let mut by_degree: BTreeMap<u64, BTreeSet<(usize, usize)>> = BTreeMap::new();
    let mut by_label: BTreeSet<(usize, usize)> = BTreeSet::new();
    for s in (0..n).filter(|&s| agg.slots[s].is_some()) {
        let c = agg.community(s);
        by_degree.entry(c.degree).or_default().insert((c.label, s));
        by_label.insert((c.label, s));
    }
    while by_label.len() > 1 {
        let (a, b) = next_component_pair(&by_degree, &by_label, |s| agg.community(s).degree);
        for s in [a, b] {
            let c = agg.community(s);
            let key = (c.label, s);
            let bucket = by_degree.get_mut(&c.degree).unwrap();
            bucket.remove(&key);
            if bucket.is_empty() {
                by_degree.remove(&c.degree);
            }
            by_label.remove(&key);
        }
        let (survivor, between) = agg.merge(a, b);
        builder.record(a, b, survivor, between);
        let c = agg.community(survivor);
        by_degree.entry(c.degree).or_default().insert((c.label, survivor));
        by_label.insert((c.label, survivor));
    }

    Ok(Hierarchy {
        partition,
        dendrogram: Dendrogram {
            nodes: builder.nodes,
            leaf_members,
        },
        modularity: q,
    })
}

/// Pair of disconnected communities with the smallest degree product,
/// ties broken by smallest (lo, hi) label pair.
fn next_component_pair(
    by_degree: &BTreeMap<u64, BTreeSet<(usize, usize)>>,
    by_label: &BTreeSet<(usize, usize)>,
    degree: impl Fn(usize) -> u64,
) -> (usize, usize) {
    let mut buckets = by_degree.iter();
    let (&d1, first) = buckets.next().expect("no communities left");
    let mut labels = by_label.iter();
    let global_min = *labels.next().unwrap();
    if d1 == 0 {
        // Every pair touching a zero-degree community has product zero.
        if degree(global_min.1) == 0 {
            let second = *labels.next().unwrap();
            return (global_min.1, second.1);
        }
        let zero = *first.iter().next().unwrap();
        return (global_min.1, zero.1);
    }
    let mut it = first.iter();
    let x = *it.next().unwrap();
    if let Some(&y) = it.next() {
        return (x.1, y.1);
    }
    let (_, second) = buckets.next().expect("need two communities");
    let y = *second.iter().next().unwrap();
    (x.1, y.1)
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Exhaustive and brute-force references, independent of the heap-based
    //! implementation.
    use crate::graph::Graph;

    /// `4m²·Q` computed from the definition; exact.
    pub fn scaled_q(g: &Graph, labels: &[usize]) -> i128 {
        let m = g.edge_count() as i128;
        let k = labels.iter().max().map_or(0, |&x| x + 1);
        let mut l = vec![0i128; k];
        let mut d = vec![0i128; k];
        for &(u, v) in g.edges() {
            if labels[u] == labels[v] {
                l[labels[u]] += 1;
            }
        }
        for v in 0..g.node_count() {
            d[labels[v]] += g.degree(v) as i128;
        }
        (0..k).map(|c| 4 * m * l[c] - d[c] * d[c]).sum()
    }

    /// All set partitions as restricted-growth label vectors.
    pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
        fn rec(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
            if i == n {
                out.push(cur.clone());
                return;
            }
            for l in 0..=max + 1 {
                if i == 0 && l > 0 {
                    break;
                }
                cur.push(l);
                rec(i + 1, n, cur, if i == 0 { 0 } else { max.max(l) }, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            rec(0, n, &mut Vec::new(), 0, &mut out);
        }
        out
    }

    /// Max scaled Q over all partitions and one maximizer.
    pub fn best_partition(g: &Graph) -> (i128, Vec<usize>) {
        all_partitions(g.node_count())
            .into_iter()
            .map(|p| (scaled_q(g, &p), p))
            .max_by(|a, b| a.0.cmp(&b.0))
            .unwrap()
    }

    /// Greedy merge sequence recomputing Q from scratch for every candidate
    /// pair; returns the max scaled Q reached.
    pub fn greedy_max_q(g: &Graph) -> i128 {
        let n = g.node_count();
        let mut labels: Vec<usize> = (0..n).collect();
        let mut best = scaled_q(g, &labels);
        loop {
            let mut comms: Vec<usize> = labels.clone();
            comms.sort();
            comms.dedup();
            let current = scaled_q(g, &labels);
            let mut choice: Option<(i128, usize, usize)> = None;
            for (i, &a) in comms.iter().enumerate() {
                for &b in &comms[i + 1..] {
                    let merged: Vec<usize> = labels.iter().map(|&l| if l == b { a } else { l }).collect();
                    let q = scaled_q(g, &merged);
                    if choice.is_none_or(|(bq, _, _)| q > bq) {
                        choice = Some((q, a, b));
                    }
                }
            }
            match choice {
                Some((q, a, b)) if q > current => {
                    labels.iter_mut().for_each(|l| {
                        if *l == b {
                            *l = a
                        }
                    });
                    best = best.max(q);
                }
                _ => return best,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::*;
    use super::*;
    use crate::graph::fixtures::*;
    use proptest::prelude::*;

    #[test]
    fn modularity_examples() {
        let g = two_triangles();
        assert_eq!(modularity(&g, &Partition::whole(6)).unwrap(), 0.0);
        let p = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);
        assert!((modularity(&g, &p).unwrap() - 0.357_142_857_142_857).abs() < 1e-9);
        let q = modularity(&triangle(), &Partition::singletons(3)).unwrap();
        assert!((q + 1.0 / 3.0).abs() < 1e-12);
        assert!(modularity(&Graph::empty(3), &Partition::whole(3)).is_err());
    }

    #[test]
    fn two_triangles_partition_is_global_optimum() {
        let g = two_triangles();
        let (best, labels) = best_partition(&g);
        assert_eq!(
            Partition::from_labels(&labels),
            Partition::from_labels(&[0, 0, 0, 1, 1, 1])
        );
        let m = g.edge_count() as f64;
        assert!((best as f64 / (4.0 * m * m) - 5.0 / 14.0).abs() < 1e-12);

        let h = extract_hierarchy(&g).unwrap();
        assert_eq!(h.partition.communities(), &[vec![0, 1, 2], vec![3, 4, 5]]);
        assert!((h.modularity.unwrap() - 5.0 / 14.0).abs() < 1e-9);
        let d = &h.dendrogram;
        assert_eq!(d.len(), 3);
        assert_eq!(d.children(d.root()), Some((0, 1)));
        assert_eq!((d.node(2).node_count, d.node(2).edge_count), (6, 7));
        assert_eq!((d.node(0).node_count, d.node(0).edge_count), (3, 3));
    }

    #[test]
    fn triangle_is_one_community() {
        let g = triangle();
        let (_, labels) = best_partition(&g);
        assert_eq!(Partition::from_labels(&labels), Partition::whole(3));
        let h = extract_hierarchy(&g).unwrap();
        assert_eq!(h.partition.len(), 1);
        assert_eq!(h.dendrogram.len(), 1);
        assert_eq!(h.dendrogram.root(), 0);
    }

    #[test]
    fn disconnected_components_share_a_root() {
        let g = Graph::from_edges(7, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let h = extract_hierarchy(&g).unwrap();
        // Node 6 is isolated and stays its own leaf.
        assert_eq!(
            h.partition.communities(),
            &[vec![0, 1, 2], vec![3, 4, 5], vec![6]]
        );
        let d = &h.dendrogram;
        assert_eq!(d.members(d.root()), (0..7).collect::<Vec<_>>());
        assert_eq!(d.node(d.root()).edge_count, 6);
        assert_eq!(d.len(), 5);
    }

    #[test]
    fn edgeless_and_empty() {
        let h = extract_hierarchy(&Graph::empty(4)).unwrap();
        assert_eq!(h.partition.len(), 4);
        assert_eq!(h.dendrogram.len(), 7);
        assert!(h.modularity.is_none());
        assert!(extract_hierarchy(&Graph::empty(0)).is_err());
    }

    #[test]
    fn serializer_format() {
        let h = extract_hierarchy(&two_triangles()).unwrap();
        let lines = h.dendrogram.lines(None);
        assert_eq!(
            lines,
            vec!["leaf 0 3 3 : 0 1 2", "leaf 1 3 3 : 3 4 5", "merge 2 0 1 0"]
        );
    }

    fn arb_graph(max_n: usize, max_e: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(move |n| {
            proptest::collection::vec((0..n, 0..n), 0..max_e)
                .prop_map(move |pairs| Graph::from_edges(n, pairs).unwrap())
        })
    }

    fn check_dendrogram(g: &Graph, h: &Hierarchy) -> std::result::Result<(), TestCaseError> {
        let d = &h.dendrogram;
        prop_assert_eq!(d.leaf_count(), h.partition.len());
        for (leaf, community) in h.partition.communities().iter().enumerate() {
            prop_assert_eq!(d.leaf_members(leaf), community.as_slice());
        }
        prop_assert_eq!(d.members(d.root()), (0..g.node_count()).collect::<Vec<_>>());
        prop_assert_eq!(d.len(), 2 * d.leaf_count() - 1);
        for id in 0..d.len() {
            let members = d.members(id);
            let sub = g.induced_subgraph(&members).unwrap();
            prop_assert_eq!(d.node(id).node_count, sub.graph.node_count());
            prop_assert_eq!(d.node(id).edge_count, sub.graph.edge_count());
            if let Some((l, r)) = d.children(id) {
                prop_assert!(l < id && r < id);
                let mut joined = d.members(l);
                joined.extend(d.members(r));
                joined.sort_unstable();
                prop_assert_eq!(&joined, &members);
                prop_assert!(d.node(id).edge_count >= d.node(l).edge_count + d.node(r).edge_count);
            }
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn greedy_matches_brute_force_oracle(g in arb_graph(8, 20)) {
            prop_assume!(g.edge_count() > 0);
            let h = extract_hierarchy(&g).unwrap();
            let m = g.edge_count() as f64;
            let expected = greedy_max_q(&g) as f64 / (4.0 * m * m);
            prop_assert!((h.modularity.unwrap() - expected).abs() < 1e-9);
            let q = h.modularity.unwrap();
            prop_assert!(q >= modularity(&g, &Partition::singletons(g.node_count())).unwrap() - 1e-12);
            prop_assert!(q >= -1e-12);
            check_dendrogram(&g, &h)?;
        }

        #[test]
        fn dendrogram_counts_match_induced_subgraphs(g in arb_graph(60, 200)) {
            let h = extract_hierarchy(&g).unwrap();
            check_dendrogram(&g, &h)?;
        }
    }
}
