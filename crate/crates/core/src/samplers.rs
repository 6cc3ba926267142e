//! Baseline samplers and the community-based / DPL-based wrappers.
//!
//! Every sampler is a pure function of `(graph, params)`: all randomness comes
//! from `params.seed` through [`crate::rng::seeded`].
//!
//! - Node selection (RN, RDN, RPN) picks `round(fraction·n)` distinct nodes
//!   and keeps every parent edge among them.
//! - Edge selection (RE, RNE) picks an exact number of distinct edges and keeps
//!   only their endpoints.
//! - Exploration (RW, RJ, FF) grows a visited set to `round(fraction·n)`
//!   nodes; the non-induced variants keep the traversed edges, the induced
//!   ones every parent edge among the visited nodes.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::budget::{apportion, densification_exponent, dpl_edge_target, sample_size, validate_fraction};
use crate::community::{extract_hierarchy, Hierarchy, Partition};
use crate::cplusd::{sample_cplusd_with, DegreeWeighting};
use crate::error::{domain, Error, Result};
use crate::graph::{external_pairs, Graph, NodeIdMap};
use crate::rng::{seeded, SampleRng};
use crate::urn::{weighted_sample, WeightedUrn};

/// Base methods the hybrid wrappers accept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Rn,
    Rdn,
    Re,
    Rw,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::Rn, Base::Rdn, Base::Re, Base::Rw];

    fn tag(self) -> &'static str {
        match self {
            Base::Rn => "RN",
            Base::Rdn => "RDN",
            Base::Re => "RE",
            Base::Rw => "RW",
        }
    }

    pub fn method(self) -> Method {
        match self {
            Base::Rn => Method::Rn,
            Base::Rdn => Method::Rdn,
            Base::Re => Method::Re,
            Base::Rw => Method::Rw,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Rn,
    Rdn,
    Rpn,
    Re,
    Rne,
    Rw,
    Rj,
    Ff,
    CBased(Base),
    DBased(Base),
    CPlusD,
}

/// Exploration strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exploration {
    Rw,
    Rj,
    Ff,
}

impl Method {
    pub fn is_exploration(self) -> bool {
        matches!(self, Method::Rw | Method::Rj | Method::Ff)
    }

    pub fn is_edge_based(self) -> bool {
        matches!(self, Method::Re | Method::Rne)
    }

    /// Report tag, e.g. `RW(i)` for induced random walk.
    pub fn tag(self, induced: bool) -> String {
        let base = match self {
            Method::Rn => "RN".to_string(),
            Method::Rdn => "RDN".to_string(),
            Method::Rpn => "RPN".to_string(),
            Method::Re => "RE".to_string(),
            Method::Rne => "RNE".to_string(),
            Method::Rw => "RW".to_string(),
            Method::Rj => "RJ".to_string(),
            Method::Ff => "FF".to_string(),
            Method::CBased(b) => format!("CBased{}", b.tag()),
            Method::DBased(b) => format!("DBased{}", b.tag()),
            Method::CPlusD => "C+D".to_string(),
        };
        if induced && self.is_exploration() {
            format!("{base}(i)")
        } else {
            base
        }
    }

    /// Parse a report tag; returns the method and whether it is induced.
    pub fn parse_tag(tag: &str) -> Result<(Method, bool)> {
        let (name, induced) = match tag.strip_suffix("(i)") {
            Some(name) => (name, true),
            None => (tag, false),
        };
        let base = |s: &str| match s {
            "RN" => Some(Base::Rn),
            "RDN" => Some(Base::Rdn),
            "RE" => Some(Base::Re),
            "RW" => Some(Base::Rw),
            _ => None,
        };
        let method = match name {
            "RN" => Method::Rn,
            "RDN" => Method::Rdn,
            "RPN" => Method::Rpn,
            "RE" => Method::Re,
            "RNE" => Method::Rne,
            "RW" => Method::Rw,
            "RJ" => Method::Rj,
            "FF" => Method::Ff,
            "C+D" | "CD" => Method::CPlusD,
            other => match (other.strip_prefix("CBased"), other.strip_prefix("DBased")) {
                (Some(b), _) if base(b).is_some() => Method::CBased(base(b).unwrap()),
                (_, Some(b)) if base(b).is_some() => Method::DBased(base(b).unwrap()),
                _ => return Err(Error::Domain(format!("unknown sampling method {tag:?}"))),
            },
        };
        if induced && !method.is_exploration() {
            return domain(format!("{name} has no induced variant"));
        }
        Ok((method, induced))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag(false))
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::parse_tag(s).map(|(m, _)| m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerParams {
    pub fraction: f64,
    pub restart_probability: f64,
    /// Forward burning probability `p_f` of forest fire.
    pub forward_burning: f64,
    pub pagerank_damping: f64,
    pub induced: bool,
    pub seed: u64,
    /// Overrides `round(fraction·|E|)` for edge-based methods.
    pub edge_budget: Option<usize>,
    /// Densification exponent offset for C+D.
    pub d_alpha: f64,
}

impl Default for SamplerParams {
    fn default() -> Self {
        SamplerParams {
            fraction: 0.1,
            restart_probability: 0.15,
            forward_burning: 0.3,
            pagerank_damping: 0.85,
            induced: false,
            seed: 0,
            edge_budget: None,
            d_alpha: 0.0,
        }
    }
}

impl SamplerParams {
    pub fn with_fraction(fraction: f64, seed: u64) -> Self {
        SamplerParams {
            fraction,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_fraction(self.fraction)?;
        if !(0.0..1.0).contains(&self.restart_probability) {
            return domain("restart probability must lie in [0, 1)");
        }
        if !(self.forward_burning > 0.0 && self.forward_burning < 1.0) {
            return domain("forward burning probability must lie in (0, 1)");
        }
        if !(self.pagerank_damping > 0.0 && self.pagerank_damping < 1.0) {
            return domain("PageRank damping must lie in (0, 1)");
        }
        Ok(())
    }
}

/// Node and edge subset of a parent graph.
#[derive(Clone, Debug)]
pub struct SampleGraph<'g> {
    parent: &'g Graph,
    nodes: Vec<usize>,
    edges: Vec<(usize, usize)>,
    pub method: String,
    pub params: SamplerParams,
    /// Shortfalls, fallbacks and re-seeds, in the order they happened.
    pub notes: Vec<String>,
}

impl<'g> SampleGraph<'g> {
    pub fn new(
        parent: &'g Graph,
        mut nodes: Vec<usize>,
        mut edges: Vec<(usize, usize)>,
        method: String,
        params: SamplerParams,
    ) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        for e in edges.iter_mut() {
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        edges.sort_unstable();
        edges.dedup();
        SampleGraph {
            parent,
            nodes,
            edges,
            method,
            params,
            notes: Vec::new(),
        }
    }

    /// Sample keeping every parent edge among `nodes`.
    pub fn induced(parent: &'g Graph, nodes: Vec<usize>, method: String, params: SamplerParams) -> Self {
        let mut s = Self::new(parent, nodes, Vec::new(), method, params);
        s.edges = induced_edges(parent, &s.nodes);
        s
    }

    /// Sample made of `edges` and their endpoints.
    pub fn from_edges(
        parent: &'g Graph,
        edges: Vec<(usize, usize)>,
        method: String,
        params: SamplerParams,
    ) -> Self {
        let nodes = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        Self::new(parent, nodes, edges, method, params)
    }

    pub fn parent(&self) -> &'g Graph {
        self.parent
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub(crate) fn set_edges(&mut self, mut edges: Vec<(usize, usize)>) {
        edges.sort_unstable();
        edges.dedup();
        self.edges = edges;
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Selected edges form a subset of the parent's edges between selected nodes.
    pub fn validate(&self) -> Result<()> {
        for &(u, v) in &self.edges {
            if self.nodes.binary_search(&u).is_err() || self.nodes.binary_search(&v).is_err() {
                return domain(format!("edge ({u}, {v}) has an unselected endpoint"));
            }
            if !self.parent.has_edge(u, v) {
                return domain(format!("edge ({u}, {v}) is not in the parent graph"));
            }
        }
        if let Some(&v) = self.nodes.last() {
            if v >= self.parent.node_count() {
                return domain(format!("node {v} is not in the parent graph"));
            }
        }
        Ok(())
    }

    /// Standalone graph over the selected nodes (reindexed in ascending order).
    pub fn to_graph(&self) -> Graph {
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let a = self.nodes.binary_search(&u).unwrap();
                let b = self.nodes.binary_search(&v).unwrap();
                (a.min(b), a.max(b))
            })
            .collect::<Vec<_>>();
        let mut edges = edges;
        edges.sort_unstable();
        Graph::from_sorted_unique(self.nodes.len(), edges)
    }

    /// Selected nodes without a selected edge.
    pub fn isolated_nodes(&self) -> Vec<usize> {
        let mut touched = HashSet::with_capacity(2 * self.edges.len());
        for &(u, v) in &self.edges {
            touched.insert(u);
            touched.insert(v);
        }
        self.nodes
            .iter()
            .copied()
            .filter(|v| !touched.contains(v))
            .collect()
    }

    /// Edge-list serialization with a provenance header.
    pub fn write<W: Write>(&self, ids: Option<&NodeIdMap>, out: &mut W) -> Result<()> {
        writeln!(
            out,
            "# method={} seed={} fraction={}",
            self.method, self.params.seed, self.params.fraction
        )?;
        writeln!(out, "# nodes: {} edges: {}", self.node_count(), self.edge_count())?;
        let ext = |v: usize| ids.and_then(|m| m.external_id(v)).unwrap_or(v as u64);
        let mut isolated: Vec<u64> = self.isolated_nodes().into_iter().map(ext).collect();
        isolated.sort_unstable();
        if !isolated.is_empty() {
            let list: Vec<String> = isolated.iter().map(u64::to_string).collect();
            writeln!(out, "# isolated: {}", list.join(" "))?;
        }
        for (u, v) in external_pairs(self.edges.iter().copied(), ids) {
            writeln!(out, "{u}\t{v}")?;
        }
        Ok(())
    }
}

/// Every edge of `g` with both endpoints in the sorted slice `nodes`.
pub(crate) fn induced_edges(g: &Graph, nodes: &[usize]) -> Vec<(usize, usize)> {
    let mut mark = vec![false; g.node_count()];
    for &v in nodes {
        mark[v] = true;
    }
    let mut edges = Vec::new();
    for &u in nodes {
        for &w in g.neighbors(u) {
            if u < w && mark[w] {
                edges.push((u, w));
            }
        }
    }
    edges.sort_unstable();
    edges
}

fn node_budget(g: &Graph, fraction: f64) -> Result<usize> {
    validate_fraction(fraction)?;
    if g.is_empty() {
        return domain("cannot sample an empty graph");
    }
    let k = sample_size(fraction, g.node_count());
    if k == 0 {
        return domain(format!(
            "fraction {fraction} of {} nodes rounds to an empty sample",
            g.node_count()
        ));
    }
    Ok(k)
}

/// `round(fraction·|E|)` unless overridden.
pub fn default_edge_budget(g: &Graph, p: &SamplerParams) -> usize {
    p.edge_budget
        .unwrap_or_else(|| sample_size(p.fraction, g.edge_count()))
}

pub(crate) fn uniform_nodes(n: usize, k: usize, rng: &mut SampleRng) -> Vec<usize> {
    index::sample(rng, n, k.min(n)).into_vec()
}

/// Degree-proportional selection; `true` when weights ran out and the
/// remaining draws were uniform.
pub(crate) fn degree_nodes(g: &Graph, k: usize, rng: &mut SampleRng) -> (Vec<usize>, bool) {
    let weights: Vec<f64> = g.degrees().map(|d| d as f64).collect();
    weighted_sample(&weights, k, rng)
}

/// PageRank with uniform teleport on the undirected graph; isolated nodes
/// spread their mass uniformly.
pub fn pagerank(g: &Graph, damping: f64, tolerance: f64, max_iter: usize) -> Vec<f64> {
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..max_iter {
        let dangling: f64 = (0..n).filter(|&v| g.degree(v) == 0).map(|v| rank[v]).sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        for (v, out) in next.iter_mut().enumerate() {
            let inflow: f64 = g.neighbors(v).iter().map(|&u| rank[u] / g.degree(u) as f64).sum();
            *out = base + damping * inflow;
        }
        let delta: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if delta < tolerance {
            break;
        }
    }
    rank
}

fn check_edge_budget(g: &Graph, budget: usize) -> Result<()> {
    if budget == 0 || budget > g.edge_count() {
        return domain(format!("edge budget {budget} outside 1..={}", g.edge_count()));
    }
    Ok(())
}

pub(crate) fn uniform_edges(g: &Graph, k: usize, rng: &mut SampleRng) -> Vec<(usize, usize)> {
    index::sample(rng, g.edge_count(), k.min(g.edge_count()))
        .into_iter()
        .map(|i| g.edges()[i])
        .collect()
}

/// Uniform node, then a uniform incident edge, until `k` distinct edges.
pub(crate) fn node_edges(g: &Graph, k: usize, rng: &mut SampleRng) -> Vec<(usize, usize)> {
    let n = g.node_count();
    let k = k.min(g.edge_count());
    let mut chosen = HashSet::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let v = rng.random_range(0..n);
        let nbrs = g.neighbors(v);
        if nbrs.is_empty() {
            continue;
        }
        let w = nbrs[rng.random_range(0..nbrs.len())];
        let e = (v.min(w), v.max(w));
        if chosen.insert(e) {
            out.push(e);
        }
    }
    out
}

/// Visited nodes (in visit order), traversed edges, and event notes.
pub(crate) struct Traversal {
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub notes: Vec<String>,
}

fn pick_unvisited(visited: &[bool], remaining: usize, rng: &mut SampleRng) -> usize {
    let k = rng.random_range(0..remaining);
    visited
        .iter()
        .enumerate()
        .filter(|(_, &seen)| !seen)
        .nth(k)
        .map(|(v, _)| v)
        .expect("no unvisited node left")
}

/// Random walk with restart (`jump = false`: back to the seed) or random jump
/// (`jump = true`: to a fresh uniform node). Stops at exactly `k` visited nodes.
pub(crate) fn walk(
    g: &Graph,
    k: usize,
    restart: f64,
    jump: bool,
    start: Option<usize>,
    rng: &mut SampleRng,
) -> Traversal {
    let n = g.node_count();
    let k = k.min(n);
    let mut visited = vec![false; n];
    let mut nodes = Vec::with_capacity(k);
    let mut edges = Vec::new();
    let mut notes = Vec::new();
    if k == 0 {
        return Traversal { nodes, edges, notes };
    }
    let mut seed = start.unwrap_or_else(|| rng.random_range(0..n));
    visited[seed] = true;
    nodes.push(seed);
    let mut current = seed;
    let stall_limit = 100 * k;
    let mut stalled = 0usize;
    while nodes.len() < k {
        let before = nodes.len();
        if rng.random::<f64>() < restart {
            current = if jump { rng.random_range(0..n) } else { seed };
        } else {
            let nbrs = g.neighbors(current);
            if !nbrs.is_empty() {
                let next = nbrs[rng.random_range(0..nbrs.len())];
                edges.push((current.min(next), current.max(next)));
                current = next;
            }
        }
        if !visited[current] {
            visited[current] = true;
            nodes.push(current);
        }
        if nodes.len() > before {
            stalled = 0;
            continue;
        }
        stalled += 1;
        if stalled >= stall_limit {
            seed = pick_unvisited(&visited, n - nodes.len(), rng);
            visited[seed] = true;
            nodes.push(seed);
            current = seed;
            stalled = 0;
            notes.push(format!(
                "re-seeded at node {seed} after {stall_limit} stalled steps"
            ));
        }
    }
    Traversal { nodes, edges, notes }
}

/// Forest fire: breadth-first burning with geometric fan-out of mean
/// `p_f / (1 − p_f)`; re-seeds uniformly among unburned nodes when the fire dies.
pub(crate) fn forest_fire(g: &Graph, k: usize, forward: f64, rng: &mut SampleRng) -> Traversal {
    let n = g.node_count();
    let k = k.min(n);
    let fanout = Geometric::new(1.0 - forward).expect("forward burning probability in (0, 1)");
    let mut visited = vec![false; n];
    let mut nodes = Vec::with_capacity(k);
    let mut edges = Vec::new();
    let mut notes = Vec::new();
    let mut queue = VecDeque::new();
    let mut scratch = Vec::new();
    while nodes.len() < k {
        let Some(w) = queue.pop_front() else {
            let seed = pick_unvisited(&visited, n - nodes.len(), rng);
            if !nodes.is_empty() {
                notes.push(format!("fire died out; re-seeded at node {seed}"));
            }
            visited[seed] = true;
            nodes.push(seed);
            queue.push_back(seed);
            continue;
        };
        let x = fanout.sample(rng) as usize;
        scratch.clear();
        scratch.extend(g.neighbors(w).iter().copied().filter(|&u| !visited[u]));
        let burn = x.min(scratch.len());
        // Partial Fisher-Yates: the first `burn` entries become a uniform subset.
        for i in 0..burn {
            let j = rng.random_range(i..scratch.len());
            scratch.swap(i, j);
        }
        for &u in &scratch[..burn] {
            if nodes.len() == k {
                break;
            }
            visited[u] = true;
            nodes.push(u);
            edges.push((w.min(u), w.max(u)));
            queue.push_back(u);
        }
    }
    Traversal { nodes, edges, notes }
}

pub fn sample_rn<'g>(g: &'g Graph, p: &SamplerParams) -> Result<SampleGraph<'g>> {
    p.validate()?;
    let k = node_budget(g, p.fraction)?;
    let mut rng = seeded(p.seed);
    let nodes = uniform_nodes(g.node_count(), k, &mut rng);
    Ok(SampleGraph::induced(g, nodes, Method::Rn.tag(false), p.clone()))
}

pub fn sample_rdn<'g>(g: &'g Graph, p: &SamplerParams) -> Result<SampleGraph<'g>> {
    p.validate()?;
    let k = node_budget(g, p.fraction)?;
    let mut rng = seeded(p.seed);
    let (nodes, fell_back) = degree_nodes(g, k, &mut rng);
    let mut tag = Method::Rdn.tag(false);
    if g.edge_count() == 0 {
        tag.push_str("[uniform]");
    }
    let mut s = SampleGraph::induced(g, nodes, tag, p.clone());
    if fell_back {
        s.note("degree weights exhausted; remaining nodes drawn uniformly");
    }
    Ok(s)
}

pub fn sample_rpn<'g>(g: &'g Graph, p: &SamplerParams) -> Result<SampleGraph<'g>> {
    p.validate()?;
    let k = node_budget(g, p.fraction)?;
    let mut rng = seeded(p.seed);
    let scores = pagerank(g, p.pagerank_damping, 1e-10, 200);
    let (nodes, _) = weighted_sample(&scores, k, &mut rng);
    Ok(SampleGraph::induced(g, nodes, Method::Rpn.tag(false), p.clone()))
}

pub fn sample_re<'g>(g: &'g Graph, edge_budget: usize, p: &SamplerParams) -> Result<SampleGraph<'g>> {
    p.validate()?;
    check_edge_budget(g, edge_budget)?;
    let mut rng = seeded(p.seed);
    let edges = uniform_edges(g, edge_budget, &mut rng);
    Ok(SampleGraph::from_edges(
        g,
        edges,
        Method::Re.tag(false),
        p.clone(),
    ))
}

pub fn sample_rne<'g>(g: &'g Graph, edge_budget: usize, p: &SamplerParams) -> Result<SampleGraph<'g>> {
    p.validate()?;
    check_edge_budget(g, edge_budget)?;
    let mut rng = seeded(p.seed);
    let edges = node_edges(g, edge_budget, &mut rng);
    Ok(SampleGraph::from_edges(
        g,
        edges,
        Method::Rne.tag(false),
        p.clone(),
    ))
}

pub fn sample_exploration<'g>(g: &'g Graph, kind: Exploration, p: &SamplerParams) -> Result<SampleGraph<'g>> {
    p.validate()?;
    let k = node_budget(g, p.fraction)?;
    let mut rng = seeded(p.seed);
    let (method, run) = match kind {
        Exploration::Rw => (
            Method::Rw,
            walk(g, k, p.restart_probability, false, None, &mut rng),
        ),
        Exploration::Rj => (
            Method::Rj,
            walk(g, k, p.restart_probability, true, None, &mut rng),
        ),
        Exploration::Ff => (Method::Ff, forest_fire(g, k, p.forward_burning, &mut rng)),
    };
    Ok(finish_exploration(g, method, run, p))
}

fn finish_exploration<'g>(
    g: &'g Graph,
    method: Method,
    run: Traversal,
    p: &SamplerParams,
) -> SampleGraph<'g> {
    let tag = method.tag(p.induced);
    let mut s = if p.induced {
        SampleGraph::induced(g, run.nodes, tag, p.clone())
    } else {
        SampleGraph::new(g, run.nodes, run.edges, tag, p.clone())
    };
    s.notes.extend(run.notes);
    s
}

/// Run `base` independently inside every community with a proportional share
/// of the budget. Node-based and walk variants keep every parent edge among
/// the union of selected nodes; CBasedRE keeps only the drawn intra-community
/// edges.
pub fn wrap_community_based<'g>(
    base: Base,
    g: &'g Graph,
    part: &Partition,
    p: &SamplerParams,
) -> Result<SampleGraph<'g>> {
    p.validate()?;
    if part.labels().len() != g.node_count() {
        return domain("partition does not cover the graph");
    }
    let tag = Method::CBased(base).tag(false);
    let mut rng = seeded(p.seed);
    let mut notes = Vec::new();
    let subgraphs = part
        .communities()
        .iter()
        .map(|c| g.induced_subgraph(c))
        .collect::<Result<Vec<_>>>()?;

    if base == Base::Re {
        let total = default_edge_budget(g, p);
        check_edge_budget(g, total)?;
        let sizes: Vec<usize> = subgraphs.iter().map(|s| s.graph.edge_count()).collect();
        let shares = apportion(total, &sizes);
        let mut edges = Vec::with_capacity(total);
        for (c, (sub, &share)) in subgraphs.iter().zip(&shares).enumerate() {
            let take = share.min(sub.graph.edge_count());
            if take < share {
                notes.push(format!("community {c}: edge budget {share} exceeds {take} edges"));
            }
            for (u, v) in uniform_edges(&sub.graph, take, &mut rng) {
                edges.push((sub.original[u], sub.original[v]));
            }
        }
        let mut s = SampleGraph::from_edges(g, edges, tag, p.clone());
        s.notes = notes;
        return Ok(s);
    }

    let total = node_budget(g, p.fraction)?;
    let sizes: Vec<usize> = subgraphs.iter().map(|s| s.graph.node_count()).collect();
    let shares = apportion(total, &sizes);
    let mut nodes = Vec::with_capacity(total);
    for (c, (sub, &share)) in subgraphs.iter().zip(&shares).enumerate() {
        let n_c = sub.graph.node_count();
        if share > n_c {
            notes.push(format!("community {c}: node budget {share} exceeds {n_c} nodes"));
        }
        let take = share.min(n_c);
        if take == 0 {
            continue;
        }
        let local = match base {
            Base::Rn => uniform_nodes(n_c, take, &mut rng),
            Base::Rdn => {
                let (picked, fell_back) = degree_nodes(&sub.graph, take, &mut rng);
                if fell_back {
                    notes.push(format!("community {c}: degree weights exhausted"));
                }
                picked
            }
            Base::Rw => {
                let run = walk(&sub.graph, take, p.restart_probability, false, None, &mut rng);
                notes.extend(run.notes.into_iter().map(|n| format!("community {c}: {n}")));
                run.nodes
            }
            Base::Re => unreachable!(),
        };
        nodes.extend(local.into_iter().map(|v| sub.original[v]));
    }
    let mut s = SampleGraph::induced(g, nodes, tag, p.clone());
    s.notes = notes;
    Ok(s)
}

/// Run `base`, then add or remove edges (weighted by endpoint degree sum)
/// until the sample's edge count meets the whole-graph DPL target for its
/// node count.
pub fn wrap_dpl_based<'g>(base: Base, g: &'g Graph, p: &SamplerParams) -> Result<SampleGraph<'g>> {
    let mut s = match base {
        Base::Rn => sample_rn(g, p)?,
        Base::Rdn => sample_rdn(g, p)?,
        Base::Re => sample_re(g, default_edge_budget(g, p), p)?,
        Base::Rw => sample_exploration(g, Exploration::Rw, p)?,
    };
    s.method = Method::DBased(base).tag(false);
    let Some(alpha) = densification_exponent(g.node_count(), g.edge_count()) else {
        s.note("graph densification exponent undefined; sample unchanged");
        return Ok(s);
    };
    let target = dpl_edge_target(s.node_count(), alpha, 0.0);
    let current = s.edge_count();
    let degree_sum = |&(u, v): &(usize, usize)| (g.degree(u) + g.degree(v)) as f64;
    // Derived stream so the base sample itself is unaffected.
    let mut rng = seeded(crate::rng::derive_seed(p.seed, 0xD0_A1));
    if current < target {
        let present: HashSet<(usize, usize)> = s.edges().iter().copied().collect();
        let candidates: Vec<(usize, usize)> = induced_edges(g, s.nodes())
            .into_iter()
            .filter(|e| !present.contains(e))
            .collect();
        let weights: Vec<f64> = candidates.iter().map(degree_sum).collect();
        let mut urn = WeightedUrn::new(&weights);
        let added = urn.draw_many(target - current, &mut rng);
        if added.len() < target - current {
            s.note(format!(
                "DPL target {target} not reached: only {} candidate edges",
                candidates.len()
            ));
        }
        let mut edges = s.edges().to_vec();
        edges.extend(added.into_iter().map(|i| candidates[i]));
        s.set_edges(edges);
    } else if current > target {
        let edges = s.edges().to_vec();
        let weights: Vec<f64> = edges.iter().map(degree_sum).collect();
        let (kept, _) = weighted_sample(&weights, target, &mut rng);
        s.set_edges(kept.into_iter().map(|i| edges[i]).collect());
    }
    Ok(s)
}

/// Run any method by tag. Community-based methods and C+D use `hierarchy`
/// when given, otherwise extract it from `g`.
pub fn sample<'g>(
    g: &'g Graph,
    method: Method,
    p: &SamplerParams,
    hierarchy: Option<&Hierarchy>,
) -> Result<SampleGraph<'g>> {
    let needs_hierarchy = matches!(method, Method::CBased(_) | Method::CPlusD);
    let owned = match hierarchy {
        None if needs_hierarchy => Some(extract_hierarchy(g)?),
        _ => None,
    };
    let hierarchy = hierarchy.or(owned.as_ref());
    match method {
        Method::Rn => sample_rn(g, p),
        Method::Rdn => sample_rdn(g, p),
        Method::Rpn => sample_rpn(g, p),
        Method::Re => sample_re(g, default_edge_budget(g, p), p),
        Method::Rne => sample_rne(g, default_edge_budget(g, p), p),
        Method::Rw => sample_exploration(g, Exploration::Rw, p),
        Method::Rj => sample_exploration(g, Exploration::Rj, p),
        Method::Ff => sample_exploration(g, Exploration::Ff, p),
        Method::CBased(b) => wrap_community_based(b, g, &hierarchy.expect("extracted above").partition, p),
        Method::DBased(b) => wrap_dpl_based(b, g, p),
        Method::CPlusD => {
            p.validate()?;
            let run = sample_cplusd_with(
                g,
                hierarchy.expect("extracted above"),
                p.fraction,
                p.d_alpha,
                p.seed,
                DegreeWeighting::default(),
            )?;
            Ok(run.sample)
        }
    }
}
