//! Community + densification sampling.
//!
//! Each dendrogram leaf is sampled independently with the node and edge
//! budgets from [`allocate_budgets`]: nodes drawn by degree, then edges among
//! them drawn by endpoint degree sum. The leaf samples are then joined bottom
//! up; at every merge, edges crossing the two children's samples are drawn by
//! global degree sum up to the merge's inter-edge budget.

use std::io::Write;

use rayon::prelude::*;

use crate::budget::{allocate_budgets, sample_size, BudgetTree};
use crate::community::{extract_hierarchy, Dendrogram, Hierarchy};
use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::rng::{derive_seed, seeded};
use crate::samplers::{induced_edges, Method, SampleGraph, SamplerParams};
use crate::urn::weighted_sample;

/// Degree used to weight nodes and intra-community edges at the leaves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DegreeWeighting {
    /// Degree inside the community's induced subgraph.
    #[default]
    WithinCommunity,
    /// Degree in the whole graph.
    Global,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommunitySample {
    pub leaf: usize,
    /// Selected graph nodes, sorted.
    pub nodes: Vec<usize>,
    /// Selected intra-community edges, sorted.
    pub edges: Vec<(usize, usize)>,
    pub node_shortfall: usize,
    pub edge_shortfall: usize,
}

/// Sample `node_budget` nodes of `community` by degree, then up to
/// `edge_budget` of the edges among them by endpoint degree sum.
pub fn sample_within_community(
    g: &Graph,
    community: &[usize],
    node_budget: usize,
    edge_budget: usize,
    weighting: DegreeWeighting,
    seed: u64,
) -> Result<CommunitySample> {
    let sub = g.induced_subgraph(community)?;
    let local = &sub.graph;
    let degree = |i: usize| match weighting {
        DegreeWeighting::WithinCommunity => local.degree(i),
        DegreeWeighting::Global => g.degree(sub.original[i]),
    };
    let mut rng = seeded(seed);

    let take = node_budget.min(local.node_count());
    let weights: Vec<f64> = (0..local.node_count()).map(|i| degree(i) as f64).collect();
    let (mut picked, _) = weighted_sample(&weights, take, &mut rng);
    picked.sort_unstable();

    let candidates = induced_edges(local, &picked);
    let weights: Vec<f64> = candidates
        .iter()
        .map(|&(a, b)| (degree(a) + degree(b)) as f64)
        .collect();
    let (chosen, _) = weighted_sample(&weights, edge_budget, &mut rng);

    let mut nodes: Vec<usize> = picked.iter().map(|&i| sub.original[i]).collect();
    nodes.sort_unstable();
    let mut edges: Vec<(usize, usize)> = chosen
        .iter()
        .map(|&c| {
            let (a, b) = candidates[c];
            (sub.original[a], sub.original[b])
        })
        .collect();
    edges.sort_unstable();
    Ok(CommunitySample {
        leaf: 0,
        node_shortfall: node_budget - take,
        edge_shortfall: edge_budget - edges.len(),
        nodes,
        edges,
    })
}

/// Budget versus outcome for one dendrogram node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortfallRow {
    pub id: usize,
    pub is_leaf: bool,
    pub node_budget: usize,
    pub nodes: usize,
    /// Intra-community budget on leaves, inter-edge budget on merges.
    pub edge_budget: usize,
    pub edges: usize,
}

impl ShortfallRow {
    pub fn edge_shortfall(&self) -> usize {
        self.edge_budget.saturating_sub(self.edges)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShortfallReport {
    pub rows: Vec<ShortfallRow>,
}

impl ShortfallReport {
    pub fn total_edge_shortfall(&self) -> usize {
        self.rows.iter().map(ShortfallRow::edge_shortfall).sum()
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "id,kind,node_budget,nodes,edge_budget,edges,edge_shortfall")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.id,
                if r.is_leaf { "leaf" } else { "merge" },
                r.node_budget,
                r.nodes,
                r.edge_budget,
                r.edges,
                r.edge_shortfall()
            )?;
        }
        Ok(())
    }
}

/// Join leaf samples up the dendrogram, children before parents, drawing
/// crossing edges by global degree sum at every merge.
pub fn merge_dendrogram<'g>(
    g: &'g Graph,
    dend: &Dendrogram,
    budgets: &BudgetTree,
    leaf_samples: &[CommunitySample],
    seed: u64,
) -> Result<(SampleGraph<'g>, ShortfallReport)> {
    if leaf_samples.len() != dend.leaf_count() {
        return domain(format!(
            "{} leaf samples for {} dendrogram leaves",
            leaf_samples.len(),
            dend.leaf_count()
        ));
    }
    let mut rows = Vec::with_capacity(dend.len());
    let mut notes = Vec::new();
    // Dendrogram node currently holding each selected graph node.
    let mut owner = vec![usize::MAX; g.node_count()];
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); dend.len()];
    let mut edges = Vec::new();

    for (leaf, s) in leaf_samples.iter().enumerate() {
        let b = budgets.get(leaf);
        for &v in &s.nodes {
            owner[v] = leaf;
        }
        held[leaf] = s.nodes.clone();
        edges.extend_from_slice(&s.edges);
        if s.node_shortfall > 0 || s.edge_shortfall > 0 {
            notes.push(format!(
                "leaf {leaf}: short {} nodes, {} edges",
                s.node_shortfall, s.edge_shortfall
            ));
        }
        rows.push(ShortfallRow {
            id: leaf,
            is_leaf: true,
            node_budget: b.node_budget,
            nodes: s.nodes.len(),
            edge_budget: b.edge_budget,
            edges: s.edges.len(),
        });
    }

    for id in dend.merges() {
        let (left, right) = dend.children(id).expect("merge node has children");
        let (small, large) = if held[left].len() <= held[right].len() {
            (left, right)
        } else {
            (right, left)
        };
        let mut candidates = Vec::new();
        for &u in &held[small] {
            for &w in g.neighbors(u) {
                if owner[w] == large {
                    candidates.push((u.min(w), u.max(w)));
                }
            }
        }
        candidates.sort_unstable();
        let budget = budgets.get(id).inter_edge_budget;
        let weights: Vec<f64> = candidates
            .iter()
            .map(|&(u, v)| (g.degree(u) + g.degree(v)) as f64)
            .collect();
        let mut rng = seeded(derive_seed(seed, id as u64));
        let (chosen, _) = weighted_sample(&weights, budget, &mut rng);
        if chosen.len() < budget {
            notes.push(format!(
                "merge {id}: inter-edge budget {budget}, {} candidates",
                candidates.len()
            ));
        }
        edges.extend(chosen.iter().map(|&c| candidates[c]));
        rows.push(ShortfallRow {
            id,
            is_leaf: false,
            node_budget: budgets.get(id).node_budget,
            nodes: held[left].len() + held[right].len(),
            edge_budget: budget,
            edges: chosen.len(),
        });

        let mut joined = std::mem::take(&mut held[left]);
        joined.append(&mut held[right]);
        for &v in &joined {
            owner[v] = id;
        }
        held[id] = joined;
    }

    let nodes = std::mem::take(&mut held[dend.root()]);
    let params = SamplerParams {
        fraction: budgets.fraction,
        d_alpha: budgets.d_alpha,
        seed,
        ..SamplerParams::default()
    };
    let mut sample = SampleGraph::new(g, nodes, edges, Method::CPlusD.tag(false), params);
    sample.notes = notes;
    Ok((sample, ShortfallReport { rows }))
}

/// A C+D sample with the intermediate structures that produced it.
#[derive(Clone, Debug)]
pub struct CPlusDSample<'g> {
    pub sample: SampleGraph<'g>,
    pub budgets: BudgetTree,
    pub report: ShortfallReport,
}

/// Full pipeline: communities, budgets, per-leaf samples, merges.
pub fn sample_cplusd(g: &Graph, fraction: f64, d_alpha: f64, seed: u64) -> Result<CPlusDSample<'_>> {
    let hierarchy = extract_hierarchy(g)?;
    sample_cplusd_with(g, &hierarchy, fraction, d_alpha, seed, DegreeWeighting::default())
}

/// As [`sample_cplusd`] with a precomputed hierarchy.
pub fn sample_cplusd_with<'g>(
    g: &'g Graph,
    hierarchy: &Hierarchy,
    fraction: f64,
    d_alpha: f64,
    seed: u64,
    weighting: DegreeWeighting,
) -> Result<CPlusDSample<'g>> {
    let dend = &hierarchy.dendrogram;
    if dend.node(dend.root()).node_count != g.node_count() {
        return domain("hierarchy does not belong to this graph");
    }
    let budgets = allocate_budgets(dend, fraction, d_alpha)?;
    if sample_size(fraction, g.node_count()) == 0 {
        return domain(format!(
            "fraction {fraction} of {} nodes rounds to an empty sample",
            g.node_count()
        ));
    }
    let leaves = (0..dend.leaf_count())
        .into_par_iter()
        .map(|leaf| {
            let b = budgets.get(leaf);
            let mut s = sample_within_community(
                g,
                dend.leaf_members(leaf),
                b.node_budget,
                b.edge_budget,
                weighting,
                derive_seed(seed, leaf as u64),
            )?;
            s.leaf = leaf;
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let (sample, report) = merge_dendrogram(g, dend, &budgets, &leaves, seed)?;
    Ok(CPlusDSample {
        sample,
        budgets,
        report,
    })
}
