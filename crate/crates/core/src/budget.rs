//! Densification exponents and per-dendrogram-node sample budgets.
//!
//! A (sub)graph with `n` nodes and `e` edges gets `α = ln e / ln n`. Given a
//! node budget `n'`, its edge target is `round(n'^(α + dα))`, clamped to the
//! complete-graph bound. Node budgets are apportioned over the dendrogram
//! leaves by the largest-remainder method; every internal node's inter-edge
//! budget is whatever its own target leaves after its children's targets.

use std::io::Write;

use crate::community::Dendrogram;
use crate::error::{domain, Result};
use crate::graph::NodeIdMap;

/// Round half away from zero for the nonnegative values used here.
pub(crate) fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// `ln e / ln n`, or `None` when `n < 2` or `e < 1`.
pub fn densification_exponent(n: usize, e: usize) -> Option<f64> {
    if n < 2 || e < 1 {
        return None;
    }
    Some((e as f64).ln() / (n as f64).ln())
}

/// Largest edge count of a simple graph on `n` nodes.
pub fn max_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// `round(node_budget^(alpha + d_alpha))` clamped to `[0, n'(n'−1)/2]`.
pub fn dpl_edge_target(node_budget: usize, alpha: f64, d_alpha: f64) -> usize {
    if node_budget <= 1 {
        return 0;
    }
    let raw = round_half_up((node_budget as f64).powf(alpha + d_alpha));
    let cap = max_edges(node_budget);
    if raw.is_nan() || raw < 0.0 {
        0
    } else if raw >= cap as f64 {
        cap
    } else {
        raw as usize
    }
}

/// Node/edge counts of a subgraph and its densification exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaRecord {
    pub n: usize,
    pub e: usize,
    pub alpha: Option<f64>,
}

impl AlphaRecord {
    pub fn new(n: usize, e: usize) -> Self {
        AlphaRecord {
            n,
            e,
            alpha: densification_exponent(n, e),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeBudget {
    pub node_budget: usize,
    pub edge_budget: usize,
    /// Edges to draw between the two children; always 0 on leaves.
    pub inter_edge_budget: usize,
    pub alpha: AlphaRecord,
}

/// Budgets for every dendrogram node, indexed like the dendrogram.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetTree {
    pub fraction: f64,
    pub d_alpha: f64,
    nodes: Vec<NodeBudget>,
}

impl BudgetTree {
    pub fn get(&self, id: usize) -> &NodeBudget {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[NodeBudget] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Dendrogram lines with `(node_budget, edge_budget, inter_edge_budget, alpha)`
    /// appended.
    pub fn lines(&self, dend: &Dendrogram, ids: Option<&NodeIdMap>) -> Vec<String> {
        dend.lines(ids)
            .into_iter()
            .zip(&self.nodes)
            .map(|(line, b)| {
                let alpha = b
                    .alpha
                    .alpha
                    .map_or_else(|| "undef".to_string(), |a| format!("{a:.6}"));
                format!(
                    "{line} ({}, {}, {}, {alpha})",
                    b.node_budget, b.edge_budget, b.inter_edge_budget
                )
            })
            .collect()
    }

    pub fn write<W: Write>(&self, dend: &Dendrogram, ids: Option<&NodeIdMap>, out: &mut W) -> Result<()> {
        for line in self.lines(dend, ids) {
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// `round(fraction · n)` with the crate-wide half-up rule.
pub fn sample_size(fraction: f64, n: usize) -> usize {
    round_half_up(fraction * n as f64) as usize
}

/// Split `total` proportionally to `sizes` by the largest-remainder method.
/// Ties in the remainder go to the lower index.
pub fn apportion(total: usize, sizes: &[usize]) -> Vec<usize> {
    let sum: usize = sizes.iter().sum();
    if sum == 0 {
        return vec![0; sizes.len()];
    }
    let (total_w, sum_w) = (total as u128, sum as u128);
    let mut shares: Vec<usize> = sizes
        .iter()
        .map(|&s| (total_w * s as u128 / sum_w) as usize)
        .collect();
    let assigned: usize = shares.iter().sum();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = total_w * sizes[a] as u128 % sum_w;
        let rb = total_w * sizes[b] as u128 % sum_w;
        rb.cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        shares[i] += 1;
    }
    shares
}

pub(crate) fn validate_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return domain(format!("sample fraction must lie in (0, 1], got {fraction}"));
    }
    Ok(())
}

/// Budgets for a dendrogram at the given sample fraction and exponent offset.
pub fn allocate_budgets(dend: &Dendrogram, fraction: f64, d_alpha: f64) -> Result<BudgetTree> {
    validate_fraction(fraction)?;
    let root = dend.node(dend.root());
    let total = sample_size(fraction, root.node_count);
    let leaf_sizes: Vec<usize> = (0..dend.leaf_count()).map(|l| dend.node(l).node_count).collect();
    let leaf_budgets = apportion(total, &leaf_sizes);

    let mut nodes: Vec<NodeBudget> = Vec::with_capacity(dend.len());
    #[allow(clippy::needless_range_loop)]
    for id in 0..dend.len() {
        let dn = dend.node(id);
        let alpha = AlphaRecord::new(dn.node_count, dn.edge_count);
        let node_budget = match dend.children(id) {
            None => leaf_budgets[id],
            Some((l, r)) => nodes[l].node_budget + nodes[r].node_budget,
        };
        let edge_budget = alpha
            .alpha
            .map_or(0, |a| dpl_edge_target(node_budget, a, d_alpha));
        let inter_edge_budget = match dend.children(id) {
            None => 0,
            Some((l, r)) => edge_budget.saturating_sub(nodes[l].edge_budget + nodes[r].edge_budget),
        };
        nodes.push(NodeBudget {
            node_budget,
            edge_budget,
            inter_edge_budget,
            alpha,
        });
    }
    Ok(BudgetTree {
        fraction,
        d_alpha,
        nodes,
    })
}
