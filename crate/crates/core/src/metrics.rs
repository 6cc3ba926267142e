//! The five graph-property distributions, the K-S D-statistic between two of
//! them, and the summary statistics used by the reports.

use std::fmt;
use std::io::Write;

use rand::seq::index;
use rayon::prelude::*;

use crate::budget::densification_exponent;
use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::rng::seeded;
use crate::samplers::SampleGraph;
use crate::spectral::extreme_eigenpairs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyKind {
    Degree,
    SingularValue,
    SingularVector,
    Clustering,
    Hop,
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 5] = [
        PropertyKind::Degree,
        PropertyKind::SingularValue,
        PropertyKind::SingularVector,
        PropertyKind::Clustering,
        PropertyKind::Hop,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            PropertyKind::Degree => "degree",
            PropertyKind::SingularValue => "sval",
            PropertyKind::SingularVector => "svec",
            PropertyKind::Clustering => "cc",
            PropertyKind::Hop => "hop",
        }
    }

    /// Report column header.
    pub fn column(self) -> &'static str {
        match self {
            PropertyKind::Degree => "Degree",
            PropertyKind::SingularValue => "Sval",
            PropertyKind::SingularVector => "Svec",
            PropertyKind::Clustering => "CC",
            PropertyKind::Hop => "Hop",
        }
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Discrete distribution on a strictly increasing support.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub kind: PropertyKind,
    support: Vec<f64>,
    mass: Vec<f64>,
    /// Set when the mass had to be replaced by a uniform one (zero total).
    pub uniform_fallback: bool,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

impl Distribution {
    /// Normalize `(x, weight)` pairs; abscissae within 1e-9 (relative) are
    /// merged onto the smallest of them. A zero total gives uniform mass over
    /// the support and sets `uniform_fallback`.
    pub fn from_weighted(kind: PropertyKind, mut points: Vec<(f64, f64)>) -> Self {
        assert!(
            points
                .iter()
                .all(|&(x, w)| x.is_finite() && w.is_finite() && w >= 0.0),
            "invalid distribution point"
        );
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::new();
        let mut mass: Vec<f64> = Vec::new();
        for (x, w) in points {
            match support.last() {
                Some(&s) if close(s, x) => *mass.last_mut().unwrap() += w,
                _ => {
                    support.push(x);
                    mass.push(w);
                }
            }
        }
        let total: f64 = mass.iter().sum();
        let uniform_fallback = total <= 0.0 && !support.is_empty();
        if uniform_fallback {
            let u = 1.0 / support.len() as f64;
            mass.iter_mut().for_each(|m| *m = u);
        } else {
            mass.iter_mut().for_each(|m| *m /= total);
        }
        Distribution {
            kind,
            support,
            mass,
            uniform_fallback,
        }
    }

    /// Equal mass on every value.
    pub fn from_values(kind: PropertyKind, values: &[f64]) -> Self {
        Self::from_weighted(kind, values.iter().map(|&x| (x, 1.0)).collect())
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Cumulative mass at each support point; the last entry is 1.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .mass
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# kind={}", self.kind)?;
        if self.uniform_fallback {
            writeln!(out, "# uniform_fallback")?;
        }
        writeln!(out, "x,mass,cdf")?;
        for ((x, m), c) in self.support.iter().zip(&self.mass).zip(self.cdf()) {
            writeln!(out, "{x},{m},{c}")?;
        }
        Ok(())
    }
}

pub fn degree_distribution(g: &Graph) -> Distribution {
    let values: Vec<f64> = g.degrees().map(|d| d as f64).collect();
    Distribution::from_values(PropertyKind::Degree, &values)
}

/// Top `min(k, n)` singular values of the adjacency matrix, each with equal mass.
pub fn singular_values(g: &Graph, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return domain("number of singular values must be at least 1");
    }
    let e = extreme_eigenpairs(g, k, false)?;
    Ok(e.values.iter().map(|v| v.abs()).collect())
}

pub fn singular_value_distribution(g: &Graph, k: usize) -> Result<Distribution> {
    Ok(Distribution::from_values(
        PropertyKind::SingularValue,
        &singular_values(g, k)?,
    ))
}

/// Absolute components of the unit principal singular vector.
pub fn principal_singular_vector(g: &Graph) -> Result<Vec<f64>> {
    if g.edge_count() == 0 {
        return domain("principal singular vector needs at least one edge");
    }
    let e = extreme_eigenpairs(g, 1, true)?;
    Ok(e.principal.unwrap().into_iter().map(f64::abs).collect())
}

pub fn singular_vector_distribution(g: &Graph) -> Result<Distribution> {
    Ok(Distribution::from_values(
        PropertyKind::SingularVector,
        &principal_singular_vector(g)?,
    ))
}

/// Triangles through every node.
pub fn triangles_per_node(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    // Orient each edge toward the endpoint of higher (degree, index).
    let rank = |v: usize| (g.degree(v), v);
    let forward: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            g.neighbors(u)
                .iter()
                .copied()
                .filter(|&w| rank(w) > rank(u))
                .collect()
        })
        .collect();
    let mut count = vec![0usize; n];
    let mut mark = vec![false; n];
    for u in 0..n {
        for &w in &forward[u] {
            mark[w] = true;
        }
        for &v in &forward[u] {
            for &w in &forward[v] {
                if mark[w] {
                    count[u] += 1;
                    count[v] += 1;
                    count[w] += 1;
                }
            }
        }
        for &w in &forward[u] {
            mark[w] = false;
        }
    }
    count
}

/// Local clustering coefficient; `None` below degree 2.
pub fn clustering_coefficients(g: &Graph) -> Vec<Option<f64>> {
    triangles_per_node(g)
        .into_iter()
        .enumerate()
        .map(|(v, t)| {
            let d = g.degree(v);
            (d >= 2).then(|| t as f64 / (d * (d - 1) / 2) as f64)
        })
        .collect()
}

/// Mean clustering coefficient for each degree ≥ 2 present, ascending.
pub fn average_clustering_by_degree(g: &Graph) -> Vec<(usize, f64)> {
    let mut sums: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for (v, cc) in clustering_coefficients(g).into_iter().enumerate() {
        if let Some(c) = cc {
            let e = sums.entry(g.degree(v)).or_insert((0.0, 0));
            e.0 += c;
            e.1 += 1;
        }
    }
    sums.into_iter().map(|(d, (s, c))| (d, s / c as f64)).collect()
}

/// Average-CC-by-degree curve normalized to unit mass.
pub fn cc_distribution(g: &Graph) -> Distribution {
    let points = average_clustering_by_degree(g)
        .into_iter()
        .map(|(d, c)| (d as f64, c))
        .collect();
    Distribution::from_weighted(PropertyKind::Clustering, points)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HopMode {
    Exact,
    /// BFS from this many uniformly drawn sources.
    Sampled(usize),
    /// Exact up to 100,000 nodes, 1,000 sampled sources above.
    Auto,
}

const HOP_EXACT_LIMIT: usize = 100_000;
const HOP_SOURCES: usize = 1_000;
const HOP_SEED: u64 = 0x40B5;

fn bfs_histogram(g: &Graph, source: usize, dist: &mut [u32], queue: &mut Vec<usize>, hist: &mut Vec<u64>) {
    dist.fill(u32::MAX);
    queue.clear();
    dist[source] = 0;
    queue.push(source);
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let du = dist[u];
        for &w in g.neighbors(u) {
            if dist[w] == u32::MAX {
                dist[w] = du + 1;
                queue.push(w);
                let h = (du + 1) as usize;
                if hist.len() <= h {
                    hist.resize(h + 1, 0);
                }
                hist[h] += 1;
            }
        }
    }
}

/// Hop plot `P(h)` for `h = 0, 1, …, h_max`: unordered reachable pairs within
/// `h` hops (scaled up from the sources in sampled mode).
pub fn hop_plot(g: &Graph, mode: HopMode) -> Vec<f64> {
    let n = g.node_count();
    let sources: Vec<usize> = match mode {
        HopMode::Exact => (0..n).collect(),
        HopMode::Auto if n <= HOP_EXACT_LIMIT => (0..n).collect(),
        HopMode::Auto => index::sample(&mut seeded(HOP_SEED), n, HOP_SOURCES).into_vec(),
        HopMode::Sampled(s) if s >= n => (0..n).collect(),
        HopMode::Sampled(s) => index::sample(&mut seeded(HOP_SEED), n, s).into_vec(),
    };
    let hist = sources
        .par_iter()
        .map_init(
            || (vec![0u32; n], Vec::with_capacity(n)),
            |(dist, queue), &s| {
                let mut h = Vec::new();
                bfs_histogram(g, s, dist, queue, &mut h);
                h
            },
        )
        .reduce(Vec::new, |mut a, b| {
            if a.len() < b.len() {
                a.resize(b.len(), 0);
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    // Ordered pairs from the sources, scaled to all nodes, halved.
    let scale = if sources.is_empty() {
        0.0
    } else {
        n as f64 / sources.len() as f64 / 2.0
    };
    let mut acc = 0.0;
    let mut plot = vec![0.0];
    for &c in hist.iter().skip(1) {
        acc += c as f64 * scale;
        plot.push(acc);
    }
    plot
}

/// Mass at hop `h` is the share of reachable pairs first reached at `h`.
pub fn hop_distribution(g: &Graph, mode: HopMode) -> Distribution {
    let plot = hop_plot(g, mode);
    let points = plot
        .windows(2)
        .enumerate()
        .map(|(i, w)| ((i + 1) as f64, w[1] - w[0]))
        .collect();
    Distribution::from_weighted(PropertyKind::Hop, points)
}

/// K-S D-statistic: largest gap between the two step CDFs. An empty
/// distribution against a nonempty one scores 1; two empty ones score 0.
pub fn ks_dstat(a: &Distribution, b: &Distribution) -> Result<f64> {
    if a.kind != b.kind {
        return domain(format!("cannot compare {} with {}", a.kind, b.kind));
    }
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => return Ok(1.0),
        _ => {}
    }
    let (ca, cb) = (a.cdf(), b.cdf());
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut d = 0.0f64;
    while i < a.support.len() || j < b.support.len() {
        let xa = a.support.get(i).copied().unwrap_or(f64::INFINITY);
        let xb = b.support.get(j).copied().unwrap_or(f64::INFINITY);
        let x = xa.min(xb);
        if xa == x {
            fa = ca[i];
            i += 1;
        }
        if xb == x {
            fb = cb[j];
            j += 1;
        }
        d = d.max((fa - fb).abs());
    }
    Ok(d.min(1.0))
}

/// `(x − min) / (max − min)`; a constant column maps to zeros.
pub fn minmax_normalize(column: &[f64]) -> Vec<f64> {
    let lo = column.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    column
        .iter()
        .map(|&x| if span > 0.0 { (x - lo) / span } else { 0.0 })
        .collect()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n − 1 denominator).
pub fn consistency_stddev(runs: &[f64]) -> Result<f64> {
    if runs.len() < 2 {
        return domain("standard deviation needs at least 2 runs");
    }
    let m = mean(runs);
    let ss: f64 = runs.iter().map(|x| (x - m) * (x - m)).sum();
    Ok((ss / (runs.len() - 1) as f64).sqrt())
}

/// `α_sample − α_original`.
pub fn dpl_difference(original: &Graph, sample: &SampleGraph<'_>) -> Result<f64> {
    let whole = densification_exponent(original.node_count(), original.edge_count());
    let part = densification_exponent(sample.node_count(), sample.edge_count());
    match (part, whole) {
        (Some(s), Some(o)) => Ok(s - o),
        (None, _) => domain(format!(
            "sample densification exponent undefined ({} nodes, {} edges)",
            sample.node_count(),
            sample.edge_count()
        )),
        (_, None) => domain("graph densification exponent undefined"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricOptions {
    pub svd_k: usize,
    pub hop_mode: HopMode,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions {
            svd_k: 100,
            hop_mode: HopMode::Auto,
        }
    }
}

/// All five distributions of one graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphProperties {
    pub distributions: [Distribution; 5],
}

impl GraphProperties {
    /// An edgeless graph has no defined principal vector; its singular-vector
    /// distribution is then uniform and flagged.
    pub fn compute(g: &Graph, opts: &MetricOptions) -> Result<Self> {
        if g.is_empty() {
            return domain("cannot evaluate an empty graph");
        }
        let svec = if g.edge_count() == 0 {
            let u = 1.0 / (g.node_count() as f64).sqrt();
            let mut d = Distribution::from_values(PropertyKind::SingularVector, &[u]);
            d.uniform_fallback = true;
            d
        } else {
            singular_vector_distribution(g)?
        };
        Ok(GraphProperties {
            distributions: [
                degree_distribution(g),
                singular_value_distribution(g, opts.svd_k)?,
                svec,
                cc_distribution(g),
                hop_distribution(g, opts.hop_mode),
            ],
        })
    }

    pub fn get(&self, kind: PropertyKind) -> &Distribution {
        &self.distributions[kind as usize]
    }

    /// D-statistic per property, in [`PropertyKind::ALL`] order.
    pub fn dstats(&self, other: &GraphProperties) -> [f64; 5] {
        std::array::from_fn(|i| {
            ks_dstat(&self.distributions[i], &other.distributions[i]).expect("same kinds")
        })
    }
}
