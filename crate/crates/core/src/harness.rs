//! Experiment runner: sample every configured method repeatedly, compare the
//! samples' property distributions with the original graph's and assemble
//! ranked report tables.
//!
//! Per-run seeds are `derive_seed(derive_seed(master, dataset index), rep)`,
//! shared by every method of that repetition. Runs execute in parallel but
//! are collected in job order, so reports do not depend on scheduling.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::community::{extract_hierarchy, Hierarchy};
use crate::error::{Error, Result};
use crate::generate::preferential_attachment;
use crate::graph::{load_edge_list_file, Graph};
use crate::metrics::{
    consistency_stddev, dpl_difference, mean, minmax_normalize, GraphProperties, HopMode, MetricOptions,
    PropertyKind,
};
use crate::rng::derive_seed;
use crate::samplers::{sample, Base, Method, SampleGraph, SamplerParams};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Dataset {
    File(PathBuf),
    /// `pa:<n>:<m>:<seed>`
    PreferentialAttachment {
        n: usize,
        m: usize,
        seed: u64,
    },
}

impl Dataset {
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(rest) = spec.strip_prefix("pa:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let bad = || Error::Config(format!("synthetic dataset {spec:?}: expected pa:<n>:<m>:<seed>"));
            if parts.len() != 3 {
                return Err(bad());
            }
            return Ok(Dataset::PreferentialAttachment {
                n: parts[0].parse().map_err(|_| bad())?,
                m: parts[1].parse().map_err(|_| bad())?,
                seed: parts[2].parse().map_err(|_| bad())?,
            });
        }
        Ok(Dataset::File(PathBuf::from(spec)))
    }

    pub fn spec(&self) -> String {
        match self {
            Dataset::File(p) => p.display().to_string(),
            Dataset::PreferentialAttachment { n, m, seed } => format!("pa:{n}:{m}:{seed}"),
        }
    }

    /// File-name-safe label.
    pub fn label(&self) -> String {
        match self {
            Dataset::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into()),
            Dataset::PreferentialAttachment { n, m, seed } => format!("pa-{n}-{m}-{seed}"),
        }
    }

    pub fn load(&self) -> Result<Graph> {
        match self {
            Dataset::File(p) => Ok(load_edge_list_file(p)?.0),
            Dataset::PreferentialAttachment { n, m, seed } => preferential_attachment(*n, *m, *seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeBudgetPolicy {
    /// `round(fraction·|E|)`.
    Fraction,
    /// The edge count of the C+D sample of the same repetition.
    Matched,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wrapper {
    CBased,
    DBased,
}

/// A method together with its induced flag and report label.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodSpec {
    pub method: Method,
    pub induced: bool,
    pub d_alpha: f64,
    pub label: String,
}

impl MethodSpec {
    pub fn parse(tag: &str) -> Result<Self> {
        let (method, induced) = Method::parse_tag(tag).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Self::new(method, induced))
    }

    pub fn new(method: Method, induced: bool) -> Self {
        MethodSpec {
            method,
            induced,
            d_alpha: 0.0,
            label: method.tag(induced),
        }
    }

    fn in_edge_group(&self) -> bool {
        matches!(
            self.method,
            Method::Re | Method::Rne | Method::CBased(Base::Re) | Method::DBased(Base::Re) | Method::CPlusD
        )
    }

    fn in_node_group(&self) -> bool {
        !self.in_edge_group() || self.method == Method::CPlusD
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub datasets: Vec<Dataset>,
    pub methods: Vec<MethodSpec>,
    pub fraction: f64,
    pub repetitions: usize,
    pub seed: u64,
    pub d_alpha: Vec<f64>,
    pub edge_budget: EdgeBudgetPolicy,
    pub metrics: MetricOptions,
    pub wrappers: Vec<Wrapper>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let methods = [
            "C+D", "RN", "RDN", "RPN", "RW", "RW(i)", "RJ", "RJ(i)", "FF", "FF(i)", "RE", "RNE",
        ]
        .iter()
        .map(|t| MethodSpec::parse(t).unwrap())
        .collect();
        ExperimentConfig {
            datasets: Vec::new(),
            methods,
            fraction: 0.1,
            repetitions: 10,
            seed: 0,
            d_alpha: (-5..=5).map(|k| k as f64 / 10.0).collect(),
            edge_budget: EdgeBudgetPolicy::Fraction,
            metrics: MetricOptions::default(),
            wrappers: vec![Wrapper::CBased, Wrapper::DBased],
        }
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl ExperimentConfig {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "datasets" | "dataset" => {
                    cfg.datasets = list(value).map(Dataset::parse).collect::<Result<_>>()?
                }
                "methods" => cfg.methods = list(value).map(MethodSpec::parse).collect::<Result<_>>()?,
                "fraction" => cfg.fraction = number(key, value)?,
                "repetitions" => cfg.repetitions = number(key, value)?,
                "seed" => cfg.seed = number(key, value)?,
                "d_alpha" => cfg.d_alpha = list(value).map(|v| number(key, v)).collect::<Result<_>>()?,
                "edge_budget" => {
                    cfg.edge_budget = match value {
                        "fraction" => EdgeBudgetPolicy::Fraction,
                        "matched" => EdgeBudgetPolicy::Matched,
                        _ => return Err(Error::Config(format!("edge_budget: unknown policy {value:?}"))),
                    }
                }
                "svd_k" => cfg.metrics.svd_k = number(key, value)?,
                "hop_mode" => cfg.metrics.hop_mode = parse_hop_mode(value)?,
                "wrappers" => {
                    cfg.wrappers = list(value)
                        .map(|w| match w {
                            "cbased" => Ok(Wrapper::CBased),
                            "dbased" => Ok(Wrapper::DBased),
                            _ => Err(Error::Config(format!("wrappers: unknown wrapper {w:?}"))),
                        })
                        .collect::<Result<_>>()?
                }
                _ => return Err(Error::Config(format!("line {}: unknown key {key:?}", no + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::Config("no datasets".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::Config(format!(
                "fraction {} outside (0, 1]",
                self.fraction
            )));
        }
        if self.metrics.svd_k == 0 {
            return Err(Error::Config("svd_k must be at least 1".into()));
        }
        Ok(())
    }

    /// Normalized `key = value` text; the report hash is taken over it.
    pub fn canonical(&self) -> String {
        let join = |items: Vec<String>| items.join(", ");
        let mut s = String::new();
        let _ = writeln!(
            s,
            "datasets = {}",
            join(self.datasets.iter().map(Dataset::spec).collect())
        );
        let _ = writeln!(
            s,
            "methods = {}",
            join(self.methods.iter().map(|m| m.label.clone()).collect())
        );
        let _ = writeln!(s, "fraction = {}", self.fraction);
        let _ = writeln!(s, "repetitions = {}", self.repetitions);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(
            s,
            "d_alpha = {}",
            join(self.d_alpha.iter().map(f64::to_string).collect())
        );
        let policy = match self.edge_budget {
            EdgeBudgetPolicy::Fraction => "fraction",
            EdgeBudgetPolicy::Matched => "matched",
        };
        let _ = writeln!(s, "edge_budget = {policy}");
        let _ = writeln!(s, "svd_k = {}", self.metrics.svd_k);
        let _ = writeln!(s, "hop_mode = {}", hop_mode_text(self.metrics.hop_mode));
        let wrappers = self
            .wrappers
            .iter()
            .map(|w| match w {
                Wrapper::CBased => "cbased".to_string(),
                Wrapper::DBased => "dbased".to_string(),
            })
            .collect();
        let _ = writeln!(s, "wrappers = {}", join(wrappers));
        s
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn run_seed(&self, dataset: usize, rep: usize) -> u64 {
        derive_seed(derive_seed(self.seed, dataset as u64), rep as u64)
    }
}

pub fn parse_hop_mode(value: &str) -> Result<HopMode> {
    match value {
        "exact" => Ok(HopMode::Exact),
        "auto" => Ok(HopMode::Auto),
        "sampled" => Ok(HopMode::Sampled(1000)),
        _ => match value.strip_prefix("sampled:") {
            Some(s) => Ok(HopMode::Sampled(number("hop_mode", s)?)),
            None => Err(Error::Config(format!("hop_mode: unknown mode {value:?}"))),
        },
    }
}

fn hop_mode_text(mode: HopMode) -> String {
    match mode {
        HopMode::Exact => "exact".into(),
        HopMode::Auto => "auto".into(),
        HopMode::Sampled(s) => format!("sampled:{s}"),
    }
}

/// One (dataset, method, repetition) run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub dataset: String,
    pub method: String,
    pub rep: usize,
    pub seed: u64,
    pub nodes: usize,
    pub edges: usize,
    pub dstats: Option<[f64; 5]>,
    pub delta_alpha: Option<f64>,
    pub error: Option<String>,
}

/// A loaded dataset with the structures every run shares.
pub struct Prepared {
    pub index: usize,
    pub label: String,
    pub graph: Graph,
    pub properties: Option<GraphProperties>,
    pub hierarchy: Option<Hierarchy>,
}

pub fn prepare(
    cfg: &ExperimentConfig,
    index: usize,
    with_properties: bool,
    with_hierarchy: bool,
) -> Result<Prepared> {
    let ds = &cfg.datasets[index];
    let graph = ds.load()?;
    let properties = if with_properties {
        Some(GraphProperties::compute(&graph, &cfg.metrics)?)
    } else {
        None
    };
    let hierarchy = if with_hierarchy {
        Some(extract_hierarchy(&graph)?)
    } else {
        None
    };
    Ok(Prepared {
        index,
        label: ds.label(),
        graph,
        properties,
        hierarchy,
    })
}

fn needs_hierarchy(methods: &[MethodSpec]) -> bool {
    methods
        .iter()
        .any(|m| matches!(m.method, Method::CBased(_) | Method::CPlusD))
}

fn draw<'g>(
    cfg: &ExperimentConfig,
    data: &'g Prepared,
    spec: &MethodSpec,
    seed: u64,
    edge_budget: Option<usize>,
) -> Result<SampleGraph<'g>> {
    let params = SamplerParams {
        induced: spec.induced,
        d_alpha: spec.d_alpha,
        edge_budget,
        ..SamplerParams::with_fraction(cfg.fraction, seed)
    };
    sample(&data.graph, spec.method, &params, data.hierarchy.as_ref())
}

/// Run every (method, repetition) pair on one dataset; records come back in
/// method-major order.
pub fn run_methods(
    cfg: &ExperimentConfig,
    data: &Prepared,
    methods: &[MethodSpec],
    with_dstats: bool,
) -> Vec<RunRecord> {
    let reps = cfg.repetitions;
    let matched: Vec<Option<usize>> = match cfg.edge_budget {
        EdgeBudgetPolicy::Matched
            if methods
                .iter()
                .any(|m| m.in_edge_group() && m.method != Method::CPlusD) =>
        {
            (0..reps)
                .into_par_iter()
                .map(|rep| {
                    let spec = MethodSpec::new(Method::CPlusD, false);
                    draw(cfg, data, &spec, cfg.run_seed(data.index, rep), None)
                        .ok()
                        .map(|s| s.edge_count().max(1))
                })
                .collect()
        }
        _ => vec![None; reps],
    };
    let jobs: Vec<(usize, usize)> = (0..methods.len())
        .flat_map(|m| (0..reps).map(move |r| (m, r)))
        .collect();
    jobs.par_iter()
        .map(|&(m, rep)| {
            let spec = &methods[m];
            let seed = cfg.run_seed(data.index, rep);
            let mut record = RunRecord {
                dataset: data.label.clone(),
                method: spec.label.clone(),
                rep,
                seed,
                nodes: 0,
                edges: 0,
                dstats: None,
                delta_alpha: None,
                error: None,
            };
            let budget = if spec.in_edge_group() { matched[rep] } else { None };
            let outcome = draw(cfg, data, spec, seed, budget).and_then(|s| {
                record.nodes = s.node_count();
                record.edges = s.edge_count();
                record.delta_alpha = dpl_difference(&data.graph, &s).ok();
                if with_dstats {
                    let props = GraphProperties::compute(&s.to_graph(), &cfg.metrics)?;
                    let original = data.properties.as_ref().expect("original properties computed");
                    record.dstats = Some(original.dstats(&props));
                }
                Ok(())
            });
            if let Err(e) = outcome {
                record.error = Some(e.to_string());
            }
            record
        })
        .collect()
}

/// Rows of scores, one column per quantity, lower is better.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    pub title: String,
    pub dataset: String,
    pub columns: Vec<String>,
    pub rows: Vec<ScoreRow>,
    /// Rank by absolute value (signed quantities such as Δα).
    pub rank_by_magnitude: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreRow {
    pub label: String,
    pub values: Vec<f64>,
    pub failure: Option<String>,
}

/// Competition ranking ("1224"); `None` entries are unranked.
pub fn competition_ranks(values: &[Option<f64>]) -> Vec<Option<usize>> {
    values
        .iter()
        .map(|v| v.map(|x| 1 + values.iter().flatten().filter(|&&y| y < x).count()))
        .collect()
}

impl ScoreTable {
    fn key(&self, x: f64) -> f64 {
        if self.rank_by_magnitude {
            x.abs()
        } else {
            x
        }
    }

    /// Column `c` across rows, `None` for failed rows.
    fn column(&self, c: usize) -> Vec<Option<f64>> {
        self.rows
            .iter()
            .map(|r| r.failure.is_none().then(|| self.key(r.values[c])))
            .collect()
    }

    pub fn ranks(&self, c: usize) -> Vec<Option<usize>> {
        competition_ranks(&self.column(c))
    }

    pub fn averages(&self) -> Vec<Option<f64>> {
        self.rows
            .iter()
            .map(|r| r.failure.is_none().then(|| mean(&r.values)))
            .collect()
    }

    /// Min-max normalized values per column over the successful rows.
    pub fn normalized(&self) -> Vec<Option<Vec<f64>>> {
        let cols: Vec<Vec<f64>> = (0..self.columns.len())
            .map(|c| minmax_normalize(&self.column(c).into_iter().flatten().collect::<Vec<_>>()))
            .collect();
        let mut next = 0;
        self.rows
            .iter()
            .map(|r| {
                r.failure.is_none().then(|| {
                    let row = cols.iter().map(|col| col[next]).collect();
                    next += 1;
                    row
                })
            })
            .collect()
    }

    pub fn normalized_averages(&self) -> Vec<Option<f64>> {
        self.normalized()
            .into_iter()
            .map(|r| r.map(|v| mean(&v)))
            .collect()
    }

    pub fn row(&self, label: &str) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Average over columns for `label`.
    pub fn average_of(&self, label: &str) -> Option<f64> {
        self.row(label)
            .filter(|r| r.failure.is_none())
            .map(|r| mean(&r.values))
    }

    pub fn write_csv<W: Write>(&self, cfg: &ExperimentConfig, out: &mut W) -> Result<()> {
        writeln!(
            out,
            "# cdsample {VERSION} config={} seed={}",
            cfg.hash(),
            cfg.seed
        )?;
        writeln!(out, "# table={} dataset={}", self.title, self.dataset)?;
        let mut header = vec!["method".to_string()];
        for c in &self.columns {
            header.extend([c.clone(), format!("{c}_R"), format!("{c}_norm")]);
        }
        if self.columns.len() > 1 {
            header.extend(["Avg", "Avg_R", "NormAvg", "NormAvg_R"].map(String::from));
        }
        header.push("status".into());
        writeln!(out, "{}", header.join(","))?;

        let ranks: Vec<Vec<Option<usize>>> = (0..self.columns.len()).map(|c| self.ranks(c)).collect();
        let normalized = self.normalized();
        let avgs = self.averages();
        let avg_ranks = competition_ranks(&avgs);
        let norm_avgs = self.normalized_averages();
        let norm_ranks = competition_ranks(&norm_avgs);
        let num = |x: Option<f64>| x.map_or_else(String::new, |v| format!("{v:.6}"));
        let int = |x: Option<usize>| x.map_or_else(String::new, |v| v.to_string());
        for (i, r) in self.rows.iter().enumerate() {
            let mut cells = vec![r.label.clone()];
            for c in 0..self.columns.len() {
                let ok = r.failure.is_none();
                cells.push(num(ok.then(|| r.values[c])));
                cells.push(int(ranks[c][i]));
                cells.push(num(normalized[i].as_ref().map(|v| v[c])));
            }
            if self.columns.len() > 1 {
                cells.extend([
                    num(avgs[i]),
                    int(avg_ranks[i]),
                    num(norm_avgs[i]),
                    int(norm_ranks[i]),
                ]);
            }
            cells.push(match &r.failure {
                None => "ok".into(),
                Some(e) => format!("failed: {}", e.replace([',', '\n'], ";")),
            });
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Per-dataset tables plus, when there are several datasets, their
/// unweighted mean.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub tables: Vec<ScoreTable>,
    pub runs: Vec<RunRecord>,
}

impl Report {
    pub fn table(&self, title: &str, dataset: &str) -> Option<&ScoreTable> {
        self.tables
            .iter()
            .find(|t| t.title == title && t.dataset == dataset)
    }

    /// Write one CSV per table and a run log into `dir`; returns the paths.
    pub fn write(&self, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for t in &self.tables {
            let path = dir.join(format!("{}_{}.csv", t.title, t.dataset));
            let mut buf = Vec::new();
            t.write_csv(cfg, &mut buf)?;
            fs::write(&path, buf)?;
            paths.push(path);
        }
        if let Some(first) = self.tables.first() {
            let title = first.title.split('_').next().unwrap_or("runs");
            let path = dir.join(format!("{title}_runs.csv"));
            let mut buf = Vec::new();
            self.write_runs(cfg, &mut buf)?;
            fs::write(&path, buf)?;
            paths.push(path);
        }
        Ok(paths)
    }

    pub fn write_runs<W: Write>(&self, cfg: &ExperimentConfig, out: &mut W) -> Result<()> {
        writeln!(
            out,
            "# cdsample {VERSION} config={} seed={}",
            cfg.hash(),
            cfg.seed
        )?;
        let props: Vec<&str> = PropertyKind::ALL.iter().map(|k| k.column()).collect();
        writeln!(
            out,
            "dataset,method,rep,seed,nodes,edges,{},delta_alpha,status",
            props.join(",")
        )?;
        for r in &self.runs {
            let d = match r.dstats {
                Some(d) => d.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(","),
                None => [""; 5].join(","),
            };
            let da = r.delta_alpha.map_or_else(String::new, |x| format!("{x:.6}"));
            let status = r.error.as_ref().map_or_else(
                || "ok".to_string(),
                |e| format!("failed: {}", e.replace([',', '\n'], ";")),
            );
            writeln!(
                out,
                "{},{},{},{},{},{},{d},{da},{status}",
                r.dataset, r.method, r.rep, r.seed, r.nodes, r.edges
            )?;
        }
        Ok(())
    }
}

fn property_columns() -> Vec<String> {
    PropertyKind::ALL.iter().map(|k| k.column().to_string()).collect()
}

fn failure_of(runs: &[&RunRecord]) -> Option<String> {
    runs.iter()
        .find_map(|r| r.error.as_ref().map(|e| format!("rep {}: {e}", r.rep)))
}

/// Mean D per property over repetitions.
fn mean_dstat_row(label: &str, runs: &[&RunRecord]) -> ScoreRow {
    if let Some(failure) = failure_of(runs) {
        return ScoreRow {
            label: label.into(),
            values: vec![0.0; 5],
            failure: Some(failure),
        };
    }
    let values = (0..5)
        .map(|p| mean(&runs.iter().map(|r| r.dstats.unwrap()[p]).collect::<Vec<_>>()))
        .collect();
    ScoreRow {
        label: label.into(),
        values,
        failure: None,
    }
}

fn stddev_row(label: &str, runs: &[&RunRecord]) -> ScoreRow {
    if let Some(failure) = failure_of(runs) {
        return ScoreRow {
            label: label.into(),
            values: vec![0.0; 5],
            failure: Some(failure),
        };
    }
    let mut values = Vec::with_capacity(5);
    for p in 0..5 {
        let column: Vec<f64> = runs.iter().map(|r| r.dstats.unwrap()[p]).collect();
        match consistency_stddev(&column) {
            Ok(s) => values.push(s),
            Err(e) => {
                return ScoreRow {
                    label: label.into(),
                    values: vec![0.0; 5],
                    failure: Some(e.to_string()),
                }
            }
        }
    }
    ScoreRow {
        label: label.into(),
        values,
        failure: None,
    }
}

fn delta_alpha_row(label: &str, runs: &[&RunRecord]) -> ScoreRow {
    let failure = failure_of(runs).or_else(|| {
        runs.iter()
            .find(|r| r.delta_alpha.is_none())
            .map(|r| format!("rep {}: densification exponent undefined", r.rep))
    });
    if let Some(failure) = failure {
        return ScoreRow {
            label: label.into(),
            values: vec![0.0],
            failure: Some(failure),
        };
    }
    let values = vec![mean(
        &runs.iter().map(|r| r.delta_alpha.unwrap()).collect::<Vec<_>>(),
    )];
    ScoreRow {
        label: label.into(),
        values,
        failure: None,
    }
}

fn runs_of<'a>(runs: &'a [RunRecord], label: &str) -> Vec<&'a RunRecord> {
    runs.iter().filter(|r| r.method == label).collect()
}

/// Unweighted mean across per-dataset tables with identical row labels.
fn mean_table(tables: &[&ScoreTable]) -> Option<ScoreTable> {
    let first = *tables.first()?;
    if tables.len() < 2 {
        return None;
    }
    let rows = first
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let same: Vec<&ScoreRow> = tables.iter().map(|t| &t.rows[i]).collect();
            let failure = same.iter().find_map(|r| r.failure.clone());
            let values = (0..first.columns.len())
                .map(|c| mean(&same.iter().map(|r| r.values[c]).collect::<Vec<_>>()))
                .collect();
            ScoreRow {
                label: row.label.clone(),
                values,
                failure,
            }
        })
        .collect();
    Some(ScoreTable {
        title: first.title.clone(),
        dataset: "mean".into(),
        columns: first.columns.clone(),
        rows,
        rank_by_magnitude: first.rank_by_magnitude,
    })
}

fn with_means(mut tables: Vec<ScoreTable>) -> Vec<ScoreTable> {
    let mut titles: Vec<String> = tables.iter().map(|t| t.title.clone()).collect();
    titles.sort();
    titles.dedup();
    let means: Vec<ScoreTable> = titles
        .iter()
        .filter_map(|title| mean_table(&tables.iter().filter(|t| &t.title == title).collect::<Vec<_>>()))
        .collect();
    tables.extend(means);
    tables
}

fn for_each_dataset(
    cfg: &ExperimentConfig,
    methods: &[MethodSpec],
    with_dstats: bool,
    mut tables_for: impl FnMut(&Prepared, &[RunRecord]) -> Vec<ScoreTable>,
) -> Result<Report> {
    let mut report = Report::default();
    let mut tables = Vec::new();
    for index in 0..cfg.datasets.len() {
        let data = prepare(
            cfg,
            index,
            with_dstats,
            needs_hierarchy(methods) || cfg.edge_budget == EdgeBudgetPolicy::Matched,
        )?;
        let runs = run_methods(cfg, &data, methods, with_dstats);
        tables.extend(tables_for(&data, &runs));
        report.runs.extend(runs);
    }
    report.tables = with_means(tables);
    Ok(report)
}

fn dstat_table(title: &str, dataset: &str, methods: &[&MethodSpec], runs: &[RunRecord]) -> ScoreTable {
    ScoreTable {
        title: title.into(),
        dataset: dataset.into(),
        columns: property_columns(),
        rows: methods
            .iter()
            .map(|m| mean_dstat_row(&m.label, &runs_of(runs, &m.label)))
            .collect(),
        rank_by_magnitude: false,
    }
}

/// Mean D-statistics per method; node-based and edge-based methods in
/// separate tables (`compare_node`, `compare_edge`).
pub fn run_comparison(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let methods = cfg.methods.clone();
    for_each_dataset(cfg, &methods, true, |data, runs| {
        let node: Vec<&MethodSpec> = methods.iter().filter(|m| m.in_node_group()).collect();
        let edge: Vec<&MethodSpec> = methods.iter().filter(|m| m.in_edge_group()).collect();
        let mut tables = Vec::new();
        if node.iter().any(|m| m.method != Method::CPlusD) || edge.len() <= 1 {
            tables.push(dstat_table("compare_node", &data.label, &node, runs));
        }
        if edge.iter().any(|m| m.method != Method::CPlusD) {
            tables.push(dstat_table("compare_edge", &data.label, &edge, runs));
        }
        tables
    })
}

/// Standard deviation of D-statistics across repetitions.
pub fn run_consistency(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    if cfg.repetitions < 2 {
        return Err(Error::Config("consistency needs at least 2 repetitions".into()));
    }
    let methods = cfg.methods.clone();
    for_each_dataset(cfg, &methods, true, |data, runs| {
        vec![ScoreTable {
            title: "consistency".into(),
            dataset: data.label.clone(),
            columns: property_columns(),
            rows: methods
                .iter()
                .map(|m| stddev_row(&m.label, &runs_of(runs, &m.label)))
                .collect(),
            rank_by_magnitude: false,
        }]
    })
}

/// Mean signed densification-exponent difference per method.
pub fn run_dpl_table(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let methods = cfg.methods.clone();
    for_each_dataset(cfg, &methods, false, |data, runs| {
        vec![ScoreTable {
            title: "dpl".into(),
            dataset: data.label.clone(),
            columns: vec!["delta_alpha".into()],
            rows: methods
                .iter()
                .map(|m| delta_alpha_row(&m.label, &runs_of(runs, &m.label)))
                .collect(),
            rank_by_magnitude: true,
        }]
    })
}

/// C+D at every configured exponent offset.
pub fn run_alpha_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    if cfg.d_alpha.is_empty() {
        return Err(Error::Config("d_alpha list is empty".into()));
    }
    let methods: Vec<MethodSpec> = cfg
        .d_alpha
        .iter()
        .map(|&d| MethodSpec {
            d_alpha: d,
            label: format!("d_alpha={d}"),
            ..MethodSpec::new(Method::CPlusD, false)
        })
        .collect();
    for_each_dataset(cfg, &methods, true, |data, runs| {
        let specs: Vec<&MethodSpec> = methods.iter().collect();
        vec![dstat_table("alpha_sweep", &data.label, &specs, runs)]
    })
}

/// Rows `(base, CBased base)` and/or `(base, DBased base)` for every base.
pub fn hybrid_rows(wrappers: &[Wrapper]) -> Vec<MethodSpec> {
    let mut rows = Vec::new();
    for &w in wrappers {
        for base in Base::ALL {
            rows.push(MethodSpec::new(base.method(), false));
            rows.push(MethodSpec::new(
                match w {
                    Wrapper::CBased => Method::CBased(base),
                    Wrapper::DBased => Method::DBased(base),
                },
                false,
            ));
        }
    }
    rows
}

pub fn run_hybrid_comparison(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    if cfg.wrappers.is_empty() {
        return Err(Error::Config("no wrappers configured".into()));
    }
    let rows = hybrid_rows(&cfg.wrappers);
    let mut distinct: Vec<MethodSpec> = Vec::new();
    for r in &rows {
        if !distinct.contains(r) {
            distinct.push(r.clone());
        }
    }
    for_each_dataset(cfg, &distinct, true, |data, runs| {
        let specs: Vec<&MethodSpec> = rows.iter().collect();
        vec![dstat_table("hybrid", &data.label, &specs, runs)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn parse_config() {
        let cfg = config(
            "# demo\ndatasets = pa:300:3:1, data/x.txt\nmethods = C+D, RW(i), RE\nfraction = 0.2\n\
             repetitions = 3\nseed = 9\nd_alpha = -0.1, 0, 0.1\nedge_budget = matched\nsvd_k = 20\n\
             hop_mode = sampled:50\nwrappers = cbased\n",
        );
        assert_eq!(
            cfg.datasets[0],
            Dataset::PreferentialAttachment {
                n: 300,
                m: 3,
                seed: 1
            }
        );
        assert_eq!(cfg.datasets[1].label(), "x");
        assert_eq!(cfg.methods[1].label, "RW(i)");
        assert_eq!(cfg.d_alpha, vec![-0.1, 0.0, 0.1]);
        assert_eq!(cfg.metrics.hop_mode, HopMode::Sampled(50));
        assert_eq!(cfg.edge_budget, EdgeBudgetPolicy::Matched);
        assert_eq!(config(&cfg.canonical()), cfg);
        assert!(ExperimentConfig::parse("datasets = pa:10:2:0\nbogus = 1").is_err());
        assert!(ExperimentConfig::parse("methods = RN").is_err());
        assert!(ExperimentConfig::parse("datasets = pa:10:2:0\nrepetitions = 0").is_err());
        assert!(ExperimentConfig::parse("datasets = pa:10:2\n").is_err());
    }

    #[test]
    fn ranks_with_ties() {
        let r = competition_ranks(&[Some(0.2), Some(0.1), Some(0.2), None, Some(0.3)]);
        assert_eq!(r, vec![Some(2), Some(1), Some(2), None, Some(4)]);
    }

    #[test]
    fn dominated_method_ranks_second() {
        let t = ScoreTable {
            title: "t".into(),
            dataset: "d".into(),
            columns: property_columns(),
            rows: vec![
                ScoreRow {
                    label: "a".into(),
                    values: vec![0.1, 0.2, 0.3, 0.4, 0.5],
                    failure: None,
                },
                ScoreRow {
                    label: "b".into(),
                    values: vec![0.2, 0.3, 0.4, 0.5, 0.6],
                    failure: None,
                },
                ScoreRow {
                    label: "c".into(),
                    values: vec![0.0; 5],
                    failure: Some("boom".into()),
                },
            ],
            rank_by_magnitude: false,
        };
        for c in 0..5 {
            assert_eq!(t.ranks(c), vec![Some(1), Some(2), None]);
        }
        assert_eq!(t.normalized_averages(), vec![Some(0.0), Some(1.0), None]);
        let mut out = Vec::new();
        let cfg = config("datasets = pa:10:2:0");
        t.write_csv(&cfg, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().nth(4).unwrap().starts_with("b,0.200000,2,1.000000"));
        assert!(text.lines().nth(5).unwrap().ends_with("failed: boom"));
    }

    #[test]
    fn hybrid_row_counts() {
        assert_eq!(hybrid_rows(&[Wrapper::CBased]).len(), 8);
        assert_eq!(hybrid_rows(&[Wrapper::CBased, Wrapper::DBased]).len(), 16);
    }

    #[test]
    fn comparison_is_deterministic() {
        let cfg =
            config("datasets = pa:200:3:1\nmethods = C+D, RN, RE\nrepetitions = 2\nseed = 5\nsvd_k = 10");
        let a = run_comparison(&cfg).unwrap();
        let b = run_comparison(&cfg).unwrap();
        let csv = |r: &Report| {
            let mut out = Vec::new();
            for t in &r.tables {
                t.write_csv(&cfg, &mut out).unwrap();
            }
            r.write_runs(&cfg, &mut out).unwrap();
            out
        };
        assert_eq!(csv(&a), csv(&b));
        let node = a.table("compare_node", "pa-200-3-1").unwrap();
        assert_eq!(node.rows.len(), 2);
        let edge = a.table("compare_edge", "pa-200-3-1").unwrap();
        assert_eq!(
            edge.rows.iter().map(|r| r.label.as_str()).collect::<Vec<_>>(),
            ["C+D", "RE"]
        );
        assert!(a.runs.iter().all(|r| r.error.is_none()));
    }

    #[test]
    fn full_fraction_dpl_table_is_zero() {
        let cfg = config("datasets = pa:150:3:2\nmethods = RN, RDN, RW(i)\nfraction = 1\nrepetitions = 2");
        let report = run_dpl_table(&cfg).unwrap();
        for row in &report.tables[0].rows {
            assert!(row.values[0].abs() < 1e-12, "{row:?}");
        }
    }

    #[test]
    fn consistency_needs_two_runs() {
        let cfg = config("datasets = pa:100:2:0\nmethods = RN\nrepetitions = 1");
        assert!(run_consistency(&cfg).is_err());
    }

    #[test]
    fn failed_rows_are_marked() {
        // A 3-node graph at 10% rounds to zero nodes.
        let cfg = config("datasets = pa:3:2:0\nmethods = RN\nrepetitions = 1\nsvd_k = 2");
        let report = run_comparison(&cfg).unwrap();
        assert!(report.tables[0].rows[0].failure.is_some());
    }

    #[test]
    fn multiple_datasets_get_a_mean_table() {
        let cfg = config("datasets = pa:120:2:0, pa:120:2:1\nmethods = RN, RDN\nrepetitions = 2\nsvd_k = 5");
        let report = run_dpl_table(&cfg).unwrap();
        let mean = report.table("dpl", "mean").unwrap();
        let a = report.table("dpl", "pa-120-2-0").unwrap().rows[0].values[0];
        let b = report.table("dpl", "pa-120-2-1").unwrap().rows[0].values[0];
        assert!((mean.rows[0].values[0] - (a + b) / 2.0).abs() < 1e-15);
    }
}
