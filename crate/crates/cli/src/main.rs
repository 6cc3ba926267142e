use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use cdsample::budget::allocate_budgets;
use cdsample::generate::preferential_attachment;
use cdsample::graph::{load_edge_list_file, write_edge_list};
use cdsample::harness::{
    parse_hop_mode, run_alpha_sweep, run_comparison, run_consistency, run_dpl_table, run_hybrid_comparison,
    ExperimentConfig, Report,
};
use cdsample::metrics::{GraphProperties, MetricOptions};
use cdsample::{extract_hierarchy, sample, sample_cplusd, Method, SamplerParams};

#[derive(Parser)]
#[command(
    name = "cdsample",
    version,
    about = "Community and densification aware graph sampling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one sample from an edge list.
    Sample(SampleArgs),
    /// Dump the five property distributions of a graph.
    Metrics(MetricsArgs),
    /// Write the community dendrogram with its budget annotations.
    Hierarchy(HierarchyArgs),
    /// Write a preferential-attachment graph.
    Generate(GenerateArgs),
    /// Node- and edge-based D-statistic comparison tables.
    Compare(ExperimentArgs),
    /// Standard deviation of D-statistics across repetitions.
    Consistency(ExperimentArgs),
    /// Densification exponent difference per method.
    DplTable(ExperimentArgs),
    /// C+D over a range of densification exponent offsets.
    AlphaSweep(ExperimentArgs),
    /// Community- and DPL-based wrappers against their bases.
    Hybrid(ExperimentArgs),
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    /// RN, RDN, RPN, RE, RNE, RW, RJ, FF, CBased<X>, DBased<X> or C+D.
    #[arg(long)]
    method: String,
    #[arg(long)]
    fraction: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    d_alpha: f64,
    /// Keep every edge among the visited nodes (RW, RJ, FF).
    #[arg(long)]
    induced: bool,
    #[arg(long)]
    seed: u64,
    /// Edge count for edge-based methods instead of fraction · |E|.
    #[arg(long)]
    edge_budget: Option<usize>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 100)]
    svd_k: usize,
    /// exact, auto, sampled or sampled:<sources>.
    #[arg(long, default_value = "auto")]
    hop_mode: String,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct HierarchyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    fraction: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    d_alpha: f64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    nodes: usize,
    /// Edges added per new node.
    #[arg(long, default_value_t = 4)]
    attach: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output_dir: PathBuf,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn shortfall_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".shortfall.csv");
    PathBuf::from(name)
}

fn run_sample(args: &SampleArgs) -> Result<()> {
    let (g, ids, _) =
        load_edge_list_file(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let (method, tag_induced) = Method::parse_tag(&args.method)?;
    let mut params = SamplerParams::with_fraction(args.fraction, args.seed);
    params.induced = tag_induced || args.induced;
    params.d_alpha = args.d_alpha;
    params.edge_budget = args.edge_budget;
    if params.induced && !method.is_exploration() {
        anyhow::bail!("{} has no induced variant", args.method);
    }

    let mut out = create(&args.output)?;
    if method == Method::CPlusD {
        let result = sample_cplusd(&g, args.fraction, args.d_alpha, args.seed)?;
        result.sample.write(Some(&ids), &mut out)?;
        let mut report = create(&shortfall_path(&args.output))?;
        result.report.write_csv(&mut report)?;
        report.flush()?;
    } else {
        sample(&g, method, &params, None)?.write(Some(&ids), &mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn run_metrics(args: &MetricsArgs) -> Result<()> {
    let (g, _, _) =
        load_edge_list_file(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let opts = MetricOptions {
        svd_k: args.svd_k,
        hop_mode: parse_hop_mode(&args.hop_mode)?,
    };
    let props = GraphProperties::compute(&g, &opts)?;
    let mut out = create(&args.output)?;
    for dist in &props.distributions {
        dist.write_csv(&mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn run_hierarchy(args: &HierarchyArgs) -> Result<()> {
    let (g, ids, _) =
        load_edge_list_file(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let h = extract_hierarchy(&g)?;
    let budgets = allocate_budgets(&h.dendrogram, args.fraction, args.d_alpha)?;
    let mut out = create(&args.output)?;
    let q = h
        .modularity
        .map_or_else(|| "undef".to_string(), |q| format!("{q:.6}"));
    writeln!(out, "# communities: {} modularity: {q}", h.partition.len())?;
    h.dendrogram.write(Some(&ids), &mut out)?;
    writeln!(
        out,
        "# budgets fraction={} d_alpha={}",
        args.fraction, args.d_alpha
    )?;
    budgets.write(&h.dendrogram, Some(&ids), &mut out)?;
    out.flush()?;
    Ok(())
}

fn run_generate(args: &GenerateArgs) -> Result<()> {
    let g = preferential_attachment(args.nodes, args.attach, args.seed)?;
    let mut out = create(&args.output)?;
    write_edge_list(&g, None, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run_experiment(
    args: &ExperimentArgs,
    run: fn(&ExperimentConfig) -> cdsample::Result<Report>,
) -> Result<()> {
    let cfg = ExperimentConfig::from_file(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let report = run(&cfg)?;
    fs::create_dir_all(&args.output_dir)
        .with_context(|| format!("cannot create {}", args.output_dir.display()))?;
    let mut stdout = io::stdout().lock();
    for path in report.write(&cfg, &args.output_dir)? {
        writeln!(stdout, "{}", path.display())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample(a) => run_sample(&a),
        Command::Metrics(a) => run_metrics(&a),
        Command::Hierarchy(a) => run_hierarchy(&a),
        Command::Generate(a) => run_generate(&a),
        Command::Compare(a) => run_experiment(&a, run_comparison),
        Command::Consistency(a) => run_experiment(&a, run_consistency),
        Command::DplTable(a) => run_experiment(&a, run_dpl_table),
        Command::AlphaSweep(a) => run_experiment(&a, run_alpha_sweep),
        Command::Hybrid(a) => run_experiment(&a, run_hybrid_comparison),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
