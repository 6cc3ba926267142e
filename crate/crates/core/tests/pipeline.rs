use std::io::Cursor;

use cdsample::budget::{allocate_budgets, sample_size};
use cdsample::generate::preferential_attachment;
use cdsample::harness::{run_comparison, run_dpl_table, ExperimentConfig};
use cdsample::metrics::{GraphProperties, HopMode, MetricOptions};
use cdsample::{extract_hierarchy, load_edge_list, sample_cplusd};

const EDGES: &str =
    "# toy\n10 11\n11 12\n12 10\n12 13\n13 14\n14 15\n15 13\n15 16\n16 17\n17 18\n18 16\n11 10\n";

#[test]
fn load_sample_write_reload() {
    let (g, ids, report) = load_edge_list(Cursor::new(EDGES)).unwrap();
    assert_eq!(report.duplicates, 1);
    assert_eq!((g.node_count(), g.edge_count()), (9, 11));

    let run = sample_cplusd(&g, 0.5, 0.0, 3).unwrap();
    assert_eq!(run.sample.node_count(), sample_size(0.5, 9));
    let mut text = Vec::new();
    run.sample.write(Some(&ids), &mut text).unwrap();
    let text = String::from_utf8(text).unwrap();
    assert!(text.starts_with("# method=C+D seed=3 fraction=0.5\n"));

    let (back, back_ids, _) = load_edge_list(Cursor::new(text.as_bytes())).unwrap();
    assert_eq!(back.edge_count(), run.sample.edge_count());
    for i in 0..back.node_count() {
        let ext = back_ids.external_id(i).unwrap();
        assert!(ids.index_of(ext).is_some());
    }
}

#[test]
fn budgets_cover_the_dendrogram() {
    let g = preferential_attachment(400, 3, 9).unwrap();
    let h = extract_hierarchy(&g).unwrap();
    let b = allocate_budgets(&h.dendrogram, 0.1, 0.0).unwrap();
    let root = h.dendrogram.root();
    assert_eq!(b.get(root).node_budget, 40);
    let leaf_sum: usize = (0..h.dendrogram.leaf_count()).map(|l| b.get(l).node_budget).sum();
    assert_eq!(leaf_sum, 40);
    let run = sample_cplusd(&g, 0.1, 0.0, 1).unwrap();
    let leaves: usize = (0..h.dendrogram.leaf_count()).map(|l| b.get(l).edge_budget).sum();
    let inter: usize = h.dendrogram.merges().map(|m| b.get(m).inter_edge_budget).sum();
    assert_eq!(
        run.sample.edge_count() + run.report.total_edge_shortfall(),
        leaves + inter
    );
}

#[test]
fn sample_properties_are_comparable() {
    let g = preferential_attachment(300, 3, 2).unwrap();
    let opts = MetricOptions {
        svd_k: 20,
        hop_mode: HopMode::Exact,
    };
    let whole = GraphProperties::compute(&g, &opts).unwrap();
    let run = sample_cplusd(&g, 0.2, 0.0, 5).unwrap();
    let part = GraphProperties::compute(&run.sample.to_graph(), &opts).unwrap();
    for d in whole.dstats(&part) {
        assert!((0.0..=1.0).contains(&d));
    }
    assert!(whole.dstats(&whole).iter().all(|&d| d == 0.0));
}

#[test]
fn harness_reports_are_reproducible() {
    let cfg = ExperimentConfig::parse(
        "datasets = pa:200:3:1, pa:200:3:2\nmethods = RN, RDN, FF, C+D\nrepetitions = 2\nseed = 11\nhop_mode = exact\nsvd_k = 10\n",
    )
    .unwrap();
    let dir_a = tempdir();
    let dir_b = tempdir();
    let a = run_comparison(&cfg).unwrap().write(&cfg, &dir_a).unwrap();
    let b = run_comparison(&cfg).unwrap().write(&cfg, &dir_b).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }

    let dpl = run_dpl_table(&cfg).unwrap();
    let mean = dpl.table("dpl", "mean").unwrap();
    assert_eq!(mean.rows.len(), 4);
    std::fs::remove_dir_all(dir_a).unwrap();
    std::fs::remove_dir_all(dir_b).unwrap();
}

fn tempdir() -> std::path::PathBuf {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let dir = std::env::temp_dir().join(format!(
        "cdsample-pipeline-{}-{}",
        std::process::id(),
        NEXT.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
