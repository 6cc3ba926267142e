use std::collections::HashSet;

use cdsample::budget::sample_size;
use cdsample::samplers::default_edge_budget;
use cdsample::{extract_hierarchy, sample, Base, Graph, Method, SamplerParams};
use proptest::prelude::*;

fn all_methods() -> Vec<(Method, bool)> {
    let mut out = vec![
        (Method::Rn, false),
        (Method::Rdn, false),
        (Method::Rpn, false),
        (Method::Re, false),
        (Method::Rne, false),
        (Method::CPlusD, false),
    ];
    for m in [Method::Rw, Method::Rj, Method::Ff] {
        out.push((m, false));
        out.push((m, true));
    }
    for b in Base::ALL {
        out.push((Method::CBased(b), false));
        out.push((Method::DBased(b), false));
    }
    out
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..40).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 1..4 * n).prop_map(move |pairs| {
            let pairs = pairs.into_iter().filter(|(u, v)| u != v);
            Graph::from_edges(n, pairs).unwrap()
        })
    })
}

fn induced_edges(g: &Graph, nodes: &[usize]) -> Vec<(usize, usize)> {
    let set: HashSet<usize> = nodes.iter().copied().collect();
    g.edges()
        .iter()
        .copied()
        .filter(|(u, v)| set.contains(u) && set.contains(v))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn size_validity_and_determinism(
        g in graph_strategy(),
        which in 0usize..20,
        fraction in 0.05f64..=1.0,
        seed in any::<u64>(),
    ) {
        let (method, induced) = all_methods()[which];
        let mut p = SamplerParams::with_fraction(fraction, seed);
        p.induced = induced;
        let node_target = sample_size(fraction, g.node_count());
        let edge_target = default_edge_budget(&g, &p);

        let result = sample(&g, method, &p, None);
        let needs_edges = method.is_edge_based();
        if node_target == 0 || (needs_edges && edge_target == 0) {
            prop_assert!(result.is_err());
            return Ok(());
        }
        if g.edge_count() == 0 && matches!(method, Method::CBased(_) | Method::CPlusD) {
            return Ok(());
        }
        let s = result.unwrap();
        prop_assert!(s.validate().is_ok());

        match method {
            Method::Re | Method::Rne => prop_assert_eq!(s.edge_count(), edge_target),
            Method::CBased(Base::Re) => prop_assert!(s.edge_count() <= edge_target),
            Method::DBased(_) => {}
            _ => prop_assert_eq!(s.node_count(), node_target),
        }
        let takes_induced = induced
            || matches!(
                method,
                Method::Rn | Method::Rdn | Method::Rpn | Method::CBased(Base::Rn | Base::Rdn | Base::Rw)
            );
        if takes_induced {
            let expected = induced_edges(&g, s.nodes());
            prop_assert_eq!(s.edges(), expected.as_slice());
        }
        if method == Method::Ff && !induced {
            prop_assert!(s.edge_count() < s.node_count());
        }

        let again = sample(&g, method, &p, None).unwrap();
        prop_assert_eq!(s.nodes(), again.nodes());
        prop_assert_eq!(s.edges(), again.edges());
    }

    #[test]
    fn community_re_stays_inside_communities(g in graph_strategy(), seed in any::<u64>()) {
        prop_assume!(g.edge_count() >= 2);
        let h = extract_hierarchy(&g).unwrap();
        let p = SamplerParams::with_fraction(0.5, seed);
        let s = sample(&g, Method::CBased(Base::Re), &p, Some(&h)).unwrap();
        for &(u, v) in s.edges() {
            prop_assert_eq!(h.partition.label(u), h.partition.label(v));
        }
    }

    #[test]
    fn full_fraction_node_methods_return_whole_graph(g in graph_strategy(), seed in any::<u64>()) {
        let p = SamplerParams::with_fraction(1.0, seed);
        for m in [Method::Rn, Method::Rdn, Method::Rpn] {
            let s = sample(&g, m, &p, None).unwrap();
            prop_assert_eq!(s.node_count(), g.node_count());
            prop_assert_eq!(s.edges(), g.edges());
        }
    }
}

/// Count first draws over many single-node samples and compare with weights.
fn first_draw_within_3_sigma(counts: &[usize], weights: &[f64], trials: usize) {
    let total: f64 = weights.iter().sum();
    for (v, (&c, &w)) in counts.iter().zip(weights).enumerate() {
        let p = w / total;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        let expected = trials as f64 * p;
        assert!(
            (c as f64 - expected).abs() <= 3.0 * sigma.max(1.0),
            "node {v}: {c} draws, expected {expected:.1} ± {:.1}",
            3.0 * sigma
        );
    }
}

fn ten_node_graph() -> Graph {
    Graph::from_edges(
        10,
        [
            (0, 1),
            (0, 2),
            (0, 3),
            (0, 4),
            (1, 2),
            (2, 3),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 8),
            (8, 9),
            (3, 9),
            (1, 6),
        ],
    )
    .unwrap()
}

#[test]
fn rdn_first_draw_matches_degrees() {
    let g = ten_node_graph();
    let trials = 10_000;
    let mut counts = vec![0usize; 10];
    for seed in 0..trials as u64 {
        let s = sample(&g, Method::Rdn, &SamplerParams::with_fraction(0.1, seed), None).unwrap();
        counts[s.nodes()[0]] += 1;
    }
    let weights: Vec<f64> = g.degrees().map(|d| d as f64).collect();
    first_draw_within_3_sigma(&counts, &weights, trials);
}

#[test]
fn rpn_first_draw_matches_pagerank() {
    let g = ten_node_graph();
    let trials = 10_000;
    let mut counts = vec![0usize; 10];
    for seed in 0..trials as u64 {
        let s = sample(&g, Method::Rpn, &SamplerParams::with_fraction(0.1, seed), None).unwrap();
        counts[s.nodes()[0]] += 1;
    }
    // Independent power iteration on the dense transition matrix.
    let n = 10;
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..500 {
        let mut next = vec![0.15 / n as f64; n];
        for (u, xu) in x.iter().enumerate() {
            for &w in g.neighbors(u) {
                next[w] += 0.85 * xu / g.degree(u) as f64;
            }
        }
        x = next;
    }
    first_draw_within_3_sigma(&counts, &x, trials);
}

#[test]
fn rne_spoke_frequency_on_star() {
    let g = Graph::from_edges(10, (1..10).map(|v| (0, v))).unwrap();
    let trials = 10_000;
    let mut counts = vec![0usize; 9];
    let mut p = SamplerParams::with_fraction(0.1, 0);
    p.edge_budget = Some(1);
    for seed in 0..trials as u64 {
        p.seed = seed;
        let s = sample(&g, Method::Rne, &p, None).unwrap();
        let (_, v) = s.edges()[0];
        counts[v - 1] += 1;
    }
    first_draw_within_3_sigma(&counts, &[1.0; 9], trials);
}
