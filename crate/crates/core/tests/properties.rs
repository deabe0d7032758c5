mod common;

use common::random_graph;
use netsample::community::{modularity, Partition};
use netsample::graph::fixtures::complete;
use netsample::harness::{aggregate, RawRow, RunStatus};
use netsample::metrics::{ccglb, evaluate_checkpoints, ks_distance, MetricContext};
use netsample::{load_edge_list, sample, Exact, Graph, Metric, SamplerConfig, Strategy};
use num_traits::Zero;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graph_from(seed: u64, n: usize, p: f64) -> Graph {
    random_graph(n, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metrics_stay_in_unit_interval_and_grow(seed in any::<u64>(), n in 1usize..40, p in 0.0f64..0.5) {
        let g = graph_from(seed, n, p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let part = Partition::from_assignment(labels).unwrap();
        let mut ctx = MetricContext::new(&g);
        ctx.hub_count = rng.gen_range(1..=n);
        ctx.rak = Some(&part);
        ctx.cnm = Some(&part);
        let checkpoints: Vec<usize> = (1..=n).collect();
        let report = evaluate_checkpoints::<f64>(&ctx, &order, &checkpoints, &Metric::ALL).unwrap();
        let mut last = std::collections::HashMap::new();
        for v in &report.values {
            prop_assert!((0.0..=1.0).contains(&v.value), "{} = {}", v.metric, v.value);
            if matches!(v.metric, Metric::Hubs | Metric::Dq | Metric::CommReachRak | Metric::CommReachCnm) {
                let prev = last.insert(v.metric, v.value).unwrap_or(0.0);
                prop_assert!(v.value >= prev);
            }
        }
        // the whole node set is perfectly representative
        for m in [Metric::DistSim, Metric::Hubs, Metric::Dq, Metric::CommReachRak] {
            let full: f64 = ctx.evaluate(m, &order).unwrap();
            prop_assert_eq!(full, 1.0);
        }
    }

    #[test]
    fn ks_distance_is_symmetric(a in prop::collection::vec(0usize..20, 1..30), b in prop::collection::vec(0usize..20, 1..30)) {
        let ab: Exact = ks_distance(&a, &b).unwrap();
        let ba: Exact = ks_distance(&b, &a).unwrap();
        prop_assert_eq!(ab.clone(), ba);
        prop_assert!(ab >= Exact::zero());
        let same: Exact = ks_distance(&a, &a).unwrap();
        prop_assert!(same.is_zero());
    }

    #[test]
    fn global_clustering_of_trees_is_zero(seed in any::<u64>(), n in 1usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        let g = Graph::from_edges(n, edges).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let c: Exact = ccglb(&g.induced_subgraph(&all)).unwrap();
        prop_assert!(c.is_zero());
    }

    #[test]
    fn modularity_of_singletons_is_nonpositive_and_relabel_invariant(seed in any::<u64>(), n in 2usize..25, p in 0.1f64..0.6) {
        let g = graph_from(seed, n, p);
        prop_assume!(g.edge_count() > 0);
        let single: Exact = modularity(&g, &Partition::singletons(n).unwrap()).unwrap();
        prop_assert!(single <= Exact::zero());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..5)).collect();
        let shifted: Vec<usize> = labels.iter().map(|l| 4 - l).collect();
        let a: Exact = modularity(&g, &Partition::from_assignment(labels).unwrap()).unwrap();
        let b: Exact = modularity(&g, &Partition::from_assignment(shifted).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn samplers_are_deterministic(seed in any::<u64>(), n in 2usize..60, k in 1usize..60, strategy in 0usize..8) {
        let g = graph_from(seed, n, 0.1);
        prop_assume!(g.edge_count() > 0);
        let strategy = Strategy::ALL[strategy];
        let cfg = SamplerConfig::new(strategy);
        let start = (seed as usize) % n;
        let a = sample(&g, start, k, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = sample(&g, start, k, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a.trace(), b.trace());
    }

    #[test]
    fn edge_list_round_trip(seed in any::<u64>(), n in 1usize..50, p in 0.0f64..0.4) {
        let g = graph_from(seed, n, p);
        prop_assume!(g.edge_count() > 0);
        let mut text = Vec::new();
        g.write_edge_list(&mut text, None).unwrap();
        let (h, labels) = load_edge_list(text.as_slice()).unwrap();
        let mut original: Vec<(String, String)> = g.edges().map(|(u, v)| (u.to_string(), v.to_string())).collect();
        let mut loaded: Vec<(String, String)> = h
            .edges()
            .map(|(u, v)| {
                let (a, b) = (labels.label(u).to_owned(), labels.label(v).to_owned());
                let (a_id, b_id): (usize, usize) = (a.parse().unwrap(), b.parse().unwrap());
                if a_id < b_id { (a, b) } else { (b, a) }
            })
            .collect();
        original.sort();
        loaded.sort();
        prop_assert_eq!(original, loaded);
    }

    #[test]
    fn aggregate_ignores_row_order(values in prop::collection::vec(0.0f64..1.0, 1..40), seed in any::<u64>()) {
        let rows: Vec<RawRow> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| RawRow {
                strategy: Strategy::ALL[i % 3],
                seed_index: i,
                seed_node: i.to_string(),
                checkpoint: 10 * (1 + i % 2),
                metric: Metric::Dq,
                value: Some(v),
                status: RunStatus::Ok,
            })
            .collect();
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = aggregate(&rows);
        let b = aggregate(&shuffled);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.mean.to_bits(), y.mean.to_bits());
            prop_assert_eq!(x.std.to_bits(), y.std.to_bits());
            prop_assert!(x.std >= 0.0);
        }
    }
}

#[test]
fn global_clustering_of_complete_graphs_is_one() {
    for n in 3..9 {
        let all: Vec<usize> = (0..n).collect();
        let c: f64 = ccglb(&complete(n).induced_subgraph(&all)).unwrap();
        assert_eq!(c, 1.0);
    }
}
