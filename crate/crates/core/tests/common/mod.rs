//! Naive from-definition implementations and graph generators shared by the
//! integration and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use netsample::community::Partition;
use netsample::graph::NodeSet;
use netsample::metrics::{evaluate_checkpoints, MetricContext};
use netsample::{DegreeMode, Exact, Graph, Metric, NodeId, Strategy};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn ratio(num: usize, den: usize) -> Exact {
    Exact::new(BigInt::from(num), BigInt::from(den))
}

/// G(n, p) graph.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Random spanning tree plus G(n, p) extra edges.
pub fn random_connected_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Every labeled graph on `n` nodes, connected ones only.
pub fn all_connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e);
            Graph::from_edges(n, edges).unwrap()
        })
        .filter(|g| g.component_of(0).len() == n)
        .collect()
}

fn neighbors_of_set(g: &Graph, s: &[NodeId]) -> BTreeSet<NodeId> {
    let inside: BTreeSet<NodeId> = s.iter().copied().collect();
    let mut out = BTreeSet::new();
    for &u in s {
        for v in 0..g.node_count() {
            if g.has_edge(u, v) && !inside.contains(&v) {
                out.insert(v);
            }
        }
    }
    out
}

/// Score of frontier node `v` for a greedy strategy, from scratch.
pub fn greedy_score(g: &Graph, s: &[NodeId], v: NodeId, strategy: Strategy) -> usize {
    let n = g.node_count();
    match strategy {
        Strategy::Ds => (0..n).filter(|&w| g.has_edge(v, w)).count(),
        Strategy::Sec => s.iter().filter(|&&u| g.has_edge(u, v)).count(),
        Strategy::Xs => {
            let frontier = neighbors_of_set(g, s);
            (0..n)
                .filter(|&w| g.has_edge(v, w) && !frontier.contains(&w) && !s.contains(&w))
                .count()
        }
        other => panic!("{other} is not greedy"),
    }
}

/// Checks that every pick of a greedy trace lies in the argmax set of the
/// current frontier, and that the trace stops only when the frontier is
/// empty or the target is reached.
pub fn check_greedy_trace(g: &Graph, trace: &[NodeId], k: usize, strategy: Strategy) -> Result<(), String> {
    for i in 1..trace.len() {
        let prefix = &trace[..i];
        let frontier = neighbors_of_set(g, prefix);
        if !frontier.contains(&trace[i]) {
            return Err(format!("step {i}: {} not in frontier {frontier:?}", trace[i]));
        }
        let best = frontier
            .iter()
            .map(|&v| greedy_score(g, prefix, v, strategy))
            .max()
            .unwrap();
        let got = greedy_score(g, prefix, trace[i], strategy);
        if got != best {
            return Err(format!("step {i}: picked {} with score {got}, best {best}", trace[i]));
        }
    }
    if trace.len() < k && !neighbors_of_set(g, trace).is_empty() {
        return Err("stopped early with a nonempty frontier".into());
    }
    Ok(())
}

fn cdf_at(degrees: &[usize], x: usize) -> Exact {
    ratio(degrees.iter().filter(|&&d| d <= x).count(), degrees.len())
}

pub fn naive_distsim(g: &Graph, s: &[NodeId], mode: DegreeMode) -> Exact {
    let n = g.node_count();
    let all: Vec<usize> = (0..n).map(|v| (0..n).filter(|&w| g.has_edge(v, w)).count()).collect();
    let sample: Vec<usize> = s
        .iter()
        .map(|&v| match mode {
            DegreeMode::Induced => s.iter().filter(|&&w| g.has_edge(v, w)).count(),
            DegreeMode::Original => all[v],
        })
        .collect();
    // integer-valued step functions: checking every integer covers all jumps
    let top = all.iter().chain(&sample).copied().max().unwrap_or(0);
    let mut d = Exact::zero();
    for x in 0..=top {
        let gap = cdf_at(&all, x) - cdf_at(&sample, x);
        let gap = if gap < Exact::zero() { -gap } else { gap };
        if gap > d {
            d = gap;
        }
    }
    Exact::one() - d
}

pub fn naive_hubs(g: &Graph, s: &[NodeId], k: usize) -> Exact {
    let mut order: Vec<NodeId> = (0..g.node_count()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.deg(v)), v));
    let top = &order[..k];
    ratio(top.iter().filter(|v| s.contains(v)).count(), k)
}

pub fn naive_ccloc(g: &Graph, s: &[NodeId]) -> Exact {
    let mut total = Exact::zero();
    for &v in s {
        let nb: Vec<NodeId> = s.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
        let d = nb.len();
        if d < 2 {
            continue;
        }
        let mut links = 0;
        for i in 0..d {
            for j in i + 1..d {
                if g.has_edge(nb[i], nb[j]) {
                    links += 1;
                }
            }
        }
        total += ratio(2 * links, d * (d - 1));
    }
    total / ratio(s.len(), 1)
}

pub fn naive_ccglb(g: &Graph, s: &[NodeId]) -> Exact {
    let mut triangles = 0;
    for a in 0..s.len() {
        for b in a + 1..s.len() {
            for c in b + 1..s.len() {
                if g.has_edge(s[a], s[b]) && g.has_edge(s[b], s[c]) && g.has_edge(s[a], s[c]) {
                    triangles += 1;
                }
            }
        }
    }
    let triples: usize = s
        .iter()
        .map(|&v| {
            let d = s.iter().filter(|&&w| g.has_edge(v, w)).count();
            d * d.saturating_sub(1) / 2
        })
        .sum();
    if triples == 0 {
        Exact::zero()
    } else {
        ratio(3 * triangles, triples)
    }
}

pub fn naive_reach(part: &[usize], s: &[NodeId]) -> Exact {
    let all: BTreeSet<usize> = part.iter().copied().collect();
    let hit: BTreeSet<usize> = s.iter().map(|&v| part[v]).collect();
    ratio(hit.len(), all.len())
}

pub fn naive_dq(g: &Graph, s: &[NodeId]) -> Exact {
    ratio(s.len() + neighbors_of_set(g, s).len(), g.node_count())
}

/// Compares every metric, at every prefix of a random node ordering, against
/// the naive versions for one random graph. Returns the number of values
/// compared.
pub fn metric_oracle_case<R: Rng>(rng: &mut R) -> Result<usize, String> {
    let n = rng.gen_range(1..=30);
    let p = rng.gen_range(0.05..0.6);
    let g = random_graph(n, p, rng);
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    let len = rng.gen_range(1..=n);
    let trace = &order[..len];
    let k = rng.gen_range(1..=n);
    let c1 = rng.gen_range(1..=n);
    let c2 = rng.gen_range(1..=n);
    let rak_labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..c1)).collect();
    let cnm_labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..c2)).collect();
    let rak = Partition::from_assignment(rak_labels.clone()).unwrap();
    let cnm = Partition::from_assignment(cnm_labels.clone()).unwrap();
    let mut compared = 0;
    for mode in [DegreeMode::Induced, DegreeMode::Original] {
        let mut ctx = MetricContext::new(&g);
        ctx.degree_mode = mode;
        ctx.hub_count = k;
        ctx.rak = Some(&rak);
        ctx.cnm = Some(&cnm);
        let checkpoints: Vec<usize> = (1..=len).collect();
        let report = evaluate_checkpoints::<Exact>(&ctx, trace, &checkpoints, &Metric::ALL)
            .map_err(|e| format!("evaluate: {e}"))?;
        if report.values.len() != len * Metric::ALL.len() {
            return Err(format!("expected {} values, got {}", len * 7, report.values.len()));
        }
        for v in &report.values {
            let s = &trace[..v.size];
            let expected = match v.metric {
                Metric::DistSim => naive_distsim(&g, s, mode),
                Metric::Hubs => naive_hubs(&g, s, k),
                Metric::CcLoc => naive_ccloc(&g, s),
                Metric::CcGlb => naive_ccglb(&g, s),
                Metric::CommReachRak => naive_reach(&rak_labels, s),
                Metric::CommReachCnm => naive_reach(&cnm_labels, s),
                Metric::Dq => naive_dq(&g, s),
            };
            if v.value != expected {
                return Err(format!(
                    "n={n} {} at size {} ({mode:?}): got {}, naive {}",
                    v.metric, v.size, v.value, expected
                ));
            }
            let direct: Exact = ctx.evaluate(v.metric, s).map_err(|e| e.to_string())?;
            if direct != expected {
                return Err(format!("direct {} differs at size {}", v.metric, v.size));
            }
            compared += 1;
        }
    }
    Ok(compared)
}

/// Whether every later trace node was adjacent to an earlier one.
pub fn is_link_trace(g: &Graph, trace: &[NodeId]) -> bool {
    let mut seen = NodeSet::new(g.node_count());
    for (i, &v) in trace.iter().enumerate() {
        if i > 0 && !g.adjacency(v).iter().any(|&w| seen.contains(w)) {
            return false;
        }
        if !seen.insert(v) {
            return false;
        }
    }
    true
}
