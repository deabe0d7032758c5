//! Structural representativeness measures of a sample.
//!
//! All measures are ratios in `[0, 1]` and are generic over [`Scalar`], so
//! they can be evaluated exactly with rationals or approximately with floats.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::community::Partition;
use crate::graph::{Graph, InducedSubgraph, NodeId, NodeSet};
use crate::scalar::Scalar;

pub const DEFAULT_HUB_COUNT: usize = 100;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("sample is empty")]
    EmptySample,
    #[error("degree multiset is empty")]
    EmptyDegrees,
    #[error("hub count must be at least 1")]
    ZeroHubs,
    #[error("hub count {k} exceeds node count {n}")]
    TooManyHubs { k: usize, n: usize },
    #[error("node {0} is not covered by the partition")]
    Unpartitioned(NodeId),
    #[error("metric {0} needs a partition that was not supplied")]
    MissingPartition(Metric),
    #[error("checkpoints must be positive and strictly ascending")]
    BadCheckpoints,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    DistSim,
    Hubs,
    CcLoc,
    CcGlb,
    CommReachRak,
    CommReachCnm,
    Dq,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::DistSim,
        Metric::Hubs,
        Metric::CcLoc,
        Metric::CcGlb,
        Metric::CommReachRak,
        Metric::CommReachCnm,
        Metric::Dq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::DistSim => "distsim",
            Metric::Hubs => "hubs",
            Metric::CcLoc => "ccloc",
            Metric::CcGlb => "ccglb",
            Metric::CommReachRak => "commreach_rak",
            Metric::CommReachCnm => "commreach_cnm",
            Metric::Dq => "dq",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
#[error("unknown metric {0:?}")]
pub struct UnknownMetric(pub String);

impl FromStr for Metric {
    type Err = UnknownMetric;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownMetric(s.to_owned()))
    }
}

/// Which degree a sampled node contributes to its degree distribution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DegreeMode {
    /// Degree inside the induced subgraph of the sample.
    #[default]
    Induced,
    /// Degree in the original graph.
    Original,
}

impl FromStr for DegreeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "induced" => Ok(DegreeMode::Induced),
            "original" => Ok(DegreeMode::Original),
            other => Err(format!("unknown degree mode {other:?} (induced|original)")),
        }
    }
}

/// Empirical cumulative degree distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeCdf<T> {
    values: Vec<usize>,
    cumulative: Vec<T>,
}

impl<T: Scalar> DegreeCdf<T> {
    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn cumulative(&self) -> &[T] {
        &self.cumulative
    }

    /// Fraction of the multiset that is `<= x`.
    pub fn at(&self, x: usize) -> T {
        match self.values.partition_point(|&v| v <= x) {
            0 => T::zero(),
            i => self.cumulative[i - 1].clone(),
        }
    }
}

pub fn degree_cdf<T: Scalar>(degrees: &[usize]) -> Result<DegreeCdf<T>, MetricError> {
    if degrees.is_empty() {
        return Err(MetricError::EmptyDegrees);
    }
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let total = sorted.len() as i128;
    let mut values = Vec::new();
    let mut cumulative = Vec::new();
    for (i, &d) in sorted.iter().enumerate() {
        if sorted.get(i + 1) != Some(&d) {
            values.push(d);
            cumulative.push(T::from_ratio(i as i128 + 1, total));
        }
    }
    Ok(DegreeCdf { values, cumulative })
}

/// Two-sample Kolmogorov-Smirnov D statistic over ascending slices.
///
/// Both step functions are constant between consecutive support points, so
/// the supremum is attained at a support point of either sample.
fn ks_sorted<T: Scalar>(a: &[usize], b: &[usize]) -> T {
    let (na, nb) = (a.len() as i128, b.len() as i128);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0i128;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        // |i/na - j/nb| scaled by na*nb
        best = best.max((i as i128 * nb - j as i128 * na).abs());
    }
    T::from_ratio(best, na * nb)
}

pub fn ks_distance<T: Scalar>(a: &[usize], b: &[usize]) -> Result<T, MetricError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptyDegrees);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    Ok(ks_sorted(&a, &b))
}

fn sample_degrees(g: &Graph, members: &[NodeId], mode: DegreeMode) -> Vec<usize> {
    match mode {
        DegreeMode::Original => members.iter().map(|&v| g.deg(v)).collect(),
        DegreeMode::Induced => g.induced_subgraph(members).graph.degrees(),
    }
}

/// `1 − D` between the degree distribution of `g` and that of the sample.
pub fn distsim<T: Scalar>(g: &Graph, members: &[NodeId], mode: DegreeMode) -> Result<T, MetricError> {
    if members.is_empty() {
        return Err(MetricError::EmptySample);
    }
    let d: T = ks_distance(&g.degrees(), &sample_degrees(g, members, mode))?;
    Ok(T::one() - d)
}

/// The `k` highest-degree nodes, ranked by degree descending then id ascending.
pub fn top_hubs(g: &Graph, k: usize) -> Result<Vec<NodeId>, MetricError> {
    if k == 0 {
        return Err(MetricError::ZeroHubs);
    }
    let n = g.node_count();
    if k > n {
        return Err(MetricError::TooManyHubs { k, n });
    }
    let mut order: Vec<NodeId> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.deg(v)), v));
    order.truncate(k);
    Ok(order)
}

/// Fraction of the top-`k` hubs present in the sample.
pub fn hubs<T: Scalar>(g: &Graph, members: &[NodeId], k: usize) -> Result<T, MetricError> {
    let top = top_hubs(g, k)?;
    let set = node_set(g.node_count(), members);
    let hits = top.iter().filter(|&&v| set.contains(v)).count();
    Ok(T::from_ratio(hits as i128, k as i128))
}

/// For each node, the number of edges among its neighbors.
pub fn neighbor_links(g: &Graph) -> Vec<usize> {
    let mut mark = vec![usize::MAX; g.node_count()];
    (0..g.node_count())
        .map(|v| {
            for &u in g.adjacency(v) {
                mark[u] = v;
            }
            let twice: usize = g
                .adjacency(v)
                .iter()
                .map(|&u| g.adjacency(u).iter().filter(|&&w| mark[w] == v).count())
                .sum();
            twice / 2
        })
        .collect()
}

/// Mean local clustering coefficient over all nodes of `g`; nodes of degree
/// below two contribute zero.
pub fn average_local_clustering<T: Scalar>(g: &Graph) -> Result<T, MetricError> {
    if g.is_empty() {
        return Err(MetricError::EmptySample);
    }
    let links = neighbor_links(g);
    let mut sum = T::zero();
    for (v, &l) in links.iter().enumerate() {
        let d = g.deg(v) as i128;
        if d >= 2 && l > 0 {
            sum = sum + T::from_ratio(2 * l as i128, d * (d - 1));
        }
    }
    Ok(sum / T::from_count(g.node_count()))
}

/// Closed over connected triples of `g`; zero when there is no connected triple.
pub fn transitivity<T: Scalar>(g: &Graph) -> Result<T, MetricError> {
    if g.is_empty() {
        return Err(MetricError::EmptySample);
    }
    // each triangle is counted once at each of its three corners
    let closed: usize = neighbor_links(g).iter().sum();
    let triples: usize = (0..g.node_count())
        .map(|v| g.deg(v) * g.deg(v).saturating_sub(1) / 2)
        .sum();
    if triples == 0 {
        return Ok(T::zero());
    }
    Ok(T::from_ratio(closed as i128, triples as i128))
}

pub fn ccloc<T: Scalar>(sub: &InducedSubgraph) -> Result<T, MetricError> {
    average_local_clustering(&sub.graph)
}

pub fn ccglb<T: Scalar>(sub: &InducedSubgraph) -> Result<T, MetricError> {
    transitivity(&sub.graph)
}

/// Fraction of the partition's communities holding at least one sampled node.
pub fn community_reach<T: Scalar>(part: &Partition, members: &[NodeId]) -> Result<T, MetricError> {
    let mut touched = vec![false; part.community_count()];
    let mut hit = 0usize;
    for &v in members {
        let c = part.community_of(v).ok_or(MetricError::Unpartitioned(v))?;
        if !touched[c] {
            touched[c] = true;
            hit += 1;
        }
    }
    Ok(T::from_ratio(hit as i128, part.community_count() as i128))
}

/// Discovery quotient `|S ∪ N(S)| / |V|`.
pub fn dq<T: Scalar>(g: &Graph, members: &[NodeId]) -> Result<T, MetricError> {
    if members.is_empty() {
        return Err(MetricError::EmptySample);
    }
    let mut covered = node_set(g.node_count(), members);
    for &v in members {
        for &w in g.adjacency(v) {
            covered.insert(w);
        }
    }
    Ok(T::from_ratio(covered.len() as i128, g.node_count() as i128))
}

fn node_set(n: usize, members: &[NodeId]) -> NodeSet {
    let mut set = NodeSet::new(n);
    for &v in members {
        set.insert(v);
    }
    set
}

/// Everything besides the sample that the measures depend on.
#[derive(Clone, Debug)]
pub struct MetricContext<'a> {
    pub graph: &'a Graph,
    pub degree_mode: DegreeMode,
    pub hub_count: usize,
    pub rak: Option<&'a Partition>,
    pub cnm: Option<&'a Partition>,
}

impl<'a> MetricContext<'a> {
    pub fn new(graph: &'a Graph) -> Self {
        MetricContext {
            graph,
            degree_mode: DegreeMode::default(),
            hub_count: DEFAULT_HUB_COUNT.min(graph.node_count()),
            rak: None,
            cnm: None,
        }
    }

    fn partition_for(&self, metric: Metric) -> Result<&'a Partition, MetricError> {
        let part = match metric {
            Metric::CommReachRak => self.rak,
            Metric::CommReachCnm => self.cnm,
            _ => None,
        };
        part.ok_or(MetricError::MissingPartition(metric))
    }

    /// One measure on an arbitrary node set.
    pub fn evaluate<T: Scalar>(&self, metric: Metric, members: &[NodeId]) -> Result<T, MetricError> {
        if members.is_empty() {
            return Err(MetricError::EmptySample);
        }
        match metric {
            Metric::DistSim => distsim(self.graph, members, self.degree_mode),
            Metric::Hubs => hubs(self.graph, members, self.hub_count),
            Metric::CcLoc => ccloc(&self.graph.induced_subgraph(members)),
            Metric::CcGlb => ccglb(&self.graph.induced_subgraph(members)),
            Metric::CommReachRak | Metric::CommReachCnm => community_reach(self.partition_for(metric)?, members),
            Metric::Dq => dq(self.graph, members),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointValue<T> {
    pub size: usize,
    pub metric: Metric,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointReport<T> {
    pub values: Vec<CheckpointValue<T>>,
    /// Checkpoints beyond the end of the trace.
    pub skipped: Vec<usize>,
}

/// Evaluates `metrics` on every prefix of `trace` whose length is listed in
/// `checkpoints`, in a single pass over the trace.
pub fn evaluate_checkpoints<T: Scalar>(
    ctx: &MetricContext<'_>,
    trace: &[NodeId],
    checkpoints: &[usize],
    metrics: &[Metric],
) -> Result<CheckpointReport<T>, MetricError> {
    if checkpoints.first() == Some(&0) || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MetricError::BadCheckpoints);
    }
    let mut report = CheckpointReport {
        values: Vec::new(),
        skipped: checkpoints.iter().copied().filter(|&c| c > trace.len()).collect(),
    };
    if metrics.is_empty() {
        return Ok(report);
    }
    let g = ctx.graph;
    let n = g.node_count();
    let wants = |m: Metric| metrics.contains(&m);

    let hubs_flag = if wants(Metric::Hubs) {
        let mut flag = vec![false; n];
        for v in top_hubs(g, ctx.hub_count)? {
            flag[v] = true;
        }
        flag
    } else {
        Vec::new()
    };
    let mut reach: Vec<(Metric, &Partition, Vec<bool>, usize)> = Vec::new();
    for m in [Metric::CommReachRak, Metric::CommReachCnm] {
        if wants(m) {
            let part = ctx.partition_for(m)?;
            reach.push((m, part, vec![false; part.community_count()], 0));
        }
    }
    let graph_degrees = if wants(Metric::DistSim) {
        let mut d = g.degrees();
        d.sort_unstable();
        d
    } else {
        Vec::new()
    };

    let mut in_sample = NodeSet::new(n);
    let mut covered = NodeSet::new(n);
    let mut induced_deg = vec![0usize; n];
    let mut hub_hits = 0usize;
    let mut next = 0usize;

    for (i, &v) in trace.iter().enumerate() {
        in_sample.insert(v);
        covered.insert(v);
        for &w in g.adjacency(v) {
            covered.insert(w);
            if in_sample.contains(w) {
                induced_deg[v] += 1;
                induced_deg[w] += 1;
            }
        }
        if !hubs_flag.is_empty() && hubs_flag[v] {
            hub_hits += 1;
        }
        for (_, part, touched, hit) in reach.iter_mut() {
            let c = part.community_of(v).ok_or(MetricError::Unpartitioned(v))?;
            if !touched[c] {
                touched[c] = true;
                *hit += 1;
            }
        }

        let size = i + 1;
        if checkpoints.get(next) != Some(&size) {
            continue;
        }
        next += 1;
        let prefix = &trace[..size];
        let sub = if wants(Metric::CcLoc) || wants(Metric::CcGlb) {
            Some(g.induced_subgraph(prefix))
        } else {
            None
        };
        for &metric in metrics {
            let value = match metric {
                Metric::DistSim => {
                    let mut sd: Vec<usize> = match ctx.degree_mode {
                        DegreeMode::Induced => prefix.iter().map(|&u| induced_deg[u]).collect(),
                        DegreeMode::Original => prefix.iter().map(|&u| g.deg(u)).collect(),
                    };
                    sd.sort_unstable();
                    T::one() - ks_sorted::<T>(&graph_degrees, &sd)
                }
                Metric::Hubs => T::from_ratio(hub_hits as i128, ctx.hub_count as i128),
                Metric::CcLoc => ccloc(sub.as_ref().expect("built above"))?,
                Metric::CcGlb => ccglb(sub.as_ref().expect("built above"))?,
                Metric::CommReachRak | Metric::CommReachCnm => {
                    let (_, part, _, hit) = reach.iter().find(|r| r.0 == metric).expect("prepared");
                    T::from_ratio(*hit as i128, part.community_count() as i128)
                }
                Metric::Dq => T::from_ratio(covered.len() as i128, n as i128),
            };
            report.values.push(CheckpointValue { size, metric, value });
        }
        if next == checkpoints.len() {
            break;
        }
    }
    Ok(report)
}
