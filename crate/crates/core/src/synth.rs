//! Random graph generators, conductance, and Monte Carlo experiments on the
//! community bias of expansion sampling and the degree bias of sample-edge
//! counting.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::community::Partition;
use crate::graph::{Graph, NodeId, NodeSet};
use crate::scalar::Scalar;

/// One-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.326_347_874_040_841;

const PAIRING_ROUNDS: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("weights must be nonempty, finite and positive")]
    Weights,
    #[error("conductance needs a proper nonempty subset with positive volume on both sides")]
    DegenerateCut,
    #[error("trial count must be positive")]
    NoTrials,
}

/// Configuration-model graph with planted equal-size communities.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedPartitionConfig {
    pub communities: usize,
    pub community_size: usize,
    /// Intra-community stubs per node.
    pub e_in: usize,
    /// Inter-community stubs per node.
    pub e_out: usize,
}

impl PlantedPartitionConfig {
    pub fn node_count(&self) -> usize {
        self.communities * self.community_size
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.communities == 0 || self.community_size == 0 {
            return Err(SynthError::Config("need at least one nonempty community".into()));
        }
        if self.e_in >= self.community_size {
            return Err(SynthError::Config(format!(
                "e_in = {} must be below the community size {}",
                self.e_in, self.community_size
            )));
        }
        if self.e_out > 0 && self.communities < 2 {
            return Err(SynthError::Config("e_out > 0 needs at least two communities".into()));
        }
        Ok(())
    }

    pub fn community_of(&self, v: NodeId) -> usize {
        v / self.community_size
    }
}

#[derive(Clone, Debug)]
pub struct PlantedGraph {
    pub graph: Graph,
    pub partition: Partition,
    /// Nodes that lost one stub to fix an odd stub total.
    pub parity_drops: Vec<NodeId>,
    /// Stubs left unpaired after rejecting loops, repeats and wrong-class pairs.
    pub unpaired_stubs: usize,
    /// Mean realized intra-community degree.
    pub realized_in: f64,
    /// Mean realized inter-community degree.
    pub realized_out: f64,
}

/// Pairs stubs uniformly at random. Pairs forming a loop, a repeated edge or
/// violating `allowed` are returned to the pool and reshuffled; whatever is
/// left after a bounded number of rounds is dropped. Returns the number of
/// dropped stubs.
fn pair_stubs<R: Rng + ?Sized>(
    mut stubs: Vec<NodeId>,
    allowed: impl Fn(NodeId, NodeId) -> bool,
    edges: &mut HashSet<(NodeId, NodeId)>,
    rng: &mut R,
) -> usize {
    for _ in 0..PAIRING_ROUNDS {
        if stubs.len() < 2 {
            break;
        }
        stubs.shuffle(rng);
        let mut rejected = Vec::new();
        for pair in stubs.chunks(2) {
            let &[u, v] = pair else {
                rejected.extend_from_slice(pair);
                continue;
            };
            let key = (u.min(v), u.max(v));
            if u == v || !allowed(u, v) || !edges.insert(key) {
                rejected.push(u);
                rejected.push(v);
            }
        }
        let stalled = rejected.len() == stubs.len();
        stubs = rejected;
        if stalled {
            break;
        }
    }
    stubs.len()
}

pub fn gen_planted_partition<R: Rng + ?Sized>(
    cfg: &PlantedPartitionConfig,
    rng: &mut R,
) -> Result<PlantedGraph, SynthError> {
    cfg.validate()?;
    let n = cfg.node_count();
    let size = cfg.community_size;
    let mut edges = HashSet::new();
    let mut parity_drops = Vec::new();
    let mut unpaired = 0;

    for c in 0..cfg.communities {
        let members = c * size..(c + 1) * size;
        let mut stubs: Vec<NodeId> = members.clone().flat_map(|v| std::iter::repeat_n(v, cfg.e_in)).collect();
        if stubs.len() % 2 == 1 {
            let victim = rng.gen_range(members);
            let at = stubs.iter().position(|&s| s == victim).expect("every node has stubs");
            stubs.swap_remove(at);
            parity_drops.push(victim);
        }
        unpaired += pair_stubs(stubs, |_, _| true, &mut edges, rng);
    }

    let mut stubs: Vec<NodeId> = (0..n).flat_map(|v| std::iter::repeat_n(v, cfg.e_out)).collect();
    if stubs.len() % 2 == 1 {
        let victim = rng.gen_range(0..n);
        let at = stubs.iter().position(|&s| s == victim).expect("every node has stubs");
        stubs.swap_remove(at);
        parity_drops.push(victim);
    }
    unpaired += pair_stubs(
        stubs,
        |u, v| cfg.community_of(u) != cfg.community_of(v),
        &mut edges,
        rng,
    );

    let graph = Graph::from_edges(n, edges).expect("stub ids are in range");
    let (mut inner, mut outer) = (0usize, 0usize);
    for (u, v) in graph.edges() {
        if cfg.community_of(u) == cfg.community_of(v) {
            inner += 2;
        } else {
            outer += 2;
        }
    }
    let partition = Partition::from_assignment((0..n).map(|v| cfg.community_of(v)).collect()).expect("nonempty");
    Ok(PlantedGraph {
        graph,
        partition,
        parity_drops,
        unpaired_stubs: unpaired,
        realized_in: inner as f64 / n as f64,
        realized_out: outer as f64 / n as f64,
    })
}

#[derive(Clone, Debug)]
pub struct ChungLuGraph {
    pub graph: Graph,
    /// Node pairs whose probability `w_i·w_j/Σw` exceeded one and was capped.
    pub capped_pairs: u64,
}

fn check_weights(weights: &[f64]) -> Result<f64, SynthError> {
    if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(SynthError::Weights);
    }
    Ok(weights.iter().sum())
}

/// Number of unordered pairs `i < j` with `w_i·w_j > Σw`.
pub fn capped_pair_count(weights: &[f64]) -> Result<u64, SynthError> {
    let total = check_weights(weights)?;
    let mut sorted = weights.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut count = 0u64;
    // for each i, partners j > i with w_i·w_j > total form a prefix of the tail
    let mut hi = sorted.len();
    for i in 0..sorted.len() {
        while hi > i + 1 && sorted[i] * sorted[hi - 1] <= total {
            hi -= 1;
        }
        if hi <= i + 1 {
            break;
        }
        count += (hi - i - 1) as u64;
    }
    Ok(count)
}

/// Expected-degree random graph: each pair `i < j` is linked independently
/// with probability `min(1, w_i·w_j/Σw)`.
///
/// Nodes are visited in decreasing weight order so that, along each row, the
/// edge probability is nonincreasing; runs of absent edges are skipped with
/// geometric jumps and each landing is thinned to the exact probability.
/// Expected time is linear in nodes plus edges.
pub fn gen_chung_lu<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<ChungLuGraph, SynthError> {
    let total = check_weights(weights)?;
    let n = weights.len();
    let mut order: Vec<NodeId> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let w: Vec<f64> = order.iter().map(|&v| weights[v]).collect();

    let mut edges = Vec::new();
    for u in 0..n.saturating_sub(1) {
        let mut v = u + 1;
        let mut p = (w[u] * w[v] / total).min(1.0);
        while v < n && p > 0.0 {
            if p < 1.0 {
                let r: f64 = rng.gen();
                // skip ⌊ln r / ln(1−p)⌋ candidates
                let skip = ((1.0 - r).ln() / (1.0 - p).ln()).floor();
                if !skip.is_finite() || skip >= (n - v) as f64 {
                    break;
                }
                v += skip as usize;
            }
            let q = (w[u] * w[v] / total).min(1.0);
            if q >= p || rng.gen::<f64>() < q / p {
                edges.push((order[u], order[v]));
            }
            p = q;
            v += 1;
        }
    }
    let graph = Graph::from_edges(n, edges).expect("ids in range");
    Ok(ChungLuGraph {
        graph,
        capped_pairs: capped_pair_count(weights)?,
    })
}

/// Power-law expected degrees `w_i ∝ (i + i0)^(−1/(γ−1))` scaled to the
/// requested average, with the offset `i0` chosen so that the largest weight
/// equals `max_degree`. Weights are floored at `min_degree`.
pub fn power_law_weights(
    n: usize,
    gamma: f64,
    avg_degree: f64,
    max_degree: f64,
    min_degree: f64,
) -> Result<Vec<f64>, SynthError> {
    if n == 0 || gamma <= 2.0 || avg_degree <= 0.0 || max_degree < avg_degree || min_degree <= 0.0 {
        return Err(SynthError::Config(
            "power law needs n > 0, gamma > 2 and 0 < avg_degree <= max_degree, min_degree > 0".into(),
        ));
    }
    let exponent = 1.0 / (gamma - 1.0);
    let c = (gamma - 2.0) / (gamma - 1.0) * avg_degree * (n as f64).powf(exponent);
    let offset = n as f64 * (c / (max_degree * (n as f64).powf(exponent))).powf(gamma - 1.0);
    Ok((0..n)
        .map(|i| (c * (i as f64 + offset).powf(-exponent)).max(min_degree))
        .collect())
}

/// Cut edges over the smaller side's volume.
pub fn conductance<T: Scalar>(g: &Graph, s: &[NodeId]) -> Result<T, SynthError> {
    let n = g.node_count();
    let mut inside = NodeSet::new(n);
    for &v in s {
        if v >= n {
            return Err(SynthError::DegenerateCut);
        }
        inside.insert(v);
    }
    if inside.is_empty() || inside.len() == n {
        return Err(SynthError::DegenerateCut);
    }
    let (mut cut, mut vol_in) = (0i128, 0i128);
    for v in 0..n {
        if inside.contains(v) {
            vol_in += g.deg(v) as i128;
            cut += g.adjacency(v).iter().filter(|&&w| !inside.contains(w)).count() as i128;
        }
    }
    let vol_out = 2 * g.edge_count() as i128 - vol_in;
    let denom = vol_in.min(vol_out);
    if denom == 0 {
        return Err(SynthError::DegenerateCut);
    }
    Ok(T::from_ratio(cut, denom))
}

/// Right-hand side of the condition under which adding a node from an
/// unrepresented community is expected to expand the sample more:
/// `|V|·e_in² / (n·(|V| + e_in·|S|))`.
pub fn expansion_bound(total_nodes: usize, community_size: usize, e_in: usize, sample_size: usize) -> f64 {
    let v = total_nodes as f64;
    let e = e_in as f64;
    v * e * e / (community_size as f64 * (v + e * sample_size as f64))
}

/// Mean and standard error of a slice.
fn mean_se(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionExperiment {
    pub planted: PlantedPartitionConfig,
    pub sample_size: usize,
    /// Sample nodes placed in the current candidate's community (at least 1).
    pub current_members: usize,
    /// Frontier conditioning (default) or any node outside the sample.
    pub candidates: CandidateRule,
    pub trials: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTrialResult {
    pub mean_new: f64,
    pub mean_curr: f64,
    pub se_new: f64,
    pub se_curr: f64,
    /// Mean of the per-trial difference `X_new − X_curr`.
    pub mean_diff: f64,
    pub se_diff: f64,
    /// One-sided 99% lower confidence bound on the mean difference.
    pub diff_lower_99: f64,
    pub trials_used: usize,
    pub trials_skipped: usize,
    pub bound: f64,
    pub condition_holds: bool,
    /// Upper bound on `X_curr` and lower bound on `X_new` from the model.
    pub curr_upper: f64,
    pub new_lower: f64,
    pub realized_in: f64,
    pub realized_out: f64,
}

/// Monte Carlo comparison of the novel-neighbor count of a candidate node in
/// an already sampled community against one in an unsampled community.
///
/// Per trial: generate a planted partition graph; place `current_members`
/// sample nodes in community 0 and the rest one per community 1, 2, …; draw
/// one candidate from community 0 and one from a community without sample
/// nodes, and record `|N({v}) − (N(S) ∪ S)|` for each. Candidates must lie in
/// `N(S)` under [`CandidateRule::Frontier`]. Trials lacking either candidate
/// are skipped and counted.
pub fn run_expansion_experiment(exp: &ExpansionExperiment) -> Result<ExpansionTrialResult, SynthError> {
    let cfg = &exp.planted;
    cfg.validate()?;
    if exp.trials == 0 {
        return Err(SynthError::NoTrials);
    }
    if exp.current_members == 0 || exp.current_members > exp.sample_size {
        return Err(SynthError::Config("need 1 <= current_members <= sample size".into()));
    }
    if exp.current_members > cfg.community_size {
        return Err(SynthError::Config("current_members exceeds the community size".into()));
    }
    let others = exp.sample_size - exp.current_members;
    let represented = 1 + others.min(cfg.communities - 1);
    if represented >= cfg.communities {
        return Err(SynthError::Config(
            "sample covers every community; no new-community candidate can exist".into(),
        ));
    }

    // per trial: (new, current) novel-neighbor counts, realized in/out degree
    type Outcome = (Option<(f64, f64)>, f64, f64);
    let outcomes: Vec<Outcome> = (0..exp.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(exp.master_seed, t);
            let planted = gen_planted_partition(cfg, &mut rng).expect("validated");
            let g = &planted.graph;
            let size = cfg.community_size;

            let mut s: Vec<NodeId> = rand::seq::index::sample(&mut rng, size, exp.current_members)
                .into_iter()
                .collect();
            for i in 0..others {
                let c = 1 + i % (cfg.communities - 1);
                loop {
                    let v = c * size + rng.gen_range(0..size);
                    if !s.contains(&v) {
                        s.push(v);
                        break;
                    }
                }
            }
            let frontier = g.neighborhood(&s);
            let mut covered = NodeSet::new(g.node_count());
            for &v in s.iter().chain(&frontier) {
                covered.insert(v);
            }
            let pool: Vec<NodeId> = match exp.candidates {
                CandidateRule::Frontier => frontier,
                CandidateRule::AllOutside => (0..g.node_count()).filter(|v| !s.contains(v)).collect(),
            };
            let curr: Vec<NodeId> = pool.iter().copied().filter(|&v| cfg.community_of(v) == 0).collect();
            let new: Vec<NodeId> = pool
                .iter()
                .copied()
                .filter(|&v| cfg.community_of(v) >= represented)
                .collect();
            let novel = |v: NodeId| g.adjacency(v).iter().filter(|&&w| !covered.contains(w)).count() as f64;
            let pair = match (new.choose(&mut rng), curr.choose(&mut rng)) {
                (Some(&vn), Some(&vc)) => Some((novel(vn), novel(vc))),
                _ => None,
            };
            (pair, planted.realized_in, planted.realized_out)
        })
        .collect();

    let used: Vec<(f64, f64)> = outcomes.iter().filter_map(|o| o.0).collect();
    let news: Vec<f64> = used.iter().map(|p| p.0).collect();
    let currs: Vec<f64> = used.iter().map(|p| p.1).collect();
    let diffs: Vec<f64> = used.iter().map(|p| p.0 - p.1).collect();
    let (mean_new, se_new) = mean_se(&news);
    let (mean_curr, se_curr) = mean_se(&currs);
    let (mean_diff, se_diff) = mean_se(&diffs);
    let trials = outcomes.len() as f64;
    let bound = expansion_bound(cfg.node_count(), cfg.community_size, cfg.e_in, exp.sample_size);
    let (e_in, e_out, n) = (cfg.e_in as f64, cfg.e_out as f64, cfg.community_size as f64);
    Ok(ExpansionTrialResult {
        mean_new,
        mean_curr,
        se_new,
        se_curr,
        mean_diff,
        se_diff,
        diff_lower_99: mean_diff - Z_99 * se_diff,
        trials_used: used.len(),
        trials_skipped: outcomes.len() - used.len(),
        bound,
        condition_holds: e_out < bound,
        curr_upper: e_out + (n - e_in) * e_in / n,
        new_lower: e_in - e_out * exp.sample_size as f64 * e_in / cfg.node_count() as f64,
        realized_in: outcomes.iter().map(|o| o.1).sum::<f64>() / trials,
        realized_out: outcomes.iter().map(|o| o.2).sum::<f64>() / trials,
    })
}

/// Which nodes outside the sample are compared.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CandidateRule {
    /// Only nodes adjacent to the sample.
    #[default]
    Frontier,
    /// Every node outside the sample.
    AllOutside,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeOrderExperiment {
    pub weights: Vec<f64>,
    /// The fixed sample `S`.
    pub sample: Vec<NodeId>,
    pub candidates: CandidateRule,
    pub trials: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightClassStats {
    pub weight: f64,
    /// Trials in which the class had at least one candidate.
    pub trials: usize,
    /// Mean over trials of the class-average edge count into `S`.
    pub mean_induced: f64,
    pub se_induced: f64,
    /// Mean realized degree of the class's candidates in `G`.
    pub mean_degree: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeOrderReport {
    /// Ascending by weight.
    pub classes: Vec<WeightClassStats>,
    /// Fraction of (heavier, lighter) class pairs whose mean induced degrees
    /// are ordered the same way.
    pub ordered_fraction: f64,
    /// Smallest separation, in combined standard errors, between consecutive
    /// classes (heavier minus lighter).
    pub min_separation: f64,
    pub trials_used: usize,
    pub trials_skipped: usize,
}

/// Monte Carlo check that, in an expected-degree random graph, candidates of
/// larger weight have more edges into a fixed sample.
///
/// Per trial: generate the graph, collect candidates outside `S` (frontier
/// nodes by default), and average each weight class's degree in
/// `G_{S ∪ {v}}`, i.e. its number of edges into `S`. A trial counts only if
/// candidates of at least two distinct weights are present.
pub fn run_degree_order_experiment(exp: &DegreeOrderExperiment) -> Result<DegreeOrderReport, SynthError> {
    check_weights(&exp.weights)?;
    if exp.trials == 0 {
        return Err(SynthError::NoTrials);
    }
    let n = exp.weights.len();
    let mut in_s = NodeSet::new(n);
    for &v in &exp.sample {
        if v >= n {
            return Err(SynthError::Config(format!("sample node {v} out of range")));
        }
        in_s.insert(v);
    }
    // positive finite f64 bit patterns order like the values
    let class_key = |v: NodeId| exp.weights[v].to_bits();

    let per_trial: Vec<Option<BTreeMap<u64, (f64, f64)>>> = (0..exp.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(exp.master_seed, t);
            let g = gen_chung_lu(&exp.weights, &mut rng).expect("validated").graph;
            let mut acc: BTreeMap<u64, (f64, f64, usize)> = BTreeMap::new();
            for v in 0..n {
                if in_s.contains(v) {
                    continue;
                }
                let induced = g.adjacency(v).iter().filter(|&&w| in_s.contains(w)).count();
                if exp.candidates == CandidateRule::Frontier && induced == 0 {
                    continue;
                }
                let e = acc.entry(class_key(v)).or_insert((0.0, 0.0, 0));
                e.0 += induced as f64;
                e.1 += g.deg(v) as f64;
                e.2 += 1;
            }
            if acc.len() < 2 {
                return None;
            }
            Some(
                acc.into_iter()
                    .map(|(k, (ind, deg, c))| (k, (ind / c as f64, deg / c as f64)))
                    .collect(),
            )
        })
        .collect();

    let mut by_class: BTreeMap<u64, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    let mut used = 0;
    for trial in per_trial.iter().flatten() {
        used += 1;
        for (&k, &(ind, deg)) in trial {
            let e = by_class.entry(k).or_default();
            e.0.push(ind);
            e.1.push(deg);
        }
    }
    let classes: Vec<WeightClassStats> = by_class
        .into_iter()
        .map(|(k, (ind, deg))| {
            let (mean_induced, se_induced) = mean_se(&ind);
            WeightClassStats {
                weight: f64::from_bits(k),
                trials: ind.len(),
                mean_induced,
                se_induced,
                mean_degree: deg.iter().sum::<f64>() / deg.len() as f64,
            }
        })
        .collect();

    let mut pairs = 0usize;
    let mut ordered = 0usize;
    for (i, light) in classes.iter().enumerate() {
        for heavy in &classes[i + 1..] {
            pairs += 1;
            if heavy.mean_induced >= light.mean_induced {
                ordered += 1;
            }
        }
    }
    let min_separation = classes
        .windows(2)
        .map(|w| {
            let se = (w[0].se_induced.powi(2) + w[1].se_induced.powi(2)).sqrt();
            (w[1].mean_induced - w[0].mean_induced) / se
        })
        .fold(f64::INFINITY, f64::min);
    Ok(DegreeOrderReport {
        ordered_fraction: if pairs == 0 {
            f64::NAN
        } else {
            ordered as f64 / pairs as f64
        },
        min_separation,
        classes,
        trials_used: used,
        trials_skipped: exp.trials - used,
    })
}
