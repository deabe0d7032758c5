//! Link-trace sampling strategies and acquaintance sampling.
//!
//! Every link-trace strategy starts from a seed node and repeatedly adds a
//! node from the current neighborhood `N(S)` until the sample holds `k`
//! nodes. When the seed's component runs out first, the partial sample is
//! returned with [`SampleStatus::Exhausted`].

mod acquaintance;
mod frontier;
mod greedy;
mod traversal;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId, NodeSet};

pub use acquaintance::sample_acq;
pub use frontier::{Frontier, ScoreKind};
pub use greedy::{sample_ds, sample_sec, sample_xs};
pub use traversal::{sample_bfs, sample_dfs, sample_ffs, sample_rw};

pub const DEFAULT_BURN_PROBABILITY: f64 = 0.7;
pub const DEFAULT_RW_STEP_CAP: u64 = 1_000_000_000;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("invalid seed: {0}")]
    InvalidSeed(#[from] GraphError),
    #[error("sample size must be at least 1")]
    ZeroSize,
    #[error("burning probability {0} is outside (0, 1]")]
    BurnProbability(f64),
    #[error("random walk gave up after {steps} steps with {collected} distinct nodes")]
    StepCap { steps: u64, collected: usize },
    #[error("acquaintance sampling needs at least one edge")]
    NoEdges,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    Bfs,
    Dfs,
    Rw,
    Ffs,
    Ds,
    Sec,
    Xs,
    Acq,
}

impl Strategy {
    pub const ALL: [Strategy; 8] = [
        Strategy::Bfs,
        Strategy::Dfs,
        Strategy::Rw,
        Strategy::Ffs,
        Strategy::Ds,
        Strategy::Sec,
        Strategy::Xs,
        Strategy::Acq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Bfs => "bfs",
            Strategy::Dfs => "dfs",
            Strategy::Rw => "rw",
            Strategy::Ffs => "ffs",
            Strategy::Ds => "ds",
            Strategy::Sec => "sec",
            Strategy::Xs => "xs",
            Strategy::Acq => "acq",
        }
    }

    /// Position in [`Strategy::ALL`]; stable across releases.
    pub fn index(self) -> usize {
        Strategy::ALL.iter().position(|&s| s == self).unwrap()
    }

    pub fn is_link_trace(self) -> bool {
        self != Strategy::Acq
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
#[error("unknown strategy {0:?} (expected one of bfs, dfs, rw, ffs, ds, sec, xs, acq)")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .iter()
            .copied()
            .find(|st| st.name() == s)
            .ok_or_else(|| UnknownStrategy(s.to_owned()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    pub strategy: Strategy,
    /// Forest fire burning probability.
    pub burn_probability: f64,
    /// Random walk aborts after this many steps.
    pub rw_step_cap: u64,
}

impl SamplerConfig {
    pub fn new(strategy: Strategy) -> Self {
        SamplerConfig {
            strategy,
            burn_probability: DEFAULT_BURN_PROBABILITY,
            rw_step_cap: DEFAULT_RW_STEP_CAP,
        }
    }

    pub fn with_burn_probability(mut self, p: f64) -> Self {
        self.burn_probability = p;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleStatus {
    Complete,
    /// Fewer than the requested number of nodes were reachable.
    Exhausted,
}

/// Nodes in selection order plus O(1) membership.
#[derive(Clone, Debug)]
pub struct Sample {
    trace: Vec<NodeId>,
    members: NodeSet,
    target: usize,
    status: SampleStatus,
    /// Walk steps for RW, node draws for ACQ, selections otherwise.
    draws: u64,
    /// Distinct nodes whose adjacency the strategy had to inspect.
    touched: usize,
}

impl Sample {
    pub(crate) fn new(n: usize, target: usize) -> Self {
        Sample {
            trace: Vec::with_capacity(target.min(n)),
            members: NodeSet::new(n),
            target,
            status: SampleStatus::Complete,
            draws: 0,
            touched: 0,
        }
    }

    /// Returns false if `v` was already sampled.
    pub(crate) fn push(&mut self, v: NodeId) -> bool {
        if self.members.insert(v) {
            self.trace.push(v);
            true
        } else {
            false
        }
    }

    pub(crate) fn is_full(&self) -> bool {
        self.trace.len() >= self.target
    }

    pub(crate) fn finish(mut self, draws: u64, touched: usize) -> Self {
        if self.trace.len() < self.target {
            self.status = SampleStatus::Exhausted;
        }
        self.draws = draws;
        self.touched = touched;
        self
    }

    pub fn trace(&self) -> &[NodeId] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<NodeId> {
        self.trace
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.contains(v)
    }

    pub fn len(&self) -> usize {
        self.trace.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trace.is_empty()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn status(&self) -> SampleStatus {
        self.status
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn touched(&self) -> usize {
        self.touched
    }
}

pub(crate) fn check_request(g: &Graph, seed: NodeId, k: usize) -> Result<(), SampleError> {
    g.check_node(seed)?;
    if k == 0 {
        return Err(SampleError::ZeroSize);
    }
    Ok(())
}

/// Runs `cfg.strategy` from `seed` until `k` nodes are collected. The seed is
/// ignored by acquaintance sampling.
pub fn sample<R: Rng + ?Sized>(
    g: &Graph,
    seed: NodeId,
    k: usize,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<Sample, SampleError> {
    match cfg.strategy {
        Strategy::Bfs => sample_bfs(g, seed, k),
        Strategy::Dfs => sample_dfs(g, seed, k),
        Strategy::Rw => sample_rw(g, seed, k, cfg.rw_step_cap, rng),
        Strategy::Ffs => sample_ffs(g, seed, k, cfg.burn_probability, rng),
        Strategy::Ds => sample_ds(g, seed, k, rng),
        Strategy::Sec => sample_sec(g, seed, k, rng),
        Strategy::Xs => sample_xs(g, seed, k, rng),
        Strategy::Acq => sample_acq(g, k, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
            assert_eq!(Strategy::ALL[s.index()], s);
        }
        assert!("BFS".parse::<Strategy>().is_err());
    }

    #[test]
    fn default_burn_probability() {
        assert_eq!(SamplerConfig::new(Strategy::Ffs).burn_probability, 0.7);
    }
}
