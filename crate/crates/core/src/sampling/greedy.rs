use rand::Rng;

use super::frontier::{Frontier, ScoreKind};
use super::{check_request, Sample, SampleError};
use crate::graph::{Graph, NodeId};

/// Degree sampling: the frontier node with the highest degree in `g`.
pub fn sample_ds<R: Rng + ?Sized>(g: &Graph, seed: NodeId, k: usize, rng: &mut R) -> Result<Sample, SampleError> {
    greedy(g, seed, k, ScoreKind::Degree, rng)
}

/// Sample edge count: the frontier node with the most edges from the sample.
pub fn sample_sec<R: Rng + ?Sized>(g: &Graph, seed: NodeId, k: usize, rng: &mut R) -> Result<Sample, SampleError> {
    greedy(g, seed, k, ScoreKind::SampleEdges, rng)
}

/// Expansion sampling: the frontier node contributing the most neighbors
/// outside `S ∪ N(S)`.
pub fn sample_xs<R: Rng + ?Sized>(g: &Graph, seed: NodeId, k: usize, rng: &mut R) -> Result<Sample, SampleError> {
    greedy(g, seed, k, ScoreKind::Expansion, rng)
}

fn greedy<R: Rng + ?Sized>(
    g: &Graph,
    seed: NodeId,
    k: usize,
    kind: ScoreKind,
    rng: &mut R,
) -> Result<Sample, SampleError> {
    check_request(g, seed, k)?;
    let mut sample = Sample::new(g.node_count(), k);
    let mut frontier = Frontier::new(g, seed, kind);
    sample.push(seed);
    while !sample.is_full() {
        let Some(v) = frontier.pick(rng) else {
            break;
        };
        frontier.add(v);
        sample.push(v);
    }
    // SEC only ever reads adjacency of sampled nodes; DS and XS query the
    // whole frontier as well.
    let touched = match kind {
        ScoreKind::SampleEdges => sample.len(),
        ScoreKind::Degree | ScoreKind::Expansion => frontier.covered_count(),
    };
    let len = sample.len() as u64;
    Ok(sample.finish(len, touched))
}
