use rand::Rng;

use super::{Sample, SampleError};
use crate::graph::Graph;

/// Acquaintance sampling: draw a node uniformly from `V`, then one of its
/// neighbors uniformly, and keep the neighbor if it is new. Not link-trace.
///
/// Isolated draws count towards [`Sample::draws`] but add nothing.
pub fn sample_acq<R: Rng + ?Sized>(g: &Graph, k: usize, rng: &mut R) -> Result<Sample, SampleError> {
    if k == 0 {
        return Err(SampleError::ZeroSize);
    }
    if g.edge_count() == 0 {
        return Err(SampleError::NoEdges);
    }
    let n = g.node_count();
    // every node with a neighbor is some node's neighbor
    let reachable = (0..n).filter(|&v| g.deg(v) > 0).count();
    let goal = k.min(reachable);
    let mut sample = Sample::new(n, k);
    let mut draws = 0u64;
    while sample.len() < goal {
        let x = rng.gen_range(0..n);
        draws += 1;
        let adj = g.adjacency(x);
        if adj.is_empty() {
            continue;
        }
        sample.push(adj[rng.gen_range(0..adj.len())]);
    }
    let len = sample.len();
    Ok(sample.finish(draws, len))
}
