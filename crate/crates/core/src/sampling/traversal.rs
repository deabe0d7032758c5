use std::collections::VecDeque;

use rand::{Rng, RngCore};

use super::{check_request, Sample, SampleError};
use crate::graph::{Graph, NodeId, NodeSet};

/// Breadth-first crawl; neighbors are discovered in ascending id order.
pub fn sample_bfs(g: &Graph, seed: NodeId, k: usize) -> Result<Sample, SampleError> {
    check_request(g, seed, k)?;
    Ok(forest_fire(g, seed, k, None))
}

/// Forest fire: a BFS in which each unvisited neighbor of the node being
/// expanded is burned with probability `p`. When the fire dies out early it
/// is rekindled at a uniformly chosen sampled node that still has unvisited
/// neighbors.
pub fn sample_ffs<R: Rng + ?Sized>(
    g: &Graph,
    seed: NodeId,
    k: usize,
    p: f64,
    rng: &mut R,
) -> Result<Sample, SampleError> {
    check_request(g, seed, k)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(SampleError::BurnProbability(p));
    }
    let mut rng = rng;
    Ok(forest_fire(g, seed, k, Some((p, &mut rng as &mut dyn RngCore))))
}

fn forest_fire(g: &Graph, seed: NodeId, k: usize, mut burn: Option<(f64, &mut dyn RngCore)>) -> Sample {
    let mut sample = Sample::new(g.node_count(), k);
    let mut queue = VecDeque::new();
    sample.push(seed);
    queue.push_back(seed);
    while !sample.is_full() {
        let Some(u) = queue.pop_front() else {
            let Some((_, rng)) = burn.as_mut() else {
                break;
            };
            let embers: Vec<NodeId> = sample
                .trace()
                .iter()
                .copied()
                .filter(|&v| g.adjacency(v).iter().any(|&w| !sample.contains(w)))
                .collect();
            if embers.is_empty() {
                break;
            }
            queue.push_back(embers[rng.gen_range(0..embers.len())]);
            continue;
        };
        for &w in g.adjacency(u) {
            if sample.contains(w) {
                continue;
            }
            let burned = match burn.as_mut() {
                Some((p, rng)) if *p < 1.0 => rng.gen_bool(*p),
                _ => true,
            };
            if burned {
                sample.push(w);
                queue.push_back(w);
                if sample.is_full() {
                    break;
                }
            }
        }
    }
    let len = sample.len();
    sample.finish(len as u64, len)
}

/// Depth-first crawl; from the most recently visited node with unvisited
/// neighbors, the smallest-id unvisited neighbor is taken next.
pub fn sample_dfs(g: &Graph, seed: NodeId, k: usize) -> Result<Sample, SampleError> {
    check_request(g, seed, k)?;
    let mut sample = Sample::new(g.node_count(), k);
    sample.push(seed);
    // (node, next neighbor position to try)
    let mut stack = vec![(seed, 0usize)];
    while !sample.is_full() {
        let Some(top) = stack.last_mut() else {
            break;
        };
        let (u, cursor) = *top;
        let adj = g.adjacency(u);
        match (cursor..adj.len()).find(|&j| !sample.contains(adj[j])) {
            Some(j) => {
                top.1 = j + 1;
                sample.push(adj[j]);
                stack.push((adj[j], 0));
            }
            None => {
                stack.pop();
            }
        }
    }
    let len = sample.len();
    Ok(sample.finish(len as u64, len))
}

/// Simple random walk; a node joins the trace on its first visit only.
pub fn sample_rw<R: Rng + ?Sized>(
    g: &Graph,
    seed: NodeId,
    k: usize,
    step_cap: u64,
    rng: &mut R,
) -> Result<Sample, SampleError> {
    check_request(g, seed, k)?;
    let reachable = component_size(g, seed, k);
    let goal = k.min(reachable);
    let mut sample = Sample::new(g.node_count(), k);
    sample.push(seed);
    let mut current = seed;
    let mut steps = 0u64;
    while sample.len() < goal {
        if steps >= step_cap {
            return Err(SampleError::StepCap {
                steps,
                collected: sample.len(),
            });
        }
        let adj = g.adjacency(current);
        current = adj[rng.gen_range(0..adj.len())];
        steps += 1;
        sample.push(current);
    }
    let len = sample.len();
    Ok(sample.finish(steps, len))
}

/// Size of `seed`'s component, counting no further than `limit`.
fn component_size(g: &Graph, seed: NodeId, limit: usize) -> usize {
    let mut seen = NodeSet::new(g.node_count());
    seen.insert(seed);
    let mut queue = vec![seed];
    let mut head = 0;
    while head < queue.len() && queue.len() < limit {
        let u = queue[head];
        head += 1;
        for &w in g.adjacency(u) {
            if seen.insert(w) {
                queue.push(w);
            }
        }
    }
    queue.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::sampling::SampleStatus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bfs_on_path_and_toy() {
        assert_eq!(sample_bfs(&path(4), 0, 3).unwrap().trace(), &[0, 1, 2]);
        assert_eq!(sample_bfs(&toy(), 0, 3).unwrap().trace(), &[0, 1, 2]);
        assert_eq!(sample_bfs(&toy(), 4, 1).unwrap().trace(), &[4]);
    }

    #[test]
    fn dfs_on_path_and_star() {
        assert_eq!(sample_dfs(&path(4), 0, 3).unwrap().trace(), &[0, 1, 2]);
        // from the center every leaf is a dead end, so DFS returns to the center
        assert_eq!(sample_dfs(&star(4), 0, 3).unwrap().trace(), &[0, 1, 2]);
        assert_eq!(sample_dfs(&toy(), 5, 1).unwrap().trace(), &[5]);
    }

    #[test]
    fn dfs_backtracks() {
        // 0-1, 1-2, 0-3: from 2 the walk backtracks through 1 to 0
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 3)]).unwrap();
        assert_eq!(sample_dfs(&g, 0, 4).unwrap().trace(), &[0, 1, 2, 3]);
    }

    #[test]
    fn rw_exhausts_small_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s = sample_rw(&path(3), 1, 3, 1_000, &mut rng).unwrap();
            let mut m = s.trace().to_vec();
            m.sort();
            assert_eq!(m, vec![0, 1, 2]);
            assert_eq!(s.trace()[0], 1);
            let t = sample_rw(&triangle(), 0, 3, 1_000, &mut rng).unwrap();
            assert_eq!(t.len(), 3);
        }
    }

    #[test]
    fn rw_reports_exhaustion_instead_of_spinning() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = sample_rw(&g, 0, 5, 1_000_000, &mut rng).unwrap();
        assert_eq!(s.status(), SampleStatus::Exhausted);
        assert_eq!(s.len(), 3);
        let lone = Graph::from_edges(2, []).unwrap();
        let s = sample_rw(&lone, 0, 2, 10, &mut rng).unwrap();
        assert_eq!(s.trace(), &[0]);
    }

    #[test]
    fn rw_step_cap_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = sample_rw(&path(50), 0, 50, 5, &mut rng).unwrap_err();
        assert!(matches!(err, SampleError::StepCap { steps: 5, .. }));
    }

    #[test]
    fn ffs_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(sample_ffs(&toy(), 3, 1, 0.7, &mut rng).unwrap().trace(), &[3]);
        for _ in 0..50 {
            let s = sample_ffs(&star(4), 0, 5, 0.7, &mut rng).unwrap();
            assert_eq!(s.trace()[0], 0);
            assert_eq!(s.len(), 5);
            assert!(s.trace().iter().all(|&v| v <= 4));
        }
        assert!(sample_ffs(&toy(), 0, 3, 0.0, &mut rng).is_err());
        assert!(sample_ffs(&toy(), 0, 3, 1.5, &mut rng).is_err());
    }

    #[test]
    fn ffs_rekindles_until_component_is_exhausted() {
        let g = Graph::from_edges(7, [(0, 1), (1, 2), (2, 3), (4, 5)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let s = sample_ffs(&g, 0, 7, 0.3, &mut rng).unwrap();
            assert_eq!(s.status(), SampleStatus::Exhausted);
            assert_eq!(s.len(), 4);
        }
    }

    #[test]
    fn invalid_requests() {
        assert!(matches!(sample_bfs(&toy(), 9, 2), Err(SampleError::InvalidSeed(_))));
        assert!(matches!(sample_dfs(&toy(), 0, 0), Err(SampleError::ZeroSize)));
    }
}
