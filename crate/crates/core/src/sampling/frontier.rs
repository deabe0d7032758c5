use rand::Rng;

use crate::graph::{Graph, NodeId, NodeSet};

const ABSENT: usize = usize::MAX;

/// Integer-keyed max priority queue with O(1) insert, remove and key change,
/// and uniform random selection among the maximal-key entries.
#[derive(Clone, Debug)]
pub(crate) struct BucketQueue {
    buckets: Vec<Vec<NodeId>>,
    slot: Vec<usize>,
    key: Vec<usize>,
    top: usize,
    len: usize,
}

impl BucketQueue {
    pub(crate) fn new(capacity: usize) -> Self {
        BucketQueue {
            buckets: vec![Vec::new()],
            slot: vec![ABSENT; capacity],
            key: vec![0; capacity],
            top: 0,
            len: 0,
        }
    }

    pub(crate) fn insert(&mut self, v: NodeId, key: usize) {
        debug_assert_eq!(self.slot[v], ABSENT);
        if key >= self.buckets.len() {
            self.buckets.resize_with(key + 1, Vec::new);
        }
        self.slot[v] = self.buckets[key].len();
        self.buckets[key].push(v);
        self.key[v] = key;
        self.top = self.top.max(key);
        self.len += 1;
    }

    pub(crate) fn remove(&mut self, v: NodeId) -> bool {
        let idx = self.slot[v];
        if idx == ABSENT {
            return false;
        }
        let bucket = &mut self.buckets[self.key[v]];
        bucket.swap_remove(idx);
        if let Some(&moved) = bucket.get(idx) {
            self.slot[moved] = idx;
        }
        self.slot[v] = ABSENT;
        self.len -= 1;
        true
    }

    pub(crate) fn update(&mut self, v: NodeId, key: usize) {
        if self.slot[v] != ABSENT && self.key[v] != key {
            self.remove(v);
            self.insert(v, key);
        }
    }

    fn settle(&mut self) {
        while self.top > 0 && self.buckets[self.top].is_empty() {
            self.top -= 1;
        }
    }

    /// Entries sharing the current maximal key.
    pub(crate) fn max_bucket(&mut self) -> &[NodeId] {
        self.settle();
        &self.buckets[self.top]
    }

    pub(crate) fn pick_max<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<NodeId> {
        if self.len == 0 {
            return None;
        }
        let bucket = self.max_bucket();
        let v = if bucket.len() == 1 {
            bucket[0]
        } else {
            bucket[rng.gen_range(0..bucket.len())]
        };
        Some(v)
    }
}

/// Which frontier score drives greedy selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreKind {
    /// Degree in the full graph.
    Degree,
    /// Number of edges from the current sample.
    SampleEdges,
    /// Number of neighbors outside `S ∪ N(S)`.
    Expansion,
}

/// Incrementally maintained neighborhood `N(S)` of a growing sample `S`.
///
/// Both the sample-edge count and the expansion score are kept current for
/// every frontier node, whatever [`ScoreKind`] orders the selection queue.
#[derive(Clone, Debug)]
pub struct Frontier<'g> {
    graph: &'g Graph,
    kind: ScoreKind,
    in_sample: NodeSet,
    in_frontier: NodeSet,
    // S ∪ N(S)
    covered: NodeSet,
    sec: Vec<usize>,
    xs: Vec<usize>,
    queue: BucketQueue,
    scratch: Vec<NodeId>,
}

impl<'g> Frontier<'g> {
    pub fn new(graph: &'g Graph, seed: NodeId, kind: ScoreKind) -> Self {
        let n = graph.node_count();
        let mut frontier = Frontier {
            graph,
            kind,
            in_sample: NodeSet::new(n),
            in_frontier: NodeSet::new(n),
            covered: NodeSet::new(n),
            sec: vec![0; n],
            xs: vec![0; n],
            queue: BucketQueue::new(n),
            scratch: Vec::new(),
        };
        frontier.covered.insert(seed);
        frontier.add(seed);
        frontier
    }

    fn key_of(&self, v: NodeId) -> usize {
        match self.kind {
            ScoreKind::Degree => self.graph.deg(v),
            ScoreKind::SampleEdges => self.sec[v],
            ScoreKind::Expansion => self.xs[v],
        }
    }

    /// Moves `u` from the frontier into the sample.
    pub fn add(&mut self, u: NodeId) {
        debug_assert!(self.in_frontier.contains(u) || self.in_sample.is_empty());
        let g = self.graph;
        if self.in_frontier.remove(u) {
            self.queue.remove(u);
        }
        self.in_sample.insert(u);

        for &w in g.adjacency(u) {
            if !self.in_sample.contains(w) {
                self.sec[w] += 1;
                if self.kind == ScoreKind::SampleEdges && self.in_frontier.contains(w) {
                    self.queue.update(w, self.sec[w]);
                }
            }
        }

        let mut fresh = std::mem::take(&mut self.scratch);
        fresh.clear();
        fresh.extend(g.adjacency(u).iter().copied().filter(|&w| self.covered.insert(w)));

        // each freshly covered node stops being novel for the old frontier
        for &w in &fresh {
            for &x in g.adjacency(w) {
                if self.in_frontier.contains(x) {
                    self.xs[x] -= 1;
                    if self.kind == ScoreKind::Expansion {
                        self.queue.update(x, self.xs[x]);
                    }
                }
            }
        }
        for &w in &fresh {
            self.xs[w] = g.adjacency(w).iter().filter(|&&y| !self.covered.contains(y)).count();
            self.in_frontier.insert(w);
            let key = self.key_of(w);
            self.queue.insert(w, key);
        }
        self.scratch = fresh;
    }

    /// A frontier node of maximal score, ties broken uniformly at random.
    pub fn pick<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<NodeId> {
        self.queue.pick_max(rng)
    }

    /// All frontier nodes currently sharing the maximal score.
    pub fn best_candidates(&mut self) -> Vec<NodeId> {
        if self.in_frontier.is_empty() {
            return Vec::new();
        }
        let mut best = self.queue.max_bucket().to_vec();
        best.sort_unstable();
        best
    }

    pub fn is_empty(&self) -> bool {
        self.in_frontier.is_empty()
    }

    pub fn len(&self) -> usize {
        self.in_frontier.len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.in_frontier.contains(v)
    }

    pub fn in_sample(&self, v: NodeId) -> bool {
        self.in_sample.contains(v)
    }

    /// `|S ∪ N(S)|`
    pub fn covered_count(&self) -> usize {
        self.covered.len()
    }

    /// Frontier nodes in ascending order.
    pub fn nodes(&self) -> Vec<NodeId> {
        (0..self.graph.node_count())
            .filter(|&v| self.in_frontier.contains(v))
            .collect()
    }

    /// Edges from the sample to `v`.
    pub fn sec_score(&self, v: NodeId) -> usize {
        self.sec[v]
    }

    /// `|N({v}) − (N(S) ∪ S)|`
    pub fn xs_score(&self, v: NodeId) -> usize {
        self.xs[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::toy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bucket_queue_tracks_maximum() {
        let mut q = BucketQueue::new(5);
        q.insert(0, 2);
        q.insert(1, 4);
        q.insert(2, 4);
        assert_eq!(q.max_bucket().len(), 2);
        q.remove(1);
        q.update(2, 1);
        assert_eq!(q.max_bucket(), &[0]);
        q.remove(0);
        assert_eq!(q.max_bucket(), &[2]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(q.pick_max(&mut rng), Some(2));
        q.remove(2);
        assert_eq!(q.pick_max(&mut rng), None);
    }

    #[test]
    fn toy_scores_after_seed() {
        let g = toy();
        let f = Frontier::new(&g, 0, ScoreKind::Expansion);
        assert_eq!(f.nodes(), vec![1, 2]);
        assert_eq!(f.xs_score(1), 0);
        assert_eq!(f.xs_score(2), 1);
        assert_eq!(f.sec_score(1), 1);
        assert_eq!(f.sec_score(2), 1);
    }

    #[test]
    fn toy_scores_after_two_additions() {
        let g = toy();
        let mut f = Frontier::new(&g, 0, ScoreKind::SampleEdges);
        f.add(2);
        assert_eq!(f.nodes(), vec![1, 3]);
        assert_eq!(f.sec_score(1), 2);
        assert_eq!(f.sec_score(3), 1);
        assert_eq!(f.xs_score(3), 2);
        assert_eq!(f.best_candidates(), vec![1]);
        assert_eq!(f.covered_count(), 4);
    }
}
