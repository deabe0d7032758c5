//! Community partitions: label propagation, greedy modularity merging, and
//! partition files.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::{Graph, IdMap, NodeId};
use crate::scalar::Scalar;

pub const DEFAULT_RAK_SWEEPS: usize = 100;

#[derive(Debug, Error)]
pub enum CommunityError {
    #[error("partition must cover at least one node")]
    Empty,
    #[error("graph has no edges")]
    NoEdges,
    #[error("partition covers {got} nodes but the graph has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("node {0:?} is not in the graph")]
    UnknownNode(String),
    #[error("node {0:?} has no community")]
    MissingNode(String),
    #[error("node {node:?} is assigned to both {first:?} and {second:?}")]
    Conflict {
        node: String,
        first: String,
        second: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Total assignment of nodes to dense community ids `0..c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Relabels arbitrary community labels densely in order of first
    /// appearance.
    pub fn from_assignment(labels: Vec<usize>) -> Result<Self, CommunityError> {
        if labels.is_empty() {
            return Err(CommunityError::Empty);
        }
        let mut dense = HashMap::new();
        let assignment = labels
            .into_iter()
            .map(|l| {
                let next = dense.len();
                *dense.entry(l).or_insert(next)
            })
            .collect();
        Ok(Partition {
            assignment,
            count: dense.len(),
        })
    }

    pub fn singletons(n: usize) -> Result<Self, CommunityError> {
        Self::from_assignment((0..n).collect())
    }

    pub fn community_of(&self, v: NodeId) -> Option<usize> {
        self.assignment.get(v).copied()
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    pub fn node_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Members of each community, ascending.
    pub fn communities(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Community contents as a canonical sorted list of sorted sets, for
    /// comparing partitions up to relabeling.
    pub fn canonical(&self) -> Vec<Vec<NodeId>> {
        let mut c = self.communities();
        c.sort();
        c
    }

    /// `raw_node_label community_id` per line.
    pub fn write<W: Write>(&self, mut out: W, labels: &IdMap) -> io::Result<()> {
        for (v, &c) in self.assignment.iter().enumerate() {
            writeln!(out, "{} {c}", labels.label(v))?;
        }
        Ok(())
    }
}

/// Reads `node community` lines, resolving node labels through `labels`.
/// Every node of the mapping must be assigned exactly once.
pub fn load_partition<R: BufRead>(source: R, labels: &IdMap) -> Result<Partition, CommunityError> {
    let mut community: Vec<Option<String>> = vec![None; labels.len()];
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(node), Some(comm)) = (tokens.next(), tokens.next()) else {
            return Err(CommunityError::Parse {
                line: i + 1,
                reason: format!("expected node and community, found {trimmed:?}"),
            });
        };
        let v = labels
            .get(node)
            .ok_or_else(|| CommunityError::UnknownNode(node.to_owned()))?;
        match &community[v] {
            Some(prev) if prev != comm => {
                return Err(CommunityError::Conflict {
                    node: node.to_owned(),
                    first: prev.clone(),
                    second: comm.to_owned(),
                })
            }
            _ => community[v] = Some(comm.to_owned()),
        }
    }
    let mut dense: HashMap<String, usize> = HashMap::new();
    let mut assignment = Vec::with_capacity(community.len());
    for (v, c) in community.into_iter().enumerate() {
        let c = c.ok_or_else(|| CommunityError::MissingNode(labels.label(v).to_owned()))?;
        let next = dense.len();
        assignment.push(*dense.entry(c).or_insert(next));
    }
    Partition::from_assignment(assignment)
}

/// Newman modularity `Σ_c [e_c/m − (d_c/2m)²]`.
pub fn modularity<T: Scalar>(g: &Graph, part: &Partition) -> Result<T, CommunityError> {
    let m = g.edge_count() as i128;
    if m == 0 {
        return Err(CommunityError::NoEdges);
    }
    if part.node_count() != g.node_count() {
        return Err(CommunityError::SizeMismatch {
            expected: g.node_count(),
            got: part.node_count(),
        });
    }
    let mut inner = vec![0i128; part.community_count()];
    let mut volume = vec![0i128; part.community_count()];
    for v in 0..g.node_count() {
        volume[part.assignment[v]] += g.deg(v) as i128;
    }
    for (u, v) in g.edges() {
        if part.assignment[u] == part.assignment[v] {
            inner[part.assignment[u]] += 1;
        }
    }
    // scaled by 4m²
    let scaled: i128 = inner.iter().zip(&volume).map(|(&e, &d)| 4 * m * e - d * d).sum();
    Ok(T::from_ratio(scaled, 4 * m * m))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RakOutcome {
    pub partition: Partition,
    pub sweeps: usize,
    /// False when the sweep cap was hit before every node held a majority label.
    pub converged: bool,
}

/// Asynchronous label propagation.
///
/// Every node starts with its own label. Each sweep visits the nodes in a
/// fresh random order; a node keeps its label if it is among the most
/// frequent labels of its neighbors and otherwise adopts one of those
/// uniformly at random. Stops after a sweep in which no label changed.
pub fn detect_rak<R: Rng + ?Sized>(g: &Graph, rng: &mut R, max_sweeps: usize) -> Result<RakOutcome, CommunityError> {
    let n = g.node_count();
    if n == 0 {
        return Err(CommunityError::Empty);
    }
    let mut label: Vec<usize> = (0..n).collect();
    let mut order: Vec<NodeId> = (0..n).filter(|&v| g.deg(v) > 0).collect();
    let mut counts = vec![0usize; n];
    let mut seen = Vec::new();
    let mut best = Vec::new();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_sweeps {
        sweeps += 1;
        order.shuffle(rng);
        let mut changed = false;
        for &v in &order {
            seen.clear();
            for &w in g.adjacency(v) {
                if counts[label[w]] == 0 {
                    seen.push(label[w]);
                }
                counts[label[w]] += 1;
            }
            let top = seen.iter().map(|&l| counts[l]).max().unwrap_or(0);
            best.clear();
            best.extend(seen.iter().copied().filter(|&l| counts[l] == top));
            for &l in &seen {
                counts[l] = 0;
            }
            if !best.contains(&label[v]) {
                best.sort_unstable();
                label[v] = best[rng.gen_range(0..best.len())];
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    Ok(RakOutcome {
        partition: Partition::from_assignment(label)?,
        sweeps,
        converged,
    })
}

/// One agglomeration step: community `absorbed` merged into `kept`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Merge {
    pub kept: usize,
    pub absorbed: usize,
    /// Modularity gain scaled by `4m²`.
    pub gain: i128,
}

/// Full greedy merge sequence with the modularity after each step.
#[derive(Clone, Debug)]
pub struct Dendrogram {
    pub merges: Vec<Merge>,
    /// Modularity scaled by `4m²` before any merge, then after each merge.
    pub scaled_modularity: Vec<i128>,
    /// Number of leading merges producing the best partition.
    pub best_len: usize,
    node_count: usize,
}

impl Dendrogram {
    /// Partition after applying the first `steps` merges.
    pub fn partition_after(&self, steps: usize) -> Partition {
        let mut parent: Vec<usize> = (0..self.node_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for m in &self.merges[..steps] {
            // community ids coincide with the smallest original member id
            parent[m.absorbed] = m.kept;
        }
        let labels = (0..self.node_count).map(|v| find(&mut parent, v)).collect();
        Partition::from_assignment(labels).expect("nonempty")
    }

    pub fn best(&self) -> Partition {
        self.partition_after(self.best_len)
    }
}

#[derive(PartialEq, Eq)]
struct Candidate {
    gain: i128,
    /// Community ids (smallest members) of the pair, ascending.
    key: (usize, usize),
    slots: (usize, usize),
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // largest gain first, then the smallest id pair
        self.gain
            .cmp(&other.gain)
            .then_with(|| Reverse(self.key).cmp(&Reverse(other.key)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy agglomerative modularity maximization.
///
/// Starting from singletons, repeatedly merges the pair of adjacent
/// communities with the largest modularity gain until no adjacent pair is
/// left; ties go to the smallest `(a, b)` pair of community ids, where a
/// community is identified by its smallest member. All arithmetic is exact.
pub fn cnm_dendrogram(g: &Graph) -> Result<Dendrogram, CommunityError> {
    cnm_merges(g, false)
}

/// With `stop_at_loss`, merging ends at the first negative best gain. From
/// then on every gain is a sum of non-positive terms, so modularity cannot
/// rise again and the best partition is already known.
///
/// Communities live in storage slots; a merge folds the slot with fewer
/// neighbors into the other. Heap entries are upper bounds on the current
/// gain: a merge only lowers the gains of pairs it does not touch, and pairs
/// it does touch get fresh entries. A popped entry is used only if it still
/// matches the current state, otherwise it is re-queued at its current value.
fn cnm_merges(g: &Graph, stop_at_loss: bool) -> Result<Dendrogram, CommunityError> {
    let n = g.node_count();
    let m = g.edge_count() as i128;
    if m == 0 {
        return Err(CommunityError::NoEdges);
    }
    // gain of merging i and j scaled by 4m²: 2·(2m·e_ij − d_i·d_j)
    let gain = |e: i128, di: i128, dj: i128| 2 * (2 * m * e - di * dj);

    let mut volume: Vec<i128> = (0..n).map(|v| g.deg(v) as i128).collect();
    let mut links: Vec<HashMap<usize, i128>> = (0..n)
        .map(|v| g.adjacency(v).iter().map(|&w| (w, 1)).collect())
        .collect();
    let mut id: Vec<usize> = (0..n).collect();
    let mut alive = vec![true; n];
    let candidate = |gain: i128, sa: usize, sb: usize, id: &[usize]| Candidate {
        gain,
        key: (id[sa].min(id[sb]), id[sa].max(id[sb])),
        slots: (sa, sb),
    };
    let mut heap: BinaryHeap<Candidate> = g
        .edges()
        .map(|(u, v)| candidate(gain(1, volume[u], volume[v]), u, v, &id))
        .collect();

    let mut q: i128 = -volume.iter().map(|d| d * d).sum::<i128>();
    let mut scaled_modularity = vec![q];
    let mut merges = Vec::new();
    let (mut best_q, mut best_len) = (q, 0);

    while let Some(c) = heap.pop() {
        let (sa, sb) = c.slots;
        if !alive[sa] || !alive[sb] {
            continue;
        }
        let e = *links[sa].get(&sb).expect("queued pairs stay adjacent");
        let current = candidate(gain(e, volume[sa], volume[sb]), sa, sb, &id);
        if current != c {
            if current < c {
                heap.push(current);
            }
            continue;
        }
        if stop_at_loss && c.gain < 0 {
            break;
        }
        let (big, small) = if links[sa].len() >= links[sb].len() {
            (sa, sb)
        } else {
            (sb, sa)
        };
        let moved = std::mem::take(&mut links[small]);
        for (&x, &e) in &moved {
            if x == big {
                continue;
            }
            let back = links[x].remove(&small).expect("symmetric links");
            debug_assert_eq!(back, e);
            *links[x].entry(big).or_insert(0) += e;
            *links[big].entry(x).or_insert(0) += e;
        }
        links[big].remove(&small);
        alive[small] = false;
        volume[big] += volume[small];
        id[big] = id[big].min(id[small]);

        q += c.gain;
        merges.push(Merge {
            kept: c.key.0,
            absorbed: c.key.1,
            gain: c.gain,
        });
        scaled_modularity.push(q);
        if q > best_q {
            best_q = q;
            best_len = merges.len();
        }

        for &x in moved.keys() {
            if x != big {
                let e = links[big][&x];
                heap.push(candidate(gain(e, volume[big], volume[x]), big, x, &id));
            }
        }
    }

    Ok(Dendrogram {
        merges,
        scaled_modularity,
        best_len,
        node_count: n,
    })
}

/// Partition of maximal modularity along the greedy merge sequence.
pub fn detect_cnm(g: &Graph) -> Result<Partition, CommunityError> {
    Ok(cnm_merges(g, true)?.best())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Q = BigRational;

    #[test]
    fn modularity_examples() {
        let t = toy();
        let one = Partition::from_assignment(vec![0; 6]).unwrap();
        assert_eq!(modularity::<Q>(&t, &one).unwrap(), Q::from_ratio(0, 1));
        let halves = Partition::from_assignment(vec![0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!(modularity::<Q>(&t, &halves).unwrap(), Q::from_ratio(5, 14));
        let single = Partition::singletons(3).unwrap();
        assert_eq!(modularity::<Q>(&triangle(), &single).unwrap(), Q::from_ratio(-1, 3));
        let edgeless = Graph::from_edges(2, []).unwrap();
        assert!(matches!(
            modularity::<Q>(&edgeless, &Partition::singletons(2).unwrap()),
            Err(CommunityError::NoEdges)
        ));
    }

    #[test]
    fn modularity_ignores_labels() {
        let t = toy();
        let a = Partition::from_assignment(vec![7, 7, 7, 3, 3, 3]).unwrap();
        let b = Partition::from_assignment(vec![1, 1, 1, 0, 0, 0]).unwrap();
        assert_eq!(modularity::<Q>(&t, &a).unwrap(), modularity::<Q>(&t, &b).unwrap());
    }

    #[test]
    fn rak_examples() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = detect_rak(&disjoint_cliques(2, 3), &mut rng, DEFAULT_RAK_SWEEPS).unwrap();
            assert!(r.converged);
            assert_eq!(r.partition.canonical(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
            let r = detect_rak(&complete(5), &mut rng, DEFAULT_RAK_SWEEPS).unwrap();
            assert_eq!(r.partition.community_count(), 1);
        }
        let lone = Graph::from_edges(1, []).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = detect_rak(&lone, &mut rng, DEFAULT_RAK_SWEEPS).unwrap();
        assert_eq!(r.partition.community_count(), 1);
    }

    #[test]
    fn rak_isolated_nodes_stay_alone() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = detect_rak(&g, &mut rng, DEFAULT_RAK_SWEEPS).unwrap();
        assert_eq!(r.partition.canonical(), vec![vec![0, 1, 2], vec![3], vec![4]]);
    }

    #[test]
    fn cnm_examples() {
        assert_eq!(
            detect_cnm(&toy()).unwrap().canonical(),
            vec![vec![0, 1, 2], vec![3, 4, 5]]
        );
        assert_eq!(detect_cnm(&complete(5)).unwrap().community_count(), 1);
        assert_eq!(
            detect_cnm(&disjoint_cliques(2, 4)).unwrap().canonical(),
            vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]
        );
    }

    #[test]
    fn cnm_modularity_trace_is_consistent() {
        let t = toy();
        let d = cnm_dendrogram(&t).unwrap();
        let four_m2 = 4 * 49;
        for (steps, &scaled) in d.scaled_modularity.iter().enumerate() {
            let p = d.partition_after(steps);
            assert_eq!(modularity::<Q>(&t, &p).unwrap(), Q::from_ratio(scaled, four_m2));
        }
        assert_eq!(d.merges.len(), 5);
    }

    #[test]
    fn partition_file_round_trip() {
        let map = IdMap::identity(3);
        let p = load_partition("0 a\n1 a\n# c\n2 b\n".as_bytes(), &map).unwrap();
        assert_eq!(p.community_count(), 2);
        let mut buf = Vec::new();
        p.write(&mut buf, &map).unwrap();
        let again = load_partition(buf.as_slice(), &map).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn partition_file_errors() {
        let map = IdMap::identity(3);
        match load_partition("0 a\n1 a\n".as_bytes(), &map) {
            Err(CommunityError::MissingNode(node)) => assert_eq!(node, "2"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            load_partition("0 a\n1 a\n2 b\n1 b\n".as_bytes(), &map),
            Err(CommunityError::Conflict { .. })
        ));
        assert!(matches!(
            load_partition("0 a\n1 a\n2 b\nq b\n".as_bytes(), &map),
            Err(CommunityError::UnknownNode(_))
        ));
        assert!(matches!(
            load_partition("0\n".as_bytes(), &map),
            Err(CommunityError::Parse { line: 1, .. })
        ));
    }
}
