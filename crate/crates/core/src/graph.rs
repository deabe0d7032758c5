//! Immutable undirected simple graphs in compressed sparse row form.

use std::collections::{HashMap, VecDeque};
use std::io::{self, BufRead, Write};

use thiserror::Error;

/// Dense node identifier in `0..n`.
pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("edge list contains no edges")]
    Empty,
    #[error("graph has no nodes")]
    NoNodes,
    #[error("node {node} out of range for graph with {n} nodes")]
    InvalidNode { node: NodeId, n: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Undirected simple graph. Neighbor lists are sorted, distinct and never
/// contain the node itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Graph {
    /// Builds a graph on `n` nodes. Edges are symmetrized, self-loops are
    /// dropped and duplicates collapsed.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut pairs = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::InvalidNode { node: w, n });
                }
            }
            if u != v {
                pairs.push((u, v));
                pairs.push((v, u));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, v)| v).collect();
        Ok(Graph { offsets, targets })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    /// Neighbor slice of `v`. Panics when `v` is out of range.
    #[inline]
    pub fn adjacency(&self, v: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Degree of `v`. Panics when `v` is out of range.
    #[inline]
    pub fn deg(&self, v: NodeId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidNode {
                node: v,
                n: self.node_count(),
            })
        }
    }

    pub fn neighbors(&self, v: NodeId) -> Result<&[NodeId], GraphError> {
        self.check_node(v)?;
        Ok(self.adjacency(v))
    }

    pub fn degree(&self, v: NodeId) -> Result<usize, GraphError> {
        self.check_node(v)?;
        Ok(self.deg(v))
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.deg(v)).collect()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.adjacency(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// `N(S)`: nodes outside `s` adjacent to at least one member, sorted.
    pub fn neighborhood(&self, s: &[NodeId]) -> Vec<NodeId> {
        let mut in_s = NodeSet::new(self.node_count());
        for &v in s {
            in_s.insert(v);
        }
        let mut seen = NodeSet::new(self.node_count());
        let mut out = Vec::new();
        for &v in s {
            for &w in self.adjacency(v) {
                if !in_s.contains(w) && seen.insert(w) {
                    out.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Subgraph on `s` keeping exactly the edges with both endpoints in `s`.
    pub fn induced_subgraph(&self, s: &[NodeId]) -> InducedSubgraph {
        let mut members = s.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut local = HashMap::with_capacity(members.len());
        for (i, &v) in members.iter().enumerate() {
            local.insert(v, i);
        }
        let mut edges = Vec::new();
        for (i, &v) in members.iter().enumerate() {
            for &w in self.adjacency(v) {
                if let Some(&j) = local.get(&w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        let graph = Graph::from_edges(members.len(), edges).expect("local ids are in range");
        InducedSubgraph { members, graph }
    }

    /// Component label per node; labels are assigned in order of the smallest
    /// node of each component.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &w in self.adjacency(u) {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Nodes of the component containing `v`, sorted.
    pub fn component_of(&self, v: NodeId) -> Vec<NodeId> {
        let mut seen = NodeSet::new(self.node_count());
        seen.insert(v);
        let mut out = vec![v];
        let mut head = 0;
        while head < out.len() {
            let u = out[head];
            head += 1;
            for &w in self.adjacency(u) {
                if seen.insert(w) {
                    out.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// A maximum-cardinality connected component, sorted. Ties go to the
    /// component holding the smallest node id.
    pub fn largest_component(&self) -> Result<Vec<NodeId>, GraphError> {
        if self.is_empty() {
            return Err(GraphError::NoNodes);
        }
        let (label, count) = self.component_labels();
        let mut sizes = vec![0usize; count];
        for &l in &label {
            sizes[l] += 1;
        }
        // labels follow smallest member order, so the first maximum wins ties
        let mut best = 0;
        for (l, &size) in sizes.iter().enumerate() {
            if size > sizes[best] {
                best = l;
            }
        }
        Ok((0..self.node_count()).filter(|&v| label[v] == best).collect())
    }

    /// Writes one `u v` line per edge, using `labels` when given.
    pub fn write_edge_list<W: Write>(&self, mut out: W, labels: Option<&IdMap>) -> io::Result<()> {
        for (u, v) in self.edges() {
            match labels {
                Some(map) => writeln!(out, "{} {}", map.label(u), map.label(v))?,
                None => writeln!(out, "{u} {v}")?,
            }
        }
        Ok(())
    }
}

/// Subgraph induced by a node set. Local node `i` corresponds to
/// `members[i]` in the parent graph.
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub members: Vec<NodeId>,
    pub graph: Graph,
}

impl InducedSubgraph {
    pub fn node_count(&self) -> usize {
        self.members.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Edges in parent ids.
    pub fn parent_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.graph.edges().map(move |(a, b)| (self.members[a], self.members[b]))
    }
}

/// Fixed-capacity membership bitmap over node ids.
#[derive(Clone, Debug)]
pub struct NodeSet {
    bits: Vec<bool>,
    len: usize,
}

impl NodeSet {
    pub fn new(capacity: usize) -> Self {
        NodeSet {
            bits: vec![false; capacity],
            len: 0,
        }
    }

    /// Returns true if `v` was not already present.
    #[inline]
    pub fn insert(&mut self, v: NodeId) -> bool {
        if self.bits[v] {
            false
        } else {
            self.bits[v] = true;
            self.len += 1;
            true
        }
    }

    #[inline]
    pub fn remove(&mut self, v: NodeId) -> bool {
        if self.bits[v] {
            self.bits[v] = false;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.bits.get(v).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Mapping between raw node labels and dense ids.
#[derive(Clone, Debug, Default)]
pub struct IdMap {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl IdMap {
    /// Identity mapping `0..n` labelled by their decimal ids.
    pub fn identity(n: usize) -> Self {
        let mut map = IdMap::default();
        for v in 0..n {
            map.intern(&v.to_string());
        }
        map
    }

    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `raw_label dense_id` per line.
    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (id, label) in self.labels.iter().enumerate() {
            writeln!(out, "{label} {id}")?;
        }
        Ok(())
    }
}

/// Reads a whitespace-separated edge list. Lines starting with `#` and blank
/// lines are skipped; tokens after the second are ignored. Labels are
/// remapped densely in order of first appearance.
pub fn load_edge_list<R: BufRead>(source: R) -> Result<(Graph, IdMap), GraphError> {
    let mut map = IdMap::default();
    let mut edges = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(GraphError::Parse {
                line: i + 1,
                reason: format!("expected two node labels, found {trimmed:?}"),
            });
        };
        let u = map.intern(a);
        let v = map.intern(b);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(GraphError::Empty);
    }
    let graph = Graph::from_edges(map.len(), edges)?;
    Ok((graph, map))
}

/// Small fixed graphs used throughout the tests and examples.
pub mod fixtures {
    use super::{Graph, NodeId};

    fn build(n: usize, edges: &[(NodeId, NodeId)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).expect("fixture edges are valid")
    }

    /// Two triangles `{0,1,2}` and `{3,4,5}` bridged by the edge `2-3`.
    pub fn toy() -> Graph {
        build(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)])
    }

    pub fn triangle() -> Graph {
        build(3, &[(0, 1), (1, 2), (2, 0)])
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        build(n, &edges)
    }

    /// Center `0` joined to leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        build(leaves + 1, &edges)
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        build(n, &edges)
    }

    /// `copies` disjoint cliques of size `size`, numbered consecutively.
    pub fn disjoint_cliques(copies: usize, size: usize) -> Graph {
        let mut edges = Vec::new();
        for c in 0..copies {
            let base = c * size;
            for u in 0..size {
                for v in u + 1..size {
                    edges.push((base + u, base + v));
                }
            }
        }
        build(copies * size, &edges)
    }
}
