//! Simple undirected graphs on dense node ids `0..n`.
//!
//! Adjacency is stored twice: sorted neighbour lists in compressed sparse row
//! form for iteration, and a membership structure (dense bit matrix for small
//! graphs, hashed pair set otherwise) built on first use of [`Graph::has_edge`].

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

const DENSE_MEMBERSHIP_MAX_N: usize = 4096;

#[derive(Debug)]
enum Membership {
    Dense(FixedBitSet),
    Hashed(HashSet<u64>),
}

/// An immutable simple undirected graph.
#[derive(Debug)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    membership: OnceLock<Membership>,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            offsets: self.offsets.clone(),
            targets: self.targets.clone(),
            membership: OnceLock::new(),
        }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.offsets == other.offsets && self.targets == other.targets
    }
}

impl Eq for Graph {}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            membership: OnceLock::new(),
        }
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::from_edges(n, edges).expect("complete graph edges are valid")
    }

    /// Cycle `C_n` (n >= 3).
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 nodes");
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).unwrap()
    }

    /// The Petersen graph: outer 5-cycle, inner pentagram, spokes.
    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        Self::from_edges(10, outer.chain(inner).chain(spokes)).unwrap()
    }

    /// Builds a graph from an edge iterator. Duplicate edges are merged,
    /// self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::InvalidParams(format!("node count {n} too large")));
        }
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidEdge { u, v, n });
            }
            pairs.push((u as u32, v as u32));
        }
        Ok(Self::from_valid_pairs(n, &pairs))
    }

    /// Pairs must be in range and loop-free; duplicates are allowed.
    pub(crate) fn from_valid_pairs(n: usize, pairs: &[(u32, u32)]) -> Self {
        let mut degree = vec![0usize; n + 1];
        for &(u, v) in pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut raw = vec![0u32; offsets[n]];
        for &(u, v) in pairs {
            raw[fill[u as usize]] = v;
            fill[u as usize] += 1;
            raw[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        // sort and dedup each list, compacting into `targets`
        let mut targets = Vec::with_capacity(raw.len());
        let mut new_offsets = vec![0usize; n + 1];
        for u in 0..n {
            let list = &mut raw[offsets[u]..offsets[u + 1]];
            list.sort_unstable();
            let start = targets.len();
            for &v in list.iter() {
                if targets.len() == start || *targets.last().unwrap() != v {
                    targets.push(v);
                }
            }
            new_offsets[u + 1] = targets.len();
        }
        Self {
            n,
            offsets: new_offsets,
            targets,
            membership: OnceLock::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// All edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    fn membership(&self) -> &Membership {
        self.membership.get_or_init(|| {
            if self.n <= DENSE_MEMBERSHIP_MAX_N {
                let mut bits = FixedBitSet::with_capacity(self.n * self.n);
                for u in 0..self.n {
                    for &v in self.neighbors(u) {
                        bits.insert(u * self.n + v as usize);
                    }
                }
                Membership::Dense(bits)
            } else {
                Membership::Hashed(self.edges().map(|(u, v)| pair_key(u, v)).collect())
            }
        })
    }

    /// Constant-time adjacency test.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n || u == v {
            return false;
        }
        match self.membership() {
            Membership::Dense(bits) => bits.contains(u * self.n + v),
            Membership::Hashed(set) => set.contains(&pair_key(u.min(v), u.max(v))),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Subgraph induced by deleting the nodes in `removed`, relabelled densely.
    pub fn without_nodes(&self, removed: &NodeSubset) -> Graph {
        let mut relabel = vec![u32::MAX; self.n];
        let mut next = 0u32;
        for v in 0..self.n {
            if !removed.contains(v) {
                relabel[v] = next;
                next += 1;
            }
        }
        let pairs: Vec<(u32, u32)> = self
            .edges()
            .filter(|&(u, v)| !removed.contains(u) && !removed.contains(v))
            .map(|(u, v)| (relabel[u], relabel[v]))
            .collect();
        Graph::from_valid_pairs(next as usize, &pairs)
    }

    /// Writes the edge-list text format: `n m` then one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.edge_count() * 12);
        writeln!(out, "{} {}", self.n, self.edge_count()).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    /// Parses the edge-list text format. Each edge line must have `u < v`,
    /// and the edge count in the header must match.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (n, m) = parse_pair(header, hline + 1)?;
        let mut pairs = Vec::with_capacity(m);
        let mut seen = HashSet::with_capacity(m);
        for (idx, line) in lines {
            let (u, v) = parse_pair(line, idx + 1)?;
            if u >= v || v >= n {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("edge ({u}, {v}) must satisfy u < v < {n}"),
                });
            }
            if !seen.insert(pair_key(u, v)) {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("duplicate edge ({u}, {v})"),
                });
            }
            pairs.push((u as u32, v as u32));
        }
        if pairs.len() != m {
            return Err(Error::Parse {
                line: hline + 1,
                msg: format!("header declares {m} edges, found {}", pairs.len()),
            });
        }
        Ok(Graph::from_valid_pairs(n, &pairs))
    }
}

fn pair_key(u: usize, v: usize) -> u64 {
    ((u as u64) << 32) | v as u64
}

fn parse_pair(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let err = |msg: &str| Error::Parse {
        line: line_no,
        msg: format!("{msg}: {line:?}"),
    };
    let mut it = line.split_ascii_whitespace();
    let a = it.next().ok_or_else(|| err("expected two integers"))?;
    let b = it.next().ok_or_else(|| err("expected two integers"))?;
    if it.next().is_some() {
        return Err(err("trailing tokens"));
    }
    let a = a.parse().map_err(|_| err("not a non-negative integer"))?;
    let b = b.parse().map_err(|_| err("not a non-negative integer"))?;
    Ok((a, b))
}

/// A subset of the node set `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSubset {
    bits: FixedBitSet,
}

impl NodeSubset {
    pub fn new(n: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    pub fn from_nodes(n: usize, nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new(n);
        for v in nodes {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, v: usize) {
        self.bits.insert(v);
    }

    pub fn remove(&mut self, v: usize) {
        self.bits.set(v, false);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.bits.contains(v)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    /// `V \ self`.
    pub fn complement(&self) -> NodeSubset {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        Self { bits }
    }
}

/// Edge-wise intersection of two graphs on the same node set.
pub fn intersect_graphs(g1: &Graph, g2: &Graph) -> Result<Graph> {
    if g1.n != g2.n {
        return Err(Error::NodeCountMismatch {
            left: g1.n,
            right: g2.n,
        });
    }
    let mut pairs = Vec::new();
    for u in 0..g1.n {
        let (a, b) = (g1.neighbors(u), g2.neighbors(u));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if a[i] as usize > u {
                        pairs.push((u as u32, a[i]));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    Ok(Graph::from_valid_pairs(g1.n, &pairs))
}

/// Minimum degree; 0 for the empty node set.
pub fn min_degree(g: &Graph) -> usize {
    (0..g.n).map(|v| g.degree(v)).min().unwrap_or(0)
}

/// Connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.n];
    let mut blocks = Vec::new();
    let mut queue = VecDeque::new();
    for root in 0..g.n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        queue.push_back(root);
        let mut block = Vec::new();
        while let Some(v) = queue.pop_front() {
            block.push(v);
            for &w in g.neighbors(v) {
                let w = w as usize;
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks
}

/// True when the graph has exactly one component (n = 1 counts as connected).
pub fn is_connected(g: &Graph) -> bool {
    if g.n == 0 {
        return false;
    }
    let mut seen = vec![false; g.n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            let w = w as usize;
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == g.n
}

/// Cut vertices of a graph (iterative Hopcroft–Tarjan lowpoint search).
pub fn articulation_points(g: &Graph) -> Vec<usize> {
    const UNSEEN: u32 = u32::MAX;
    let n = g.n;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut is_cut = vec![false; n];
    let mut timer = 0u32;
    // (node, parent, next neighbour index)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != UNSEEN {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut root_children = 0;
        stack.push((root, usize::MAX, 0));
        while let Some(&(v, parent, idx)) = stack.last() {
            let nbrs = g.neighbors(v);
            if idx < nbrs.len() {
                let w = nbrs[idx] as usize;
                stack.last_mut().unwrap().2 += 1;
                if disc[w] == UNSEEN {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if p != root && low[v] >= disc[p] {
                        is_cut[p] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    (0..n).filter(|&v| is_cut[v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersect_identity_and_absorbing() {
        let k3 = Graph::complete(3);
        assert_eq!(intersect_graphs(&k3, &k3).unwrap(), k3);
        assert_eq!(intersect_graphs(&k3, &Graph::empty(3)).unwrap(), Graph::empty(3));
    }

    #[test]
    fn intersect_paths() {
        let p = Graph::path(3);
        let q = Graph::from_edges(3, [(1, 2)]).unwrap();
        let both = intersect_graphs(&p, &q).unwrap();
        assert_eq!(both.edges().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn intersect_rejects_mismatch() {
        let err = intersect_graphs(&Graph::empty(3), &Graph::empty(4)).unwrap_err();
        assert!(matches!(err, Error::NodeCountMismatch { left: 3, right: 4 }));
    }

    #[test]
    fn min_degree_examples() {
        assert_eq!(min_degree(&Graph::empty(5)), 0);
        assert_eq!(min_degree(&Graph::complete(4)), 3);
        assert_eq!(min_degree(&Graph::star(3)), 1);
        assert_eq!(min_degree(&Graph::empty(1)), 0);
    }

    #[test]
    fn components_examples() {
        assert_eq!(connected_components(&Graph::empty(3)), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(connected_components(&Graph::complete(3)), vec![vec![0, 1, 2]]);
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(connected_components(&g), vec![vec![0, 1], vec![2, 3]]);
        assert!(is_connected(&Graph::empty(1)));
        assert!(!is_connected(&g));
    }

    #[test]
    fn builder_dedups_and_rejects_loops() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(1, 0));
        assert!(matches!(
            Graph::from_edges(3, [(1, 1)]),
            Err(Error::InvalidEdge { u: 1, v: 1, n: 3 })
        ));
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn hashed_membership_for_large_graphs() {
        let n = DENSE_MEMBERSHIP_MAX_N + 10;
        let g = Graph::from_edges(n, [(0, n - 1), (5, 7)]).unwrap();
        assert!(g.has_edge(n - 1, 0));
        assert!(g.has_edge(7, 5));
        assert!(!g.has_edge(0, 1));
    }

    #[test]
    fn edge_list_format() {
        let text = Graph::complete(3).to_edge_list();
        assert_eq!(text, "3 3\n0 1\n0 2\n1 2\n");
        let back = Graph::parse_edge_list(&text).unwrap();
        assert_eq!(back.to_edge_list(), text);
        assert_eq!(Graph::empty(4).to_edge_list(), "4 0\n");
    }

    #[test]
    fn edge_list_errors() {
        assert!(matches!(Graph::parse_edge_list(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Graph::parse_edge_list("3 1\n1 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Graph::parse_edge_list("3 2\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(Graph::parse_edge_list("3 2\n0 1\n0 1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(Graph::parse_edge_list("3 1\n0 x\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn articulation_points_examples() {
        assert_eq!(articulation_points(&Graph::path(4)), vec![1, 2]);
        assert!(articulation_points(&Graph::cycle(6)).is_empty());
        assert_eq!(articulation_points(&Graph::star(3)), vec![0]);
        // two triangles sharing node 2
        let bowtie = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(articulation_points(&bowtie), vec![2]);
    }

    #[test]
    fn subsets_and_deletion() {
        let s = NodeSubset::from_nodes(5, [1, 3]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.complement().iter().collect::<Vec<_>>(), vec![0, 2, 4]);
        let g = Graph::cycle(5).without_nodes(&s);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 1);
    }
}
