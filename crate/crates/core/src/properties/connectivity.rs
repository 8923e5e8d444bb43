//! Vertex connectivity.
//!
//! `is_k_connected` answers `kappa(G) >= k` exactly. Connectivity and
//! biconnectivity use linear-time traversals; larger `k` falls back to
//! unit-vertex-capacity max-flow between a small cover of node pairs.

use std::collections::VecDeque;

use crate::graph::{articulation_points, is_connected, min_degree, Graph};

/// True iff every pair of nodes is joined by `k` internally node-disjoint
/// paths, i.e. the vertex connectivity is at least `k`.
///
/// Conventions: `K_n` has connectivity `n - 1`; a single node is connected
/// (1-connected) but not 2-connected.
pub fn is_k_connected(g: &Graph, k: usize) -> bool {
    let n = g.node_count();
    if k == 0 {
        return true;
    }
    if n == 1 {
        return k == 1;
    }
    if n <= k || min_degree(g) < k {
        return false;
    }
    if !is_connected(g) {
        return false;
    }
    match k {
        1 => true,
        2 => articulation_points(g).is_empty(),
        _ => {
            if g.is_complete() {
                return true;
            }
            // A separator S with |S| < k misses one of any k fixed nodes, say
            // v; some w on the far side of S is then a non-neighbour of v with
            // local connectivity < k. Checking pairs (v_i, w) for the first k
            // nodes is therefore exhaustive.
            let mut net = SplitNetwork::new(g);
            for v in 0..k {
                for w in 0..n {
                    if w == v || g.has_edge(v, w) {
                        continue;
                    }
                    if net.local_connectivity(v, w, k) < k {
                        return false;
                    }
                }
            }
            true
        }
    }
}

/// Vertex connectivity `kappa(G)`, with `kappa(K_n) = n - 1`.
pub fn vertex_connectivity(g: &Graph) -> usize {
    let n = g.node_count();
    if n <= 1 {
        return 0;
    }
    let mut k = 0;
    while k < n - 1 && is_k_connected(g, k + 1) {
        k += 1;
    }
    k
}

/// Residual network where every node `v` becomes `in(v) -> out(v)` with unit
/// capacity and every undirected edge becomes two arcs `out -> in`.
struct SplitNetwork {
    head: Vec<usize>,
    to: Vec<u32>,
    cap: Vec<u32>,
    original: Vec<u32>,
    next: Vec<usize>,
    prev_arc: Vec<usize>,
    visited: Vec<u32>,
    stamp: u32,
}

const NIL: usize = usize::MAX;

impl SplitNetwork {
    fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let mut net = SplitNetwork {
            head: vec![NIL; 2 * n],
            to: Vec::new(),
            cap: Vec::new(),
            original: Vec::new(),
            next: Vec::new(),
            prev_arc: vec![NIL; 2 * n],
            visited: vec![0; 2 * n],
            stamp: 0,
        };
        for v in 0..n {
            net.add_arc(2 * v, 2 * v + 1, 1);
        }
        for (u, v) in g.edges() {
            net.add_arc(2 * u + 1, 2 * v, 1);
            net.add_arc(2 * v + 1, 2 * u, 1);
        }
        net.original = net.cap.clone();
        net
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u32) {
        for (a, b, c) in [(from, to, cap), (to, from, 0)] {
            self.to.push(b as u32);
            self.cap.push(c);
            self.next.push(self.head[a]);
            self.head[a] = self.to.len() - 1;
        }
    }

    /// Number of internally disjoint `s`-`t` paths, capped at `limit`.
    fn local_connectivity(&mut self, s: usize, t: usize, limit: usize) -> usize {
        self.cap.copy_from_slice(&self.original);
        let (source, sink) = (2 * s + 1, 2 * t);
        let mut flow = 0;
        let mut queue = VecDeque::new();
        while flow < limit {
            self.stamp += 1;
            queue.clear();
            queue.push_back(source);
            self.visited[source] = self.stamp;
            let mut found = false;
            'bfs: while let Some(x) = queue.pop_front() {
                let mut arc = self.head[x];
                while arc != NIL {
                    let y = self.to[arc] as usize;
                    if self.cap[arc] > 0 && self.visited[y] != self.stamp {
                        self.visited[y] = self.stamp;
                        self.prev_arc[y] = arc;
                        if y == sink {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(y);
                    }
                    arc = self.next[arc];
                }
            }
            if !found {
                break;
            }
            let mut y = sink;
            while y != source {
                let arc = self.prev_arc[y];
                self.cap[arc] -= 1;
                self.cap[arc ^ 1] += 1;
                y = self.to[arc ^ 1] as usize;
            }
            flow += 1;
        }
        flow
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graphs() {
        let k5 = Graph::complete(5);
        assert!(is_k_connected(&k5, 4));
        assert!(!is_k_connected(&k5, 5));
        assert_eq!(vertex_connectivity(&k5), 4);
    }

    #[test]
    fn cycles_and_paths() {
        let c6 = Graph::cycle(6);
        assert!(is_k_connected(&c6, 2));
        assert!(!is_k_connected(&c6, 3));
        let p4 = Graph::path(4);
        assert!(is_k_connected(&p4, 1));
        assert!(!is_k_connected(&p4, 2));
    }

    #[test]
    fn single_node_convention() {
        let g = Graph::empty(1);
        assert!(is_k_connected(&g, 1));
        assert!(!is_k_connected(&g, 2));
        assert!(!is_k_connected(&Graph::empty(2), 1));
    }

    #[test]
    fn flow_path_for_k_three() {
        // Petersen graph is 3-connected but not 4-connected
        let p = Graph::petersen();
        assert!(is_k_connected(&p, 3));
        assert!(!is_k_connected(&p, 4));
        // K_{3,3} is 3-connected
        let k33 = Graph::from_edges(6, (0..3).flat_map(|a| (3..6).map(move |b| (a, b)))).unwrap();
        assert_eq!(vertex_connectivity(&k33), 3);
        // two K_4 glued on two nodes: min degree 3, connectivity 2
        let glued = Graph::from_edges(
            6,
            [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)],
        )
        .unwrap();
        assert_eq!(min_degree(&glued), 3);
        assert!(!is_k_connected(&glued, 3));
        assert!(is_k_connected(&glued, 2));
    }
}
