//! Maximum cardinality matching in general graphs.
//!
//! Edmonds' augmenting-path search with blossom contraction. Blossom bases are
//! tracked with a union-find structure so a contraction costs time
//! proportional to the blossom rather than to `n`. The search starts from a
//! greedy matching that first serves degree-one nodes.

use std::collections::VecDeque;

use crate::graph::Graph;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Label {
    Unseen,
    Even,
    Odd,
}

/// A maximum matching, stored as a mate array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    mate: Vec<u32>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.mate.iter().filter(|&&m| m != NONE).count() / 2
    }

    pub fn mate(&self, v: usize) -> Option<usize> {
        (self.mate[v] != NONE).then_some(self.mate[v] as usize)
    }

    /// Matched pairs `(u, v)` with `u < v`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.mate.len())
            .filter_map(|u| self.mate(u).filter(|&v| v > u).map(|v| (u, v)))
            .collect()
    }
}

struct Search<'g> {
    g: &'g Graph,
    mate: Vec<u32>,
    label: Vec<Label>,
    parent: Vec<u32>,
    base: Vec<u32>,
    lca_mark: Vec<u32>,
    lca_stamp: u32,
    touched: Vec<u32>,
    queue: VecDeque<u32>,
}

impl<'g> Search<'g> {
    fn new(g: &'g Graph) -> Self {
        let n = g.node_count();
        Self {
            g,
            mate: vec![NONE; n],
            label: vec![Label::Unseen; n],
            parent: vec![NONE; n],
            base: (0..n as u32).collect(),
            lca_mark: vec![0; n],
            lca_stamp: 0,
            touched: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    fn greedy(&mut self) {
        let n = self.g.node_count();
        for pass in 0..2 {
            for v in 0..n {
                if self.mate[v] != NONE || (pass == 0 && self.g.degree(v) != 1) {
                    continue;
                }
                if let Some(&w) = self.g.neighbors(v).iter().find(|&&w| self.mate[w as usize] == NONE) {
                    self.mate[v] = w;
                    self.mate[w as usize] = v as u32;
                }
            }
        }
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.base[root as usize] != root {
            root = self.base[root as usize];
        }
        let mut x = v;
        while self.base[x as usize] != root {
            let next = self.base[x as usize];
            self.base[x as usize] = root;
            x = next;
        }
        root
    }

    fn touch(&mut self, v: u32) {
        if self.label[v as usize] == Label::Unseen {
            self.touched.push(v);
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            let v = v as usize;
            self.label[v] = Label::Unseen;
            self.parent[v] = NONE;
            self.base[v] = v as u32;
        }
        self.touched.clear();
        self.queue.clear();
    }

    fn lca(&mut self, a: u32, b: u32) -> u32 {
        self.lca_stamp += 1;
        let stamp = self.lca_stamp;
        let (mut a, mut b) = (a, b);
        loop {
            if a != NONE {
                a = self.find(a);
                if self.lca_mark[a as usize] == stamp {
                    return a;
                }
                self.lca_mark[a as usize] = stamp;
                a = if self.mate[a as usize] == NONE {
                    NONE
                } else {
                    self.parent[self.mate[a as usize] as usize]
                };
            }
            std::mem::swap(&mut a, &mut b);
        }
    }

    /// Walks from `v` up to the blossom base `b`, re-pointing parents through
    /// the blossom and merging every base on the way into `b`.
    fn shrink_path(&mut self, mut v: u32, b: u32, mut child: u32) {
        while self.find(v) != b {
            let m = self.mate[v as usize];
            self.parent[v as usize] = child;
            child = m;
            if self.label[m as usize] == Label::Odd {
                self.label[m as usize] = Label::Even;
                self.queue.push_back(m);
            }
            let fv = self.find(v);
            self.base[fv as usize] = b;
            let fm = self.find(m);
            self.base[fm as usize] = b;
            v = self.parent[m as usize];
        }
    }

    /// Searches for an augmenting path from the free node `root` and applies it.
    fn augment_from(&mut self, root: u32) -> bool {
        self.touch(root);
        self.label[root as usize] = Label::Even;
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for i in 0..self.g.degree(v as usize) {
                let w = self.g.neighbors(v as usize)[i];
                match self.label[w as usize] {
                    Label::Unseen => {
                        self.touch(w);
                        self.parent[w as usize] = v;
                        if self.mate[w as usize] == NONE {
                            self.flip(w);
                            self.reset();
                            return true;
                        }
                        self.label[w as usize] = Label::Odd;
                        let m = self.mate[w as usize];
                        self.touch(m);
                        self.label[m as usize] = Label::Even;
                        self.queue.push_back(m);
                    }
                    Label::Even => {
                        let (bv, bw) = (self.find(v), self.find(w));
                        if bv != bw {
                            let b = self.lca(v, w);
                            self.shrink_path(v, b, w);
                            self.shrink_path(w, b, v);
                        }
                    }
                    Label::Odd => {}
                }
            }
        }
        self.reset();
        false
    }

    fn flip(&mut self, mut w: u32) {
        while w != NONE {
            let p = self.parent[w as usize];
            let next = self.mate[p as usize];
            self.mate[w as usize] = p;
            self.mate[p as usize] = w;
            w = next;
        }
    }
}

/// A maximum cardinality matching of `g`.
pub fn maximum_matching(g: &Graph) -> Matching {
    let mut search = Search::new(g);
    search.greedy();
    for v in 0..g.node_count() as u32 {
        if search.mate[v as usize] == NONE && g.degree(v as usize) > 0 {
            search.augment_from(v);
        }
    }
    Matching { mate: search.mate }
}

pub fn max_matching_size(g: &Graph) -> usize {
    maximum_matching(g).size()
}

/// True iff some matching leaves at most one node uncovered.
pub fn has_near_perfect_matching(g: &Graph) -> bool {
    let n = g.node_count();
    let isolated = (0..n).filter(|&v| g.degree(v) == 0).count();
    if isolated > n % 2 {
        return false;
    }
    max_matching_size(g) >= n / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_valid(g: &Graph, m: &Matching) {
        let mut used = vec![false; g.node_count()];
        for (u, v) in m.pairs() {
            assert!(g.has_edge(u, v));
            assert!(!used[u] && !used[v]);
            used[u] = true;
            used[v] = true;
        }
    }

    #[test]
    fn small_examples() {
        assert_eq!(max_matching_size(&Graph::cycle(6)), 3);
        assert_eq!(max_matching_size(&Graph::star(3)), 1);
        assert_eq!(max_matching_size(&Graph::petersen()), 5);
        assert!(has_near_perfect_matching(&Graph::complete(3)));
        assert!(!has_near_perfect_matching(&Graph::empty(2)));
        assert!(!has_near_perfect_matching(&Graph::star(3)));
        assert!(has_near_perfect_matching(&Graph::empty(1)));
    }

    #[test]
    fn needs_blossom() {
        // triangle 0-1-2 with pendant 3 on node 2 and pendant 4 on node 0;
        // a greedy start of {0,1} forces an augmentation through the triangle
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (2, 3), (0, 4), (3, 5)]).unwrap();
        let m = maximum_matching(&g);
        assert_valid(&g, &m);
        assert_eq!(m.size(), 3);
    }

    #[test]
    fn nested_blossoms() {
        // two pentagons sharing structure, with stems; perfect matching exists
        let g = Graph::from_edges(
            12,
            [
                (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                (4, 5), (5, 6), (6, 7), (7, 8), (8, 9), (9, 5),
                (9, 10), (10, 11), (2, 7),
            ],
        )
        .unwrap();
        let m = maximum_matching(&g);
        assert_valid(&g, &m);
        assert_eq!(m.size(), 6);
    }
}
