//! Kruskal's algorithm over the filtration: an independent route to the same
//! barcode. An edge that joins two components kills one of them at the edge's
//! grade, so the finite deaths are exactly the minimum spanning tree's edges.

use crate::barcode::{Barcode, Interval};
use crate::filtration::Filtration;

/// Disjoint sets with union by rank and path compression.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut x = x;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; false if they were already one set.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

pub fn kruskal_barcode(f: &Filtration, n: usize) -> Barcode {
    let mut uf = UnionFind::new(n);
    let mut finite = Vec::with_capacity(n.saturating_sub(1));
    for e in f.edges() {
        if uf.components() <= 1 {
            break;
        }
        if uf.union(e.u, e.v) {
            finite.push(Interval {
                death_grade: e.grade,
                death_length: e.length,
            });
        }
    }
    Barcode {
        finite,
        essential_count: uf.components(),
    }
}

pub fn mst_total_weight(f: &Filtration, n: usize) -> f64 {
    kruskal_barcode(f, n)
        .finite
        .iter()
        .map(|i| i.death_length)
        .sum()
}
