//! The 1-skeleton of the Vietoris–Rips filtration.
//!
//! Only edges matter for connected components, so the filtration is the list
//! of all `N(N-1)/2` pairwise edges sorted by length. Distinct lengths form the
//! scale `D`; each edge carries the 1-based position of its length in `D` as
//! its grade.

use std::cmp::Ordering;

use crate::cloud::PointCloud;

/// A pairwise distance record, `u < v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distance {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
    /// 1-based index of `length` in the filtration scale.
    pub grade: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Filtration {
    edges: Vec<Edge>,
    scale: Vec<f64>,
}

impl Filtration {
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Strictly increasing distinct edge lengths.
    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    /// Length at a 1-based grade.
    pub fn length_of_grade(&self, grade: usize) -> f64 {
        self.scale[grade - 1]
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Number of unordered pairs of `n` points.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Euclidean distance of every unordered pair, `(0,1), (0,2), .., (1,2), ..`.
pub fn pairwise_distances(cloud: &PointCloud) -> Vec<Distance> {
    let n = cloud.len();
    let mut out = Vec::with_capacity(pair_count(n));
    for u in 0..n {
        let pu = cloud.point(u);
        for v in u + 1..n {
            let length = pu
                .iter()
                .zip(cloud.point(v))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            out.push(Distance { u, v, length });
        }
    }
    out
}

fn edge_order(a: &Distance, b: &Distance) -> Ordering {
    a.length
        .total_cmp(&b.length)
        .then(a.u.cmp(&b.u))
        .then(a.v.cmp(&b.v))
}

/// Sorts by `(length, u, v)`, collapses equal lengths into the scale and
/// assigns grades. Lengths are merged only on exact equality.
pub fn build_filtration(mut distances: Vec<Distance>) -> Filtration {
    distances.sort_unstable_by(edge_order);
    let mut scale: Vec<f64> = Vec::new();
    let edges = distances
        .into_iter()
        .map(|d| {
            if scale.last() != Some(&d.length) {
                scale.push(d.length);
            }
            Edge {
                u: d.u,
                v: d.v,
                length: d.length,
                grade: scale.len(),
            }
        })
        .collect();
    Filtration { edges, scale }
}

pub fn filtration_of(cloud: &PointCloud) -> Filtration {
    build_filtration(pairwise_distances(cloud))
}
