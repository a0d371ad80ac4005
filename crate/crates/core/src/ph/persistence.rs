//! Rips persistence in dimensions 0 and 1.
//!
//! Dimension 0 is read off a Kruskal sweep over the sorted edges. Dimension 1
//! comes from reducing the coboundary matrix of the edges over Z/2, which is
//! the anti-transpose of the edge/triangle boundary matrix and therefore
//! yields the same persistence pairs. Edges that merged components in the
//! sweep are cleared up front: their columns are known to reduce to zero.
//! Triangles are never materialized; each edge column enumerates its
//! cofacets on demand.

use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use super::diagram::{Bar, PersistenceDiagram};
use super::distance::DistanceMatrix;
use super::filtration::RipsOptions;
use super::PhError;

/// Computes the dimension 0 and dimension 1 diagram of the full Rips filtration.
pub fn rips_persistence(dist: &DistanceMatrix) -> PersistenceDiagram {
    rips_persistence_with(dist, &RipsOptions::default()).expect("default options are valid")
}

/// Like [`rips_persistence`], but optionally truncates the filtration at a scale cap.
///
/// Under a cap, classes still alive at the cap get an infinite death in both
/// dimensions.
pub fn rips_persistence_with(dist: &DistanceMatrix, options: &RipsOptions) -> Result<PersistenceDiagram, PhError> {
    options.validate()?;
    let edges = sorted_edges(dist, options);
    let (dim0, cleared) = zero_dim_pairs(dist.len(), &edges);
    let dim1 = CoboundaryReducer::new(dist, options, &edges).reduce(&cleared);
    Ok(PersistenceDiagram::new(dim0, dim1))
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    diameter: f64,
    a: usize,
    b: usize,
}

fn sorted_edges(dist: &DistanceMatrix, options: &RipsOptions) -> Vec<Edge> {
    let n = dist.len();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            let diameter = dist.get(a, b);
            if options.admits(diameter) {
                edges.push(Edge { diameter, a, b });
            }
        }
    }
    edges.sort_by(|x, y| x.diameter.total_cmp(&y.diameter).then((x.a, x.b).cmp(&(y.a, y.b))));
    edges
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        match self.rank[rx].cmp(&self.rank[ry]) {
            Ordering::Less => self.parent[rx] = ry,
            Ordering::Greater => self.parent[ry] = rx,
            Ordering::Equal => {
                self.parent[ry] = rx;
                self.rank[rx] += 1;
            }
        }
        true
    }
}

/// Kruskal sweep. Returns the dimension 0 bars and a flag per edge marking
/// those that merged two components.
fn zero_dim_pairs(n: usize, edges: &[Edge]) -> (Vec<Bar>, Vec<bool>) {
    let mut uf = UnionFind::new(n);
    let mut merged = vec![false; edges.len()];
    let mut bars = Vec::with_capacity(n);
    for (k, e) in edges.iter().enumerate() {
        if uf.union(e.a, e.b) {
            merged[k] = true;
            bars.push(Bar::new(0.0, e.diameter));
        }
    }
    let components = n - bars.len();
    bars.extend(std::iter::repeat_n(Bar::new(0.0, f64::INFINITY), components));
    (bars, merged)
}

/// A triangle in filtration order: diameter, then lexicographic vertices.
/// `code` packs the sorted vertices so that integer order is lexicographic order.
#[derive(Debug, Clone, Copy)]
struct TriangleKey {
    diameter: f64,
    code: u64,
}

impl PartialEq for TriangleKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for TriangleKey {}

impl PartialOrd for TriangleKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TriangleKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.diameter.total_cmp(&other.diameter).then(self.code.cmp(&other.code))
    }
}

struct CoboundaryReducer<'a> {
    dist: &'a DistanceMatrix,
    options: &'a RipsOptions,
    edges: &'a [Edge],
}

impl<'a> CoboundaryReducer<'a> {
    fn new(dist: &'a DistanceMatrix, options: &'a RipsOptions, edges: &'a [Edge]) -> Self {
        CoboundaryReducer { dist, options, edges }
    }

    fn key(&self, a: usize, b: usize, c: usize) -> TriangleKey {
        let n = self.dist.len() as u64;
        let mut v = [a, b, c];
        v.sort_unstable();
        let diameter = self.dist.get(v[0], v[1]).max(self.dist.get(v[0], v[2])).max(self.dist.get(v[1], v[2]));
        TriangleKey { diameter, code: (v[0] as u64 * n + v[1] as u64) * n + v[2] as u64 }
    }

    fn cofacets(&self, edge: usize) -> impl Iterator<Item = TriangleKey> + '_ {
        let Edge { a, b, .. } = self.edges[edge];
        (0..self.dist.len())
            .filter(move |&c| c != a && c != b)
            .map(move |c| self.key(a, b, c))
            .filter(|t| self.options.admits(t.diameter))
    }

    fn push_coboundary(&self, heap: &mut BinaryHeap<Reverse<TriangleKey>>, edge: usize) {
        heap.extend(self.cofacets(edge).map(Reverse));
    }

    /// Earliest triangle with an odd coefficient, leaving it on the heap.
    fn pivot(heap: &mut BinaryHeap<Reverse<TriangleKey>>) -> Option<TriangleKey> {
        while let Some(Reverse(top)) = heap.pop() {
            match heap.peek() {
                Some(Reverse(next)) if *next == top => {
                    heap.pop();
                }
                _ => {
                    heap.push(Reverse(top));
                    return Some(top);
                }
            }
        }
        None
    }

    fn reduce(&self, cleared: &[bool]) -> Vec<Bar> {
        let mut bars = Vec::new();
        // pivot triangle code -> combination of edges whose coboundary has that pivot
        let mut pivots: HashMap<u64, Vec<usize>> = HashMap::new();
        let mut heap = BinaryHeap::new();

        for col in (0..self.edges.len()).rev() {
            if cleared[col] {
                continue;
            }
            let birth = self.edges[col].diameter;

            // Apparent pivot: if the earliest cofacet is unclaimed, the column is already reduced.
            let Some(first) = self.cofacets(col).min() else {
                bars.push(Bar::new(birth, f64::INFINITY));
                continue;
            };
            if let Entry::Vacant(slot) = pivots.entry(first.code) {
                if first.diameter > birth {
                    bars.push(Bar::new(birth, first.diameter));
                }
                slot.insert(vec![col]);
                continue;
            }

            heap.clear();
            self.push_coboundary(&mut heap, col);
            let mut combination = vec![col];
            loop {
                match Self::pivot(&mut heap) {
                    None => {
                        bars.push(Bar::new(birth, f64::INFINITY));
                        break;
                    }
                    Some(pivot) => match pivots.get(&pivot.code) {
                        Some(other) => {
                            for &e in other {
                                self.push_coboundary(&mut heap, e);
                            }
                            combination.extend_from_slice(other);
                        }
                        None => {
                            if pivot.diameter > birth {
                                bars.push(Bar::new(birth, pivot.diameter));
                            }
                            pivots.insert(pivot.code, cancel_pairs(combination));
                            break;
                        }
                    },
                }
            }
        }
        bars
    }
}

/// Z/2 normalization of a list of edge indices: entries occurring an even number of times vanish.
fn cancel_pairs(mut edges: Vec<usize>) -> Vec<usize> {
    edges.sort_unstable();
    let mut out = Vec::with_capacity(edges.len());
    let mut i = 0;
    while i < edges.len() {
        let mut j = i;
        while j < edges.len() && edges[j] == edges[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(edges[i]);
        }
        i = j;
    }
    out
}
