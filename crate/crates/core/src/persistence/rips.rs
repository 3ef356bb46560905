use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Reverse;

use super::distance_matrix::pair_count;
use super::{DeathVector, DistanceMatrix, PersistenceDiagram, PersistencePair, UnionFind};
use crate::error::{Error, Result};

/// Tuning knobs for the degree-1 engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipsOptions {
    /// Upper bound on coboundary entries held at once (working heap plus stored
    /// reduction columns) before giving up with [`Error::Resource`].
    pub max_entries: usize,
    /// Pair an edge with its first coface without reduction when that coface
    /// has the edge as its longest side.
    pub emergent_pairs: bool,
}

impl Default for RipsOptions {
    fn default() -> Self {
        RipsOptions { max_entries: 1 << 26, emergent_pairs: true }
    }
}

/// Edges sorted by `(length, colex index)`; position in this order is the rank.
struct EdgeOrder {
    m: usize,
    values: Vec<f64>,
    ends: Vec<(u32, u32)>,
    /// `rank[i * m + j]` for `i != j`.
    rank: Vec<u32>,
}

impl EdgeOrder {
    fn new(d: &DistanceMatrix) -> Self {
        let m = d.size();
        let mut edges: Vec<(f64, usize, u32, u32)> =
            d.pairs().map(|(i, j, v)| (v, j * (j - 1) / 2 + i, i as u32, j as u32)).collect();
        edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut rank = alloc::vec![u32::MAX; m * m];
        for (r, e) in edges.iter().enumerate() {
            let (i, j) = (e.2 as usize, e.3 as usize);
            rank[i * m + j] = r as u32;
            rank[j * m + i] = r as u32;
        }
        EdgeOrder {
            m,
            values: edges.iter().map(|e| e.0).collect(),
            ends: edges.iter().map(|e| (e.2, e.3)).collect(),
            rank,
        }
    }

    /// Triangles containing edge `r`, keyed by `(longest edge rank, opposite vertex)`.
    ///
    /// The key order refines the filtration order on triangles.
    #[inline]
    fn cofaces(&self, r: u32) -> impl Iterator<Item = u64> + '_ {
        let (i, j) = self.ends[r as usize];
        let (i, j) = (i as usize, j as usize);
        let m = self.m;
        (0..m).filter(move |&v| v != i && v != j).map(move |v| {
            let ri = self.rank[i * m + v];
            let rj = self.rank[j * m + v];
            if r > ri && r > rj {
                ((r as u64) << 32) | v as u64
            } else if ri > rj {
                ((ri as u64) << 32) | j as u64
            } else {
                ((rj as u64) << 32) | i as u64
            }
        })
    }

    #[inline]
    fn triangle_value(&self, key: u64) -> f64 {
        self.values[(key >> 32) as usize]
    }
}

/// Merge scales of degree-0 persistence (the minimum spanning tree weights),
/// sorted in decreasing order.
pub fn h0_death_vector(d: &DistanceMatrix) -> Result<DeathVector> {
    let m = d.size();
    if m < 2 {
        return Err(Error::domain("degree-0 persistence needs at least two points"));
    }
    let mut edges: Vec<(f64, u32, u32)> = d.pairs().map(|(i, j, v)| (v, i as u32, j as u32)).collect();
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut uf = UnionFind::new(m);
    let mut deaths = Vec::with_capacity(m - 1);
    for (v, i, j) in edges {
        if uf.union(i as usize, j as usize) {
            deaths.push(v);
            if deaths.len() == m - 1 {
                break;
            }
        }
    }
    Ok(DeathVector::from_deaths(deaths))
}

/// Degree-1 Vietoris–Rips persistence with default options.
pub fn h1_diagram(d: &DistanceMatrix) -> Result<PersistenceDiagram> {
    h1_diagram_with(d, &RipsOptions::default())
}

/// Pops the lowest coboundary entry with odd multiplicity.
fn pop_pivot(heap: &mut BinaryHeap<Reverse<u64>>) -> Option<u64> {
    while let Some(Reverse(top)) = heap.pop() {
        let mut odd = true;
        while let Some(&Reverse(next)) = heap.peek() {
            if next != top {
                break;
            }
            heap.pop();
            odd = !odd;
        }
        if odd {
            return Some(top);
        }
    }
    None
}

pub fn h1_diagram_with(d: &DistanceMatrix, opts: &RipsOptions) -> Result<PersistenceDiagram> {
    let m = d.size();
    if m < 3 {
        return Err(Error::domain("degree-1 persistence needs at least three points"));
    }
    if m > u32::MAX as usize || pair_count(m) > u32::MAX as usize {
        return Err(Error::Resource {
            what: format!("{m} points exceed the edge index range"),
            simplices: pair_count(m) as u64,
        });
    }
    let order = EdgeOrder::new(d);
    let n_edges = order.values.len();

    // Clearing: edges that merge two components carry no degree-1 cocycle.
    let mut cleared = alloc::vec![false; n_edges];
    let mut uf = UnionFind::new(m);
    for (r, &(i, j)) in order.ends.iter().enumerate() {
        if uf.union(i as usize, j as usize) {
            cleared[r] = true;
        }
    }

    let mut pivot_owner: BTreeMap<u64, u32> = BTreeMap::new();
    // Reduction columns of non-emergent pivots; emergent ones are just `[r]`.
    let mut reduction: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut stored_entries = 0usize;
    let mut pairs = Vec::new();
    let mut heap: BinaryHeap<Reverse<u64>> = BinaryHeap::new();

    for r in (0..n_edges as u32).rev() {
        if cleared[r as usize] {
            continue;
        }
        if opts.emergent_pairs {
            let first = order.cofaces(r).min().expect("m >= 3 gives every edge a coface");
            if (first >> 32) as u32 == r {
                // Its other two sides are older, so no later column reaches it.
                pivot_owner.insert(first, r);
                continue;
            }
        }

        heap.clear();
        heap.extend(order.cofaces(r).map(Reverse));
        let mut column: Vec<u32> = alloc::vec![r];
        loop {
            let Some(pivot) = pop_pivot(&mut heap) else {
                return Err(Error::numerical(format!(
                    "edge of rank {r} reduced to zero; the complete 2-skeleton has no essential 1-cycles"
                )));
            };
            match pivot_owner.get(&pivot) {
                Some(&other) => {
                    heap.push(Reverse(pivot));
                    match reduction.get(&other) {
                        Some(cols) => {
                            for &e in cols {
                                heap.extend(order.cofaces(e).map(Reverse));
                            }
                            column.extend_from_slice(cols);
                        }
                        None => {
                            heap.extend(order.cofaces(other).map(Reverse));
                            column.push(other);
                        }
                    }
                    if heap.len() + stored_entries > opts.max_entries {
                        return Err(Error::Resource {
                            what: format!("degree-1 reduction of {m} points exceeded its entry budget"),
                            simplices: (heap.len() + stored_entries) as u64,
                        });
                    }
                }
                None => {
                    let birth = order.values[r as usize];
                    let death = order.triangle_value(pivot);
                    if death > birth {
                        pairs.push(PersistencePair { birth, death });
                    }
                    pivot_owner.insert(pivot, r);
                    if column.len() > 1 {
                        column.sort_unstable();
                        column = dedup_mod2(column);
                        stored_entries += column.len();
                        reduction.insert(r, column);
                    }
                    break;
                }
            }
        }
    }
    Ok(PersistenceDiagram::new(1, pairs))
}

/// Removes entries occurring an even number of times from a sorted list.
fn dedup_mod2(sorted: Vec<u32>) -> Vec<u32> {
    let mut out = Vec::with_capacity(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(sorted[i]);
        }
        i = j;
    }
    out
}
