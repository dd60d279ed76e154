//! Strict partial orders, induced quotient relations and base-space
//! projections.
//!
//! A [`StrictPoset`] stores the full reachability relation of a directed
//! acyclic graph as a dense boolean matrix, so `x < y` queries are O(1).
//! Clustering a partially ordered set works on quotients: a partition of the
//! ground set induces a relation on its blocks ([`induced_quotient`]), and the
//! partition is *regular* exactly when that induced relation is again a strict
//! partial order. Projecting the induced relation back onto the elements
//! ([`base_space_projection`]) makes order violations visible as loops.

use crate::partition::LabeledPartition;
use thiserror::Error;

/// Errors raised by order constructors and quotient operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    /// The input relation contains a cycle; the payload is the lowest-index
    /// element lying on one.
    #[error("relation contains a cycle through element {0}")]
    CycleDetected(usize),
    /// An edge mentions an element outside `{0, .., n-1}`.
    #[error("element {0} is out of range")]
    ElementOutOfRange(usize),
    /// A block index is outside the relation.
    #[error("block {0} is out of range")]
    BlockOutOfRange(usize),
    /// The two blocks are comparable (or identical) and must not be merged.
    #[error("blocks {0} and {1} are comparable and cannot be merged")]
    ComparableBlocks(usize, usize),
    /// A partition does not cover the same elements as the order.
    #[error("partition covers {found} elements, order has {expected}")]
    SizeMismatch { expected: usize, found: usize },
}

/// In-place Warshall reachability closure of an `n`x`n` boolean matrix.
fn close_in_place(adj: &mut [bool], n: usize) {
    for k in 0..n {
        for i in 0..n {
            if adj[i * n + k] {
                for j in 0..n {
                    if adj[k * n + j] {
                        adj[i * n + j] = true;
                    }
                }
            }
        }
    }
}

/// A strict partial order on `{0, .., n-1}`, stored as its transitively
/// closed, irreflexive reachability matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictPoset {
    n: usize,
    reach: Vec<bool>,
}

impl StrictPoset {
    /// The empty order: no two elements comparable.
    pub fn empty(n: usize) -> Self {
        StrictPoset {
            n,
            reach: vec![false; n * n],
        }
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when the order has no elements.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// True if `x` is strictly below `y`.
    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.reach[x * self.n + y]
    }

    /// True if `x < y` or `y < x`.
    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.lt(x, y) || self.lt(y, x)
    }

    /// True if no two elements of `block` are comparable.
    pub fn is_antichain(&self, block: &[usize]) -> bool {
        for (k, &x) in block.iter().enumerate() {
            for &y in &block[k + 1..] {
                if self.comparable(x, y) {
                    return false;
                }
            }
        }
        true
    }

    /// All ordered pairs `(x, y)` with `x < y`, lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in 0..self.n {
                if self.reach[x * self.n + y] {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Number of ordered pairs in the relation.
    pub fn edge_count(&self) -> usize {
        self.reach.iter().filter(|&&b| b).count()
    }

    /// Builds a poset from an already transitively closed, irreflexive
    /// reachability matrix. Used by generators that assemble closures
    /// directly; validity is checked in debug builds only.
    pub(crate) fn from_closed_reachability(n: usize, reach: Vec<bool>) -> Self {
        debug_assert_eq!(reach.len(), n * n);
        debug_assert!((0..n).all(|i| !reach[i * n + i]), "reachability must be irreflexive");
        StrictPoset { n, reach }
    }
}

/// Builds the strict partial order generated by `edges` over `{0, .., n-1}`:
/// the transitive closure of the edge relation. Fails with
/// [`PosetError::CycleDetected`] if the closure would be reflexive anywhere,
/// reporting the lowest-index element on a cycle.
pub fn transitive_closure(n: usize, edges: &[(usize, usize)]) -> Result<StrictPoset, PosetError> {
    let mut reach = vec![false; n * n];
    for &(x, y) in edges {
        if x >= n {
            return Err(PosetError::ElementOutOfRange(x));
        }
        if y >= n {
            return Err(PosetError::ElementOutOfRange(y));
        }
        reach[x * n + y] = true;
    }
    close_in_place(&mut reach, n);
    for i in 0..n {
        if reach[i * n + i] {
            return Err(PosetError::CycleDetected(i));
        }
    }
    Ok(StrictPoset { n, reach })
}

/// The relation a partition induces on its blocks. `adj` is the transitive
/// closure of the block lift of the element order; it is a strict partial
/// order exactly when `acyclic` holds, in which case the partition is called
/// regular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedRelation {
    block_count: usize,
    adj: Vec<bool>,
    acyclic: bool,
}

impl InducedRelation {
    /// Number of blocks.
    pub fn block_count(&self) -> usize {
        self.block_count
    }

    /// True if block `a` relates to block `b`.
    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.block_count + b]
    }

    /// True if the blocks relate in either direction.
    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.lt(a, b) || self.lt(b, a)
    }

    /// True when the induced relation is a strict partial order.
    pub fn is_acyclic(&self) -> bool {
        self.acyclic
    }
}

/// Lifts the element order to the blocks of `partition` and closes it
/// transitively: block `A` relates to block `B` when some `x` in `A` is below
/// some `y` in `B`. Mergers of comparable elements show up as loops (possibly
/// after closure), flagged by `acyclic == false`; no error is raised so
/// callers can inspect irregular quotients.
pub fn induced_quotient(
    order: &StrictPoset,
    partition: &LabeledPartition,
) -> Result<InducedRelation, PosetError> {
    if partition.len() != order.len() {
        return Err(PosetError::SizeMismatch {
            expected: order.len(),
            found: partition.len(),
        });
    }
    let n = order.len();
    let m = partition.block_count();
    let mut adj = vec![false; m * m];
    for x in 0..n {
        for y in 0..n {
            if order.lt(x, y) {
                adj[partition.block_of(x) * m + partition.block_of(y)] = true;
            }
        }
    }
    close_in_place(&mut adj, m);
    let acyclic = (0..m).all(|a| !adj[a * m + a]);
    Ok(InducedRelation {
        block_count: m,
        adj,
        acyclic,
    })
}

/// A plain boolean relation on `{0, .., n-1}`; unlike [`StrictPoset`] it may
/// contain loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolRelation {
    n: usize,
    data: Vec<bool>,
}

impl BoolRelation {
    pub(crate) fn new(n: usize, data: Vec<bool>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        BoolRelation { n, data }
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when the relation has no elements.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// True if `(x, y)` is in the relation.
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[x * self.n + y]
    }

    /// Row `x` as a slice.
    pub fn row(&self, x: usize) -> &[bool] {
        &self.data[x * self.n..(x + 1) * self.n]
    }

    /// Number of elements `x` with `(x, x)` in the relation.
    pub fn loop_count(&self) -> usize {
        (0..self.n).filter(|&x| self.get(x, x)).count()
    }
}

/// Projects the induced block relation back onto the elements:
/// `(x, y)` is in the result when the block of `x` relates to the block of
/// `y`. The diagonal entry at `x` is set exactly when the block of `x` lies
/// on a cycle, so loops witness order violations of the partition.
pub fn base_space_projection(
    order: &StrictPoset,
    partition: &LabeledPartition,
) -> Result<BoolRelation, PosetError> {
    let rel = induced_quotient(order, partition)?;
    let n = order.len();
    let mut data = vec![false; n * n];
    for x in 0..n {
        for y in 0..n {
            data[x * n + y] = rel.lt(partition.block_of(x), partition.block_of(y));
        }
    }
    Ok(BoolRelation::new(n, data))
}

/// Merges two non-comparable blocks of a strict block order and returns the
/// closed relation on the remaining `m - 1` blocks. The union keeps the lower
/// of the two indices; blocks above the higher index shift down by one. The
/// result is again a strict partial order: a two-element antichain always
/// yields a regular one-step quotient.
pub fn quotient_merge(
    rel: &InducedRelation,
    a: usize,
    b: usize,
) -> Result<InducedRelation, PosetError> {
    let m = rel.block_count();
    if a >= m {
        return Err(PosetError::BlockOutOfRange(a));
    }
    if b >= m {
        return Err(PosetError::BlockOutOfRange(b));
    }
    if a == b || rel.comparable(a, b) {
        return Err(PosetError::ComparableBlocks(a, b));
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let map = |k: usize| -> usize {
        if k == hi {
            lo
        } else if k > hi {
            k - 1
        } else {
            k
        }
    };
    let new_m = m - 1;
    let mut adj = vec![false; new_m * new_m];
    for x in 0..m {
        for y in 0..m {
            if rel.lt(x, y) {
                adj[map(x) * new_m + map(y)] = true;
            }
        }
    }
    close_in_place(&mut adj, new_m);
    let acyclic = (0..new_m).all(|k| !adj[k * new_m + k]);
    debug_assert!(acyclic, "merging an antichain must preserve regularity");
    Ok(InducedRelation {
        block_count: new_m,
        adj,
        acyclic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> StrictPoset {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        transitive_closure(n, &edges).unwrap()
    }

    #[test]
    fn closure_of_chain_relates_all_increasing_pairs() {
        let p = chain(4);
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(p.lt(x, y), x < y);
            }
        }
    }

    #[test]
    fn cycle_reports_lowest_element() {
        let err = transitive_closure(4, &[(1, 3), (3, 1)]).unwrap_err();
        assert_eq!(err, PosetError::CycleDetected(1));
        let err = transitive_closure(2, &[(0, 0)]).unwrap_err();
        assert_eq!(err, PosetError::CycleDetected(0));
    }

    #[test]
    fn out_of_range_edge_is_rejected() {
        let err = transitive_closure(2, &[(0, 5)]).unwrap_err();
        assert_eq!(err, PosetError::ElementOutOfRange(5));
    }

    #[test]
    fn antichains() {
        // a < b, c < d over {a, b, c, d} = {0, 1, 2, 3}.
        let p = transitive_closure(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(p.is_antichain(&[0, 2]));
        assert!(p.is_antichain(&[0, 3]));
        assert!(!p.is_antichain(&[0, 1]));
        assert!(p.is_antichain(&[2]));
        assert!(p.is_antichain(&[]));
    }

    #[test]
    fn induced_quotient_of_regular_partition_is_acyclic() {
        // a < b, c < d; blocks {a, c} and {b, d} give a two-block chain.
        let p = transitive_closure(4, &[(0, 1), (2, 3)]).unwrap();
        let q = LabeledPartition::from_blocks(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        let rel = induced_quotient(&p, &q).unwrap();
        assert!(rel.is_acyclic());
        assert!(rel.lt(0, 1));
        assert!(!rel.lt(1, 0));
    }

    #[test]
    fn merging_endpoints_of_a_chain_creates_a_cycle() {
        // a < b < c with blocks {a, c} and {b}: the lift has a loop on {a, c}
        // and after closure every block sits on a cycle.
        let p = chain(3);
        let q = LabeledPartition::from_blocks(3, &[vec![0, 2], vec![1]]).unwrap();
        let rel = induced_quotient(&p, &q).unwrap();
        assert!(!rel.is_acyclic());
        let e = base_space_projection(&p, &q).unwrap();
        assert_eq!(e.loop_count(), 3);
    }

    #[test]
    fn one_point_quotient_is_regular_iff_block_is_antichain() {
        let p = transitive_closure(4, &[(0, 1), (2, 3)]).unwrap();
        let antichain = LabeledPartition::from_blocks(4, &[vec![0, 2], vec![1], vec![3]]).unwrap();
        assert!(induced_quotient(&p, &antichain).unwrap().is_acyclic());
        let comparable = LabeledPartition::from_blocks(4, &[vec![0, 1], vec![2], vec![3]]).unwrap();
        assert!(!induced_quotient(&p, &comparable).unwrap().is_acyclic());
    }

    #[test]
    fn projection_diagonal_marks_exactly_the_cyclic_blocks() {
        // a < b and a standalone pair c, d; merging a with b is irregular but
        // c and d stay off every cycle.
        let p = transitive_closure(4, &[(0, 1)]).unwrap();
        let q = LabeledPartition::from_blocks(4, &[vec![0, 1], vec![2], vec![3]]).unwrap();
        let e = base_space_projection(&p, &q).unwrap();
        assert!(e.get(0, 0) && e.get(1, 1));
        assert!(!e.get(2, 2) && !e.get(3, 3));
        assert_eq!(e.loop_count(), 2);
    }

    #[test]
    fn quotient_merge_rejects_comparable_blocks_and_merges_antichains() {
        let p = transitive_closure(4, &[(0, 1), (2, 3)]).unwrap();
        let singletons = LabeledPartition::singletons(4);
        let rel = induced_quotient(&p, &singletons).unwrap();
        assert_eq!(
            quotient_merge(&rel, 0, 1).unwrap_err(),
            PosetError::ComparableBlocks(0, 1)
        );
        // Merge {a} with {c}: blocks become {a, c}, {b}, {d} and the union is
        // below both b and d.
        let merged = quotient_merge(&rel, 0, 2).unwrap();
        assert!(merged.is_acyclic());
        assert_eq!(merged.block_count(), 3);
        assert!(merged.lt(0, 1));
        assert!(merged.lt(0, 2));
        assert!(!merged.comparable(1, 2));
    }

    #[test]
    fn quotient_merge_closes_transitively_through_the_union() {
        // x < a, b < y: merging {a} and {b} makes x below y through the union.
        let p = transitive_closure(4, &[(0, 1), (2, 3)]).unwrap();
        let rel = induced_quotient(&p, &LabeledPartition::singletons(4)).unwrap();
        // Blocks: 0 = {x}, 1 = {a}, 2 = {b}, 3 = {y} with x < a and b < y.
        let merged = quotient_merge(&rel, 1, 2).unwrap();
        // New blocks: 0 = {x}, 1 = {a, b}, 2 = {y}.
        assert!(merged.lt(0, 1));
        assert!(merged.lt(1, 2));
        assert!(merged.lt(0, 2), "closure must add the through-edge");
    }
}
