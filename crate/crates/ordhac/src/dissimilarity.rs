//! Dissimilarity matrices, linkage functions and order-aware separation.
//!
//! A [`DissimilarityMatrix`] stores the values of a symmetric, non-negative
//! dissimilarity with zero diagonal in condensed form: one entry per unordered
//! pair, pairs `(i, j)` with `i < j` laid out row by row. An ultrametric is a
//! dissimilarity that additionally satisfies the strong triangle inequality
//! `d(x, z) <= max(d(x, y), d(y, z))`; [`is_ultrametric`] checks it on every
//! triple.
//!
//! Linkage functions lift a dissimilarity to disjoint blocks: minimum over
//! cross pairs (single), maximum (complete) or arithmetic mean (average). All
//! three are convex: the value always lies between the single and complete
//! linkage of the same blocks.

use crate::partition::LabeledPartition;
use crate::poset::{induced_quotient, StrictPoset};
use crate::scalar::{cast_usize, Scalar};
use thiserror::Error;

/// Errors raised by dissimilarity constructors and operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DissimilarityError {
    /// The operation needs at least two elements.
    #[error("at least two elements are required")]
    TooFewElements,
    /// A linkage argument block is empty.
    #[error("linkage blocks must be non-empty")]
    EmptyBlock,
    /// The two linkage blocks share an element.
    #[error("linkage blocks must be disjoint (element {0} is in both)")]
    OverlappingBlocks(usize),
    /// A block member lies outside the matrix.
    #[error("element {0} is out of range")]
    ElementOutOfRange(usize),
    /// Two matrices (or a matrix and a partition) disagree on size.
    #[error("size mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    /// An entry is negative, NaN or infinite.
    #[error("entry ({0}, {1}) is not a finite non-negative value")]
    InvalidEntry(usize, usize),
    /// The input is not a valid square or condensed dissimilarity shape.
    #[error("input is not a symmetric zero-diagonal matrix of matching size")]
    InvalidShape,
    /// The norm exponent must be a positive integer.
    #[error("the norm exponent p must be at least 1")]
    InvalidP,
}

/// Linkage function: how a dissimilarity extends to a pair of blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkageKind {
    /// Minimum over cross pairs.
    Single,
    /// Arithmetic mean over cross pairs.
    Average,
    /// Maximum over cross pairs.
    Complete,
}

impl LinkageKind {
    /// All linkage kinds, in the conventional single/average/complete order.
    pub const ALL: [LinkageKind; 3] = [LinkageKind::Single, LinkageKind::Average, LinkageKind::Complete];
}

impl std::fmt::Display for LinkageKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LinkageKind::Single => "single",
            LinkageKind::Average => "average",
            LinkageKind::Complete => "complete",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for LinkageKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" | "sl" => Ok(LinkageKind::Single),
            "average" | "al" => Ok(LinkageKind::Average),
            "complete" | "cl" => Ok(LinkageKind::Complete),
            other => Err(format!("unknown linkage: {other}")),
        }
    }
}

/// How candidate linkage values are matched against the current minimum when
/// collecting ties. Exact comparison is right for synthetic data with exact
/// ties; measured data usually wants a small absolute or relative slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TieTolerance<F> {
    /// Only exactly equal values tie.
    Exact,
    /// Values within `min + slack` tie.
    Absolute(F),
    /// Values within `min * (1 + slack)` tie.
    Relative(F),
}

impl<F: Scalar> TieTolerance<F> {
    /// True if `value` ties with the current minimum `min` (`value >= min`).
    pub fn matches(&self, value: F, min: F) -> bool {
        match *self {
            TieTolerance::Exact => value == min,
            TieTolerance::Absolute(slack) => value <= min + slack,
            TieTolerance::Relative(slack) => value <= min * (F::one() + slack),
        }
    }
}

/// A symmetric, non-negative dissimilarity with zero diagonal, stored
/// condensed: entry for pair `(i, j)`, `i < j`, at
/// `i * n - i * (i + 1) / 2 + (j - i - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix<F> {
    n: usize,
    values: Vec<F>,
}

/// Number of unordered pairs over `n` elements.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl<F: Scalar> DissimilarityMatrix<F> {
    /// Builds a matrix from condensed values (one per unordered pair).
    pub fn from_condensed(n: usize, values: Vec<F>) -> Result<Self, DissimilarityError> {
        if n == 0 || values.len() != pair_count(n) {
            return Err(DissimilarityError::InvalidShape);
        }
        let matrix = DissimilarityMatrix { n, values };
        for i in 0..n {
            for j in i + 1..n {
                let v = matrix.get(i, j);
                if !v.is_finite() || v < F::zero() {
                    return Err(DissimilarityError::InvalidEntry(i, j));
                }
            }
        }
        Ok(matrix)
    }

    /// Builds a matrix from full square rows, validating symmetry and the
    /// zero diagonal exactly.
    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self, DissimilarityError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(DissimilarityError::InvalidShape);
        }
        for (i, row) in rows.iter().enumerate() {
            if row[i] != F::zero() {
                return Err(DissimilarityError::InvalidShape);
            }
            for j in 0..n {
                if rows[i][j] != rows[j][i] {
                    return Err(DissimilarityError::InvalidShape);
                }
            }
        }
        let mut values = Vec::with_capacity(pair_count(n));
        for i in 0..n {
            for j in i + 1..n {
                values.push(rows[i][j]);
            }
        }
        Self::from_condensed(n, values)
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when the matrix has no elements (never holds after construction).
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Dissimilarity between two elements; zero on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> F {
        if i == j {
            return F::zero();
        }
        let (i, j) = (i.min(j), i.max(j));
        self.values[condensed_index(self.n, i, j)]
    }

    /// Condensed values, pairs `(i, j)` with `i < j` row by row.
    pub fn condensed(&self) -> &[F] {
        &self.values
    }

    pub(crate) fn condensed_mut(&mut self) -> &mut [F] {
        &mut self.values
    }

    /// The matrix as full square rows.
    pub fn square_rows(&self) -> Vec<Vec<F>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Linkage value of two non-empty, disjoint blocks.
pub fn linkage<F: Scalar>(
    kind: LinkageKind,
    d: &DissimilarityMatrix<F>,
    p: &[usize],
    q: &[usize],
) -> Result<F, DissimilarityError> {
    if p.is_empty() || q.is_empty() {
        return Err(DissimilarityError::EmptyBlock);
    }
    for &x in p.iter().chain(q.iter()) {
        if x >= d.len() {
            return Err(DissimilarityError::ElementOutOfRange(x));
        }
    }
    let mut min = F::infinity();
    let mut max = F::neg_infinity();
    let mut sum = F::zero();
    for &x in p {
        for &y in q {
            if x == y {
                return Err(DissimilarityError::OverlappingBlocks(x));
            }
            let v = d.get(x, y);
            min = min.min(v);
            max = max.max(v);
            sum = sum + v;
        }
    }
    Ok(match kind {
        LinkageKind::Single => min,
        LinkageKind::Complete => max,
        LinkageKind::Average => sum / cast_usize::<F>(p.len() * q.len()),
    })
}

/// Smallest dissimilarity over distinct pairs.
pub fn separation<F: Scalar>(d: &DissimilarityMatrix<F>) -> Result<F, DissimilarityError> {
    if d.len() < 2 {
        return Err(DissimilarityError::TooFewElements);
    }
    Ok(d.condensed().iter().copied().fold(F::infinity(), F::min))
}

/// Largest dissimilarity over distinct pairs.
pub fn diameter<F: Scalar>(d: &DissimilarityMatrix<F>) -> Result<F, DissimilarityError> {
    if d.len() < 2 {
        return Err(DissimilarityError::TooFewElements);
    }
    Ok(d.condensed().iter().copied().fold(F::neg_infinity(), F::max))
}

/// True if every triple satisfies the strong triangle inequality up to `tol`.
pub fn is_ultrametric<F: Scalar>(d: &DissimilarityMatrix<F>, tol: F) -> bool {
    let n = d.len();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                let xy = d.get(x, y);
                let yz = d.get(y, z);
                let xz = d.get(x, z);
                if xz > xy.max(yz) + tol || xy > xz.max(yz) + tol || yz > xy.max(xz) + tol {
                    return false;
                }
            }
        }
    }
    true
}

/// `p`-norm of the entrywise difference of two dissimilarities, each
/// unordered pair counted once.
pub fn pnorm_distance<F: Scalar>(
    u: &DissimilarityMatrix<F>,
    d: &DissimilarityMatrix<F>,
    p: u32,
) -> Result<F, DissimilarityError> {
    if p == 0 {
        return Err(DissimilarityError::InvalidP);
    }
    if u.len() != d.len() {
        return Err(DissimilarityError::DimensionMismatch {
            expected: d.len(),
            found: u.len(),
        });
    }
    let mut total = F::zero();
    for (a, b) in u.condensed().iter().zip(d.condensed()) {
        total = total + (*a - *b).abs().powi(p as i32);
    }
    if p == 1 {
        Ok(total)
    } else {
        Ok(total.powf(F::one() / cast_usize::<F>(p as usize)))
    }
}

/// A dissimilarity space carrying a strict partial order on the same
/// elements.
#[derive(Debug, Clone)]
pub struct OrderedDissimilaritySpace<F> {
    order: StrictPoset,
    dist: DissimilarityMatrix<F>,
}

impl<F: Scalar> OrderedDissimilaritySpace<F> {
    /// Pairs an order with a dissimilarity over the same elements.
    pub fn new(order: StrictPoset, dist: DissimilarityMatrix<F>) -> Result<Self, DissimilarityError> {
        if order.len() != dist.len() {
            return Err(DissimilarityError::DimensionMismatch {
                expected: dist.len(),
                found: order.len(),
            });
        }
        Ok(OrderedDissimilaritySpace { order, dist })
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.dist.len()
    }

    /// True when the space has no elements.
    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    /// The strict partial order.
    pub fn order(&self) -> &StrictPoset {
        &self.order
    }

    /// The dissimilarity.
    pub fn dist(&self) -> &DissimilarityMatrix<F> {
        &self.dist
    }
}

/// Smallest linkage over non-comparable block pairs of `partition`, or `None`
/// when every pair of blocks is comparable (or there is only one block).
/// Blocks are comparable via the induced quotient relation.
pub fn noncomparable_separation<F: Scalar>(
    space: &OrderedDissimilaritySpace<F>,
    kind: LinkageKind,
    partition: &LabeledPartition,
) -> Result<Option<F>, DissimilarityError> {
    Ok(noncomparable_linkages(space, kind, partition)?
        .into_iter()
        .map(|(_, _, v)| v)
        .fold(None, |acc, v| Some(acc.map_or(v, |m: F| m.min(v)))))
}

/// All non-comparable block pairs whose linkage ties with the smallest one,
/// as `(block, block)` index pairs in lexicographic order.
pub fn minimal_noncomparable_pairs<F: Scalar>(
    space: &OrderedDissimilaritySpace<F>,
    kind: LinkageKind,
    partition: &LabeledPartition,
    tol: TieTolerance<F>,
) -> Result<Vec<(usize, usize)>, DissimilarityError> {
    let linkages = noncomparable_linkages(space, kind, partition)?;
    let min = linkages.iter().map(|&(_, _, v)| v).fold(F::infinity(), F::min);
    Ok(linkages
        .into_iter()
        .filter(|&(_, _, v)| tol.matches(v, min))
        .map(|(a, b, _)| (a, b))
        .collect())
}

/// Linkage values of all non-comparable block pairs, lexicographically.
fn noncomparable_linkages<F: Scalar>(
    space: &OrderedDissimilaritySpace<F>,
    kind: LinkageKind,
    partition: &LabeledPartition,
) -> Result<Vec<(usize, usize, F)>, DissimilarityError> {
    if partition.len() != space.len() {
        return Err(DissimilarityError::DimensionMismatch {
            expected: space.len(),
            found: partition.len(),
        });
    }
    let rel = induced_quotient(space.order(), partition).expect("sizes match");
    let blocks = partition.blocks();
    let mut out = Vec::new();
    for a in 0..blocks.len() {
        for b in a + 1..blocks.len() {
            if !rel.comparable(a, b) {
                out.push((a, b, linkage(kind, space.dist(), &blocks[a], &blocks[b])?));
            }
        }
    }
    Ok(out)
}

/// Replaces the dissimilarity of every comparable pair by `saturation`,
/// turning an ordered space into a plain one whose small values live on
/// non-comparable pairs. Choosing `saturation` at or above the diameter keeps
/// comparable merges last.
pub fn comparable_saturation<F: Scalar>(
    space: &OrderedDissimilaritySpace<F>,
    saturation: F,
) -> Result<DissimilarityMatrix<F>, DissimilarityError> {
    if !saturation.is_finite() || saturation < F::zero() {
        return Err(DissimilarityError::InvalidEntry(0, 0));
    }
    let n = space.len();
    let mut d = space.dist().clone();
    for i in 0..n {
        for j in i + 1..n {
            if space.order().comparable(i, j) {
                d.condensed_mut()[condensed_index(n, i, j)] = saturation;
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::transitive_closure;
    use proptest::prelude::*;

    /// The five-point ultrametric read off a dendrogram that merges (c, d) at
    /// 2.0, (a, b) at 4.5, (cd, e) at 8.0 and everything at 10.0.
    fn five_point_ultrametric() -> DissimilarityMatrix<f64> {
        let rows = vec![
            vec![0.0, 4.5, 10.0, 10.0, 10.0],
            vec![4.5, 0.0, 10.0, 10.0, 10.0],
            vec![10.0, 10.0, 0.0, 2.0, 8.0],
            vec![10.0, 10.0, 2.0, 0.0, 8.0],
            vec![10.0, 10.0, 8.0, 8.0, 0.0],
        ];
        DissimilarityMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn five_point_example_is_ultrametric_with_expected_extremes() {
        let d = five_point_ultrametric();
        assert!(is_ultrametric(&d, 0.0));
        assert_eq!(separation(&d).unwrap(), 2.0);
        assert_eq!(diameter(&d).unwrap(), 10.0);
    }

    #[test]
    fn strong_triangle_violations_are_detected() {
        let d = DissimilarityMatrix::from_condensed(3, vec![1.0, 5.0, 2.0]).unwrap();
        assert!(!is_ultrametric(&d, 0.0));
        assert!(is_ultrametric(&d, 3.0));
    }

    #[test]
    fn linkage_of_singleton_against_pair() {
        // Blocks {a} and {b, c} with d(a,b) = 1, d(a,c) = 3, d(b,c) = 9.
        let d = DissimilarityMatrix::from_condensed(3, vec![1.0, 3.0, 9.0]).unwrap();
        assert_eq!(linkage(LinkageKind::Single, &d, &[0], &[1, 2]).unwrap(), 1.0);
        assert_eq!(linkage(LinkageKind::Complete, &d, &[0], &[1, 2]).unwrap(), 3.0);
        assert_eq!(linkage(LinkageKind::Average, &d, &[0], &[1, 2]).unwrap(), 2.0);
    }

    #[test]
    fn linkage_rejects_bad_blocks() {
        let d = DissimilarityMatrix::from_condensed(3, vec![1.0, 3.0, 9.0]).unwrap();
        assert_eq!(
            linkage(LinkageKind::Single, &d, &[], &[1]),
            Err(DissimilarityError::EmptyBlock)
        );
        assert_eq!(
            linkage(LinkageKind::Single, &d, &[0, 1], &[1]),
            Err(DissimilarityError::OverlappingBlocks(1))
        );
        assert_eq!(
            linkage(LinkageKind::Single, &d, &[0], &[7]),
            Err(DissimilarityError::ElementOutOfRange(7))
        );
    }

    #[test]
    fn separation_needs_two_elements() {
        let d = DissimilarityMatrix::<f64>::from_condensed(1, vec![]).unwrap();
        assert_eq!(separation(&d), Err(DissimilarityError::TooFewElements));
        assert_eq!(diameter(&d), Err(DissimilarityError::TooFewElements));
    }

    #[test]
    fn construction_rejects_negative_asymmetric_and_nonzero_diagonal() {
        assert!(DissimilarityMatrix::from_condensed(3, vec![1.0, -2.0, 3.0]).is_err());
        assert!(DissimilarityMatrix::from_condensed(3, vec![1.0, f64::NAN, 3.0]).is_err());
        assert!(DissimilarityMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DissimilarityMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 0.0]]).is_err());
    }

    #[test]
    fn pnorm_matches_hand_computation() {
        let u = DissimilarityMatrix::from_condensed(3, vec![2.0, 3.0, 4.0]).unwrap();
        let d = DissimilarityMatrix::from_condensed(3, vec![1.0, 1.0, 2.0]).unwrap();
        // Differences 1, 2, 2.
        assert_eq!(pnorm_distance(&u, &d, 2).unwrap(), 3.0);
        assert_eq!(pnorm_distance(&u, &d, 1).unwrap(), 5.0);
        assert_eq!(pnorm_distance(&u, &d, 0), Err(DissimilarityError::InvalidP));
    }

    /// Running example: a < b, c < d with the smallest values on
    /// non-comparable pairs (a, c) and (a, d).
    fn running_example() -> OrderedDissimilaritySpace<f64> {
        let order = transitive_closure(4, &[(0, 1), (2, 3)]).unwrap();
        // Pairs (a,b), (a,c), (a,d), (b,c), (b,d), (c,d).
        let d = DissimilarityMatrix::from_condensed(4, vec![4.0, 1.0, 1.0, 5.0, 1.5, 6.0]).unwrap();
        OrderedDissimilaritySpace::new(order, d).unwrap()
    }

    #[test]
    fn noncomparable_separation_ignores_comparable_pairs() {
        let space = running_example();
        let singletons = LabeledPartition::singletons(4);
        let sep = noncomparable_separation(&space, LinkageKind::Single, &singletons).unwrap();
        assert_eq!(sep, Some(1.0));
        let ties =
            minimal_noncomparable_pairs(&space, LinkageKind::Single, &singletons, TieTolerance::Exact)
                .unwrap();
        assert_eq!(ties, vec![(0, 2), (0, 3)]);
    }

    #[test]
    fn noncomparable_separation_is_none_when_all_blocks_comparable() {
        let order = transitive_closure(2, &[(0, 1)]).unwrap();
        let d = DissimilarityMatrix::from_condensed(2, vec![1.0]).unwrap();
        let space = OrderedDissimilaritySpace::new(order, d).unwrap();
        let sep = noncomparable_separation(&space, LinkageKind::Single, &LabeledPartition::singletons(2))
            .unwrap();
        assert_eq!(sep, None);
    }

    #[test]
    fn saturation_rewrites_exactly_the_comparable_pairs() {
        // Chain a < b < c: all pairs comparable after closure.
        let order = transitive_closure(3, &[(0, 1), (1, 2)]).unwrap();
        let d = DissimilarityMatrix::from_condensed(3, vec![0.1, 0.2, 0.3]).unwrap();
        let space = OrderedDissimilaritySpace::new(order, d).unwrap();
        let saturated = comparable_saturation(&space, 1.0).unwrap();
        assert_eq!(saturated.condensed(), &[1.0, 1.0, 1.0]);

        let space = running_example();
        let saturated = comparable_saturation(&space, 9.0).unwrap();
        assert_eq!(saturated.get(0, 1), 9.0);
        assert_eq!(saturated.get(2, 3), 9.0);
        assert_eq!(saturated.get(0, 2), 1.0);
        assert_eq!(saturated.get(1, 2), 5.0);
    }

    #[test]
    fn tie_tolerance_modes() {
        assert!(TieTolerance::Exact.matches(2.0, 2.0));
        assert!(!TieTolerance::Exact.matches(2.0 + 1e-12, 2.0));
        assert!(TieTolerance::Absolute(0.1).matches(2.05, 2.0));
        assert!(!TieTolerance::Absolute(0.01).matches(2.05, 2.0));
        assert!(TieTolerance::Relative(0.1).matches(2.1, 2.0));
        assert!(!TieTolerance::Relative(0.01).matches(2.1, 2.0));
    }

    proptest! {
        /// Convexity: single <= average <= complete on random blocks.
        #[test]
        fn linkage_is_convex(values in proptest::collection::vec(0.0f64..100.0, 15),
                             split in 1usize..5) {
            let d = DissimilarityMatrix::from_condensed(6, values).unwrap();
            let p: Vec<usize> = (0..split).collect();
            let q: Vec<usize> = (split..6).collect();
            let sl = linkage(LinkageKind::Single, &d, &p, &q).unwrap();
            let al = linkage(LinkageKind::Average, &d, &p, &q).unwrap();
            let cl = linkage(LinkageKind::Complete, &d, &p, &q).unwrap();
            prop_assert!(sl <= al && al <= cl);
        }

        /// The condensed/square round trip is exact.
        #[test]
        fn square_round_trip(values in proptest::collection::vec(0.0f64..10.0, 10)) {
            let d = DissimilarityMatrix::from_condensed(5, values).unwrap();
            let back = DissimilarityMatrix::from_rows(&d.square_rows()).unwrap();
            prop_assert_eq!(d, back);
        }
    }
}
