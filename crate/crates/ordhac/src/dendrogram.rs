//! Partial dendrograms: merge histories, the partition-valued view, and
//! ultrametric completions.
//!
//! A merge history is an ordered list of block merges at non-decreasing
//! heights; blocks are labeled by their minimum member. The associated
//! dendrogram function maps a height `t` to the partition obtained by
//! applying every merge at height `<= t`, so a merge is already contained in
//! the partition at exactly its own height. Histories that do not reach the
//! one-block partition are *partial* dendrograms; they arise when merging is
//! stopped by order constraints.
//!
//! A complete dendrogram is equivalent to an ultrametric ([`PartialDendrogram::psi`]):
//! the distance of two elements is the height of their lowest common merge.
//! A partial dendrogram embeds into the ultrametrics by joining its remaining
//! blocks at `diameter + epsilon` ([`PartialDendrogram::kappa`]); reading off
//! distances directly gives the same matrix
//! ([`PartialDendrogram::complete_ultrametric`]). For `epsilon > 0` the
//! embedding is injective — distinct partial dendrograms stay distinct — while
//! `epsilon = 0` may collide and is therefore only reachable through the
//! `*_allowing_zero` variants.

use crate::dissimilarity::{pair_count, DissimilarityError, DissimilarityMatrix};
use crate::partition::LabeledPartition;
use crate::scalar::{cast, cast_usize, Scalar};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by dendrogram validation and completion.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DendrogramError {
    /// A merge height is NaN, infinite or negative.
    #[error("merge {0} has an invalid height")]
    InvalidHeight(usize),
    /// Heights must be non-decreasing along the history.
    #[error("merge {0} is lower than its predecessor")]
    NonMonotoneHeights(usize),
    /// A merge names a block that is not present at that point.
    #[error("merge {0} does not combine two existing blocks")]
    InvalidMergeSequence(usize),
    /// The operation needs a complete dendrogram.
    #[error("dendrogram does not reach the one-block partition")]
    NotComplete,
    /// Epsilon must be strictly positive (or non-negative for the
    /// `*_allowing_zero` variants).
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    /// An embedded dissimilarity operation failed.
    #[error(transparent)]
    Dissimilarity(#[from] DissimilarityError),
}

/// One merge: the two block labels combined and the height at which they
/// join. Labels are minimum member indices; `a < b` after normalization and
/// the union keeps label `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge<F> {
    pub a: usize,
    pub b: usize,
    pub height: F,
}

/// JSON bridge for one merge record.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MergeRecord {
    pub a: usize,
    pub b: usize,
    pub height: f64,
}

/// An ordered list of merges over `{0, .., n-1}`. Plain data: validation
/// happens in [`PartialDendrogram::from_merge_history`].
#[derive(Debug, Clone, PartialEq)]
pub struct MergeHistory<F> {
    n: usize,
    merges: Vec<Merge<F>>,
}

impl<F: Scalar> MergeHistory<F> {
    /// Wraps merges over `n` elements without validating them.
    pub fn new(n: usize, merges: Vec<Merge<F>>) -> Self {
        MergeHistory { n, merges }
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when there are no elements.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The merges in order.
    pub fn merges(&self) -> &[Merge<F>] {
        &self.merges
    }

    /// The history as JSON-ready records with `f64` heights.
    pub fn to_records(&self) -> Vec<MergeRecord> {
        self.merges
            .iter()
            .map(|m| MergeRecord {
                a: m.a,
                b: m.b,
                height: m.height.to_f64().expect("height fits f64"),
            })
            .collect()
    }

    /// Rebuilds a history from records produced by [`Self::to_records`].
    pub fn from_records(n: usize, records: &[MergeRecord]) -> Self {
        let merges = records
            .iter()
            .map(|r| Merge {
                a: r.a,
                b: r.b,
                height: cast(r.height),
            })
            .collect();
        MergeHistory { n, merges }
    }

    /// Serializes the history as a JSON array of `{a, b, height}` objects.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_records()).expect("records serialize")
    }

    /// Parses a JSON array of `{a, b, height}` objects.
    pub fn from_json(n: usize, json: &str) -> Result<Self, serde_json::Error> {
        let records: Vec<MergeRecord> = serde_json::from_str(json)?;
        Ok(Self::from_records(n, &records))
    }
}

/// Summands of the fit between a partial dendrogram's ultrametric completion
/// and a dissimilarity, split by pair type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorProfile<F> {
    /// Sum of `|u - d|^p` over pairs merged by the dendrogram.
    pub alpha: F,
    /// Sum of `|K - d|^p` over pairs split across remaining blocks, where
    /// `K = diameter + epsilon`.
    pub beta: F,
    /// `(alpha + beta) / n`.
    pub mean_error: F,
}

/// The top height a completion joins at: `diameter + epsilon`, nudged upward
/// by a couple of machine epsilons when a positive `epsilon` underflows
/// against the diameter (so the join stays strictly above every merge).
/// `epsilon = 0` is returned as the diameter itself.
pub fn guarded_top<F: Scalar>(diameter: F, epsilon: F) -> F {
    let top = diameter + epsilon;
    if epsilon > F::zero() && top <= diameter {
        let bumped = diameter + diameter * F::epsilon() * cast(2.0);
        debug_assert!(bumped > diameter);
        bumped
    } else {
        top
    }
}

/// A validated merge history: heights are finite, non-negative and
/// non-decreasing, and every merge combines two blocks present at that point.
///
/// Equality is equality of dendrogram functions: two histories compare equal
/// exactly when they produce the same partition at every height, so the order
/// of merges at a shared height does not matter.
#[derive(Debug, Clone)]
pub struct PartialDendrogram<F> {
    history: MergeHistory<F>,
}

impl<F: Scalar> PartialDendrogram<F> {
    /// Validates a merge history. Records are normalized so `a < b`.
    pub fn from_merge_history(history: MergeHistory<F>) -> Result<Self, DendrogramError> {
        let n = history.n;
        let mut merges = history.merges;
        let mut active = vec![true; n];
        let mut last = F::neg_infinity();
        for (idx, merge) in merges.iter_mut().enumerate() {
            if !merge.height.is_finite() || merge.height < F::zero() {
                return Err(DendrogramError::InvalidHeight(idx));
            }
            if merge.height < last {
                return Err(DendrogramError::NonMonotoneHeights(idx));
            }
            last = merge.height;
            let (a, b) = (merge.a.min(merge.b), merge.a.max(merge.b));
            if a == b || b >= n || !active[a] || !active[b] {
                return Err(DendrogramError::InvalidMergeSequence(idx));
            }
            active[b] = false;
            merge.a = a;
            merge.b = b;
        }
        Ok(PartialDendrogram {
            history: MergeHistory { n, merges },
        })
    }

    /// Wraps a history known to be valid (used by the clustering engine,
    /// which only emits valid ones). Validity is re-checked in debug builds.
    pub(crate) fn from_valid_history(history: MergeHistory<F>) -> Self {
        debug_assert!(Self::from_merge_history(history.clone()).is_ok());
        PartialDendrogram { history }
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.history.n
    }

    /// True when there are no elements.
    pub fn is_empty(&self) -> bool {
        self.history.n == 0
    }

    /// The underlying history.
    pub fn history(&self) -> &MergeHistory<F> {
        &self.history
    }

    /// The partition at height `t`: every merge with height `<= t` applied.
    pub fn theta_at(&self, t: F) -> LabeledPartition {
        let mut labels: Vec<usize> = (0..self.history.n).collect();
        let mut members = singleton_members(self.history.n);
        for merge in &self.history.merges {
            if merge.height > t {
                break;
            }
            apply_merge(&mut labels, &mut members, merge.a, merge.b);
        }
        LabeledPartition::from_assignment(&labels).expect("replay yields a partition")
    }

    /// The final partition, after every merge.
    pub fn theta_infinity(&self) -> LabeledPartition {
        self.theta_at(F::infinity())
    }

    /// True when the final partition has a single block (or `n <= 1`).
    pub fn is_complete(&self) -> bool {
        self.history.merges.len() + 1 == self.history.n || self.history.n <= 1
    }

    /// Number of blocks in the final partition.
    pub fn final_block_count(&self) -> usize {
        self.history.n - self.history.merges.len()
    }

    /// Height of the last merge; zero for an empty history. This is the
    /// diameter of the dendrogram: the height where it stops changing.
    pub fn diameter(&self) -> F {
        self.history.merges.last().map_or(F::zero(), |m| m.height)
    }

    /// The distinct values of the dendrogram function in height order:
    /// `(0, theta(0))` first, then one entry per distinct positive merge
    /// height. Merges sharing a height appear as a single step.
    pub fn partition_chain(&self) -> Vec<(F, LabeledPartition)> {
        let mut labels: Vec<usize> = (0..self.history.n).collect();
        let mut members = singleton_members(self.history.n);
        let mut chain = Vec::new();
        let mut idx = 0;
        let merges = &self.history.merges;
        // theta(0): all height-zero merges applied.
        while idx < merges.len() && merges[idx].height == F::zero() {
            apply_merge(&mut labels, &mut members, merges[idx].a, merges[idx].b);
            idx += 1;
        }
        chain.push((
            F::zero(),
            LabeledPartition::from_assignment(&labels).expect("replay yields a partition"),
        ));
        while idx < merges.len() {
            let h = merges[idx].height;
            while idx < merges.len() && merges[idx].height == h {
                apply_merge(&mut labels, &mut members, merges[idx].a, merges[idx].b);
                idx += 1;
            }
            chain.push((
                h,
                LabeledPartition::from_assignment(&labels).expect("replay yields a partition"),
            ));
        }
        chain
    }

    /// Canonical encoding of the dendrogram function, used for equality and
    /// hashing: the partition chain with heights as normalized `f64` bits.
    pub(crate) fn canonical_key(&self) -> Vec<(u64, Vec<usize>)> {
        self.partition_chain()
            .into_iter()
            .map(|(h, p)| {
                let bits = (h.to_f64().expect("height fits f64") + 0.0).to_bits();
                (bits, p.assignment().to_vec())
            })
            .collect()
    }

    /// The ultrametric of a complete dendrogram: `u(x, y)` is the height of
    /// the merge that first puts `x` and `y` into one block.
    pub fn psi(&self) -> Result<DissimilarityMatrix<F>, DendrogramError> {
        if !self.is_complete() {
            return Err(DendrogramError::NotComplete);
        }
        let heights = self.pair_heights();
        debug_assert!(heights.iter().all(|h| !h.is_nan()));
        Ok(DissimilarityMatrix::from_condensed(self.history.n, heights)?)
    }

    /// Extends a partial dendrogram to a complete one by joining all
    /// remaining blocks at `diameter + epsilon`. Complete dendrograms are
    /// returned unchanged. Requires `epsilon > 0`.
    pub fn kappa(&self, epsilon: F) -> Result<Self, DendrogramError> {
        if epsilon <= F::zero() {
            return Err(DendrogramError::NonPositiveEpsilon);
        }
        Ok(self.kappa_unchecked(epsilon))
    }

    /// [`Self::kappa`] with `epsilon = 0` permitted. The zero completion can
    /// identify distinct partial dendrograms; use only where that is the
    /// point.
    pub fn kappa_allowing_zero(&self, epsilon: F) -> Result<Self, DendrogramError> {
        if epsilon < F::zero() {
            return Err(DendrogramError::NonPositiveEpsilon);
        }
        Ok(self.kappa_unchecked(epsilon))
    }

    fn kappa_unchecked(&self, epsilon: F) -> Self {
        if self.is_complete() {
            return self.clone();
        }
        let top = guarded_top(self.diameter(), epsilon);
        let mut labels: Vec<usize> = (0..self.history.n).collect();
        let mut members = singleton_members(self.history.n);
        for merge in &self.history.merges {
            apply_merge(&mut labels, &mut members, merge.a, merge.b);
        }
        let mut remaining: Vec<usize> = members
            .iter()
            .enumerate()
            .filter_map(|(label, m)| m.as_ref().map(|_| label))
            .collect();
        remaining.sort_unstable();
        let mut merges = self.history.merges.clone();
        for &label in &remaining[1..] {
            merges.push(Merge {
                a: remaining[0],
                b: label,
                height: top,
            });
        }
        PartialDendrogram {
            history: MergeHistory {
                n: self.history.n,
                merges,
            },
        }
    }

    /// The ultrametric of the `epsilon`-completion, computed directly: merged
    /// pairs keep their merge height, pairs split across remaining blocks get
    /// `diameter + epsilon`. Identical (bit for bit) to
    /// `self.kappa(epsilon)?.psi()`. Requires `epsilon > 0`.
    pub fn complete_ultrametric(&self, epsilon: F) -> Result<DissimilarityMatrix<F>, DendrogramError> {
        if epsilon <= F::zero() {
            return Err(DendrogramError::NonPositiveEpsilon);
        }
        self.complete_ultrametric_unchecked(epsilon)
    }

    /// [`Self::complete_ultrametric`] with `epsilon = 0` permitted.
    pub fn complete_ultrametric_allowing_zero(
        &self,
        epsilon: F,
    ) -> Result<DissimilarityMatrix<F>, DendrogramError> {
        if epsilon < F::zero() {
            return Err(DendrogramError::NonPositiveEpsilon);
        }
        self.complete_ultrametric_unchecked(epsilon)
    }

    fn complete_ultrametric_unchecked(&self, epsilon: F) -> Result<DissimilarityMatrix<F>, DendrogramError> {
        let top = guarded_top(self.diameter(), epsilon);
        let mut heights = self.pair_heights();
        for h in &mut heights {
            if h.is_nan() {
                *h = top;
            }
        }
        Ok(DissimilarityMatrix::from_condensed(self.history.n, heights)?)
    }

    /// Splits the `p`-th power of the fit `||U_epsilon - d||_p` into the
    /// contribution of merged pairs (`alpha`) and split pairs (`beta`), plus
    /// their per-element mean. Requires `epsilon >= 0`.
    pub fn epsilon_error_profile(
        &self,
        d: &DissimilarityMatrix<F>,
        p: u32,
        epsilon: F,
    ) -> Result<ErrorProfile<F>, DendrogramError> {
        if epsilon < F::zero() {
            return Err(DendrogramError::NonPositiveEpsilon);
        }
        if p == 0 {
            return Err(DissimilarityError::InvalidP.into());
        }
        if d.len() != self.history.n {
            return Err(DissimilarityError::DimensionMismatch {
                expected: self.history.n,
                found: d.len(),
            }
            .into());
        }
        let top = guarded_top(self.diameter(), epsilon);
        let heights = self.pair_heights();
        let mut alpha = F::zero();
        let mut beta = F::zero();
        for (u, dv) in heights.iter().zip(d.condensed()) {
            if u.is_nan() {
                beta = beta + (top - *dv).abs().powi(p as i32);
            } else {
                alpha = alpha + (*u - *dv).abs().powi(p as i32);
            }
        }
        let mean_error = (alpha + beta) / cast_usize(self.history.n);
        Ok(ErrorProfile {
            alpha,
            beta,
            mean_error,
        })
    }

    /// Text export in the common linkage-matrix convention: one row
    /// `id_a,id_b,height,new_size` per merge, leaves numbered `0..n` and the
    /// `i`-th merge creating id `n + i`.
    pub fn linkage_matrix(&self) -> String {
        let n = self.history.n;
        let mut id: Vec<usize> = (0..n).collect();
        let mut size: Vec<usize> = vec![1; n];
        let mut out = String::new();
        for (i, merge) in self.history.merges.iter().enumerate() {
            let new_size = size[merge.a] + size[merge.b];
            out.push_str(&format!(
                "{},{},{},{}\n",
                id[merge.a],
                id[merge.b],
                merge.height.to_f64().expect("height fits f64"),
                new_size
            ));
            id[merge.a] = n + i;
            size[merge.a] = new_size;
        }
        out
    }

    /// Condensed merge heights: `NaN` marks pairs never put into one block.
    fn pair_heights(&self) -> Vec<F> {
        let n = self.history.n;
        let mut heights = vec![F::nan(); pair_count(n)];
        let mut labels: Vec<usize> = (0..n).collect();
        let mut members = singleton_members(n);
        for merge in &self.history.merges {
            let right = members[merge.b].take().expect("valid history");
            let left = members[merge.a].as_ref().expect("valid history");
            for &x in left {
                for &y in &right {
                    let (i, j) = (x.min(y), x.max(y));
                    heights[i * n - i * (i + 1) / 2 + (j - i - 1)] = merge.height;
                }
            }
            for &y in &right {
                labels[y] = merge.a;
            }
            members[merge.a].as_mut().expect("valid history").extend(right);
        }
        heights
    }
}

impl<F: Scalar> PartialEq for PartialDendrogram<F> {
    fn eq(&self, other: &Self) -> bool {
        self.history.n == other.history.n && self.canonical_key() == other.canonical_key()
    }
}

impl<F: Scalar> Eq for PartialDendrogram<F> {}

impl<F: Scalar> std::hash::Hash for PartialDendrogram<F> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.history.n.hash(state);
        self.canonical_key().hash(state);
    }
}

fn singleton_members(n: usize) -> Vec<Option<Vec<usize>>> {
    (0..n).map(|x| Some(vec![x])).collect()
}

fn apply_merge(labels: &mut [usize], members: &mut [Option<Vec<usize>>], a: usize, b: usize) {
    let right = members[b].take().expect("valid history");
    for &y in &right {
        labels[y] = a;
    }
    members[a].as_mut().expect("valid history").extend(right);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissimilarity::{is_ultrametric, pnorm_distance};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dendro(n: usize, merges: &[(usize, usize, f64)]) -> PartialDendrogram<f64> {
        let merges = merges
            .iter()
            .map(|&(a, b, height)| Merge { a, b, height })
            .collect();
        PartialDendrogram::from_merge_history(MergeHistory::new(n, merges)).unwrap()
    }

    /// Five elements a..e merged (c,d)@2, (a,b)@4.5, (cd,e)@8, (ab,cde)@10.
    fn five_point() -> PartialDendrogram<f64> {
        dendro(5, &[(2, 3, 2.0), (0, 1, 4.5), (2, 4, 8.0), (0, 2, 10.0)])
    }

    #[test]
    fn psi_reads_off_lowest_common_merge_heights() {
        let u = five_point().psi().unwrap();
        assert_eq!(u.get(2, 3), 2.0);
        assert_eq!(u.get(0, 1), 4.5);
        assert_eq!(u.get(3, 4), 8.0);
        assert_eq!(u.get(2, 4), 8.0);
        assert_eq!(u.get(0, 4), 10.0);
        assert_eq!(u.get(1, 2), 10.0);
        assert!(is_ultrametric(&u, 0.0));
    }

    #[test]
    fn theta_contains_a_merge_at_exactly_its_height() {
        let t = five_point();
        assert!(t.theta_at(1.999).is_singletons());
        let at2 = t.theta_at(2.0);
        assert_eq!(at2.blocks(), vec![vec![0], vec![1], vec![2, 3], vec![4]]);
        let at45 = t.theta_at(4.5);
        assert_eq!(at45.blocks(), vec![vec![0, 1], vec![2, 3], vec![4]]);
        assert_eq!(t.theta_at(10.0).block_count(), 1);
        assert_eq!(t.theta_infinity().block_count(), 1);
        assert_eq!(t.diameter(), 10.0);
        assert!(t.is_complete());
    }

    #[test]
    fn single_merge_diameter_is_its_height() {
        let t = dendro(3, &[(0, 2, 1.3)]);
        assert_eq!(t.diameter(), 1.3);
        assert!(!t.is_complete());
        assert_eq!(t.final_block_count(), 2);
    }

    #[test]
    fn empty_history_has_zero_diameter_and_constant_theta() {
        let t = dendro(4, &[]);
        assert_eq!(t.diameter(), 0.0);
        assert!(t.theta_at(100.0).is_singletons());
        let u = t.complete_ultrametric(0.5).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert_eq!(u.get(i, j), 0.5);
            }
        }
    }

    #[test]
    fn kappa_joins_remaining_blocks_at_diameter_plus_epsilon() {
        // b and c merged at 1; a and d still alone. Completing with
        // epsilon = 1 joins everything at 2.
        let t = dendro(4, &[(1, 2, 1.0)]);
        let complete = t.kappa(1.0).unwrap();
        assert!(complete.is_complete());
        assert_eq!(complete.diameter(), 2.0);
        let u = complete.psi().unwrap();
        assert_eq!(u.get(1, 2), 1.0);
        for &(i, j) in &[(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)] {
            assert_eq!(u.get(i, j), 2.0);
        }
    }

    #[test]
    fn kappa_is_identity_on_complete_dendrograms() {
        let t = five_point();
        assert_eq!(t.kappa(0.25).unwrap(), t);
    }

    #[test]
    fn completion_and_direct_ultrametric_agree_bit_for_bit() {
        let t = dendro(6, &[(0, 3, 1.0), (1, 2, 1.0), (0, 1, 2.5)]);
        for &eps in &[1e-12, 1e-6, 0.5, 3.0] {
            let via_kappa = t.kappa(eps).unwrap().psi().unwrap();
            let direct = t.complete_ultrametric(eps).unwrap();
            assert_eq!(via_kappa, direct);
        }
    }

    #[test]
    fn zero_epsilon_is_gated_and_can_collide() {
        // Two distinct partial dendrograms over four elements whose zero
        // completions coincide: every off-diagonal value becomes 1.
        let only_bc = dendro(4, &[(1, 2, 1.0)]);
        let two_pairs = dendro(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
        assert_ne!(only_bc, two_pairs);
        assert!(only_bc.complete_ultrametric(0.0).is_err());
        let u1 = only_bc.complete_ultrametric_allowing_zero(0.0).unwrap();
        let u2 = two_pairs.complete_ultrametric_allowing_zero(0.0).unwrap();
        assert_eq!(u1, u2);
        // A positive epsilon separates them again.
        let u1 = only_bc.complete_ultrametric(1e-6).unwrap();
        let u2 = two_pairs.complete_ultrametric(1e-6).unwrap();
        assert_ne!(u1, u2);
    }

    #[test]
    fn equality_ignores_the_order_of_merges_at_one_height() {
        let ab_first = dendro(4, &[(0, 1, 1.0), (2, 3, 1.0), (0, 2, 2.0)]);
        let cd_first = dendro(4, &[(2, 3, 1.0), (0, 1, 1.0), (0, 2, 2.0)]);
        assert_eq!(ab_first, cd_first);
        // Same merges at an intermediate height collapse in the chain.
        let chain = ab_first.partition_chain();
        assert_eq!(chain.len(), 3);
        assert_eq!(chain[1].0, 1.0);
        assert_eq!(chain[1].1.block_count(), 2);
    }

    #[test]
    fn nested_same_height_merges_compare_equal_as_functions() {
        // Three ways to gather {0, 1, 2} at height 1 differ as records but
        // describe the same dendrogram function.
        let left = dendro(3, &[(0, 1, 1.0), (0, 2, 1.0)]);
        let right = dendro(3, &[(1, 2, 1.0), (0, 1, 1.0)]);
        assert_eq!(left, right);
    }

    #[test]
    fn validation_rejects_bad_histories() {
        let non_monotone = MergeHistory::new(
            4,
            vec![
                Merge { a: 0, b: 1, height: 2.0 },
                Merge { a: 2, b: 3, height: 1.0 },
            ],
        );
        assert_eq!(
            PartialDendrogram::from_merge_history(non_monotone).unwrap_err(),
            DendrogramError::NonMonotoneHeights(1)
        );
        let stale_label = MergeHistory::new(
            3,
            vec![
                Merge { a: 0, b: 1, height: 1.0 },
                Merge { a: 1, b: 2, height: 2.0 },
            ],
        );
        assert_eq!(
            PartialDendrogram::from_merge_history(stale_label).unwrap_err(),
            DendrogramError::InvalidMergeSequence(1)
        );
        let negative = MergeHistory::new(2, vec![Merge { a: 0, b: 1, height: -1.0 }]);
        assert_eq!(
            PartialDendrogram::from_merge_history(negative).unwrap_err(),
            DendrogramError::InvalidHeight(0)
        );
        let self_merge = MergeHistory::new(2, vec![Merge { a: 1, b: 1, height: 1.0 }]);
        assert_eq!(
            PartialDendrogram::from_merge_history(self_merge).unwrap_err(),
            DendrogramError::InvalidMergeSequence(0)
        );
    }

    #[test]
    fn psi_needs_a_complete_dendrogram() {
        let t = dendro(3, &[(0, 1, 1.0)]);
        assert_eq!(t.psi().unwrap_err(), DendrogramError::NotComplete);
    }

    #[test]
    fn error_profile_splits_merged_and_split_pairs() {
        // Blocks {0, 1} (merged at 1) and {2}; d = (2, 3, 4); epsilon 0.5.
        let t = dendro(3, &[(0, 1, 1.0)]);
        let d = DissimilarityMatrix::from_condensed(3, vec![2.0, 3.0, 4.0]).unwrap();
        let profile = t.epsilon_error_profile(&d, 1, 0.5).unwrap();
        assert_eq!(profile.alpha, 1.0);
        assert_eq!(profile.beta, 4.0);
        assert_eq!(profile.mean_error, 5.0 / 3.0);
        // Consistency: alpha + beta is the p-th power of the fit.
        let u = t.complete_ultrametric(0.5).unwrap();
        let fit = pnorm_distance(&u, &d, 1).unwrap();
        assert_eq!(profile.alpha + profile.beta, fit);
    }

    #[test]
    fn linkage_matrix_uses_running_ids_and_sizes() {
        let text = five_point().linkage_matrix();
        let expected = "2,3,2,2\n0,1,4.5,2\n5,4,8,3\n6,7,10,5\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn json_round_trip() {
        let t = five_point();
        let json = t.history().to_json();
        let back = MergeHistory::<f64>::from_json(5, &json).unwrap();
        assert_eq!(back, *t.history());
    }

    #[test]
    fn guarded_top_never_collapses_onto_the_diameter() {
        // f32 cannot represent 10 + 1e-12; the guard bumps the join upward.
        let top = guarded_top(10.0f32, 1e-12f32);
        assert!(top > 10.0);
        // f64 resolves the same sum exactly.
        let top = guarded_top(10.0f64, 1e-12f64);
        assert_eq!(top, 10.0 + 1e-12);
        // Zero epsilon means the diameter itself.
        assert_eq!(guarded_top(10.0f64, 0.0), 10.0);
    }

    /// Random valid partial dendrograms for the embedding properties.
    fn random_dendrogram(rng: &mut StdRng, n: usize) -> PartialDendrogram<f64> {
        let k = rng.random_range(0..n);
        let mut active: Vec<usize> = (0..n).collect();
        let mut height = 0.0f64;
        let mut merges = Vec::new();
        for _ in 0..k {
            height += rng.random_range(0.0..2.0);
            let i = rng.random_range(0..active.len());
            let mut j = rng.random_range(0..active.len() - 1);
            if j >= i {
                j += 1;
            }
            let (a, b) = (active[i].min(active[j]), active[i].max(active[j]));
            merges.push(Merge { a, b, height });
            active.retain(|&l| l != b);
        }
        PartialDendrogram::from_merge_history(MergeHistory::new(n, merges)).unwrap()
    }

    #[test]
    fn random_completions_are_ultrametric_and_commute() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(2..10);
            let t = random_dendrogram(&mut rng, n);
            let eps = 10f64.powi(-rng.random_range(1..13));
            let direct = t.complete_ultrametric(eps).unwrap();
            assert!(is_ultrametric(&direct, 0.0));
            let via_kappa = t.kappa(eps).unwrap().psi().unwrap();
            assert_eq!(direct, via_kappa);
        }
    }
}
