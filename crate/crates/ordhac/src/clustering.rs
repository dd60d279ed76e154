//! Agglomerative clustering: classical, order-preserving, randomized N-fold
//! approximation and an exhaustive small-instance optimizer.
//!
//! The order-preserving procedure starts from singletons and repeatedly
//! merges a pair of blocks with minimal linkage among the pairs that are
//! *non-comparable* in the order induced on the current partition, re-inducing
//! the order after each merge. It halts when one block remains or all blocks
//! are pairwise comparable, which may leave a partial dendrogram. Ties are
//! resolved uniformly at random per step (which is not the same as sampling
//! the set of possible outputs uniformly), so the set of outputs is explored
//! by rerunning with fresh randomness.
//!
//! [`nfold_approximation`] draws `N` runs on independent, splittable RNG
//! streams derived from `(master seed, sample index)` — results are bitwise
//! reproducible and independent of how the samples are scheduled — and keeps
//! a run whose `epsilon`-completed ultrametric best fits the input.
//! [`exact_opt`] instead enumerates every tie-resolution branch depth-first,
//! deduplicating branches that describe the same partial dendrogram, and
//! returns all minimizers; it is the oracle the approximation is tested
//! against and is meant for small instances under an explicit budget.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dendrogram::{DendrogramError, Merge, MergeHistory, MergeRecord, PartialDendrogram};
use crate::dissimilarity::{
    comparable_saturation, pnorm_distance, DissimilarityError, DissimilarityMatrix, LinkageKind,
    OrderedDissimilaritySpace, TieTolerance,
};
use crate::poset::StrictPoset;
use crate::scalar::{cast, cast_usize, Scalar};

/// Errors raised by the clustering drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusteringError {
    /// The N-fold approximation needs at least one sample.
    #[error("at least one sample is required")]
    NoSamples,
    /// The exhaustive search visited more states than its budget allows.
    #[error("exhaustive search exceeded its budget of {limit} states")]
    SearchBudgetExceeded { limit: usize },
    /// A dendrogram operation failed.
    #[error(transparent)]
    Dendrogram(#[from] DendrogramError),
    /// A dissimilarity operation failed.
    #[error(transparent)]
    Dissimilarity(#[from] DissimilarityError),
}

/// Identifies the RNG stream a clustering result was sampled from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSeed {
    pub master_seed: u64,
    pub sample_index: u64,
}

/// A scored clustering: the dendrogram together with the fit of its
/// `epsilon`-completed ultrametric against the input dissimilarity, and the
/// parameters that produced the score.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult<F: Scalar> {
    pub dendrogram: PartialDendrogram<F>,
    /// `||U_epsilon(dendrogram) - d||_p`.
    pub fit: F,
    pub epsilon: F,
    pub p: u32,
    pub linkage: LinkageKind,
    /// RNG provenance for sampled results; `None` for exhaustive ones.
    pub seed: Option<SampleSeed>,
}

/// JSON bridge for a [`ClusteringResult`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusteringResultRecord {
    pub linkage: LinkageKind,
    pub epsilon: f64,
    pub p: u32,
    pub fit: f64,
    pub seed: Option<SampleSeed>,
    pub n: usize,
    pub merges: Vec<MergeRecord>,
}

impl<F: Scalar> ClusteringResult<F> {
    /// The result as a JSON-ready record with `f64` values.
    pub fn to_record(&self) -> ClusteringResultRecord {
        ClusteringResultRecord {
            linkage: self.linkage,
            epsilon: self.epsilon.to_f64().expect("epsilon fits f64"),
            p: self.p,
            fit: self.fit.to_f64().expect("fit fits f64"),
            seed: self.seed,
            n: self.dendrogram.len(),
            merges: self.dendrogram.history().to_records(),
        }
    }

    /// Rebuilds a result from its record, revalidating the history.
    pub fn from_record(record: &ClusteringResultRecord) -> Result<Self, ClusteringError> {
        let history = MergeHistory::from_records(record.n, &record.merges);
        Ok(ClusteringResult {
            dendrogram: PartialDendrogram::from_merge_history(history)?,
            fit: cast(record.fit),
            epsilon: cast(record.epsilon),
            p: record.p,
            linkage: record.linkage,
            seed: record.seed,
        })
    }
}

/// Outcome of [`nfold_approximation`]: the selected result plus the fit of
/// every sample in stream order.
#[derive(Debug, Clone, PartialEq)]
pub struct NFoldOutcome<F: Scalar> {
    pub best: ClusteringResult<F>,
    pub fits: Vec<F>,
}

/// The RNG stream used for sample `sample_index` of a run seeded with
/// `master_seed`. Streams are independent for distinct indices, so samples
/// can be drawn in any order — or in parallel — with identical results.
pub fn sample_rng(master_seed: u64, sample_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(sample_index);
    rng
}

/// Current blocks of an agglomeration run. Positions are sorted by block
/// label (minimum member), and `adj` is the induced comparability relation
/// maintained incrementally: merging two non-comparable blocks unions their
/// upper and lower sets and closes the relation in one pass.
#[derive(Debug, Clone)]
struct Blocks {
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
    block_of: Vec<usize>,
    adj: Vec<bool>,
}

impl Blocks {
    fn singletons(order: &StrictPoset) -> Self {
        let n = order.len();
        let mut adj = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                if order.lt(x, y) {
                    adj[x * n + y] = true;
                }
            }
        }
        Blocks {
            labels: (0..n).collect(),
            members: (0..n).map(|x| vec![x]).collect(),
            block_of: (0..n).collect(),
            adj,
        }
    }

    fn block_count(&self) -> usize {
        self.labels.len()
    }

    /// Minimal-linkage non-comparable block pairs within the tie tolerance,
    /// as `(position, position, linkage)` in lexicographic position order.
    /// Empty exactly when the procedure must halt.
    fn tie_candidates<F: Scalar>(
        &self,
        d: &DissimilarityMatrix<F>,
        kind: LinkageKind,
        tol: TieTolerance<F>,
    ) -> Vec<(usize, usize, F)> {
        let m = self.block_count();
        if m < 2 {
            return Vec::new();
        }
        let init = match kind {
            LinkageKind::Single => F::infinity(),
            LinkageKind::Complete => F::neg_infinity(),
            LinkageKind::Average => F::zero(),
        };
        let mut acc = vec![init; m * m];
        let n = self.block_of.len();
        for x in 0..n {
            let bx = self.block_of[x];
            for y in x + 1..n {
                let by = self.block_of[y];
                if bx == by {
                    continue;
                }
                let slot = &mut acc[bx.min(by) * m + bx.max(by)];
                let v = d.get(x, y);
                *slot = match kind {
                    LinkageKind::Single => slot.min(v),
                    LinkageKind::Complete => slot.max(v),
                    LinkageKind::Average => *slot + v,
                };
            }
        }
        let mut candidates = Vec::new();
        let mut min = F::infinity();
        for lo in 0..m {
            for hi in lo + 1..m {
                if self.adj[lo * m + hi] || self.adj[hi * m + lo] {
                    continue;
                }
                let mut value = acc[lo * m + hi];
                if kind == LinkageKind::Average {
                    value = value / cast_usize(self.members[lo].len() * self.members[hi].len());
                }
                min = min.min(value);
                candidates.push((lo, hi, value));
            }
        }
        candidates.retain(|&(_, _, v)| tol.matches(v, min));
        candidates
    }

    /// Merges the blocks at positions `lo < hi` (non-comparable by
    /// construction) and re-closes the comparability relation.
    fn merge(&mut self, lo: usize, hi: usize) {
        let m = self.block_count();
        debug_assert!(lo < hi && hi < m);
        debug_assert!(!self.adj[lo * m + hi] && !self.adj[hi * m + lo]);
        let mut pred = vec![false; m];
        let mut succ = vec![false; m];
        for k in 0..m {
            if k == lo || k == hi {
                continue;
            }
            pred[k] = self.adj[k * m + lo] || self.adj[k * m + hi];
            succ[k] = self.adj[lo * m + k] || self.adj[hi * m + k];
            debug_assert!(
                !(pred[k] && succ[k]),
                "a block both below and above the union would make lo, hi comparable"
            );
        }
        let map = |k: usize| if k > hi { k - 1 } else { k };
        let new_m = m - 1;
        let mut adj = vec![false; new_m * new_m];
        for x in 0..m {
            if x == lo || x == hi {
                continue;
            }
            for y in 0..m {
                if y == lo || y == hi || y == x {
                    continue;
                }
                if self.adj[x * m + y] || (pred[x] && succ[y]) {
                    adj[map(x) * new_m + map(y)] = true;
                }
            }
            if pred[x] {
                adj[map(x) * new_m + lo] = true;
            }
            if succ[x] {
                adj[lo * new_m + map(x)] = true;
            }
        }
        self.adj = adj;
        let right = self.members.remove(hi);
        self.labels.remove(hi);
        for slot in self.block_of.iter_mut() {
            if *slot == hi {
                *slot = lo;
            } else if *slot > hi {
                *slot -= 1;
            }
        }
        self.members[lo].extend(right);
    }
}

/// One agglomeration run shared by the classical and ordered drivers.
fn agglomerate<F: Scalar, R: Rng>(
    order: &StrictPoset,
    d: &DissimilarityMatrix<F>,
    kind: LinkageKind,
    tol: TieTolerance<F>,
    rng: &mut R,
) -> MergeHistory<F> {
    let mut blocks = Blocks::singletons(order);
    let mut merges: Vec<Merge<F>> = Vec::new();
    loop {
        let ties = blocks.tie_candidates(d, kind, tol);
        if ties.is_empty() {
            break;
        }
        let pick = if ties.len() == 1 {
            0
        } else {
            rng.random_range(0..ties.len())
        };
        let (lo, hi, height) = ties[pick];
        debug_assert!(
            merges.last().map_or(true, |m| m.height <= height),
            "convex linkages never lower the separation"
        );
        merges.push(Merge {
            a: blocks.labels[lo],
            b: blocks.labels[hi],
            height,
        });
        blocks.merge(lo, hi);
    }
    MergeHistory::new(d.len(), merges)
}

/// Classical agglomerative clustering: ignores any order and merges a random
/// minimal-linkage pair of blocks until one block remains. Deterministic
/// whenever every step has a unique minimum.
pub fn classical_hc<F: Scalar, R: Rng>(
    d: &DissimilarityMatrix<F>,
    kind: LinkageKind,
    tol: TieTolerance<F>,
    rng: &mut R,
) -> MergeHistory<F> {
    agglomerate(&StrictPoset::empty(d.len()), d, kind, tol, rng)
}

/// One randomized run of the order-preserving procedure: merge a random
/// minimal-linkage *non-comparable* pair, re-induce the order, halt when all
/// blocks are pairwise comparable or one remains. Every cut of the result is
/// a regular partition. On an empty order this consumes randomness exactly
/// like [`classical_hc`], so shared seeds give identical histories.
pub fn ordered_agglomerate<F: Scalar, R: Rng>(
    space: &OrderedDissimilaritySpace<F>,
    kind: LinkageKind,
    tol: TieTolerance<F>,
    rng: &mut R,
) -> PartialDendrogram<F> {
    let history = agglomerate(space.order(), space.dist(), kind, tol, rng);
    PartialDendrogram::from_valid_history(history)
}

/// Draws `samples` independent ordered runs on streams
/// `(master_seed, 0..samples)`, scores each by
/// `||U_epsilon(theta) - d||_p` and returns a best-fit result (earliest
/// stream index on ties) together with all fits in stream order. Samples are
/// evaluated in parallel; the outcome is bitwise independent of scheduling.
pub fn nfold_approximation<F: Scalar>(
    space: &OrderedDissimilaritySpace<F>,
    kind: LinkageKind,
    samples: usize,
    epsilon: F,
    p: u32,
    tol: TieTolerance<F>,
    master_seed: u64,
) -> Result<NFoldOutcome<F>, ClusteringError> {
    if samples == 0 {
        return Err(ClusteringError::NoSamples);
    }
    let mut evaluated = (0..samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = sample_rng(master_seed, index as u64);
            let theta = ordered_agglomerate(space, kind, tol, &mut rng);
            let u = theta.complete_ultrametric(epsilon)?;
            let fit = pnorm_distance(&u, space.dist(), p)?;
            Ok((theta, fit))
        })
        .collect::<Result<Vec<_>, ClusteringError>>()?;
    let fits: Vec<F> = evaluated.iter().map(|(_, fit)| *fit).collect();
    let mut best = 0;
    for (index, fit) in fits.iter().enumerate() {
        if *fit < fits[best] {
            best = index;
        }
    }
    let (dendrogram, fit) = evaluated.swap_remove(best);
    Ok(NFoldOutcome {
        best: ClusteringResult {
            dendrogram,
            fit,
            epsilon,
            p,
            linkage: kind,
            seed: Some(SampleSeed {
                master_seed,
                sample_index: best as u64,
            }),
        },
        fits,
    })
}

/// Exhaustively enumerates the outputs of the order-preserving procedure by
/// branching on every tie and deduplicating branches that already describe
/// the same partial dendrogram (merges at a shared height commute). Returns
/// every minimum-fit result, deterministically ordered. Fails with
/// [`ClusteringError::SearchBudgetExceeded`] once more than `limit` states
/// have been expanded; intended for small instances (roughly `n <= 12`).
pub fn exact_opt<F: Scalar>(
    space: &OrderedDissimilaritySpace<F>,
    kind: LinkageKind,
    epsilon: F,
    p: u32,
    tol: TieTolerance<F>,
    limit: usize,
) -> Result<Vec<ClusteringResult<F>>, ClusteringError> {
    let n = space.len();
    let d = space.dist();
    let key_of = |merges: &Vec<Merge<F>>| {
        PartialDendrogram::from_valid_history(MergeHistory::new(n, merges.clone())).canonical_key()
    };
    let mut visited: HashSet<Vec<(u64, Vec<usize>)>> = HashSet::new();
    let mut terminals: Vec<PartialDendrogram<F>> = Vec::new();
    let mut terminal_keys: HashSet<Vec<(u64, Vec<usize>)>> = HashSet::new();
    let empty: Vec<Merge<F>> = Vec::new();
    visited.insert(key_of(&empty));
    let mut stack = vec![(Blocks::singletons(space.order()), empty)];
    let mut expanded = 0usize;
    while let Some((blocks, merges)) = stack.pop() {
        expanded += 1;
        if expanded > limit {
            return Err(ClusteringError::SearchBudgetExceeded { limit });
        }
        let ties = blocks.tie_candidates(d, kind, tol);
        if ties.is_empty() {
            let theta = PartialDendrogram::from_valid_history(MergeHistory::new(n, merges));
            if terminal_keys.insert(theta.canonical_key()) {
                terminals.push(theta);
            }
            continue;
        }
        for &(lo, hi, height) in &ties {
            let mut child_blocks = blocks.clone();
            let mut child_merges = merges.clone();
            child_merges.push(Merge {
                a: child_blocks.labels[lo],
                b: child_blocks.labels[hi],
                height,
            });
            child_blocks.merge(lo, hi);
            if visited.insert(key_of(&child_merges)) {
                stack.push((child_blocks, child_merges));
            }
        }
    }
    let mut scored = Vec::with_capacity(terminals.len());
    for theta in terminals {
        let u = theta.complete_ultrametric(epsilon)?;
        let fit = pnorm_distance(&u, d, p)?;
        scored.push((fit, theta));
    }
    let min = scored
        .iter()
        .map(|&(fit, _)| fit)
        .fold(F::infinity(), F::min);
    let mut minimisers: Vec<(Vec<(u64, Vec<usize>)>, ClusteringResult<F>)> = scored
        .into_iter()
        .filter(|&(fit, _)| fit == min)
        .map(|(fit, dendrogram)| {
            let key = dendrogram.canonical_key();
            (
                key,
                ClusteringResult {
                    dendrogram,
                    fit,
                    epsilon,
                    p,
                    linkage: kind,
                    seed: None,
                },
            )
        })
        .collect();
    minimisers.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(minimisers.into_iter().map(|(_, result)| result).collect())
}

/// Classical clustering of the order-saturated dissimilarity: comparable
/// pairs are rewritten to `saturation` first, so they merge late rather than
/// being forbidden. Always completes.
pub fn hc_plus<F: Scalar, R: Rng>(
    space: &OrderedDissimilaritySpace<F>,
    kind: LinkageKind,
    saturation: F,
    tol: TieTolerance<F>,
    rng: &mut R,
) -> Result<MergeHistory<F>, ClusteringError> {
    let saturated = comparable_saturation(space, saturation)?;
    Ok(classical_hc(&saturated, kind, tol, rng))
}

/// Clusters once, rebuilds the space with the completed ultrametric as its
/// dissimilarity (same order), re-clusters, and reports whether the second
/// run reproduces the first dendrogram. For the convex linkages exact
/// reproduction provably holds in exact arithmetic; the check compares the
/// two completed ultrametrics entrywise with
/// a relative tolerance of a few machine epsilons, since average linkage
/// re-derives heights through re-associated sums.
pub fn idempotency_check<F: Scalar, R: Rng>(
    space: &OrderedDissimilaritySpace<F>,
    kind: LinkageKind,
    epsilon: F,
    p: u32,
    tol: TieTolerance<F>,
    rng: &mut R,
) -> Result<bool, ClusteringError> {
    let _ = p;
    let theta = ordered_agglomerate(space, kind, tol, rng);
    let u = theta.complete_ultrametric(epsilon)?;
    let rebuilt = OrderedDissimilaritySpace::new(space.order().clone(), u.clone())?;
    let theta2 = ordered_agglomerate(&rebuilt, kind, tol, rng);
    let u2 = theta2.complete_ultrametric(epsilon)?;
    let n = space.len();
    let rel = F::epsilon() * cast_usize(4 * n * n);
    let close = u
        .condensed()
        .iter()
        .zip(u2.condensed())
        .all(|(&a, &b)| (a - b).abs() <= rel * a.abs().max(b.abs()).max(F::one()));
    Ok(close)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissimilarity::separation;
    use crate::poset::{induced_quotient, transitive_closure};
    use rand::rngs::StdRng;

    fn space(
        n: usize,
        edges: &[(usize, usize)],
        condensed: Vec<f64>,
    ) -> OrderedDissimilaritySpace<f64> {
        let order = transitive_closure(n, edges).unwrap();
        let d = DissimilarityMatrix::from_condensed(n, condensed).unwrap();
        OrderedDissimilaritySpace::new(order, d).unwrap()
    }

    /// a < b, c < d with minimal ties on the non-comparable pairs (a, c) and
    /// (a, d). Exactly two outcomes exist: merging (a, c) leads on to (b, d)
    /// and the two-chain partition {ac, bd}; merging (a, d) makes every
    /// remaining block pair comparable and halts immediately.
    fn running_example() -> OrderedDissimilaritySpace<f64> {
        space(4, &[(0, 1), (2, 3)], vec![4.0, 1.0, 1.0, 5.0, 1.5, 6.0])
    }

    fn dendro(n: usize, merges: &[(usize, usize, f64)]) -> PartialDendrogram<f64> {
        let merges = merges
            .iter()
            .map(|&(a, b, height)| Merge { a, b, height })
            .collect();
        PartialDendrogram::from_merge_history(MergeHistory::new(n, merges)).unwrap()
    }

    /// The five-point ultrametric with merge order (c,d), (a,b), (cd,e), (top).
    fn five_point_ultrametric() -> DissimilarityMatrix<f64> {
        dendro(5, &[(2, 3, 2.0), (0, 1, 4.5), (2, 4, 8.0), (0, 2, 10.0)])
            .psi()
            .unwrap()
    }

    #[test]
    fn classical_single_linkage_recovers_the_tree_of_an_ultrametric() {
        let d = five_point_ultrametric();
        for seed in [1u64, 99] {
            let mut rng = StdRng::seed_from_u64(seed);
            let history = classical_hc(&d, LinkageKind::Single, TieTolerance::Exact, &mut rng);
            let heights: Vec<f64> = history.merges().iter().map(|m| m.height).collect();
            assert_eq!(heights, vec![2.0, 4.5, 8.0, 10.0]);
            assert_eq!(
                history.merges().iter().map(|m| (m.a, m.b)).collect::<Vec<_>>(),
                vec![(2, 3), (0, 1), (2, 4), (0, 2)]
            );
        }
    }

    #[test]
    fn single_element_yields_an_empty_history() {
        let d = DissimilarityMatrix::<f64>::from_condensed(1, vec![]).unwrap();
        let mut rng = StdRng::seed_from_u64(0);
        let history = classical_hc(&d, LinkageKind::Average, TieTolerance::Exact, &mut rng);
        assert!(history.merges().is_empty());
    }

    #[test]
    fn ordered_runs_reach_exactly_the_two_reachable_outcomes() {
        let space = running_example();
        let two_step = dendro(4, &[(0, 2, 1.0), (1, 3, 1.5)]);
        let halted = dendro(4, &[(0, 3, 1.0)]);
        let mut seen_two_step = false;
        let mut seen_halted = false;
        for seed in 0..64 {
            let mut rng = StdRng::seed_from_u64(seed);
            let theta =
                ordered_agglomerate(&space, LinkageKind::Single, TieTolerance::Exact, &mut rng);
            if theta == two_step {
                seen_two_step = true;
            } else if theta == halted {
                seen_halted = true;
            } else {
                panic!("unexpected outcome: {:?}", theta.history());
            }
        }
        assert!(seen_two_step && seen_halted);
    }

    #[test]
    fn every_cut_of_an_ordered_run_is_regular() {
        let space = running_example();
        for seed in 0..16 {
            let mut rng = StdRng::seed_from_u64(seed);
            let theta =
                ordered_agglomerate(&space, LinkageKind::Average, TieTolerance::Exact, &mut rng);
            for (_, partition) in theta.partition_chain() {
                let rel = induced_quotient(space.order(), &partition).unwrap();
                assert!(rel.is_acyclic());
            }
        }
    }

    #[test]
    fn totally_ordered_spaces_admit_no_merge() {
        let space = space(3, &[(0, 1), (1, 2)], vec![1.0, 2.0, 3.0]);
        let mut rng = StdRng::seed_from_u64(5);
        let theta = ordered_agglomerate(&space, LinkageKind::Single, TieTolerance::Exact, &mut rng);
        assert!(theta.history().merges().is_empty());
    }

    #[test]
    fn empty_order_runs_match_classical_runs_on_shared_seeds() {
        // Dissimilarities with plenty of ties to exercise the shared RNG path.
        let values = vec![1.0, 2.0, 1.0, 2.0, 1.0, 3.0, 1.0, 2.0, 3.0, 1.0];
        let d = DissimilarityMatrix::from_condensed(5, values).unwrap();
        let sp = OrderedDissimilaritySpace::new(StrictPoset::empty(5), d.clone()).unwrap();
        for kind in LinkageKind::ALL {
            for seed in 0..5 {
                let mut rng_a = StdRng::seed_from_u64(seed);
                let mut rng_b = StdRng::seed_from_u64(seed);
                let classical = classical_hc(&d, kind, TieTolerance::Exact, &mut rng_a);
                let ordered = ordered_agglomerate(&sp, kind, TieTolerance::Exact, &mut rng_b);
                assert_eq!(&classical, ordered.history());
            }
        }
    }

    #[test]
    fn single_linkage_ignores_tie_resolution_order() {
        // Every pair at distance 1: single linkage collapses everything at 1
        // no matter how ties are resolved.
        let d = DissimilarityMatrix::from_condensed(5, vec![1.0; 10]).unwrap();
        let mut reference = None;
        for seed in 0..20 {
            let mut rng = StdRng::seed_from_u64(seed);
            let history = classical_hc(&d, LinkageKind::Single, TieTolerance::Exact, &mut rng);
            let theta = PartialDendrogram::from_merge_history(history).unwrap();
            match &reference {
                None => reference = Some(theta),
                Some(r) => assert_eq!(r, &theta),
            }
        }
    }

    #[test]
    fn rebuilding_from_psi_reproduces_the_dendrogram() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(3..9);
            let values: Vec<f64> = (0..n * (n - 1) / 2)
                .map(|_| rng.random_range(1..50) as f64)
                .collect();
            let d = DissimilarityMatrix::from_condensed(n, values).unwrap();
            let history = classical_hc(&d, LinkageKind::Single, TieTolerance::Exact, &mut rng);
            let theta = PartialDendrogram::from_merge_history(history).unwrap();
            let u = theta.psi().unwrap();
            let mut rng2 = StdRng::seed_from_u64(1);
            let rebuilt = classical_hc(&u, LinkageKind::Single, TieTolerance::Exact, &mut rng2);
            assert_eq!(theta, PartialDendrogram::from_merge_history(rebuilt).unwrap());
        }
    }

    #[test]
    fn complete_linkage_ultrametrics_dominate_within_blocks() {
        let space = running_example();
        for seed in 0..8 {
            let mut rng = StdRng::seed_from_u64(seed);
            let theta =
                ordered_agglomerate(&space, LinkageKind::Complete, TieTolerance::Exact, &mut rng);
            let u = theta.complete_ultrametric(1e-9).unwrap();
            let blocks = theta.theta_infinity();
            for x in 0..4 {
                for y in x + 1..4 {
                    if blocks.block_of(x) == blocks.block_of(y) {
                        assert!(u.get(x, y) >= space.dist().get(x, y));
                    }
                }
            }
        }
    }

    #[test]
    fn nfold_scores_every_stream_and_keeps_the_earliest_best() {
        let space = running_example();
        let outcome = nfold_approximation(
            &space,
            LinkageKind::Single,
            32,
            1e-12,
            1,
            TieTolerance::Exact,
            42,
        )
        .unwrap();
        assert_eq!(outcome.fits.len(), 32);
        let best_fit = outcome.fits.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(outcome.best.fit, best_fit);
        let first_index = outcome.fits.iter().position(|&f| f == best_fit).unwrap();
        assert_eq!(outcome.best.seed.unwrap().sample_index, first_index as u64);
        // The two-step outcome fits strictly better (total error about 11
        // against 12.5), so a batch of 32 must find it.
        assert!((outcome.best.fit - 11.0).abs() < 1e-9);
        // Nested property: a prefix of the same stream family can't win.
        let small = nfold_approximation(
            &space,
            LinkageKind::Single,
            1,
            1e-12,
            1,
            TieTolerance::Exact,
            42,
        )
        .unwrap();
        assert!(small.best.fit >= outcome.best.fit);
        assert_eq!(small.fits[0], outcome.fits[0]);
    }

    #[test]
    fn nfold_is_reproducible() {
        let space = running_example();
        let a = nfold_approximation(&space, LinkageKind::Average, 16, 1e-12, 1, TieTolerance::Exact, 7)
            .unwrap();
        let b = nfold_approximation(&space, LinkageKind::Average, 16, 1e-12, 1, TieTolerance::Exact, 7)
            .unwrap();
        assert_eq!(a.fits, b.fits);
        assert_eq!(a.best, b.best);
        assert_eq!(nfold_approximation(&space, LinkageKind::Single, 0, 1e-12, 1, TieTolerance::Exact, 7)
            .unwrap_err(), ClusteringError::NoSamples);
    }

    #[test]
    fn exact_opt_scores_all_branches_and_returns_the_argmin() {
        let space = running_example();
        let results = exact_opt(&space, LinkageKind::Single, 1e-12, 1, TieTolerance::Exact, 10_000)
            .unwrap();
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].dendrogram, dendro(4, &[(0, 2, 1.0), (1, 3, 1.5)]));
        assert!((results[0].fit - 11.0).abs() < 1e-9);
        assert!(results[0].seed.is_none());
    }

    #[test]
    fn exact_opt_without_ties_matches_the_sampler() {
        // Unique minima at every step: one branch, one result.
        let sp = space(4, &[(0, 1)], vec![9.0, 1.0, 2.0, 6.0, 5.0, 3.0]);
        let results =
            exact_opt(&sp, LinkageKind::Complete, 1e-12, 1, TieTolerance::Exact, 10_000).unwrap();
        assert_eq!(results.len(), 1);
        let mut rng = StdRng::seed_from_u64(3);
        let theta = ordered_agglomerate(&sp, LinkageKind::Complete, TieTolerance::Exact, &mut rng);
        assert_eq!(results[0].dendrogram, theta);
    }

    #[test]
    fn exact_opt_respects_its_budget() {
        let space = running_example();
        assert_eq!(
            exact_opt(&space, LinkageKind::Single, 1e-12, 1, TieTolerance::Exact, 1).unwrap_err(),
            ClusteringError::SearchBudgetExceeded { limit: 1 }
        );
    }

    #[test]
    fn clique_reduction_toy_instance_recovers_the_triangle() {
        // Triangle {0, 1, 2} plus isolated vertex 3: edge pairs at 1, the
        // rest at 2. The complete-linkage optimum clusters the triangle at
        // level 1 and the widest row of 1-entries counts its other members.
        let d = DissimilarityMatrix::from_condensed(4, vec![1.0, 1.0, 2.0, 1.0, 2.0, 2.0]).unwrap();
        let sp = OrderedDissimilaritySpace::new(StrictPoset::empty(4), d).unwrap();
        let results =
            exact_opt(&sp, LinkageKind::Complete, 1e-12, 1, TieTolerance::Exact, 100_000).unwrap();
        assert!(!results.is_empty());
        for result in &results {
            let u = result.dendrogram.complete_ultrametric(1e-12).unwrap();
            let max_ones = (0..4)
                .map(|i| (0..4).filter(|&j| j != i && u.get(i, j) == 1.0).count())
                .max()
                .unwrap();
            assert_eq!(max_ones + 1, 3);
        }
    }

    #[test]
    fn saturated_clustering_defers_comparable_merges() {
        // a < b with d(a, b) tiny: after saturation the first merge avoids it.
        let sp = space(3, &[(0, 1)], vec![0.1, 5.0, 7.0]);
        for kind in LinkageKind::ALL {
            let mut rng = StdRng::seed_from_u64(2);
            let history = hc_plus(&sp, kind, 10.0, TieTolerance::Exact, &mut rng).unwrap();
            let first = &history.merges()[0];
            assert_eq!((first.a, first.b), (0, 2));
            assert_eq!(first.height, 5.0);
        }
        // Chain a < b < c with saturation 1.0: everything merges at 1.0, never
        // below the saturation value.
        let chain = space(3, &[(0, 1), (1, 2)], vec![0.2, 0.3, 0.4]);
        let mut rng = StdRng::seed_from_u64(2);
        let history = hc_plus(&chain, LinkageKind::Complete, 1.0, TieTolerance::Exact, &mut rng).unwrap();
        assert!(history.merges().iter().all(|m| m.height >= 1.0));
    }

    #[test]
    fn idempotency_holds_on_the_running_example() {
        let space = running_example();
        for kind in LinkageKind::ALL {
            for seed in 0..10 {
                let mut rng = StdRng::seed_from_u64(seed);
                assert!(idempotency_check(&space, kind, 1e-12, 1, TieTolerance::Exact, &mut rng)
                    .unwrap());
            }
        }
    }

    #[test]
    fn idempotency_holds_classically_for_single_linkage() {
        let d = five_point_ultrametric();
        let sp = OrderedDissimilaritySpace::new(StrictPoset::empty(5), d).unwrap();
        let mut rng = StdRng::seed_from_u64(1);
        assert!(idempotency_check(&sp, LinkageKind::Single, 1e-12, 1, TieTolerance::Exact, &mut rng)
            .unwrap());
    }

    #[test]
    fn result_records_round_trip() {
        let space = running_example();
        let outcome =
            nfold_approximation(&space, LinkageKind::Single, 4, 1e-12, 1, TieTolerance::Exact, 9)
                .unwrap();
        let record = outcome.best.to_record();
        let json = serde_json::to_string(&record).unwrap();
        let parsed: ClusteringResultRecord = serde_json::from_str(&json).unwrap();
        let back = ClusteringResult::<f64>::from_record(&parsed).unwrap();
        assert_eq!(back, outcome.best);
    }

    #[test]
    fn ordered_heights_never_decrease() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..30 {
            let n = rng.random_range(3..9);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random_bool(0.3) {
                        edges.push((i, j));
                    }
                }
            }
            let values: Vec<f64> = (0..n * (n - 1) / 2)
                .map(|_| rng.random_range(1..6) as f64)
                .collect();
            let sp = space(n, &edges, values);
            for kind in LinkageKind::ALL {
                let theta = ordered_agglomerate(&sp, kind, TieTolerance::Exact, &mut rng);
                let heights: Vec<f64> = theta.history().merges().iter().map(|m| m.height).collect();
                assert!(heights.windows(2).all(|w| w[0] <= w[1]));
                if !heights.is_empty() {
                    assert!(heights[0] >= separation(sp.dist()).unwrap());
                }
            }
        }
    }
}
