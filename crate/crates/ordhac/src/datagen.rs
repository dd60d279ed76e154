//! Synthetic instance generators: random DAG orders, random dissimilarities
//! with a controlled number of ties per level, their product, and
//! planted-copy benchmark instances.
//!
//! Generators are pure functions of their RNG, so a recorded seed replays an
//! instance exactly. Each documents the order in which it consumes
//! randomness; callers that split seeds per instance can generate batches in
//! parallel with reproducible results.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::dissimilarity::{DissimilarityError, DissimilarityMatrix, OrderedDissimilaritySpace};
use crate::partition::LabeledPartition;
use crate::poset::{transitive_closure, StrictPoset};
use crate::scalar::{cast, cast_usize, Scalar};

/// Errors raised by the generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatagenError {
    /// The expected number of ties per level must be at least one.
    #[error("expected ties per level must be at least 1")]
    InvalidTieCount,
    /// Planted-copy parameters out of range.
    #[error("invalid planted-copy parameters: {0}")]
    InvalidParams(&'static str),
    /// Generated values failed dissimilarity validation.
    #[error(transparent)]
    Dissimilarity(#[from] DissimilarityError),
}

/// Samples a strict partial order: a uniform permutation of the elements,
/// Bernoulli(`edge_probability`) coins on the strictly-upper triangle (row
/// major), and the transitive closure of the resulting DAG. Consumes the
/// permutation first, then one coin per `i < j` pair in `i`-major order.
///
/// `edge_probability = 0` gives the empty order, `1` a total order.
///
/// # Panics
///
/// If `edge_probability` is not in `[0, 1]`.
pub fn random_dag<R: Rng>(n: usize, edge_probability: f64, rng: &mut R) -> StrictPoset {
    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_probability) {
                edges.push((permutation[i], permutation[j]));
            }
        }
    }
    transitive_closure(n, &edges).expect("upper-triangular draws cannot contain cycles")
}

/// Samples a dissimilarity with exactly `ties_per_level` occurrences of each
/// positive integer level: the value multiset is `{1, …, 1, 2, …, 2, …}`
/// with multiplicity `ties_per_level` per level, the largest level keeping
/// the remainder when the pair count is not divisible. The multiset is
/// assigned to pairs by one uniform shuffle. `ties_per_level = 1` yields a
/// permutation of `1..=C` with no ties at all.
pub fn random_tied_dissimilarity<F: Scalar, R: Rng>(
    n: usize,
    ties_per_level: usize,
    rng: &mut R,
) -> Result<DissimilarityMatrix<F>, DatagenError> {
    if ties_per_level < 1 {
        return Err(DatagenError::InvalidTieCount);
    }
    let pairs = n * (n - 1) / 2;
    let full_levels = pairs / ties_per_level;
    let remainder = pairs % ties_per_level;
    let mut values: Vec<F> = Vec::with_capacity(pairs);
    for level in 1..=full_levels {
        values.extend(std::iter::repeat(cast_usize::<F>(level)).take(ties_per_level));
    }
    values.extend(std::iter::repeat(cast_usize::<F>(full_levels + 1)).take(remainder));
    values.shuffle(rng);
    Ok(DissimilarityMatrix::from_condensed(n, values)?)
}

/// Samples an ordered dissimilarity space: the order via [`random_dag`]
/// first, then the dissimilarity via [`random_tied_dissimilarity`], from the
/// same RNG in that sequence.
pub fn random_space<F: Scalar, R: Rng>(
    n: usize,
    edge_probability: f64,
    ties_per_level: usize,
    rng: &mut R,
) -> Result<OrderedDissimilaritySpace<F>, DatagenError> {
    let order = random_dag(n, edge_probability, rng);
    let dist = random_tied_dissimilarity(n, ties_per_level, rng)?;
    Ok(OrderedDissimilaritySpace::new(order, dist).expect("matching sizes by construction"))
}

/// A benchmark instance with a known ground-truth partition: `copies`
/// disjoint copies of a base space, where the classes of corresponding
/// elements form the planted partition.
#[derive(Debug, Clone)]
pub struct PlantedInstance<F: Scalar> {
    /// The generated space: `copies * base.len()` elements, block-diagonal
    /// order (copies are mutually non-comparable).
    pub space: OrderedDissimilaritySpace<F>,
    /// Classes `{x_i^0, …, x_i^{copies-1}}`, one block per base element;
    /// regular for the generated order.
    pub planted: LabeledPartition,
    /// Number of copies of the base space.
    pub copies: usize,
    /// Cross-copy offset added to every between-copy distance.
    pub alpha: F,
    /// Standard deviation of the Gaussian noise on between-copy distances.
    pub sigma: F,
}

/// Floor applied to noisy cross-copy distances so they stay positive.
pub const PLANTED_DISTANCE_FLOOR: f64 = 1e-6;

/// Builds a planted-copy instance: `copies` disjoint copies of `base`, with
/// within-copy distances kept verbatim and the distance between `x_i^r` and
/// `x_j^s` (for `r != s`) set to `alpha + d0(x_i, x_j) + Normal(0, sigma)`,
/// clamped below at [`PLANTED_DISTANCE_FLOOR`]. Element `i` of copy `r` gets
/// global index `r * base.len() + i`. Noise is drawn once per unordered
/// cross-copy pair, in condensed pair order — also when `sigma` is zero, so
/// instances differing only in `sigma` stay aligned on one seed.
pub fn planted_copies<F: Scalar, R: Rng>(
    base: &OrderedDissimilaritySpace<F>,
    copies: usize,
    alpha: F,
    sigma: F,
    rng: &mut R,
) -> Result<PlantedInstance<F>, DatagenError> {
    if copies < 2 {
        return Err(DatagenError::InvalidParams("need at least two copies"));
    }
    if !(alpha >= F::zero() && alpha.is_finite()) {
        return Err(DatagenError::InvalidParams(
            "offset must be finite and nonnegative",
        ));
    }
    if !(sigma >= F::zero() && sigma.is_finite()) {
        return Err(DatagenError::InvalidParams(
            "noise deviation must be finite and nonnegative",
        ));
    }
    let n0 = base.len();
    let n = copies * n0;
    let mut reach = vec![false; n * n];
    for r in 0..copies {
        for i in 0..n0 {
            for j in 0..n0 {
                if base.order().lt(i, j) {
                    reach[(r * n0 + i) * n + (r * n0 + j)] = true;
                }
            }
        }
    }
    let order = StrictPoset::from_closed_reachability(n, reach);
    let noise = Normal::new(0.0f64, sigma.to_f64().expect("sigma fits f64"))
        .expect("validated deviation");
    let floor: F = cast(PLANTED_DISTANCE_FLOOR);
    let mut values: Vec<F> = Vec::with_capacity(n * (n - 1) / 2);
    for x in 0..n {
        let (r, i) = (x / n0, x % n0);
        for y in x + 1..n {
            let (s, j) = (y / n0, y % n0);
            let d0 = base.dist().get(i, j);
            values.push(if r == s {
                d0
            } else {
                let noisy = alpha + d0 + cast(noise.sample(rng));
                noisy.max(floor)
            });
        }
    }
    let dist = DissimilarityMatrix::from_condensed(n, values)?;
    let space = OrderedDissimilaritySpace::new(order, dist).expect("matching sizes");
    let assignment: Vec<usize> = (0..n).map(|x| x % n0).collect();
    let planted = LabeledPartition::from_assignment(&assignment).expect("assignment is total");
    Ok(PlantedInstance {
        space,
        planted,
        copies,
        alpha,
        sigma,
    })
}
