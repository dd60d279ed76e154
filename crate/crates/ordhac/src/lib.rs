//! Order-preserving hierarchical agglomerative clustering.
//!
//! This crate clusters dissimilarity spaces that carry a strict partial order
//! on their elements. Classical agglomerative clustering merges the closest
//! pair of clusters regardless of structure; here a merge is only allowed
//! between clusters that are non-comparable in the order induced on the
//! current partition, so every cut of the result is a regular (order
//! preserving) quotient. Runs may halt before everything is joined, producing
//! *partial* dendrograms; an `epsilon`-completion embeds those into
//! ultrametrics so competing runs can be scored against the input
//! dissimilarity and the best of `N` random runs selected.
//!
//! Modules:
//!
//! * [`poset`] — strict partial orders, induced quotients, base-space
//!   projections.
//! * [`partition`] — labeled partitions with canonical block ids.
//! * [`dissimilarity`] — condensed dissimilarity matrices, linkage functions,
//!   order-aware separation.
//! * [`dendrogram`] — merge histories, partial dendrograms, ultrametric
//!   completions.
//! * [`clustering`] — classical and order-preserving agglomeration, the
//!   N-fold randomized approximation and an exhaustive small-instance
//!   optimizer.
//! * [`metrics`] — adjusted Rand index, its order-aware variant, loop counts
//!   and fit normalization.
//! * [`datagen`] — random ordered dissimilarity spaces and planted-copy
//!   instances.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases at the crate root fix `f64`.

pub mod clustering;
pub mod datagen;
pub mod dendrogram;
pub mod dissimilarity;
pub mod metrics;
pub mod partition;
pub mod poset;
mod scalar;

pub use scalar::Scalar;

pub use clustering::{
    classical_hc, exact_opt, hc_plus, idempotency_check, nfold_approximation, ordered_agglomerate,
    ClusteringError, ClusteringResult, ClusteringResultRecord, NFoldOutcome, SampleSeed,
};
pub use datagen::{
    planted_copies, random_dag, random_space, random_tied_dissimilarity, DatagenError,
    PlantedInstance,
};
pub use dendrogram::{DendrogramError, Merge, MergeHistory, MergeRecord, PartialDendrogram};
pub use dissimilarity::{
    DissimilarityError, DissimilarityMatrix, LinkageKind, OrderedDissimilaritySpace, TieTolerance,
};
pub use metrics::{
    ari, best_cut_by_ari, diff_variance, loops, normalized_fits, oari, MetricsError,
    MetricsRecord, OariScore,
};
pub use partition::{LabeledPartition, PartitionError};
pub use poset::{BoolRelation, InducedRelation, PosetError, StrictPoset};

/// `f64` dissimilarity matrix.
pub type DissimilarityMatrix64 = DissimilarityMatrix<f64>;
/// `f64` ordered dissimilarity space.
pub type OrderedDissimilaritySpace64 = OrderedDissimilaritySpace<f64>;
/// `f64` merge history.
pub type MergeHistory64 = MergeHistory<f64>;
/// `f64` partial dendrogram.
pub type PartialDendrogram64 = PartialDendrogram<f64>;
/// `f64` clustering result.
pub type ClusteringResult64 = ClusteringResult<f64>;
/// `f64` planted-copy instance.
pub type PlantedInstance64 = PlantedInstance<f64>;
