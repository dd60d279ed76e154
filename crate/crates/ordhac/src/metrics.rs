//! Evaluation metrics: adjusted Rand index, its order-aware element-wise
//! variant over base-space projections, the loops measure for order
//! violations, best-cut selection, fit normalization and paired differences.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dendrogram::PartialDendrogram;
use crate::partition::LabeledPartition;
use crate::poset::{base_space_projection, BoolRelation, PosetError, StrictPoset};
use crate::scalar::{cast_usize, Scalar};

/// Errors raised by metric computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    /// The two inputs describe different numbers of elements.
    #[error("size mismatch: expected {expected} elements, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    /// Paired lists must have equal length.
    #[error("length mismatch: {left} values paired with {right}")]
    LengthMismatch { left: usize, right: usize },
    /// An order projection failed.
    #[error(transparent)]
    Poset(#[from] PosetError),
}

fn comb2(x: usize) -> f64 {
    (x as f64) * ((x as f64) - 1.0) / 2.0
}

/// Hubert–Arabie adjusted Rand index between two partitions of the same set,
/// from the pair-counting contingency table. `1` for identical partitions;
/// at most `1` always. A degenerate expected-index denominator (both
/// partitions trivial, hence identical) scores `1`.
pub fn ari(a: &LabeledPartition, b: &LabeledPartition) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::SizeMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Ok(1.0);
    }
    let rows = a.block_count();
    let cols = b.block_count();
    let mut counts = vec![0usize; rows * cols];
    let mut row_sizes = vec![0usize; rows];
    let mut col_sizes = vec![0usize; cols];
    for x in 0..n {
        let i = a.block_of(x);
        let j = b.block_of(x);
        counts[i * cols + j] += 1;
        row_sizes[i] += 1;
        col_sizes[j] += 1;
    }
    let index: f64 = counts.iter().map(|&c| comb2(c)).sum();
    let sum_rows: f64 = row_sizes.iter().map(|&c| comb2(c)).sum();
    let sum_cols: f64 = col_sizes.iter().map(|&c| comb2(c)).sum();
    let expected = sum_rows * sum_cols / comb2(n);
    let maximum = (sum_rows + sum_cols) / 2.0;
    if maximum == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (maximum - expected))
}

/// Element-wise order-aware adjusted Rand scores between two boolean
/// relations on the same set (intended: base-space projections of induced
/// relations), plus their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct OariScore {
    /// One score per element, from that element's relation rows.
    pub per_element: Vec<f64>,
    /// Mean of `per_element`; `1` exactly when the relations are equal.
    pub mean: f64,
}

/// Order-aware adjusted Rand index. For each element `i` the rows `A_i`,
/// `B_i` (all `n` columns, diagonal included) are cross-tabulated into
/// agreement counts and scored with the adjusted pair-counting formula; rows
/// with a degenerate denominator score `1` when identical and `0` otherwise.
pub fn oari(a: &BoolRelation, b: &BoolRelation) -> Result<OariScore, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::SizeMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len();
    let mut per_element = Vec::with_capacity(n);
    for i in 0..n {
        let row_a = a.row(i);
        let row_b = b.row(i);
        let mut both = 0usize;
        let mut only_a = 0usize;
        let mut only_b = 0usize;
        let mut neither = 0usize;
        for (&x, &y) in row_a.iter().zip(row_b) {
            match (x, y) {
                (true, true) => both += 1,
                (true, false) => only_a += 1,
                (false, true) => only_b += 1,
                (false, false) => neither += 1,
            }
        }
        let (a1, b1, c1, d1) = (both as f64, only_a as f64, only_b as f64, neither as f64);
        let denominator = (a1 + b1) * (b1 + d1) + (a1 + c1) * (c1 + d1);
        per_element.push(if denominator == 0.0 {
            if only_a == 0 && only_b == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            2.0 * (a1 * d1 - b1 * c1) / denominator
        });
    }
    let mean = per_element.iter().sum::<f64>() / n as f64;
    Ok(OariScore { per_element, mean })
}

/// Fraction of elements lying on a cycle of the relation induced by
/// `partition` on `order`: `0` exactly when the partition is regular.
pub fn loops(order: &StrictPoset, partition: &LabeledPartition) -> Result<f64, MetricsError> {
    let projection = base_space_projection(order, partition)?;
    Ok(projection.loop_count() as f64 / order.len() as f64)
}

/// Scans every distinct partition cut by the dendrogram (from the finest up
/// to and including the final one) and returns a cut maximizing the adjusted
/// Rand index against `planted`, with ties broken toward the finest cut.
pub fn best_cut_by_ari<F: Scalar>(
    theta: &PartialDendrogram<F>,
    planted: &LabeledPartition,
) -> Result<(LabeledPartition, f64), MetricsError> {
    let mut best: Option<(LabeledPartition, f64)> = None;
    for (_, partition) in theta.partition_chain() {
        let score = ari(&partition, planted)?;
        match &best {
            Some((_, incumbent)) if score <= *incumbent => {}
            _ => best = Some((partition, score)),
        }
    }
    Ok(best.expect("a partition chain is never empty"))
}

/// Rescales fits so the smallest (or the `reference`, when given) maps to
/// `1` and the largest to `0`: `1 - (fit - low) / (high - low)`. A
/// degenerate range maps everything to `1`. Values can exceed `1` when a
/// reference above the minimum is supplied.
pub fn normalized_fits<F: Scalar>(fits: &[F], reference: Option<F>) -> Vec<F> {
    let Some(min) = fits.iter().copied().reduce(F::min) else {
        return Vec::new();
    };
    let max = fits.iter().copied().fold(min, F::max);
    let low = reference.unwrap_or(min);
    let range = max - low;
    if range <= F::zero() {
        return vec![F::one(); fits.len()];
    }
    fits.iter()
        .map(|&fit| F::one() - (fit - low) / range)
        .collect()
}

/// Mean and sample standard deviation (`n - 1` denominator) of the paired
/// differences `a_i - b_i`.
pub fn diff_variance<F: Scalar>(a: &[F], b: &[F]) -> Result<(F, F), MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n == 0 {
        return Ok((F::zero(), F::zero()));
    }
    let diffs: Vec<F> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    let mean = diffs.iter().copied().fold(F::zero(), |s, d| s + d) / cast_usize(n);
    if n == 1 {
        return Ok((mean, F::zero()));
    }
    let sum_sq = diffs
        .iter()
        .map(|&d| (d - mean) * (d - mean))
        .fold(F::zero(), |s, v| s + v);
    Ok((mean, (sum_sq / cast_usize(n - 1)).sqrt()))
}

/// One evaluation row, ready for JSON serialization. Standard deviations of
/// paired differences elsewhere in reports use the sample convention, and
/// fit normalization takes its minimum per space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub instance_id: String,
    pub method: String,
    pub linkage: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ari: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oari: Option<f64>,
    pub loops: f64,
    pub fit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_fit: Option<f64>,
}
