//! Scalar abstraction for dissimilarity values and merge heights.

use std::fmt::{Debug, Display};

use num_traits::Float;

/// Floating-point scalar used for dissimilarities, linkage values and merge
/// heights. Implemented by `f32` and `f64`; the library is generic so callers
/// can trade precision for memory, while the type aliases at the crate root
/// fix `f64` for everyday use.
pub trait Scalar: Float + Debug + Display + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + Debug + Display + Send + Sync + 'static {}

/// Converts an `f64` constant into the scalar type.
///
/// Panics if the value is not representable, which cannot happen for the
/// finite constants used internally.
pub(crate) fn cast<F: Scalar>(value: f64) -> F {
    F::from(value).expect("finite constant must be representable")
}

/// Converts a count into the scalar type. Counts in this crate are bounded by
/// the number of element pairs, which is exactly representable in `f32` and
/// `f64` for any realistic input.
pub(crate) fn cast_usize<F: Scalar>(value: usize) -> F {
    F::from(value).expect("count must be representable")
}
