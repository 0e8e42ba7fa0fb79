//! Content-based binary e-mail filter that retrains itself when its accuracy
//! or false-positive rate degrades on incoming batches.
//!
//! The pipeline: preprocess documents ([`corpus`]), score terms with TFDCR and
//! keep the top N ([`features`]), train a soft-margin SVM by SMO ([`svm`]),
//! then stream test batches through the drift loop ([`driftloop`]), which
//! retrains on misclassified mail, the previous support vectors and the
//! violating batch after refreshing the feature set. [`metrics`] scores the
//! results.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below fix the common case.

pub mod corpus;
pub mod driftloop;
pub mod error;
pub mod features;
pub mod metrics;
pub mod scalar;
pub mod svm;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type SparseVectorF64 = features::SparseVector<f64>;
pub type SparseVectorF32 = features::SparseVector<f32>;
pub type FeatureSetF64 = features::FeatureSet<f64>;
pub type FeatureSetF32 = features::FeatureSet<f32>;
pub type TrainConfigF64 = svm::TrainConfig<f64>;
pub type SvmModelF64 = svm::SvmModel<f64>;
pub type SvmModelF32 = svm::SvmModel<f32>;
pub type MetricsReportF64 = metrics::MetricsReport<f64>;
pub type DriftConfigF64 = driftloop::DriftConfig<f64>;
pub type FilterStateF64 = driftloop::FilterState<f64>;
pub type SessionReportF64 = driftloop::SessionReport<f64>;
