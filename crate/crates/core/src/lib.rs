//! Readability scoring and evaluation of readability-controlled paraphrases.
//!
//! The numeric core is generic over a [`Scalar`] (`f32` or `f64`); the
//! `*F64`/`*F32` aliases below name the concrete instantiations.

pub mod dataset;
pub mod error;
pub mod levels;
pub mod metrics;
pub mod report;
pub mod scalar;
pub mod text;

pub use error::{DatasetError, LexiconError, MetricError, ReportError, TextError};
pub use levels::{classify, Band, Level, LevelMap};
pub use scalar::Scalar;

pub type TextAnalysisF64 = text::TextAnalysis<f64>;
pub type TextAnalysisF32 = text::TextAnalysis<f32>;
pub type ExampleScoreF64 = metrics::ExampleScore<f64>;
pub type ExampleScoreF32 = metrics::ExampleScore<f32>;
pub type PopulationFitF64 = metrics::PopulationFit<f64>;
pub type PopulationFitF32 = metrics::PopulationFit<f32>;
pub type LinearFitF64 = metrics::LinearFit<f64>;
pub type PairMetricsF64 = metrics::PairMetrics<f64>;
pub type PairMetricsF32 = metrics::PairMetrics<f32>;
pub type PairObservationF64 = report::PairObservation<f64>;
pub type HeatmapGridF64 = report::HeatmapGrid<f64>;
pub type ReportBundleF64 = report::ReportBundle<f64>;
