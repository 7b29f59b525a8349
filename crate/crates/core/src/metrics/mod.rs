//! Readability-control and paraphrase-quality metrics.
//!
//! * individual scale: rank correlation, rmse and class accuracy of the
//!   eight generations of one source;
//! * population scale: correlation and least-squares fit of generated
//!   scores against source scores for one target level;
//! * paraphrase quality: self word error rate, embedding match
//!   precision/recall/F1 and length change.

mod individual;
mod paraphrase;
mod population;

pub use individual::{accuracy, rank_correlation, rmse, score_example, score_example_with, spearman, ExampleScore};
pub use paraphrase::{
    align_words, length_change, length_change_pct, self_wer, semantic_score, EditCounts, PairMetrics,
    SemanticScore,
};
pub use population::{average_ranks, ols_fit, pearson, LinearFit, PopulationFit};
