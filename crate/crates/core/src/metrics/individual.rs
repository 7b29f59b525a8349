use serde::{Deserialize, Serialize};

use crate::error::MetricError;
use crate::levels::{classify, Band, Level, LevelMap};
use crate::metrics::population::{average_ranks, pearson};
use crate::scalar::Scalar;
use crate::text::{analyze_with, Syllabifier, TextAnalysis};

/// Individual-scale control results for one source passage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ExampleScore<T = f64> {
    pub source_id: String,
    pub source_fres: T,
    pub generated_fres: LevelMap<T>,
    pub spearman_rho: T,
    pub rmse: T,
    pub accuracy: T,
    /// Levels whose generation had no word tokens and was scored as the source.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fallback_levels: Vec<Level>,
}

/// Spearman correlation with average ranks for ties.
///
/// Returns 0 when either side is constant (the statistic is undefined there).
pub fn rank_correlation<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T, MetricError> {
    if xs.len() != ys.len() {
        return Err(MetricError::LengthMismatch(xs.len(), ys.len()));
    }
    match pearson(&average_ranks(xs), &average_ranks(ys)) {
        Ok(rho) => Ok(rho),
        Err(MetricError::DegenerateInput(_)) => Ok(T::zero()),
        Err(e) => Err(e),
    }
}

/// Rank correlation of the eight generated scores against their targets.
pub fn spearman<T: Scalar>(generated: &LevelMap<T>) -> T {
    let targets = Level::ALL.map(|l| l.target::<T>());
    rank_correlation(generated.values(), &targets).expect("eight paired values")
}

/// Root mean square error of the generated scores against their targets.
pub fn rmse<T: Scalar>(generated: &LevelMap<T>) -> T {
    let sq: T = generated
        .iter()
        .map(|(level, &v)| {
            let d = v - level.target::<T>();
            d * d
        })
        .sum();
    (sq / T::count(8)).sqrt()
}

/// Fraction of generations whose score falls in their target's class.
pub fn accuracy<T: Scalar>(generated: &LevelMap<T>) -> T {
    let hits = generated
        .iter()
        .filter(|(level, &v)| classify(v) == Band::In(*level))
        .count();
    T::count(hits) / T::count(8)
}

pub fn score_example<T: Scalar, S: AsRef<str>>(
    source_id: &str,
    source: &TextAnalysis<T>,
    generations: &LevelMap<S>,
) -> ExampleScore<T> {
    score_example_with(source_id, source, generations, &Syllabifier::default())
}

/// Scores the eight generations of one source. A generation without word
/// tokens is scored as the source text and listed in `fallback_levels`.
pub fn score_example_with<T: Scalar, S: AsRef<str>>(
    source_id: &str,
    source: &TextAnalysis<T>,
    generations: &LevelMap<S>,
    syllabifier: &Syllabifier,
) -> ExampleScore<T> {
    let mut fallback_levels = Vec::new();
    let generated_fres = generations.map(|level, text| match analyze_with::<T>(text.as_ref(), syllabifier) {
        Ok(a) => a.fres,
        Err(_) => {
            fallback_levels.push(level);
            source.fres
        }
    });
    ExampleScore {
        source_id: source_id.to_string(),
        source_fres: source.fres,
        spearman_rho: spearman(&generated_fres),
        rmse: rmse(&generated_fres),
        accuracy: accuracy(&generated_fres),
        generated_fres,
        fallback_levels,
    }
}
