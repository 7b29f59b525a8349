//! Aggregation of scored generations into summaries, binned scatter series
//! and source-class by target-class heatmaps, plus their export.

mod export;
mod svg;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use export::{export_bundle, ExportOptions};

use crate::dataset::MeanStd;
use crate::error::{MetricError, ReportError};
use crate::levels::{classify, Level};
use crate::metrics::{ols_fit, ExampleScore, LinearFit, PairMetrics};
use crate::scalar::Scalar;

/// One scored final generation: a (source, target) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PairObservation<T = f64> {
    pub source_id: String,
    pub target: Level,
    pub source_fres: T,
    pub generated_fres: T,
    pub source_words: usize,
    pub generated_words: usize,
    #[serde(flatten)]
    pub metrics: PairMetrics<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct IndividualSummary<T = f64> {
    pub examples: usize,
    pub spearman_rho: MeanStd<T>,
    pub rmse: MeanStd<T>,
    pub accuracy: MeanStd<T>,
}

/// Mean and population standard deviation of each individual-scale metric,
/// in natural units. `None` without examples.
pub fn individual_summary<T: Scalar>(scores: &[ExampleScore<T>]) -> Option<IndividualSummary<T>> {
    let col = |f: fn(&ExampleScore<T>) -> T| scores.iter().map(f).collect::<Vec<T>>();
    Some(IndividualSummary {
        examples: scores.len(),
        spearman_rho: MeanStd::of(&col(|s| s.spearman_rho))?,
        rmse: MeanStd::of(&col(|s| s.rmse))?,
        accuracy: MeanStd::of(&col(|s| s.accuracy))?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PopulationRow<T = f64> {
    pub target_level: Level,
    /// `None` when the fit is undefined; `undefined_reason` says why.
    pub fit: Option<LinearFit<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub undefined_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PopulationSummary<T = f64> {
    /// Source scores against themselves: pcc 1, slope 1, intercept 0, r² 1.
    pub source: LinearFit<T>,
    pub rows: Vec<PopulationRow<T>>,
}

/// Per target level, the fit of generated against source scores.
pub fn population_summary<T: Scalar>(observations: &[PairObservation<T>]) -> PopulationSummary<T> {
    let mut by_level: BTreeMap<Level, Vec<&PairObservation<T>>> = BTreeMap::new();
    for o in observations {
        by_level.entry(o.target).or_default().push(o);
    }
    let sources: BTreeSet<&str> = observations.iter().map(|o| o.source_id.as_str()).collect();
    let rows = Level::ALL
        .into_iter()
        .map(|level| {
            let mut obs = by_level.remove(&level).unwrap_or_default();
            obs.sort_by(|a, b| a.source_id.cmp(&b.source_id));
            let xs: Vec<T> = obs.iter().map(|o| o.source_fres).collect();
            let ys: Vec<T> = obs.iter().map(|o| o.generated_fres).collect();
            match ols_fit(&xs, &ys) {
                Ok(fit) => PopulationRow {
                    target_level: level,
                    fit: Some(fit),
                    undefined_reason: None,
                },
                Err(e) => PopulationRow {
                    target_level: level,
                    fit: None,
                    undefined_reason: Some(match e {
                        MetricError::DegenerateInput(why) => why.to_string(),
                        other => other.to_string(),
                    }),
                },
            }
        })
        .collect();
    PopulationSummary {
        source: LinearFit::identity(sources.len()),
        rows,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ScatterPoint<T = f64> {
    pub bin_center: T,
    pub mean_generated: T,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ScatterSeries<T = f64> {
    pub target_level: Level,
    pub points: Vec<ScatterPoint<T>>,
}

/// Mean generated score per source-score bin, one series per target.
/// Bins are `[k*width, (k+1)*width)`; bins with fewer than `min_count`
/// observations are omitted.
pub fn binned_scatter<T: Scalar>(
    observations: &[PairObservation<T>],
    bin_width: T,
    min_count: usize,
) -> Vec<ScatterSeries<T>> {
    assert!(bin_width > T::zero(), "bin width must be positive");
    Level::ALL
        .into_iter()
        .map(|level| {
            let mut bins: BTreeMap<i64, Vec<(&str, T)>> = BTreeMap::new();
            for o in observations.iter().filter(|o| o.target == level) {
                let k = (o.source_fres / bin_width).floor().to_i64().unwrap_or(i64::MIN);
                bins.entry(k).or_default().push((&o.source_id, o.generated_fres));
            }
            let points = bins
                .into_iter()
                .filter(|(_, v)| v.len() >= min_count.max(1))
                .map(|(k, mut v)| {
                    // sorted reduction keeps the mean independent of input order
                    v.sort_by(|a, b| a.0.cmp(b.0).then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal)));
                    let n = T::count(v.len());
                    ScatterPoint {
                        bin_center: (T::from_i64(k).unwrap() + T::lit(0.5)) * bin_width,
                        mean_generated: v.iter().map(|p| p.1).sum::<T>() / n,
                        count: v.len(),
                    }
                })
                .collect();
            ScatterSeries {
                target_level: level,
                points,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeatmapVariable {
    GeneratedFres,
    Wer,
    SemanticF1,
    LengthChange,
}

impl HeatmapVariable {
    pub const ALL: [HeatmapVariable; 4] = [
        HeatmapVariable::GeneratedFres,
        HeatmapVariable::Wer,
        HeatmapVariable::SemanticF1,
        HeatmapVariable::LengthChange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HeatmapVariable::GeneratedFres => "generated-fres",
            HeatmapVariable::Wer => "wer",
            HeatmapVariable::SemanticF1 => "semantic-f1",
            HeatmapVariable::LengthChange => "length-change",
        }
    }
}

impl fmt::Display for HeatmapVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeatmapVariable {
    type Err = ReportError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HeatmapVariable::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| ReportError::UnknownVariable(s.to_string()))
    }
}

/// How the length-change heatmap aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthChangeMode {
    #[default]
    Percent,
    Words,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct HeatmapGrid<T = f64> {
    pub variable: HeatmapVariable,
    /// `means[source_class][target_class]`, `None` for empty cells.
    pub means: [[Option<T>; 8]; 8],
    pub counts: [[usize; 8]; 8],
    /// Observations whose source score was outside [0, 100] and was clamped
    /// to the nearest class. They are included in `counts`.
    pub clamped: usize,
}

impl<T: Scalar> HeatmapGrid<T> {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn cell(&self, source: Level, target: Level) -> Option<T> {
        self.means[source.index()][target.index()]
    }
}

fn heatmap_value<T: Scalar>(o: &PairObservation<T>, variable: HeatmapVariable, mode: LengthChangeMode) -> Option<T> {
    match variable {
        HeatmapVariable::GeneratedFres => Some(o.generated_fres),
        HeatmapVariable::Wer => Some(o.metrics.self_wer),
        HeatmapVariable::SemanticF1 => o.metrics.sem_f1,
        HeatmapVariable::LengthChange => Some(match mode {
            LengthChangeMode::Percent => o.metrics.length_change_pct,
            LengthChangeMode::Words => T::count(o.generated_words) - T::count(o.source_words),
        }),
    }
}

/// Mean of `variable` for every (source class, target class) pair.
/// Observations without a value for the variable are skipped.
pub fn heatmap<T: Scalar>(
    observations: &[PairObservation<T>],
    variable: HeatmapVariable,
    mode: LengthChangeMode,
) -> HeatmapGrid<T> {
    let mut cells: Vec<Vec<Vec<(&str, T)>>> = vec![vec![Vec::new(); 8]; 8];
    let mut clamped = 0;
    for o in observations {
        let Some(v) = heatmap_value(o, variable, mode) else { continue };
        let band = classify(o.source_fres);
        if band.is_out_of_range() {
            clamped += 1;
        }
        cells[band.clamped().index()][o.target.index()].push((&o.source_id, v));
    }
    let mut means = [[None; 8]; 8];
    let mut counts = [[0usize; 8]; 8];
    for (s, row) in cells.iter_mut().enumerate() {
        for (t, cell) in row.iter_mut().enumerate() {
            if cell.is_empty() {
                continue;
            }
            cell.sort_by(|a, b| a.0.cmp(b.0));
            counts[s][t] = cell.len();
            means[s][t] = Some(cell.iter().map(|c| c.1).sum::<T>() / T::count(cell.len()));
        }
    }
    HeatmapGrid {
        variable,
        means,
        counts,
        clamped,
    }
}

/// Everything the report exporter writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ReportBundle<T = f64> {
    pub individual: Option<IndividualSummary<T>>,
    pub population: PopulationSummary<T>,
    pub scatter: Vec<ScatterSeries<T>>,
    pub heatmaps: Vec<HeatmapGrid<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub bin_width: f64,
    pub min_count: usize,
    pub length_change: LengthChangeMode,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            bin_width: 5.0,
            min_count: 10,
            length_change: LengthChangeMode::Percent,
        }
    }
}

pub fn build_report<T: Scalar>(
    scores: &[ExampleScore<T>],
    observations: &[PairObservation<T>],
    opts: &ReportOptions,
) -> ReportBundle<T> {
    ReportBundle {
        individual: individual_summary(scores),
        population: population_summary(observations),
        scatter: binned_scatter(observations, T::lit(opts.bin_width), opts.min_count),
        heatmaps: HeatmapVariable::ALL
            .into_iter()
            .map(|v| heatmap(observations, v, opts.length_change))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levels::LevelMap;

    pub(crate) fn obs(id: &str, target: Level, src: f64, gen: f64) -> PairObservation<f64> {
        PairObservation {
            source_id: id.into(),
            target,
            source_fres: src,
            generated_fres: gen,
            source_words: 100,
            generated_words: 100,
            metrics: PairMetrics {
                self_wer: if src == gen { 0.0 } else { 0.5 },
                sem_precision: None,
                sem_recall: None,
                sem_f1: None,
                length_change_pct: 0.0,
            },
        }
    }

    fn copy_run(sources: &[f64]) -> Vec<PairObservation<f64>> {
        sources
            .iter()
            .enumerate()
            .flat_map(|(i, &f)| Level::ALL.map(|l| obs(&format!("s{i:03}"), l, f, f)))
            .collect()
    }

    fn score(rho: f64, rmse: f64, acc: f64) -> ExampleScore<f64> {
        ExampleScore {
            source_id: "x".into(),
            source_fres: 50.0,
            generated_fres: LevelMap([0.0; 8]),
            spearman_rho: rho,
            rmse,
            accuracy: acc,
            fallback_levels: vec![],
        }
    }

    #[test]
    fn individual_examples() {
        let s = individual_summary(&[score(1.0, 0.0, 1.0)]).unwrap();
        assert_eq!((s.spearman_rho.mean, s.spearman_rho.std), (1.0, 0.0));
        assert_eq!((s.rmse.mean, s.rmse.std), (0.0, 0.0));
        let s = individual_summary(&[score(0.0, 1.0, 0.25), score(0.0, 1.0, 0.75)]).unwrap();
        assert_eq!((s.accuracy.mean, s.accuracy.std), (0.5, 0.25));
        assert!(individual_summary::<f64>(&[]).is_none());
    }

    #[test]
    fn copy_run_population_equals_source_row() {
        let p = population_summary(&copy_run(&[12.0, 40.0, 55.5, 71.0, 93.0]));
        assert_eq!(p.source.n, 5);
        for row in &p.rows {
            let fit = row.fit.unwrap();
            assert!((fit.pcc - 1.0).abs() < 1e-9 && (fit.slope - 1.0).abs() < 1e-9);
            assert!(fit.intercept.abs() < 1e-9 && (fit.r_squared - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_rows_are_undefined() {
        let p = population_summary(&copy_run(&[40.0]));
        assert!(p.rows.iter().all(|r| r.fit.is_none() && r.undefined_reason.is_some()));
    }

    #[test]
    fn scatter_bins_and_min_count() {
        let sources: Vec<f64> = (0..30).map(|i| 40.0 + (i % 3) as f64).collect();
        let mut observations = copy_run(&sources);
        observations.push(obs("lonely", Level::L5, 90.0, 90.0));
        let series = binned_scatter(&observations, 5.0, 10);
        assert_eq!(series.len(), 8);
        for s in &series {
            assert_eq!(s.points.len(), 1, "bin with one example is omitted");
            assert_eq!(s.points[0].bin_center, 42.5);
            assert_eq!(s.points[0].count, 30);
            assert!((s.points[0].mean_generated - 41.0).abs() < 1e-12);
        }
        let series = binned_scatter(&observations, 5.0, 1);
        assert_eq!(series[0].points.len(), 2);
    }

    #[test]
    fn scatter_is_order_invariant() {
        let mut observations = copy_run(&[3.3, 8.1, 4.4, 7.7, 1.2, 9.9]);
        for (i, o) in observations.iter_mut().enumerate() {
            o.generated_fres = 0.1 * i as f64 + 1e-3 / (i + 1) as f64;
        }
        let a = binned_scatter(&observations, 5.0, 1);
        observations.reverse();
        assert_eq!(a, binned_scatter(&observations, 5.0, 1));
    }

    #[test]
    fn heatmap_copy_run() {
        let observations = copy_run(&[5.0, 15.0, 25.0, 95.0, -10.0, 120.0]);
        let wer = heatmap(&observations, HeatmapVariable::Wer, LengthChangeMode::Percent);
        assert!(wer.means.iter().flatten().flatten().all(|&v| v == 0.0));
        assert_eq!(wer.total(), observations.len());
        assert_eq!(wer.clamped, 16);

        let gen = heatmap(&observations, HeatmapVariable::GeneratedFres, LengthChangeMode::Percent);
        for t in Level::ALL {
            assert_eq!(gen.cell(Level::L20, t), Some(20.0));
            assert_eq!(gen.cell(Level::L5, t), Some(-2.5));
            assert_eq!(gen.cell(Level::L40, t), None);
        }
        let f1 = heatmap(&observations, HeatmapVariable::SemanticF1, LengthChangeMode::Percent);
        assert_eq!(f1.total(), 0);
    }

    #[test]
    fn variable_names() {
        for v in HeatmapVariable::ALL {
            assert_eq!(v.name().parse::<HeatmapVariable>().unwrap(), v);
        }
        assert!(matches!("bleu".parse::<HeatmapVariable>(), Err(ReportError::UnknownVariable(_))));
    }
}
