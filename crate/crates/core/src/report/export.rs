use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{svg, HeatmapGrid, IndividualSummary, PopulationSummary, ReportBundle, ScatterSeries};
use crate::error::ReportError;
use crate::levels::Level;
use crate::scalar::Scalar;

/// Decimal places used for every number in CSV output.
pub const CSV_PRECISION: usize = 4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExportOptions {
    pub svg: bool,
}

fn storage(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Storage {
        path: path.to_path_buf(),
        source,
    }
}

fn to_json<S: Serialize>(value: &S) -> Result<String, ReportError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| ReportError::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn num<T: Scalar>(v: T) -> String {
    let s = format!("{:.*}", CSV_PRECISION, v.as_f64());
    // avoid "-0.0000" noise in diffs
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

#[derive(Serialize)]
#[serde(bound = "T: Scalar")]
struct IndividualExport<'a, T: Scalar> {
    #[serde(flatten)]
    summary: &'a IndividualSummary<T>,
    /// rho and accuracy scaled by 100, as usually tabulated.
    display: IndividualDisplay<T>,
}

#[derive(Serialize)]
#[serde(bound = "T: Scalar")]
struct IndividualDisplay<T: Scalar> {
    rho_x100: [T; 2],
    rmse: [T; 2],
    accuracy_x100: [T; 2],
}

fn individual_csv<T: Scalar>(s: &IndividualSummary<T>) -> String {
    let hundred = T::lit(100.0);
    let mut out = String::from("metric,mean,std,examples\n");
    for (name, ms, scale) in [
        ("rho_x100", s.spearman_rho, hundred),
        ("rmse", s.rmse, T::one()),
        ("accuracy_x100", s.accuracy, hundred),
    ] {
        let _ = writeln!(out, "{name},{},{},{}", num(ms.mean * scale), num(ms.std * scale), s.examples);
    }
    out
}

fn population_csv<T: Scalar>(p: &PopulationSummary<T>) -> String {
    let mut out = String::from("target,pcc_x100,a,b,r2,n,note\n");
    let s = &p.source;
    let _ = writeln!(
        out,
        "source,{},{},{},{},{},",
        num(s.pcc * T::lit(100.0)),
        num(s.slope),
        num(s.intercept),
        num(s.r_squared),
        s.n
    );
    for row in &p.rows {
        match &row.fit {
            Some(f) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},",
                    row.target_level,
                    num(f.pcc * T::lit(100.0)),
                    num(f.slope),
                    num(f.intercept),
                    num(f.r_squared),
                    f.n
                );
            }
            None => {
                let note = row.undefined_reason.as_deref().unwrap_or("undefined").replace(',', ";");
                let _ = writeln!(out, "{},,,,,,undefined: {note}", row.target_level);
            }
        }
    }
    out
}

fn scatter_csv<T: Scalar>(s: &ScatterSeries<T>) -> String {
    let mut out = String::from("bin_center,mean_generated_fres,count\n");
    for p in &s.points {
        let _ = writeln!(out, "{},{},{}", num(p.bin_center), num(p.mean_generated), p.count);
    }
    out
}

/// 8x8 grid with target labels across and source labels down.
pub(crate) fn heatmap_csv<T: Scalar>(h: &HeatmapGrid<T>) -> String {
    let mut out = String::from("source\\target");
    for t in Level::ALL {
        let _ = write!(out, ",{t}");
    }
    out.push('\n');
    for s in Level::ALL {
        let _ = write!(out, "{s}");
        for t in Level::ALL {
            out.push(',');
            if let Some(v) = h.cell(s, t) {
                out.push_str(&num(v));
            }
        }
        out.push('\n');
    }
    out
}

/// Writes the bundle into `dir`, returning the files written in order.
///
/// Layout: `summary_individual.{csv,json}`, `summary_population.{csv,json}`,
/// `scatter_<target>.csv`, `heatmap_<variable>.{csv,json}`, `report.json`
/// and, optionally, `charts/*.svg`. Output is byte-identical for identical
/// bundles.
pub fn export_bundle<T: Scalar>(
    dir: &Path,
    bundle: &ReportBundle<T>,
    opts: ExportOptions,
) -> Result<Vec<PathBuf>, ReportError> {
    let mut files: Vec<(String, String)> = Vec::new();
    if let Some(ind) = &bundle.individual {
        files.push(("summary_individual.csv".into(), individual_csv(ind)));
        let hundred = T::lit(100.0);
        let export = IndividualExport {
            summary: ind,
            display: IndividualDisplay {
                rho_x100: [ind.spearman_rho.mean * hundred, ind.spearman_rho.std * hundred],
                rmse: [ind.rmse.mean, ind.rmse.std],
                accuracy_x100: [ind.accuracy.mean * hundred, ind.accuracy.std * hundred],
            },
        };
        files.push(("summary_individual.json".into(), to_json(&export)?));
    }
    files.push(("summary_population.csv".into(), population_csv(&bundle.population)));
    files.push(("summary_population.json".into(), to_json(&bundle.population)?));
    for series in &bundle.scatter {
        files.push((format!("scatter_{}.csv", series.target_level), scatter_csv(series)));
    }
    for grid in &bundle.heatmaps {
        files.push((format!("heatmap_{}.csv", grid.variable), heatmap_csv(grid)));
        files.push((format!("heatmap_{}.json", grid.variable), to_json(grid)?));
    }
    files.push(("report.json".into(), to_json(bundle)?));
    if opts.svg {
        files.push(("charts/scatter.svg".into(), svg::scatter_chart(&bundle.scatter)));
        for grid in &bundle.heatmaps {
            files.push((format!("charts/heatmap_{}.svg", grid.variable), svg::heatmap_chart(grid)));
        }
    }

    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(storage(parent))?;
        }
        fs::write(&path, contents).map_err(storage(&path))?;
        written.push(path);
    }
    Ok(written)
}
