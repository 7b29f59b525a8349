//! Minimal static SVG charts. No styling beyond fill and stroke.

use std::fmt::Write as _;

use super::{HeatmapGrid, ScatterSeries};
use crate::levels::Level;
use crate::scalar::Scalar;

const W: f64 = 480.0;
const H: f64 = 360.0;
const PAD: f64 = 40.0;

const PALETTE: [&str; 8] = [
    "#1b1f5e", "#2c5aa0", "#3a8fb7", "#4fb39b", "#8fc15a", "#d6b43a", "#e07b2e", "#c23b22",
];

fn x_px(v: f64) -> f64 {
    PAD + (v.clamp(-20.0, 120.0) + 20.0) / 140.0 * (W - 2.0 * PAD)
}

fn y_px(v: f64) -> f64 {
    H - PAD - (v.clamp(-20.0, 120.0) + 20.0) / 140.0 * (H - 2.0 * PAD)
}

/// Binned scatter: one polyline per target level, source score on x.
pub(crate) fn scatter_chart<T: Scalar>(series: &[ScatterSeries<T>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<polyline points="{:.1},{:.1} {:.1},{:.1}" fill="none" stroke="#999" stroke-dasharray="4 4"/>"##,
        x_px(0.0),
        y_px(0.0),
        x_px(100.0),
        y_px(100.0)
    );
    for s in series {
        let color = PALETTE[s.target_level.index()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|p| format!("{:.1},{:.1}", x_px(p.bin_center.as_f64()), y_px(p.mean_generated.as_f64())))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"><title>target {}</title></polyline>"#,
            pts.join(" "),
            s.target_level
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">source FRES</text>"#, W / 2.0, H - 8.0);
    let _ = writeln!(out, r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})" text-anchor="middle">generated FRES</text>"#, H / 2.0, H / 2.0);
    out.push_str("</svg>\n");
    out
}

/// 8x8 heatmap, source class down, target class across, shaded by value.
pub(crate) fn heatmap_chart<T: Scalar>(grid: &HeatmapGrid<T>) -> String {
    let values: Vec<f64> = grid.means.iter().flatten().flatten().map(|v| v.as_f64()).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let cell = 36.0;
    let size = PAD + 8.0 * cell + 10.0;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
    let _ = writeln!(out, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    for (i, level) in Level::ALL.into_iter().enumerate() {
        let c = PAD + i as f64 * cell + cell / 2.0;
        let _ = writeln!(out, r#"<text x="{c}" y="{}" font-size="10" text-anchor="middle">{level}</text>"#, PAD - 6.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{level}</text>"#, PAD - 6.0, c + 3.0);
    }
    for s in Level::ALL {
        for t in Level::ALL {
            let x = PAD + t.index() as f64 * cell;
            let y = PAD + s.index() as f64 * cell;
            match grid.cell(s, t) {
                Some(v) => {
                    let shade = (255.0 - 200.0 * (v.as_f64() - lo) / span).round() as u8;
                    let _ = writeln!(
                        out,
                        r#"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="rgb({shade},{shade},255)"><title>{:.2}</title></rect>"#,
                        v.as_f64()
                    );
                }
                None => {
                    let _ = writeln!(out, r##"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="#eee"/>"##);
                }
            }
        }
    }
    let _ = writeln!(out, r#"<text x="{}" y="12" font-size="11" text-anchor="middle">{}</text>"#, size / 2.0, grid.variable);
    out.push_str("</svg>\n");
    out
}
