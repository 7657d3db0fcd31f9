//! Self-contained SVG power curves: one panel per scenario, one line per measure.

use std::fmt::Write as _;
use std::path::Path;

use depower::{MeasureId, PowerResult, ScenarioId};

use crate::error::CliError;
use crate::output::write_file;

const COLUMNS: usize = 4;
const PANEL_W: f64 = 260.0;
const PANEL_H: f64 = 220.0;
const MARGIN_LEFT: f64 = 46.0;
const MARGIN_RIGHT: f64 = 14.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_BOTTOM: f64 = 38.0;
const LEGEND_H: f64 = 34.0;

fn colour(m: MeasureId) -> &'static str {
    match m {
        MeasureId::Cor => "#1f77b4",
        MeasureId::Dcor => "#d62728",
        MeasureId::Mic => "#2ca02c",
    }
}

/// Plot-area geometry of one panel.
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    sigma_min: f64,
    sigma_max: f64,
}

impl Frame {
    fn x(&self, sigma: f64) -> f64 {
        if self.sigma_max > self.sigma_min {
            self.left + (sigma - self.sigma_min) / (self.sigma_max - self.sigma_min) * self.width
        } else {
            self.left + self.width / 2.0
        }
    }

    fn y(&self, power: f64) -> f64 {
        self.top + (1.0 - power) * self.height
    }
}

fn sorted_unique<T: Ord + Copy>(mut v: Vec<T>) -> Vec<T> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Renders the SVG document for `results`.
pub fn render_svg(results: &[PowerResult]) -> String {
    let scenarios: Vec<ScenarioId> = sorted_unique(results.iter().map(|r| r.scenario).collect());
    let measures: Vec<MeasureId> = sorted_unique(results.iter().map(|r| r.measure).collect());
    let cols = scenarios.len().clamp(1, COLUMNS);
    let rows = scenarios.len().div_ceil(COLUMNS).max(1);
    let width = cols as f64 * PANEL_W;
    let height = LEGEND_H + rows as f64 * PANEL_H;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#);

    // legend
    for (i, m) in measures.iter().enumerate() {
        let x = 12.0 + i as f64 * 90.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="17" x2="{:.1}" y2="17" stroke="{}" stroke-width="2"/><text x="{:.1}" y="21">{}</text>"#,
            x + 24.0,
            colour(*m),
            x + 30.0,
            m
        );
    }

    for (p, &scenario) in scenarios.iter().enumerate() {
        let ox = (p % COLUMNS) as f64 * PANEL_W;
        let oy = LEGEND_H + (p / COLUMNS) as f64 * PANEL_H;
        let cells: Vec<&PowerResult> = results.iter().filter(|r| r.scenario == scenario).collect();
        let sigma_min = cells.iter().map(|r| r.sigma).fold(f64::INFINITY, f64::min);
        let sigma_max = cells.iter().map(|r| r.sigma).fold(f64::NEG_INFINITY, f64::max);
        let f = Frame {
            left: ox + MARGIN_LEFT,
            top: oy + MARGIN_TOP,
            width: PANEL_W - MARGIN_LEFT - MARGIN_RIGHT,
            height: PANEL_H - MARGIN_TOP - MARGIN_BOTTOM,
            sigma_min,
            sigma_max,
        };
        let _ = writeln!(s, r#"<g class="panel" data-scenario="{scenario}">"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{scenario}</text>"#,
            f.left + f.width / 2.0,
            oy + 18.0
        );
        let _ = writeln!(
            s,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
            f.left, f.top, f.width, f.height
        );
        for tick in [0.0, 0.5, 1.0] {
            let y = f.y(tick);
            let _ = writeln!(
                s,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{tick:.1}</text>"##,
                f.left,
                f.left + f.width,
                f.left - 4.0,
                y + 4.0
            );
        }
        for sigma in [sigma_min, sigma_max] {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                f.x(sigma),
                f.top + f.height + 14.0,
                trim_label(sigma)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">noise level</text>"#,
            f.left + f.width / 2.0,
            f.top + f.height + 30.0
        );
        for &m in &measures {
            let mut pts: Vec<&&PowerResult> = cells.iter().filter(|r| r.measure == m).collect();
            if pts.is_empty() {
                continue;
            }
            pts.sort_by(|a, b| a.sigma.total_cmp(&b.sigma));
            let points: Vec<String> = pts
                .iter()
                .map(|r| format!("{:.3},{:.3}", f.x(r.sigma), f.y(r.power)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline data-measure="{m}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                colour(m),
                points.join(" ")
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

fn trim_label(v: f64) -> String {
    let t = format!("{v:.3}");
    t.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn emit_plots(results: &[PowerResult], path: &Path) -> Result<(), CliError> {
    if results.is_empty() {
        return Err(CliError::Runtime("no results to plot".into()));
    }
    write_file(path, &render_svg(results))
}
