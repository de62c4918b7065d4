//! Figure emission: one CSV (p1 against one threshold column per p2 value)
//! and one SVG rendering every p2-curve as a polyline.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::CliError;
use crate::sweep::{fmt_sig12, SweepResult};

const VIEW_W: f64 = 800.0;
const VIEW_H: f64 = 600.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 25.0;
const MARGIN_T: f64 = 45.0;
const MARGIN_B: f64 = 55.0;

/// Wide CSV: `p1` first, then the exact threshold of each p2-curve.
pub fn figure_csv(sweep: &SweepResult) -> String {
    let p2s = sweep.p2_values();
    let mut out = String::from("p1");
    for p2 in &p2s {
        let _ = write!(out, ",r12[p2={p2}]");
    }
    out.push('\n');
    for i in 0..sweep.p1_points {
        let _ = write!(out, "{}", fmt_sig12(sweep.curve(0)[i].p1));
        for j in 0..sweep.p2_points {
            let _ = write!(out, ",{}", fmt_sig12(sweep.curve(j)[i].r12_exact));
        }
        out.push('\n');
    }
    out
}

fn color(index: usize, count: usize) -> String {
    // Blue (p2 = 0, the lowest curve) through red (p2 = 1).
    let t = if count > 1 { index as f64 / (count - 1) as f64 } else { 0.0 };
    let r = (40.0 + 200.0 * t) as u8;
    let g = (60.0 + 40.0 * (1.0 - (2.0 * t - 1.0).abs())) as u8;
    let b = (220.0 - 180.0 * t) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Fixed 800x600 line chart with linear axes and a horizontal reference
/// line at threshold 1.
pub fn figure_svg(sweep: &SweepResult, title: &str) -> String {
    let (plot_w, plot_h) = (VIEW_W - MARGIN_L - MARGIN_R, VIEW_H - MARGIN_T - MARGIN_B);
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for row in &sweep.rows {
        y_min = y_min.min(row.r12_exact);
        y_max = y_max.max(row.r12_exact);
    }
    let pad = ((y_max - y_min) * 0.05).max(1e-9);
    let (y_lo, y_hi) = (y_min - pad, y_max + pad);
    let x_of = |p1: f64| MARGIN_L + p1 * plot_w;
    let y_of = |v: f64| MARGIN_T + (y_hi - v) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW_W} {VIEW_H}" font-family="sans-serif" font-size="14">"#
    );
    let _ = writeln!(svg, r#"<rect width="{VIEW_W}" height="{VIEW_H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="25" text-anchor="middle">{title}</text>"#, VIEW_W / 2.0);

    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_L}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        VIEW_H - MARGIN_B,
        VIEW_W - MARGIN_R,
        VIEW_H - MARGIN_B
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{}" stroke="black"/>"#,
        VIEW_H - MARGIN_B
    );
    for k in 0..=4 {
        let p1 = k as f64 / 4.0;
        let x = x_of(p1);
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/>"#,
            VIEW_H - MARGIN_B,
            VIEW_H - MARGIN_B + 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{}" text-anchor="middle">{p1}</text>"#,
            VIEW_H - MARGIN_B + 22.0
        );
    }
    for k in 0..=4 {
        let v = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y}" x2="{MARGIN_L}" y2="{y}" stroke="black"/>"#,
            MARGIN_L - 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{v:.3}</text>"#,
            MARGIN_L - 10.0,
            y + 5.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">p1</text>"#,
        MARGIN_L + plot_w / 2.0,
        VIEW_H - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">R12</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    );

    // reference line at threshold 1
    if y_lo < 1.0 && 1.0 < y_hi {
        let y = y_of(1.0);
        let _ = writeln!(
            svg,
            r#"<line x1="{MARGIN_L}" y1="{y}" x2="{}" y2="{y}" stroke="gray" stroke-dasharray="6 4"/>"#,
            VIEW_W - MARGIN_R
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="gray">R12 = 1</text>"#,
            VIEW_W - MARGIN_R - 70.0,
            y - 6.0
        );
    }

    for j in 0..sweep.p2_points {
        let pts: Vec<String> = sweep
            .curve(j)
            .iter()
            .map(|r| format!("{:.2},{:.2}", x_of(r.p1), y_of(r.r12_exact)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            color(j, sweep.p2_points),
            pts.join(" ")
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_figure_files(
    sweep: &SweepResult,
    csv_path: &Path,
    svg_path: &Path,
    title: &str,
) -> Result<(), CliError> {
    if sweep.rows.is_empty() {
        return Err(CliError::Validation("cannot emit figures from an empty sweep".into()));
    }
    fs::write(csv_path, figure_csv(sweep)).map_err(|e| CliError::io(csv_path, e))?;
    fs::write(svg_path, figure_svg(sweep, title)).map_err(|e| CliError::io(svg_path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{run_sweep, SweepRow};
    use crate::scenario::parse_scenario_str;

    fn case_a_sweep() -> SweepResult {
        let sc = parse_scenario_str(include_str!("../scenarios/case_A.json"))
            .unwrap()
            .scenario;
        run_sweep(&sc, 21, 5).unwrap()
    }

    #[test]
    fn csv_has_one_column_per_p2() {
        let sweep = case_a_sweep();
        let csv = figure_csv(&sweep);
        let header = csv.lines().next().unwrap();
        assert_eq!(header.split(',').count(), 1 + 5);
        assert!(header.contains("r12[p2=0]"));
        assert_eq!(csv.lines().count(), 1 + 21);
    }

    #[test]
    fn lowest_curve_is_full_patch2_commuting() {
        let sweep = case_a_sweep();
        let first = sweep.curve(0);
        let last = sweep.curve(4);
        for (a, b) in first.iter().zip(last.iter()) {
            assert!(a.r12_exact <= b.r12_exact + 1e-12);
        }
        assert_eq!(first[0].p2, 0.0);
    }

    #[test]
    fn svg_contains_axes_reference_and_curves() {
        let sweep = case_a_sweep();
        let svg = figure_svg(&sweep, "threshold vs p1");
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"viewBox="0 0 800 600""#));
        assert_eq!(svg.matches("<polyline").count(), 5);
        assert!(svg.contains("stroke-dasharray"), "reference line missing");
    }

    #[test]
    fn degenerate_single_point_curve_is_valid_svg() {
        let sweep = SweepResult {
            p1_points: 1,
            p2_points: 1,
            rows: vec![SweepRow {
                p1: 0.5,
                p2: 0.0,
                r12_exact: 1.0,
                r12_tilde: 1.0,
                q11: 0.5,
                q12: 0.1,
                q21: 0.4,
                q22: 0.9,
                alpha: 0.3,
            }],
        };
        let svg = figure_svg(&sweep, "degenerate");
        assert!(svg.contains("<polyline"));
        assert!(svg.ends_with("</svg>\n"));
        let csv = figure_csv(&sweep);
        assert_eq!(csv.lines().count(), 2);
    }
}
