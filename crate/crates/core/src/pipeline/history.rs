use std::fmt::Write as _;

use crate::shape::HistoryRecord;

pub const HISTORY_HEADER: &str = "iteration,volume_m3,compliance_J,max_vm_Pa,aggregate,step_size,violation,min_quality,accepted";

/// One row per record, reals with 17 significant digits.
pub fn history_csv(history: &[HistoryRecord]) -> String {
    let mut s = String::from(HISTORY_HEADER);
    s.push('\n');
    for r in history {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.iteration,
            r.volume,
            r.compliance,
            r.max_vm,
            r.aggregate,
            r.step_size,
            r.constraint_violation,
            r.min_quality,
            r.accepted
        );
    }
    s
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

/// Volume and max von Mises per iteration, each divided by its initial
/// value.
pub fn history_svg(history: &[HistoryRecord], initial_volume: f64, initial_max_vm: f64) -> String {
    let ratio = |v: f64, base: f64| if base != 0.0 { v / base } else { 0.0 };
    let volume: Vec<f64> = history.iter().map(|r| ratio(r.volume, initial_volume)).collect();
    let stress: Vec<f64> = history.iter().map(|r| ratio(r.max_vm, initial_max_vm)).collect();
    let (mut lo, mut hi) = volume
        .iter()
        .chain(&stress)
        .filter(|v| v.is_finite())
        .fold((1.0_f64, 1.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    lo = (lo * 10.0).floor() / 10.0;
    hi = (hi * 10.0).ceil() / 10.0;
    if hi <= lo {
        hi = lo + 0.1;
    }
    let n = history.len().max(2) as f64;
    let x = |i: usize| MARGIN + (WIDTH - 2.0 * MARGIN) * i as f64 / (n - 1.0);
    let y = |v: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (v - lo) / (hi - lo);
    let points = |values: &[f64]| {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{:.2},{:.2}", x(i), y(v)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{left},{top} V{bottom} H{right}" fill="none" stroke="black"/>"#
    );
    for (v, anchor) in [(lo, bottom), (hi, top)] {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{v:.1}</text>"#, left - 6.0, anchor + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{left}" y="{}" text-anchor="middle">1</text>"#, bottom + 16.0);
    let _ = writeln!(s, r#"<text x="{right}" y="{}" text-anchor="middle">{}</text>"#, bottom + 16.0, history.len().max(1));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">iteration</text>"#, WIDTH / 2.0, HEIGHT - 12.0);
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {}) rotate(-90)" text-anchor="middle">value / initial</text>"#,
        HEIGHT / 2.0
    );
    let _ = writeln!(
        s,
        r##"<polyline id="volume" fill="none" stroke="#1f77b4" stroke-width="2" points="{}"/>"##,
        points(&volume)
    );
    let _ = writeln!(
        s,
        r##"<polyline id="max_vm" fill="none" stroke="#d62728" stroke-width="2" points="{}"/>"##,
        points(&stress)
    );
    let _ = writeln!(s, r##"<text x="{}" y="{}" fill="#1f77b4">volume</text>"##, right - 120.0, top + 4.0);
    let _ = writeln!(s, r##"<text x="{}" y="{}" fill="#d62728">max von Mises</text>"##, right - 120.0, top + 20.0);
    s.push_str("</svg>\n");
    s
}

/// CSV and SVG renderings of one history.
pub fn write_history(history: &[HistoryRecord], initial_volume: f64, initial_max_vm: f64) -> (String, String) {
    (history_csv(history), history_svg(history, initial_volume, initial_max_vm))
}
