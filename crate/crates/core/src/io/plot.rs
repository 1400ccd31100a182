//! Minimal SVG line chart of a history and one or more forecasts.

use std::fmt::Write;

use crate::autopilot::ForecastResult;
use crate::numfmt::format_g;
use crate::series::TimeSeries;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_Y: f64 = 30.0;
const HISTORY_COLOR: &str = "#000000";
const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const TICKS: usize = 5;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn coord(v: f64) -> String {
    format!("{v:.2}")
}

/// Draws `history` in black and each forecast in its own color. Forecast
/// lines start at the last observed point so the curves connect. The primary
/// forecast is labeled "forecast"; alternatives carry their own names.
pub fn emit_plot(
    history: &TimeSeries,
    forecast: &ForecastResult,
    alternatives: &[(String, &ForecastResult)],
) -> String {
    let mut series: Vec<(String, &ForecastResult)> = vec![("forecast".to_string(), forecast)];
    series.extend(alternatives.iter().map(|(n, f)| (n.clone(), *f)));

    let hist = history.values();
    let n_hist = hist.len();
    let x_max = series
        .iter()
        .map(|(_, f)| n_hist + f.values.len())
        .max()
        .unwrap_or(n_hist)
        .saturating_sub(1)
        .max(1) as f64;
    let all = hist.iter().chain(series.iter().flat_map(|(_, f)| f.values.iter()));
    let (mut lo, mut hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if lo == hi {
        lo -= 1.0;
        hi += 1.0;
    }
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let px = |i: f64| MARGIN_LEFT + i / x_max * plot_w;
    let py = |v: f64| MARGIN_Y + (hi - v) / (hi - lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    let (x0, x1) = (coord(px(0.0)), coord(px(x_max)));
    let (y0, y1) = (coord(py(lo)), coord(py(hi)));
    let _ = writeln!(svg, r##"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="#444"/>"##);
    let _ = writeln!(svg, r##"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#444"/>"##);
    for t in 0..TICKS {
        let v = lo + (hi - lo) * t as f64 / (TICKS - 1) as f64;
        let y = coord(py(v));
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y}" font-size="11" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            coord(MARGIN_LEFT - 6.0),
            escape(&format_g(v, 4))
        );
    }
    let first = history.start();
    let last = history.period_at(x_max as usize);
    for (i, p) in [(0.0, first), (x_max, last)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}:{}</text>"#,
            coord(px(i)),
            coord(HEIGHT - MARGIN_Y + 16.0),
            p.cycle,
            p.phase
        );
    }

    let points = |pts: &mut dyn Iterator<Item = (f64, f64)>| {
        pts.map(|(i, v)| format!("{},{}", coord(px(i)), coord(py(v))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let hist_pts = points(&mut hist.iter().enumerate().map(|(i, &v)| (i as f64, v)));
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="{HISTORY_COLOR}" stroke-width="1.5" points="{hist_pts}"/>"#
    );
    let anchor = ((n_hist - 1) as f64, hist[n_hist - 1]);
    for (k, (_, f)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts = points(
            &mut std::iter::once(anchor)
                .chain(f.values.iter().enumerate().map(|(i, &v)| ((n_hist + i) as f64, v))),
        );
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>"#
        );
    }

    let legend_x = WIDTH - MARGIN_RIGHT + 15.0;
    let entries = std::iter::once(("history".to_string(), HISTORY_COLOR)).chain(
        series
            .iter()
            .enumerate()
            .map(|(k, (name, _))| (name.clone(), PALETTE[k % PALETTE.len()])),
    );
    for (k, (name, color)) in entries.enumerate() {
        let y = MARGIN_Y + 18.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<g class="legend-entry"><line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}" font-size="12" dominant-baseline="middle">{}</text></g>"#,
            coord(legend_x),
            coord(y),
            coord(legend_x + 20.0),
            coord(y),
            coord(legend_x + 26.0),
            coord(y),
            escape(&name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Period;

    fn history() -> TimeSeries {
        TimeSeries::from_values((1..=10).map(f64::from).collect()).unwrap()
    }

    fn fc(values: Vec<f64>) -> ForecastResult {
        ForecastResult::new(values, Period::new(11, 1), 1)
    }

    #[test]
    fn one_forecast_gives_two_polylines() {
        let svg = emit_plot(&history(), &fc(vec![7.0; 4]), &[]);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn legend_lists_history_and_each_forecast() {
        let a = fc(vec![1.0, 2.0]);
        let b = fc(vec![3.0, 4.0]);
        let c = fc(vec![5.0, 6.0]);
        let alts = [("b".to_string(), &a), ("c".to_string(), &b), ("d & e".to_string(), &c)];
        let svg = emit_plot(&history(), &fc(vec![0.0, 1.0]), &alts);
        assert_eq!(svg.matches("class=\"legend-entry\"").count(), 5);
        assert!(svg.contains("d &amp; e"));
    }

    #[test]
    fn deterministic_and_constant_safe() {
        let h = TimeSeries::from_values(vec![3.0; 6]).unwrap();
        let f = fc(vec![3.0; 3]);
        assert_eq!(emit_plot(&h, &f, &[]), emit_plot(&h, &f, &[]));
        assert!(!emit_plot(&h, &f, &[]).contains("NaN"));
    }
}
