//! Minimal deterministic SVG writer for the static plots.

use std::fmt::Write;

use fdakit::exploratory::{parabola_polyline, BoxplotStats, MsplotStats, OutliergramStats};
use fdakit::GridSample;

const MARGIN: f64 = 40.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"];
const OUTLIER: &str = "#d62728";

pub struct Canvas {
    width: f64,
    height: f64,
}

impl Canvas {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width: width as f64,
            height: height as f64,
        }
    }
}

/// Maps data coordinates into the plotting area and accumulates elements.
struct Plot<'a> {
    canvas: &'a Canvas,
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let (lo, hi) = if lo.is_finite() && hi.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn range<'a>(values: impl IntoIterator<Item = &'a f64>) -> (f64, f64) {
    values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
}

impl<'a> Plot<'a> {
    fn new(canvas: &'a Canvas, x: (f64, f64), y: (f64, f64)) -> Self {
        Self {
            canvas,
            x: padded(x.0, x.1),
            y: padded(y.0, y.1),
            body: String::new(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (self.canvas.width - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        self.canvas.height - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (self.canvas.height - 2.0 * MARGIN)
    }

    fn coords(&self, points: impl Iterator<Item = (f64, f64)>) -> String {
        let mut out = String::new();
        for (k, (x, y)) in points.enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.2},{:.2}", self.px(x), self.py(y));
        }
        out
    }

    fn polyline(&mut self, id: Option<&str>, points: impl Iterator<Item = (f64, f64)>, style: &str) {
        let id = id.map(|i| format!(" id=\"{i}\"")).unwrap_or_default();
        let coords = self.coords(points);
        let _ = writeln!(self.body, "<polyline{id} points=\"{coords}\" fill=\"none\" {style}/>");
    }

    fn polygon(&mut self, id: &str, points: impl Iterator<Item = (f64, f64)>, style: &str) {
        let coords = self.coords(points);
        let _ = writeln!(self.body, "<polygon id=\"{id}\" points=\"{coords}\" {style}/>");
    }

    fn circle(&mut self, x: f64, y: f64, fill: &str, index: usize) {
        let _ = writeln!(
            self.body,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{fill}\" data-curve=\"{index}\"/>",
            self.px(x),
            self.py(y)
        );
    }

    fn finish(self, title: &str, x_label: &str, y_label: &str) -> String {
        let (w, h) = (self.canvas.width, self.canvas.height);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
        );
        let _ = writeln!(out, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
        let _ = writeln!(
            out,
            "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            w - 2.0 * MARGIN,
            h - 2.0 * MARGIN
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
            w / 2.0,
            MARGIN / 2.0 + 5.0,
            escape(title)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{}</text>",
            w / 2.0,
            h - 10.0,
            escape(x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"12\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 12 {})\">{}</text>",
            h / 2.0,
            h / 2.0,
            escape(y_label)
        );
        for (value, anchor) in [(self.x.0, "start"), (self.x.1, "end")] {
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"{anchor}\" font-size=\"10\">{}</text>",
                self.px(value),
                h - MARGIN + 12.0,
                tick(value)
            );
        }
        for value in [self.y.0, self.y.1] {
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"10\">{}</text>",
                MARGIN - 3.0,
                self.py(value) + 3.0,
                tick(value)
            );
        }
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

fn tick(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn labels(sample: &GridSample) -> (String, String) {
    let names = sample.names();
    let or = |s: &str, d: &str| if s.is_empty() { d.to_string() } else { s.to_string() };
    (or(&names.argument, "t"), or(&names.coordinate, "x(t)"))
}

fn curve_points<'s>(t: &'s [f64], values: impl Iterator<Item = f64> + 's) -> impl Iterator<Item = (f64, f64)> + 's {
    t.iter().copied().zip(values)
}

pub fn curves(canvas: &Canvas, sample: &GridSample) -> String {
    let t = sample.points();
    let mut plot = Plot::new(canvas, range(t), range(sample.values().iter()));
    for i in 0..sample.n_samples() {
        let style = format!("stroke=\"{}\" stroke-width=\"1\"", PALETTE[i % PALETTE.len()]);
        plot.polyline(None, curve_points(t, sample.values().row(i).iter().copied()), &style);
    }
    let (x, y) = labels(sample);
    plot.finish(&sample.names().dataset, &x, &y)
}

pub fn boxplot(canvas: &Canvas, sample: &GridSample, stats: &BoxplotStats) -> String {
    let t = sample.points();
    let y = range(sample.values().iter().chain(&stats.fences.lower).chain(&stats.fences.upper));
    let mut plot = Plot::new(canvas, range(t), y);
    let central = &stats.central_envelope;
    let outline = curve_points(t, central.upper.iter().copied())
        .chain(curve_points(t, central.lower.iter().copied()).collect::<Vec<_>>().into_iter().rev());
    plot.polygon("central-envelope", outline, "fill=\"#c6dbef\" stroke=\"#1f77b4\" stroke-width=\"1\"");
    let non_outlying = &stats.non_outlying_envelope;
    for (id, line) in [("whisker-lower", &non_outlying.lower), ("whisker-upper", &non_outlying.upper)] {
        plot.polyline(Some(id), curve_points(t, line.iter().copied()), "stroke=\"#1f77b4\" stroke-width=\"1\"");
    }
    for (id, line) in [("fence-lower", &stats.fences.lower), ("fence-upper", &stats.fences.upper)] {
        plot.polyline(
            Some(id),
            curve_points(t, line.iter().copied()),
            "stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"4 3\"",
        );
    }
    for (i, flagged) in stats.outlier_flags.iter().enumerate() {
        if *flagged {
            let id = format!("outlier-{i}");
            plot.polyline(
                Some(&id),
                curve_points(t, sample.values().row(i).iter().copied()),
                &format!("stroke=\"{OUTLIER}\" stroke-width=\"1\" stroke-dasharray=\"6 3\""),
            );
        }
    }
    plot.polyline(
        Some("median"),
        curve_points(t, sample.values().row(stats.median_index).iter().copied()),
        "stroke=\"black\" stroke-width=\"2\"",
    );
    let (x, y) = labels(sample);
    plot.finish(&format!("Functional boxplot (factor {})", stats.factor), &x, &y)
}

pub fn msplot(canvas: &Canvas, stats: &MsplotStats) -> String {
    let ellipse: Vec<[f64; 2]> = stats.ellipse.polyline(96);
    let xs = range(stats.mo.iter().chain(ellipse.iter().map(|p| &p[0])));
    let ys = range(stats.vo.iter().chain(ellipse.iter().map(|p| &p[1])));
    let mut plot = Plot::new(canvas, xs, ys);
    plot.polyline(
        Some("ellipse"),
        ellipse.iter().map(|p| (p[0], p[1])),
        "stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"4 3\"",
    );
    for (i, (mo, vo)) in stats.mo.iter().zip(&stats.vo).enumerate() {
        let fill = if stats.outlier_flags[i] { OUTLIER } else { PALETTE[0] };
        plot.circle(*mo, *vo, fill, i);
    }
    plot.finish("MS-plot", "MO", "VO")
}

pub fn outliergram(canvas: &Canvas, stats: &OutliergramStats) -> String {
    let parabola = parabola_polyline(&stats.parabola, 100);
    let xs = (0.0, 1.0);
    let ys = range(stats.mbd.iter().chain(parabola.iter().map(|p| &p[1])));
    let mut plot = Plot::new(canvas, xs, ys);
    plot.polyline(Some("parabola"), parabola.iter().map(|p| (p[0], p[1])), "stroke=\"#555555\" stroke-width=\"1\"");
    for (i, (mei, mbd)) in stats.mei.iter().zip(&stats.mbd).enumerate() {
        let fill = if stats.outlier_flags[i] { OUTLIER } else { PALETTE[0] };
        plot.circle(*mei, *mbd, fill, i);
    }
    plot.finish("Outliergram", "MEI", "MBD")
}

/// `curves` holds the mean followed by the positive and negative perturbations.
pub fn perturbation(canvas: &Canvas, curves: &GridSample, component: usize) -> String {
    let t = curves.points();
    let mut plot = Plot::new(canvas, range(t), range(curves.values().iter()));
    let styles = [
        ("mean", "stroke=\"black\" stroke-width=\"2\""),
        ("plus", "stroke=\"#1f77b4\" stroke-width=\"1\" stroke-dasharray=\"2 2\""),
        ("minus", "stroke=\"#d62728\" stroke-width=\"1\" stroke-dasharray=\"6 3\""),
    ];
    for (i, (id, style)) in styles.iter().enumerate() {
        plot.polyline(Some(id), curve_points(t, curves.values().row(i).iter().copied()), style);
    }
    let (x, y) = labels(curves);
    plot.finish(&format!("FPC {} perturbation", component + 1), &x, &y)
}
