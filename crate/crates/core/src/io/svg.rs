//! Plain-text SVG renderings of waveforms and phase loops. Output depends
//! only on the input numbers, so identical inputs give identical bytes.

use std::fmt::Write as _;

use crate::geometry::{PhaseLoop, Point, TracerTrack};

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 320.0;
const MARGIN: f64 = 50.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn polyline(&self, pts: impl Iterator<Item = Point>) -> String {
        pts.map(|(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"11\">"
    );
    let _ = writeln!(
        out,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">{title}</text>",
        WIDTH / 2.0
    );
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r) = (MARGIN, WIDTH - MARGIN);
    let (t, b) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        "<rect x=\"{l}\" y=\"{t}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>",
        r - l,
        b - t
    );
    for i in 0..=4 {
        let x = f.x0 + (f.x1 - f.x0) * i as f64 / 4.0;
        let y = f.y0 + (f.y1 - f.y0) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            f.px(x),
            b + 15.0,
            tick(x)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            l - 4.0,
            f.py(y) + 4.0,
            tick(y)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{xlabel}</text>",
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"12\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 12 {:.2})\">{ylabel}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.1 && v.abs() < 1e4 {
        format!("{v:.2}")
    } else {
        format!("{v:.2e}")
    }
}

fn symmetric_extent(values: impl Iterator<Item = f64>) -> f64 {
    let m = values.fold(0.0f64, |m, v| m.max(v.abs()));
    if m > 0.0 {
        1.1 * m
    } else {
        1.0
    }
}

/// `u(t, x)` as a solid line, with `u(t - dt_prev, x)` dotted when given.
pub fn waveform_svg(
    t: f64,
    nodes: &[f64],
    length: f64,
    current: &[f64],
    previous: Option<(f64, &[f64])>,
) -> String {
    let prev_vals = previous.map(|(_, p)| p).unwrap_or(&[]);
    let ext = symmetric_extent(current.iter().chain(prev_vals).copied());
    let f = Frame {
        x0: 0.0,
        x1: length,
        y0: -ext,
        y1: ext,
    };
    let mut out = String::new();
    header(&mut out, &format!("u(t, x) at t = {t}"));
    axes(&mut out, &f, "x", "u");
    let _ = writeln!(
        out,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\" stroke-width=\"0.5\"/>",
        f.px(0.0),
        f.py(0.0),
        f.px(length),
        f.py(0.0)
    );
    // periodic closure: repeat the first value at x = L
    let closed = |vals: &[f64]| -> String {
        f.polyline(
            nodes
                .iter()
                .copied()
                .zip(vals.iter().copied())
                .chain(vals.first().map(|&v| (length, v))),
        )
    };
    if let Some((tp, p)) = previous {
        let _ = writeln!(
            out,
            "<polyline class=\"previous\" data-t=\"{tp}\" points=\"{}\" fill=\"none\" stroke=\"black\" \
             stroke-dasharray=\"2,3\"/>",
            closed(p)
        );
    }
    let _ = writeln!(
        out,
        "<polyline class=\"current\" data-t=\"{t}\" points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
        closed(current)
    );
    out.push_str("</svg>\n");
    out
}

/// The phase loop at one time, the equilibria, and tracer trails up to it.
pub fn phase_svg(lp: &PhaseLoop, fixed: &[Point], trails: &[TracerTrack]) -> String {
    let all = lp
        .points
        .iter()
        .copied()
        .chain(fixed.iter().copied())
        .chain(trails.iter().flat_map(|t| t.points()));
    let (mut x0, mut x1, mut y0, mut y1) = all.fold(
        (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ),
        |b, p| (b.0.min(p.0), b.1.max(p.0), b.2.min(p.1), b.3.max(p.1)),
    );
    let pad = |lo: &mut f64, hi: &mut f64| {
        let span = *hi - *lo;
        let d = if span > 0.0 {
            0.08 * span
        } else {
            lo.abs().max(1e-3)
        };
        *lo -= d;
        *hi += d;
    };
    pad(&mut x0, &mut x1);
    pad(&mut y0, &mut y1);
    let f = Frame { x0, x1, y0, y1 };

    let mut out = String::new();
    header(&mut out, &format!("(u, v) loop at t = {}", lp.t));
    axes(&mut out, &f, "u", "v");
    let _ = writeln!(
        out,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\" stroke-width=\"0.5\"/>",
        f.px(x0),
        f.py(0.0),
        f.px(x1),
        f.py(0.0)
    );
    let _ = writeln!(
        out,
        "<polygon class=\"loop\" points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"/>",
        f.polyline(lp.points.iter().copied())
    );
    let colors = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd"];
    for (i, track) in trails.iter().enumerate() {
        let color = colors[i % colors.len()];
        let _ = writeln!(
            out,
            "<g class=\"trail\" data-probe=\"{}\" fill=\"{color}\">",
            track.probe_x
        );
        for (u, v) in track.points() {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.5\"/>",
                f.px(u),
                f.py(v)
            );
        }
        out.push_str("</g>\n");
    }
    for &(u, v) in fixed {
        let (cx, cy) = (f.px(u), f.py(v));
        let _ = writeln!(
            out,
            "<g class=\"fixed-point\"><line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\
             <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/></g>",
            cx - 4.0,
            cy - 4.0,
            cx + 4.0,
            cy + 4.0,
            cx - 4.0,
            cy + 4.0,
            cx + 4.0,
            cy - 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}
