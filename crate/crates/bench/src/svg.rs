//! Energy-vs-time line plots with a logarithmic time axis.

use std::fmt::Write;

use crate::curves::Curve;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    mag * if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    }
}

pub fn render(title: &str, curves: &[Curve]) -> String {
    let pts = curves.iter().flat_map(|c| c.times.iter().zip(&c.energies));
    let (mut tmin, mut tmax, mut emin, mut emax) = (f64::INFINITY, 0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for (&t, &e) in pts {
        tmin = tmin.min(t);
        tmax = tmax.max(t);
        emin = emin.min(e);
        emax = emax.max(e);
    }
    if !tmin.is_finite() {
        (tmin, tmax, emin, emax) = (1e-3, 1.0, 0.0, 1.0);
    }
    if tmax <= tmin {
        tmax = tmin * 10.0;
    }
    if emax <= emin {
        emax = emin + 1.0;
    }
    let pad = 0.05 * (emax - emin);
    let (emin, emax) = (emin - pad, emax + pad);
    let (lt0, lt1) = (tmin.log10(), tmax.log10());
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |t: f64| LEFT + (t.log10() - lt0) / (lt1 - lt0) * plot_w;
    let y = |e: f64| TOP + (emax - e) / (emax - emin) * plot_h;

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + plot_w / 2.0, escape(title))
        .unwrap();
    writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#).unwrap();

    // decade ticks on the time axis
    for d in lt0.ceil() as i32..=lt1.floor() as i32 {
        let px = x(10f64.powi(d));
        writeln!(s, r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#ddd"/>"##, TOP + plot_h).unwrap();
        writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#, TOP + plot_h + 16.0).unwrap();
    }
    let step = nice_step(emax - emin);
    let mut v = (emin / step).ceil() * step;
    while v <= emax {
        let py = y(v);
        writeln!(s, r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/>"##, LEFT + plot_w).unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, py + 4.0, fmt_tick(v, step)).unwrap();
        v += step;
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">time (s)</text>"#, LEFT + plot_w / 2.0, HEIGHT - 18.0).unwrap();
    writeln!(
        s,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">energy</text>"#,
        TOP + plot_h / 2.0
    )
    .unwrap();

    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> =
            c.times.iter().zip(&c.energies).map(|(&t, &e)| format!("{:.2},{:.2}", x(t), y(e))).collect();
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#, points.join(" ")).unwrap();
        let ly = TOP + 12.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 14.0;
        writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 22.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 28.0, ly + 4.0, escape(&c.solver)).unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    s
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 { 0 } else { (-step.log10()).ceil() as usize };
    format!("{v:.decimals$}")
}
