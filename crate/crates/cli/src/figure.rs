//! Deterministic SVG scatter of the atoms with the fitted line.

use std::fmt::Write;

use num_complex::Complex64;

use normext::onedim::Classification;
use normext::{DiscreteModel, Slope};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

struct Frame {
    lo: (f64, f64),
    hi: (f64, f64),
}

impl Frame {
    fn around(points: &[Complex64]) -> Self {
        let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
        for z in points {
            lo = (lo.0.min(z.re), lo.1.min(z.im));
            hi = (hi.0.max(z.re), hi.1.max(z.im));
        }
        // square frame with 10% padding, never degenerate
        let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1.0) * 1.1;
        let c = ((lo.0 + hi.0) / 2.0, (lo.1 + hi.1) / 2.0);
        Frame { lo: (c.0 - span / 2.0, c.1 - span / 2.0), hi: (c.0 + span / 2.0, c.1 + span / 2.0) }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let w = SIZE - 2.0 * MARGIN;
        let px = MARGIN + (x - self.lo.0) / (self.hi.0 - self.lo.0) * w;
        let py = SIZE - MARGIN - (y - self.lo.1) / (self.hi.1 - self.lo.1) * w;
        (px, py)
    }

    /// Segment of `p + λd` inside the frame.
    fn clip(&self, p: (f64, f64), d: (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
        let (mut a, mut b) = (f64::NEG_INFINITY, f64::INFINITY);
        for (p, d, lo, hi) in [(p.0, d.0, self.lo.0, self.hi.0), (p.1, d.1, self.lo.1, self.hi.1)] {
            if d == 0.0 {
                if p < lo || p > hi {
                    return None;
                }
            } else {
                let (l1, l2) = ((lo - p) / d, (hi - p) / d);
                a = a.max(l1.min(l2));
                b = b.min(l1.max(l2));
            }
        }
        (a < b).then(|| ((p.0 + a * d.0, p.1 + a * d.1), (p.0 + b * d.0, p.1 + b * d.1)))
    }
}

fn line_label(t: Slope, s: f64) -> String {
    match t {
        Slope::Infinite => format!("y = {}", -s),
        Slope::Finite(t) => format!("x - {t}y = {s}"),
    }
}

/// Renders the first `count` atoms (at least two).
pub fn render(model: &DiscreteModel, classification: &Classification, count: u64) -> String {
    let points: Vec<Complex64> = (1..=count.max(2)).map(|k| model.atom(k)).collect();
    let frame = Frame::around(&points);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let label = match classification.line() {
        Some((t, s)) => {
            let (p, d) = match t {
                Slope::Infinite => ((0.0, -s), (1.0, 0.0)),
                Slope::Finite(t) => ((s, 0.0), (t, 1.0)),
            };
            if let Some((a, b)) = frame.clip(p, d) {
                let (a, b) = (frame.map(a.0, a.1), frame.map(b.0, b.1));
                let _ = writeln!(
                    svg,
                    r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="steelblue" stroke-width="1.5"/>"#,
                    a.0, a.1, b.0, b.1
                );
            }
            line_label(t, s)
        }
        None => "canonical only: no line carries the support".to_string(),
    };
    for z in &points {
        let (x, y) = frame.map(z.re, z.im);
        let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="black"/>"#);
    }
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{:.0}" font-family="monospace" font-size="14">{}</text>"#,
        MARGIN / 2.0 + 4.0,
        label
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use normext::onedim::classify;
    use normext::{build_model, AtomGenerator, ModelVector, PowerSum, TailTerm};

    fn xi(d: f64) -> ModelVector {
        ModelVector::from_tail(vec![TailTerm::power(d)])
    }

    #[test]
    fn line_figure_has_line_and_atoms() {
        let g = AtomGenerator::line(Slope::Finite(2.0), 3.0, PowerSum::index(), 0.5);
        let m = build_model(g, xi(1.0)).unwrap();
        let svg = render(&m, &classify(&m).unwrap(), 10);
        assert_eq!(svg.matches("<circle").count(), 10);
        assert_eq!(svg.matches("<line").count(), 1);
        assert!(svg.contains("x - 2y = 3"));
        assert_eq!(svg, render(&m, &classify(&m).unwrap(), 10));
    }

    #[test]
    fn parabola_is_annotated_and_minimum_two_atoms() {
        let rule = PowerSum::new([(Complex64::new(0.0, 1.0), 2.0), (Complex64::new(1.0, 0.0), 1.0)]);
        let m = build_model(AtomGenerator::generic(rule, 0.5), xi(2.0)).unwrap();
        let svg = render(&m, &classify(&m).unwrap(), 0);
        assert!(svg.contains("canonical only"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(!svg.contains("<line"));
    }
}
