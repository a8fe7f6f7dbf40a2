//! Minimal SVG output for planar pictures.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::tiling::Tiling;

/// Clip a convex or concave polygon to the intersection of half-planes
/// `a·x + b·y ≤ c` (Sutherland–Hodgman).
pub fn clip_polygon(poly: &[(f64, f64)], halfplanes: &[(f64, f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = poly.to_vec();
    for &(a, b, c) in halfplanes {
        if out.is_empty() {
            break;
        }
        let g = |p: (f64, f64)| a * p.0 + b * p.1 - c;
        let input = std::mem::take(&mut out);
        for i in 0..input.len() {
            let p = input[i];
            let q = input[(i + 1) % input.len()];
            let (gp, gq) = (g(p), g(q));
            if gp <= 0.0 {
                out.push(p);
            }
            if (gp < 0.0 && gq > 0.0) || (gp > 0.0 && gq < 0.0) {
                let t = gp / (gp - gq);
                out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
            }
        }
    }
    out
}

/// World-coordinate canvas; y points up.
#[derive(Debug, Clone)]
pub struct Canvas {
    lo: (f64, f64),
    hi: (f64, f64),
    scale: f64,
    body: String,
}

impl Canvas {
    pub fn new(lo: (f64, f64), hi: (f64, f64), width_px: f64) -> Self {
        let scale = width_px / (hi.0 - lo.0);
        Canvas { lo, hi, scale, body: String::new() }
    }

    pub fn palette(k: usize) -> &'static str {
        const COLORS: [&str; 10] = [
            "#f4d35e", "#ee964b", "#95b8d1", "#b8e0d2", "#d6a2e8", "#f95738", "#7fc8a9", "#c9ada7", "#9a8c98", "#a3c4f3",
        ];
        COLORS[k % COLORS.len()]
    }

    fn px(&self, p: (f64, f64)) -> (f64, f64) {
        ((p.0 - self.lo.0) * self.scale, (self.hi.1 - p.1) * self.scale)
    }

    pub fn polygon(&mut self, poly: &[(f64, f64)], fill: &str, stroke: &str) {
        if poly.len() < 3 {
            return;
        }
        let pts: Vec<String> = poly
            .iter()
            .map(|&p| {
                let (x, y) = self.px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}" stroke="{stroke}" stroke-width="1"/>"#,
            pts.join(" ")
        );
    }

    pub fn circle(&mut self, c: (f64, f64), r_px: f64, fill: &str) {
        let (x, y) = self.px(c);
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r_px}" fill="{fill}"/>"#);
    }

    /// One pixel-sized cell, for raster pictures.
    pub fn cell(&mut self, corner: (f64, f64), size: f64, fill: &str) {
        self.rect(corner, size, size, fill);
    }

    /// Axis rectangle with lower-left `corner`.
    pub fn rect(&mut self, corner: (f64, f64), width: f64, height: f64, fill: &str) {
        let (x, y) = self.px((corner.0, corner.1 + height));
        let (w, h) = (width * self.scale, height * self.scale);
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#
        );
    }

    pub fn label(&mut self, x: f64, y: f64, text: &str) {
        let (px, py) = self.px((x, y));
        let _ = writeln!(
            self.body,
            r#"<text x="{px:.2}" y="{py:.2}" font-size="14" text-anchor="middle">{text}</text>"#
        );
    }

    pub fn finish(self) -> String {
        let w = (self.hi.0 - self.lo.0) * self.scale;
        let h = (self.hi.1 - self.lo.1) * self.scale;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n{}</svg>\n",
            self.body
        )
    }
}

/// Rasterises a planar tiling over the box `lo..hi`: each pixel takes the
/// colour of the tile owning its centre, unclassified pixels stay white, and
/// tile centres are dotted.
pub fn raster_tiling<T: Tiling>(t: &T, lo: (f64, f64), hi: (f64, f64), pixels: usize) -> Option<String> {
    if t.metric().dim() != 2 || pixels == 0 {
        return None;
    }
    let size = (hi.0 - lo.0) / pixels as f64;
    let rows = ((hi.1 - lo.1) / size).ceil() as usize;
    let mut canvas = Canvas::new(lo, hi, 600.0);
    let mut colours: HashMap<T::Id, usize> = HashMap::new();
    for row in 0..rows {
        let y = lo.1 + row as f64 * size;
        // Runs of equal colour become one rectangle.
        let mut run: Option<(usize, usize)> = None;
        for col in 0..=pixels {
            let k = (col < pixels)
                .then(|| t.classify(&[lo.0 + (col as f64 + 0.5) * size, y + size / 2.0]))
                .flatten()
                .map(|id| {
                    let next = colours.len();
                    *colours.entry(id).or_insert(next)
                });
            if run.map(|(_, c)| Some(c)) != Some(k) {
                if let Some((start, c)) = run {
                    let x0 = lo.0 + start as f64 * size;
                    canvas.rect((x0, y), (col - start) as f64 * size, size, Canvas::palette(c));
                }
                run = k.map(|c| (col, c));
            }
        }
    }
    let mut ids: Vec<T::Id> = colours.keys().copied().collect();
    ids.sort();
    for id in ids {
        let c = t.center(id);
        canvas.circle((c[0], c[1]), 2.0, "#222");
    }
    Some(canvas.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn area(p: &[(f64, f64)]) -> f64 {
        let n = p.len();
        (0..n).map(|i| p[i].0 * p[(i + 1) % n].1 - p[(i + 1) % n].0 * p[i].1).sum::<f64>().abs() / 2.0
    }

    #[test]
    fn clipping_a_square_to_a_diamond() {
        let sq = vec![(-2.0, -2.0), (2.0, -2.0), (2.0, 2.0), (-2.0, 2.0)];
        let diamond = [(1.0, 1.0, 2.0), (1.0, -1.0, 2.0), (-1.0, 1.0, 2.0), (-1.0, -1.0, 2.0)];
        let clipped = clip_polygon(&sq, &diamond);
        assert!((area(&clipped) - 8.0).abs() < 1e-12);
        assert!(clip_polygon(&sq, &[(1.0, 0.0, -3.0)]).is_empty());
    }

    #[test]
    fn canvas_output_is_well_formed() {
        let mut c = Canvas::new((0.0, 0.0), (1.0, 1.0), 100.0);
        c.polygon(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], "red", "black");
        c.circle((0.5, 0.5), 2.0, "blue");
        c.label(0.5, 0.5, "x");
        let s = c.finish();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("0.00,100.00"));
    }
}
