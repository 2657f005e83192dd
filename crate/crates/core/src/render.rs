//! Minimal deterministic SVG writer for cell decompositions.

use std::fmt::Write;

const SIZE: f64 = 800.0;

/// Accumulates shapes in data coordinates and maps them into an 800x800
/// picture (y axis pointing up).
pub struct SvgCanvas {
    view: [f64; 4],
    body: String,
}

impl SvgCanvas {
    /// `view` is `[x0, x1, y0, y1]`.
    pub fn new(view: [f64; 4]) -> Self {
        Self { view, body: String::new() }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let [x0, x1, y0, y1] = self.view;
        ((x - x0) / (x1 - x0) * SIZE, (y1 - y) / (y1 - y0) * SIZE)
    }

    pub fn polygon(&mut self, vertices: &[[f64; 2]]) {
        if vertices.len() < 3 {
            return;
        }
        let pts: Vec<String> = vertices
            .iter()
            .map(|v| {
                let (x, y) = self.map(v[0], v[1]);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="none" stroke="black" stroke-width="1"/>"#,
            pts.join(" ")
        );
    }

    /// Line `y = a·x + b` across the view.
    pub fn line(&mut self, a: f64, b: f64) {
        let [x0, x1, ..] = self.view;
        let (u0, v0) = self.map(x0, a * x0 + b);
        let (u1, v1) = self.map(x1, a * x1 + b);
        let _ = writeln!(
            self.body,
            r#"<line x1="{u0:.3}" y1="{v0:.3}" x2="{u1:.3}" y2="{v1:.3}" stroke="steelblue" stroke-width="0.7"/>"#
        );
    }

    pub fn point(&mut self, x: f64, y: f64) {
        let (u, v) = self.map(x, y);
        let _ = writeln!(self.body, r#"<circle cx="{u:.3}" cy="{v:.3}" r="1.5" fill="crimson"/>"#);
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
             <clipPath id=\"view\"><rect width=\"{SIZE}\" height=\"{SIZE}\"/></clipPath>\n\
             <g clip-path=\"url(#view)\">\n{}</g>\n</svg>\n",
            self.body
        )
    }
}
