//! Minimal SVG writer. Output is plain XML text with one `<svg>` root.

use std::fmt::Write;

pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Rounds coordinates for compact, diffable output.
pub(crate) fn num(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

pub(crate) struct Svg {
    width: f64,
    height: f64,
    body: String,
    depth: usize,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg {
            width,
            height,
            body: String::new(),
            depth: 0,
        }
    }

    fn indent(&mut self) {
        for _ in 0..=self.depth {
            self.body.push_str("  ");
        }
    }

    /// Opens a `<g>`; `attrs` is `(name, value)` pairs, values escaped here.
    pub fn open_group(&mut self, attrs: &[(&str, String)]) {
        self.indent();
        self.body.push_str("<g");
        for (k, v) in attrs {
            let _ = write!(self.body, " {k}=\"{}\"", escape(v));
        }
        self.body.push_str(">\n");
        self.depth += 1;
    }

    pub fn close_group(&mut self) {
        self.depth -= 1;
        self.indent();
        self.body.push_str("</g>\n");
    }

    pub fn raw(&mut self, element: &str) {
        self.indent();
        self.body.push_str(element);
        self.body.push('\n');
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, extra: &str) {
        let e = format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"{extra}/>",
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        );
        self.raw(&e);
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, extra: &str) {
        let e = format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"{extra}/>",
            num(x),
            num(y),
            num(w.max(0.0)),
            num(h.max(0.0))
        );
        self.raw(&e);
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, extra: &str) {
        let e = format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"{extra}/>",
            num(cx),
            num(cy),
            num(r)
        );
        self.raw(&e);
    }

    pub fn text(&mut self, x: f64, y: f64, content: &str, extra: &str) {
        let e = format!(
            "<text x=\"{}\" y=\"{}\"{extra}>{}</text>",
            num(x),
            num(y),
            escape(content)
        );
        self.raw(&e);
    }

    pub fn points_attr(points: &[(f64, f64)]) -> String {
        points
            .iter()
            .map(|(x, y)| format!("{},{}", num(*x), num(*y)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" \
             width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n{body}</svg>\n",
            w = num(self.width),
            h = num(self.height),
            body = self.body
        )
    }
}

/// Qualitative palette for per-method series.
pub(crate) const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub(crate) fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// Linear map from `[lo, hi]` onto `[a, b]`; a zero-width domain maps to `a`.
pub(crate) fn scale(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi > lo {
        a + (v - lo) / (hi - lo) * (b - a)
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_and_formats() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
        assert_eq!(num(1.23456), "1.235");
        assert_eq!(num(-0.0001), "0");
        let mut s = Svg::new(10.0, 20.0);
        s.open_group(&[("id", "g&1".into())]);
        s.line(0.0, 0.0, 1.0, 1.0, "");
        s.close_group();
        let doc = s.finish();
        assert!(doc.contains("width=\"10\" height=\"20\""));
        assert!(doc.contains("<g id=\"g&amp;1\">"));
        roxmltree::Document::parse(&doc).unwrap();
    }
}
