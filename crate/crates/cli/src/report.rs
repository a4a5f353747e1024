//! CSV output: `#` metadata lines, a header, numeric rows, `#` footer lines.

use std::fmt::Write as _;
use std::time::Duration;

use yukawa_ewald::ewald::EwaldTimings;

/// Full-precision float as written to data rows.
pub fn num(v: f64) -> String {
    format!("{v:.17e}")
}

/// Shortest round-trip form, as written to metadata lines.
pub fn real(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Default)]
pub struct Report {
    meta: Vec<(String, String)>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    footer: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str, header: &[&'static str]) -> Self {
        let mut r = Report {
            header: header.to_vec(),
            ..Default::default()
        };
        r.meta(
            "tool",
            format!("yukawa-ewald {}", env!("CARGO_PKG_VERSION")),
        );
        r.meta("command", command);
        r
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn footer(&mut self, key: &str, value: impl ToString) {
        self.footer.push((key.into(), value.to_string()));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn timings(&mut self, t: &EwaldTimings) {
        for (k, d) in timing_fields(t) {
            self.footer(&format!("time_{k}_s"), real(d.as_secs_f64()));
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let line = |s: &mut String, k: &str, v: &str| {
            // keep every metadata entry on one comment line
            let _ = writeln!(s, "# {k}: {}", v.replace(['\n', '\r'], " "));
        };
        for (k, v) in &self.meta {
            line(&mut s, k, v);
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        for (k, v) in &self.footer {
            line(&mut s, k, v);
        }
        s
    }
}

pub fn timing_fields(t: &EwaldTimings) -> [(&'static str, Duration); 8] {
    let k = &t.kspace;
    [
        ("real", t.real),
        ("precompute", k.precompute),
        ("spread", k.spread),
        ("fft", k.fft),
        ("scale", k.scale),
        ("ifft", k.ifft),
        ("gather", k.gather),
        ("total", t.total),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_metadata_header_rows_footer() {
        let mut r = Report::new("eval", &["x", "u"]);
        r.meta("alpha", real(1e-12));
        r.row(vec![num(0.5), num(-2.0)]);
        r.footer("note", "a\nb");
        let s = r.render();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[1], "# command: eval");
        assert_eq!(lines[2], "# alpha: 1e-12");
        assert_eq!(lines[3], "x,u");
        assert_eq!(lines[4], "5.00000000000000000e-1,-2.00000000000000000e0");
        assert_eq!(lines[5], "# note: a b");
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 6.02e23, 5e-324] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }
}
