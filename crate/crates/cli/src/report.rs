use std::fmt::Write as _;

use crate::args::Format;

/// Result of a subcommand: an accept/reject outcome, human-readable lines,
/// and the same content as `key=value` records.
#[derive(Debug, Default)]
pub struct Report {
    pub rejected: bool,
    text: Vec<String>,
    records: Vec<Vec<(String, String)>>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn line(&mut self, line: impl Into<String>) -> &mut Self {
        self.text.push(line.into());
        self
    }

    pub fn record<K: Into<String>, V: ToString>(&mut self, fields: impl IntoIterator<Item = (K, V)>) -> &mut Self {
        self.records
            .push(fields.into_iter().map(|(k, v)| (k.into(), v.to_string())).collect());
        self
    }

    pub fn reject_if(&mut self, rejected: bool) -> &mut Self {
        self.rejected |= rejected;
        self
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Text => {
                for l in &self.text {
                    let _ = writeln!(out, "{l}");
                }
            }
            Format::Records => {
                for r in &self.records {
                    let fields: Vec<String> = r.iter().map(|(k, v)| format!("{k}={}", quote(v))).collect();
                    let _ = writeln!(out, "{}", fields.join(" "));
                }
            }
        }
        out
    }
}

/// Values with spaces, quotes or `=` are written as quoted escaped strings.
fn quote(v: &str) -> String {
    if v.is_empty() || v.chars().any(|c| c.is_whitespace() || c == '"' || c == '=') {
        format!("{v:?}")
    } else {
        v.to_string()
    }
}

/// Shortest decimal rendering with as many digits as `tol` resolves.
pub fn probability(v: f64, tol: f64) -> String {
    let digits = (-tol.log10()).ceil().clamp(1.0, 17.0) as usize;
    let s = format!("{v:.digits$}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities_drop_trailing_zeros() {
        assert_eq!(probability(0.25, 1e-9), "0.25");
        assert_eq!(probability(0.249_999_999_99, 1e-9), "0.25");
        assert_eq!(probability(1.0, 1e-6), "1");
        assert_eq!(probability(-1e-12, 1e-9), "0");
        assert_eq!(probability(1.0 / 3.0, 1e-3), "0.333");
    }

    #[test]
    fn records_quote_awkward_values() {
        let mut r = Report::new();
        r.record([("a", "x y"), ("b", "1")]);
        assert_eq!(r.render(Format::Records), "a=\"x y\" b=1\n");
    }
}
