//! Report helpers: reproducibility headers and stable number formatting.
//!
//! Every CSV report starts with `#`-prefixed lines echoing the effective
//! configuration, so any emitted table can be regenerated from its header.

use std::fmt::Write as _;

pub struct Header {
    lines: Vec<(String, String)>,
}

impl Header {
    pub fn new(command: &str) -> Self {
        Header { lines: vec![("command".to_string(), command.to_string())] }
    }

    pub fn field(mut self, key: &str, value: impl ToString) -> Self {
        self.lines.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            writeln!(out, "# {k}: {v}").expect("string write");
        }
        out
    }
}

/// Fixed-point with the given number of decimals; stable across platforms.
pub fn fixed(x: f64, decimals: usize) -> String {
    format!("{x:.decimals$}")
}

/// Join values with commas for list-style header fields.
pub fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_renders_comment_lines() {
        let h = Header::new("stats").field("graph", "g.edges").field("seed", 7);
        let text = h.render();
        assert!(text.starts_with("# command: stats\n"));
        assert!(text.contains("# graph: g.edges\n"));
        assert!(text.contains("# seed: 7\n"));
    }

    #[test]
    fn fixed_formatting() {
        assert_eq!(fixed(4.588, 2), "4.59");
        assert_eq!(fixed(1.0, 2), "1.00");
    }
}
