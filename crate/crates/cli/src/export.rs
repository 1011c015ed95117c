//! Coxeter diagrams of certificates as text or Graphviz files.
//!
//! Weight 2 edges are omitted and weight 3 edges carry no label. Dotted
//! edges are annotated with the closed form when one was verified, and with
//! the decimal value and enclosure width otherwise.

use std::fmt::Write;
use std::str::FromStr;

use coxpoly::gram::{DottedValue, GramCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Dot,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "dot" => Ok(Format::Dot),
            other => Err(format!("unknown export format '{other}' (expected text or dot)")),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Dot => "dot",
        }
    }
}

fn annotation(d: &DottedValue) -> String {
    match &d.closed_form {
        Some(c) => format!("{c}"),
        None => format!("{:.12} ± {:.1e}", d.cosh, d.enclosure.width()),
    }
}

fn solid_edges(c: &GramCertificate) -> Vec<(usize, usize, u32)> {
    let mut out = Vec::new();
    for i in 0..c.size {
        for j in i + 1..c.size {
            let w = c.weight(i, j);
            if w != 0 && w != 2 {
                out.push((i + 1, j + 1, w));
            }
        }
    }
    out
}

pub fn render(c: &GramCertificate, name: &str, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Text => {
            let _ = writeln!(s, "diagram {name}");
            let _ = writeln!(s, "nodes {}", c.size);
            for (i, j, w) in solid_edges(c) {
                if w == 3 {
                    let _ = writeln!(s, "edge {i} {j}");
                } else {
                    let _ = writeln!(s, "edge {i} {j} {w}");
                }
            }
            for d in &c.dotted {
                let _ = writeln!(
                    s,
                    "dotted {} {} cosh {:.12} width {:.1e}{}",
                    d.pair.0,
                    d.pair.1,
                    d.cosh,
                    d.enclosure.width(),
                    d.closed_form
                        .as_ref()
                        .map(|f| format!(" = {f}"))
                        .unwrap_or_default()
                );
            }
        }
        Format::Dot => {
            let _ = writeln!(s, "graph \"{name}\" {{");
            let _ = writeln!(s, "  node [shape=circle];");
            for i in 1..=c.size {
                let _ = writeln!(s, "  {i};");
            }
            for (i, j, w) in solid_edges(c) {
                if w == 3 {
                    let _ = writeln!(s, "  {i} -- {j};");
                } else {
                    let _ = writeln!(s, "  {i} -- {j} [label=\"{w}\"];");
                }
            }
            for d in &c.dotted {
                let _ = writeln!(
                    s,
                    "  {} -- {} [style=dotted, label=\"{}\"];",
                    d.pair.0,
                    d.pair.1,
                    annotation(d)
                );
            }
            s.push_str("}\n");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_formats() {
        assert_eq!("dot".parse(), Ok(Format::Dot));
        assert_eq!("text".parse(), Ok(Format::Text));
        assert!("svg".parse::<Format>().is_err());
    }
}
