//! Named fixtures rendered to files.

use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::audit::{run_audit, AuditConfig};
use crate::complex::{x1bar_link, ybar1_link, TriComplex};
use crate::coset::{enumerate, permutation_image, Presentation, DEFAULT_CAP};
use crate::graph::{brady_link, smooth, MetricGraph};
use crate::words::dictionary;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dot,
    Json,
    Text,
}

impl FromStr for Format {
    type Err = ExportError;
    fn from_str(s: &str) -> Result<Self, ExportError> {
        match s {
            "dot" => Ok(Format::Dot),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(ExportError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("unknown object '{0}' (known: {known})", known = OBJECTS.join(", "))]
    UnknownObject(String),
    #[error("unknown format '{0}' (expected dot|json|text)")]
    UnknownFormat(String),
    #[error("object '{0}' has no {1:?} rendering")]
    Unsupported(String, Format),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub const OBJECTS: &[&str] = &[
    "audit",
    "brady-link",
    "digon",
    "g1-table",
    "x1bar",
    "x1bar-link",
    "x1bar-link-smooth",
    "ybar1",
    "ybar1-link",
    "ybar1-link-smooth",
    "ybar2",
    "ybar3",
];

pub fn named_graph(id: &str) -> Option<MetricGraph> {
    match id {
        "brady-link" => Some(brady_link()),
        "x1bar-link" => Some(x1bar_link()),
        "x1bar-link-smooth" => Some(smooth(&x1bar_link())),
        "ybar1-link" => Some(ybar1_link()),
        "ybar1-link-smooth" => Some(smooth(&ybar1_link())),
        _ => None,
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap();
    s.push('\n');
    s
}

/// Renders a named object. Everything except the audit's timing fields is
/// byte-deterministic; the audit is rendered with timings zeroed.
pub fn render(id: &str, format: Format) -> Result<String, ExportError> {
    if let Some(g) = named_graph(id) {
        return Ok(match format {
            Format::Dot => g.to_dot(id),
            Format::Json => pretty(&g.to_json()),
            Format::Text => g.to_text(),
        });
    }
    if let Some(c) = TriComplex::fixture(id) {
        return match format {
            Format::Json => Ok(pretty(&c.to_json())),
            Format::Text => Ok(c.to_text()),
            Format::Dot => Err(ExportError::Unsupported(id.to_string(), format)),
        };
    }
    match id {
        "g1-table" => {
            let subgens = [dictionary::xy("xyx^-2"), dictionary::xy("y")];
            let table = enumerate(&Presentation::g0(), &subgens, DEFAULT_CAP).expect("index 4");
            match format {
                Format::Json => Ok(pretty(&table.to_json())),
                Format::Text => {
                    let mut out = format!("cosets {}\n", table.count());
                    for (g, images) in table.generators().iter().zip(permutation_image(&table)) {
                        let images: Vec<String> = images.iter().map(|i| (i + 1).to_string()).collect();
                        out.push_str(&format!("{g} {}\n", images.join(" ")));
                    }
                    Ok(out)
                }
                Format::Dot => Err(ExportError::Unsupported(id.to_string(), format)),
            }
        }
        "audit" => {
            let report = run_audit(None, &AuditConfig::default()).expect("all ids are known");
            match format {
                Format::Json => Ok(report.to_json_without_timing() + "\n"),
                Format::Text => Ok(report.to_text()),
                Format::Dot => Err(ExportError::Unsupported(id.to_string(), format)),
            }
        }
        _ => Err(ExportError::UnknownObject(id.to_string())),
    }
}

pub fn export(id: &str, format: Format, path: &Path) -> Result<(), ExportError> {
    let text = render(id, format)?;
    std::fs::write(path, text).map_err(|source| ExportError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_object_renders_somewhere() {
        for id in OBJECTS {
            assert!(render(id, Format::Json).is_ok(), "{id}");
        }
    }

    #[test]
    fn dot_of_x1bar_link_has_18_nodes() {
        let dot = render("x1bar-link", Format::Dot).unwrap();
        let nodes = dot.lines().filter(|l| l.trim_end().ends_with("\";") && !l.contains("--")).count();
        assert_eq!(nodes, 18);
    }

    #[test]
    fn brady_json_counts() {
        let v: serde_json::Value = serde_json::from_str(&render("brady-link", Format::Json).unwrap()).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 8);
        assert_eq!(v["arcs"].as_array().unwrap().len(), 12);
    }

    #[test]
    fn errors() {
        assert!(matches!(render("nope", Format::Json), Err(ExportError::UnknownObject(_))));
        assert!(matches!(render("x1bar", Format::Dot), Err(ExportError::Unsupported(..))));
        assert!(matches!("svg".parse::<Format>(), Err(ExportError::UnknownFormat(_))));
        let bad = Path::new("/nonexistent-dir/out.json");
        assert!(matches!(export("brady-link", Format::Json, bad), Err(ExportError::Io { .. })));
    }

    #[test]
    fn g1_table_text() {
        let text = render("g1-table", Format::Text).unwrap();
        assert!(text.starts_with("cosets 4\n"));
    }
}
