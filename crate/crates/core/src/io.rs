//! Point-file parsing and the JSON certificate document.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{ConvexCombination, PointSet};
use crate::graphs::Edge;
use crate::tverberg::{Classification, TverbergCertificate, WitnessMethod};

pub const TOOL_NAME: &str = "tverberg";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointFormat {
    Json,
    Csv,
}

impl PointFormat {
    /// From the file extension, falling back to the first non-blank byte.
    pub fn detect(path: Option<&Path>, text: &str) -> PointFormat {
        let ext = path
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("json") => PointFormat::Json,
            Some("csv") => PointFormat::Csv,
            _ if text.trim_start().starts_with('{') => PointFormat::Json,
            _ => PointFormat::Csv,
        }
    }
}

pub fn parse_points(text: &str, format: PointFormat) -> Result<PointSet> {
    match format {
        PointFormat::Json => {
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("point file: {e}")))
        }
        PointFormat::Csv => parse_csv(text),
    }
}

/// One point per row. A first row that does not parse as numbers is taken as
/// a header.
fn parse_csv(text: &str) -> Result<PointSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("csv: {e}")))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("csv row {}: {e}", line + 1))),
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("point file"));
    }
    PointSet::from_rows(&rows)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    let text = read_text(path)?;
    parse_points(&text, PointFormat::detect(Some(path), &text))
}

/// Accepts `[[i, j], ...]` or `{"edges": [[i, j], ...]}`.
pub fn parse_edges(text: &str) -> Result<Vec<Edge>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum EdgeFile {
        Bare(Vec<Edge>),
        Wrapped { edges: Vec<Edge> },
    }
    let file: EdgeFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("edge file: {e}")))?;
    Ok(match file {
        EdgeFile::Bare(e) | EdgeFile::Wrapped { edges: e } => e,
    })
}

/// SHA-256 over the dimension, the point count, and the IEEE-754 bits of
/// every coordinate (little endian).
pub fn input_digest(ps: &PointSet) -> String {
    let mut h = Sha256::new();
    h.update((ps.dim() as u64).to_le_bytes());
    h.update((ps.len() as u64).to_le_bytes());
    for p in ps.points() {
        for c in p.coords() {
            h.update(c.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub method: WitnessMethod,
    pub tolerance: f64,
    pub active: Vec<usize>,
    pub gradient_weights: Option<ConvexCombination>,
    pub solver_rounds: usize,
    pub edge_dots: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub tool: String,
    pub version: String,
    pub input_digest: String,
    pub graph: String,
    pub edges: Vec<Edge>,
    pub classification: Classification,
    pub witness: Vec<f64>,
    pub value: f64,
    pub depth: f64,
    pub slacks: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl CertificateDocument {
    pub fn new(ps: &PointSet, graph: &str, edges: &[Edge], cert: &TverbergCertificate) -> Self {
        CertificateDocument {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            input_digest: input_digest(ps),
            graph: graph.to_string(),
            edges: edges.to_vec(),
            classification: cert.classification,
            witness: cert.witness.coords().to_vec(),
            value: cert.value,
            depth: cert.depth,
            slacks: cert.slacks.clone(),
            diagnostics: Diagnostics {
                method: cert.method,
                tolerance: cert.tolerance,
                active: cert.active.clone(),
                gradient_weights: cert.gradient_weights.clone(),
                solver_rounds: cert.solver_rounds,
                edge_dots: cert.edge_dots.clone(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate fields are finite")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("certificate: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tverberg::verify_tverberg;

    #[test]
    fn csv_and_json_agree() {
        let json = r#"{"dim": 2, "points": [[0, 0], [1, 0.5], [-2.25, 3]]}"#;
        let csv = "x, y\n0,0\n1,0.5\n\n-2.25,3\n";
        let a = parse_points(json, PointFormat::detect(None, json)).unwrap();
        let b = parse_points(csv, PointFormat::detect(None, csv)).unwrap();
        assert_eq!(a, b);
        let headless = parse_points("0,0\n1,0.5\n-2.25,3", PointFormat::Csv).unwrap();
        assert_eq!(a, headless);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_points("", PointFormat::Csv), Err(Error::EmptyInput(_))));
        assert!(parse_points("x,y\n", PointFormat::Csv).is_err());
        assert!(parse_points("1,2\n3\n", PointFormat::Csv).is_err());
        assert!(parse_points("1,2\n3,abc\n", PointFormat::Csv).is_err());
        assert!(parse_points("1,2\n3,inf\n", PointFormat::Csv).is_err());
        assert!(parse_points("{\"dim\":2}", PointFormat::Json).is_err());
    }

    #[test]
    fn extension_wins_over_content() {
        assert_eq!(PointFormat::detect(Some(Path::new("a.CSV")), "{"), PointFormat::Csv);
        assert_eq!(PointFormat::detect(Some(Path::new("a.json")), "1,2"), PointFormat::Json);
        assert_eq!(PointFormat::detect(Some(Path::new("a.txt")), " {"), PointFormat::Json);
    }

    #[test]
    fn edge_files() {
        assert_eq!(parse_edges("[[0,1],[2,3]]").unwrap(), vec![(0, 1), (2, 3)]);
        assert_eq!(parse_edges(r#"{"edges":[[1,0]]}"#).unwrap(), vec![(1, 0)]);
        assert!(parse_edges("[[0,1,2]]").is_err());
    }

    #[test]
    fn digest_depends_on_bits() {
        let a = PointSet::from_rows(&[[0.0, 0.0]]).unwrap();
        let b = PointSet::from_rows(&[[-0.0, 0.0]]).unwrap();
        assert_ne!(input_digest(&a), input_digest(&b));
        assert_eq!(input_digest(&a).len(), 64);
    }

    #[test]
    fn certificate_round_trip() {
        let ps = PointSet::from_rows(&[[0.1, 0.0], [1.0, 0.3], [0.0, 1.7], [1.1, 1.0]]).unwrap();
        let edges = [(0, 3), (1, 2)];
        let cert = verify_tverberg(&ps, &edges).unwrap();
        let doc = CertificateDocument::new(&ps, "matching", &edges, &cert);
        let text = doc.to_json();
        let back = CertificateDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json(), text);
        assert!(text.contains("\"classification\": \"OPEN\""));
    }
}
