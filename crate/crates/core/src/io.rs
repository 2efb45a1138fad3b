//! Readers for the two on-disk network formats.
//!
//! Edge list: UTF-8, one `<u> <v> <weight>` per line with 1-based ids, `#`
//! starts a comment, each line sets both `W_uv` and `W_vu`. A missing weight
//! defaults to 1.
//!
//! Matrix JSON: `{"A": [[...]], "B": [[...]]}` for a direct system, or
//! `{"W": [[...]], "lambda": [...]}` for a Friedkin-Johnsen graph.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::network::{InfluenceSystem, StubbornnessProfile, UndirectedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    EdgeList,
    MatrixJson,
}

impl InputFormat {
    /// `.json` files are matrix documents; everything else is an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::MatrixJson,
            _ => InputFormat::EdgeList,
        }
    }
}

#[derive(Clone, Debug)]
pub enum LoadedNetwork {
    System(InfluenceSystem),
    Graph {
        graph: UndirectedGraph,
        lambda: Option<StubbornnessProfile>,
    },
}

pub fn load_system(path: &Path, format: InputFormat) -> Result<LoadedNetwork> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    match format {
        InputFormat::EdgeList => Ok(LoadedNetwork::Graph {
            graph: parse_edge_list(&text)?,
            lambda: None,
        }),
        InputFormat::MatrixJson => parse_matrix_json(&text),
    }
}

pub fn parse_edge_list(text: &str) -> Result<UndirectedGraph> {
    let mut edges: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    let mut n = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let loc = |field: &str| format!("line {}, {field}", lineno + 1);
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::Parse {
                location: format!("line {}", lineno + 1),
                message: format!("expected '<u> <v> <weight>', got {} fields", fields.len()),
            });
        }
        let id = |s: &str, field: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(Error::Parse {
                    location: loc(field),
                    message: format!("'{s}' is not a 1-based node id"),
                }),
            }
        };
        let u = id(fields[0], "field 1")?;
        let v = id(fields[1], "field 2")?;
        let w = match fields.get(2) {
            None => 1.0,
            Some(s) => s.parse::<f64>().map_err(|_| Error::Parse {
                location: loc("field 3"),
                message: format!("'{s}' is not a number"),
            })?,
        };
        if !w.is_finite() || w < 0.0 {
            return Err(Error::NegativeWeight {
                location: loc("field 3"),
                value: w,
            });
        }
        n = n.max(u).max(v);
        let key = (u.min(v), u.max(v));
        if let Some(&(previous, _)) = edges.get(&key) {
            if previous != w {
                return Err(Error::Asymmetry {
                    u,
                    v,
                    forward: previous,
                    backward: w,
                });
            }
        }
        edges.insert(key, (w, lineno + 1));
    }
    if edges.is_empty() {
        return Err(Error::Parse {
            location: "input".into(),
            message: "edge list contains no edges".into(),
        });
    }
    let mut weights = Matrix::zeros(n, n);
    for (&(u, v), &(w, _)) in &edges {
        weights[(u - 1, v - 1)] = w;
        weights[(v - 1, u - 1)] = w;
    }
    UndirectedGraph::new(weights)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDocument {
    #[serde(rename = "A")]
    a: Option<Vec<Vec<f64>>>,
    #[serde(rename = "B")]
    b: Option<Vec<Vec<f64>>>,
    #[serde(rename = "W")]
    w: Option<Vec<Vec<f64>>>,
    lambda: Option<Vec<f64>>,
}

fn dense(rows: &[Vec<f64>], field: &str) -> Result<Matrix> {
    if rows.is_empty() {
        return Err(Error::Parse {
            location: format!("field \"{field}\""),
            message: "matrix is empty".into(),
        });
    }
    if let Some(r) = rows.iter().position(|row| row.len() != rows[0].len()) {
        return Err(Error::Parse {
            location: format!("field \"{field}\", row {}", r + 1),
            message: format!("has {} entries, expected {}", rows[r].len(), rows[0].len()),
        });
    }
    Ok(Matrix::from_rows(rows).expect("rows checked rectangular"))
}

pub fn parse_matrix_json(text: &str) -> Result<LoadedNetwork> {
    let doc: MatrixDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    match doc {
        MatrixDocument {
            a: Some(a),
            b: Some(b),
            w: None,
            lambda: None,
        } => Ok(LoadedNetwork::System(InfluenceSystem::new(
            dense(&a, "A")?,
            dense(&b, "B")?,
        )?)),
        MatrixDocument {
            a: None,
            b: None,
            w: Some(w),
            lambda,
        } => {
            let graph = UndirectedGraph::new(dense(&w, "W")?)?;
            let lambda = lambda.map(StubbornnessProfile::new).transpose()?;
            Ok(LoadedNetwork::Graph { graph, lambda })
        }
        _ => Err(Error::Parse {
            location: "document".into(),
            message: "expected either \"A\" and \"B\", or \"W\" with optional \"lambda\"".into(),
        }),
    }
}
