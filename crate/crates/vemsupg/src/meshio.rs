//! Text mesh files.
//!
//! ```text
//! vem-mesh 1
//! vertices N
//! x y            (N lines)
//! cells M
//! v0 v1 v2 ...   (M lines, 0-based, counterclockwise)
//! boundary B
//! v0 v1          (B lines)
//! ```
//!
//! Coordinates are written with the shortest representation that parses
//! back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;
use vemsupg_core::mesh::{Mesh, MeshError};
use vemsupg_core::Point2;

pub const HEADER: &str = "vem-mesh 1";

#[derive(Debug, Error)]
pub enum MeshIoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid mesh: {0}")]
    Invalid(#[from] MeshError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshIoError {
    MeshIoError::Parse {
        line,
        message: message.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with its 1-based number.
    fn next(&mut self, what: &str) -> Result<(usize, &'a str), MeshIoError> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Ok((i + 1, t));
            }
        }
        Err(parse_err(self.last + 1, format!("unexpected end of file, expected {what}")))
    }

    fn count(&mut self, keyword: &str) -> Result<usize, MeshIoError> {
        let (n, l) = self.next(keyword)?;
        let mut it = l.split_whitespace();
        if it.next() != Some(keyword) {
            return Err(parse_err(n, format!("expected `{keyword} <count>`, found {l:?}")));
        }
        let count = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(n, format!("expected `{keyword} <count>`, found {l:?}")))?;
        if it.next().is_some() {
            return Err(parse_err(n, format!("trailing content after `{keyword}` count")));
        }
        Ok(count)
    }
}

fn fields<T: std::str::FromStr>(n: usize, l: &str, what: &str) -> Result<Vec<T>, MeshIoError> {
    l.split_whitespace()
        .map(|s| s.parse::<T>().map_err(|_| parse_err(n, format!("invalid {what} {s:?}"))))
        .collect()
}

/// Parses and validates a mesh. The boundary list must match the edges
/// that the cells leave with one neighbour.
pub fn parse(text: &str) -> Result<Mesh, MeshIoError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (n, header) = lines.next("header")?;
    if header != HEADER {
        return Err(parse_err(n, format!("expected header `{HEADER}`, found {header:?}")));
    }
    let nv = lines.count("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines.next("a vertex")?;
        let xy: Vec<f64> = fields(n, l, "coordinate")?;
        if xy.len() != 2 {
            return Err(parse_err(n, format!("expected 2 coordinates, found {}", xy.len())));
        }
        vertices.push(Point2::new(xy[0], xy[1]));
    }
    let nc = lines.count("cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (n, l) = lines.next("a cell")?;
        cells.push(fields::<usize>(n, l, "vertex index")?);
    }
    let nb = lines.count("boundary")?;
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (n, l) = lines.next("a boundary edge")?;
        let v: Vec<usize> = fields(n, l, "vertex index")?;
        if v.len() != 2 {
            return Err(parse_err(n, format!("expected 2 vertex indices, found {}", v.len())));
        }
        boundary.push([v[0], v[1]]);
    }
    if let Ok((n, l)) = lines.next("") {
        return Err(parse_err(n, format!("unexpected content {l:?}")));
    }
    let mesh = Mesh::new(vertices, cells)?;
    mesh.check_simple()?;
    mesh.check_boundary(&boundary)?;
    Ok(mesh)
}

pub fn format(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{HEADER}");
    let _ = writeln!(s, "vertices {}", mesh.vertices.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{} {}", v.x, v.y);
    }
    let _ = writeln!(s, "cells {}", mesh.cells.len());
    for c in &mesh.cells {
        let idx: Vec<String> = c.vertices.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{}", idx.join(" "));
    }
    let boundary = mesh.boundary_edges();
    let _ = writeln!(s, "boundary {}", boundary.len());
    for [a, b] in boundary {
        let _ = writeln!(s, "{a} {b}");
    }
    s
}

pub fn read(path: &Path) -> Result<Mesh, MeshIoError> {
    let text = std::fs::read_to_string(path).map_err(|source| MeshIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

pub fn write(mesh: &Mesh, path: &Path) -> Result<(), MeshIoError> {
    std::fs::write(path, format(mesh)).map_err(|source| MeshIoError::Io {
        path: path.display().to_string(),
        source,
    })
}
