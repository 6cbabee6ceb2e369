//! Whitespace-separated node / ele / edge-marker files with 1-based indices.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector2;

use super::{edge_key, BoundaryPartition, Marker, Mesh, MeshError};
use crate::scalar::{lit, to_f64, Real};

const DUPLICATE_TOL: f64 = 1e-12;

/// Serializes a mesh to `(node, ele, edge)` file contents.
///
/// Edge markers come from `partition` when given, else from the tags the
/// mesh carries.
pub fn export_mesh<T: Real>(
    mesh: &Mesh<T>,
    partition: Option<&BoundaryPartition<T>>,
) -> (String, String, String) {
    let mut node = format!("{} 2 0 0\n", mesh.vertices.len());
    for (i, v) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(node, "{} {:?} {:?}", i + 1, to_f64(v.x), to_f64(v.y));
    }
    let mut ele = format!("{} 3 1\n", mesh.triangles.len());
    for (i, t) in mesh.triangles.iter().enumerate() {
        let _ = writeln!(ele, "{} {} {} {} 1", i + 1, t[0] + 1, t[1] + 1, t[2] + 1);
    }
    let mut edge = String::new();
    for &e in &mesh.boundary_edges {
        let marker = match partition {
            Some(p) => p.marker(e).map(Marker::code),
            None => mesh.edges[e].tag,
        };
        if let Some(code) = marker {
            let [a, b] = mesh.edges[e].vertices;
            let _ = writeln!(edge, "{} {} {}", a + 1, b + 1, code);
        }
    }
    (node, ele, edge)
}

struct Rows<'a> {
    file: &'a str,
    lines: Vec<(usize, Vec<&'a str>)>,
}

impl<'a> Rows<'a> {
    fn new(file: &'a str, text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i, l.split_whitespace().collect()))
            .collect();
        Rows { file, lines }
    }

    fn error(&self, line: usize, message: impl Into<String>) -> MeshError {
        MeshError::Parse {
            file: self.file.to_string(),
            line,
            message: message.into(),
        }
    }

    fn int(&self, line: usize, word: &str) -> Result<i64, MeshError> {
        word.parse()
            .map_err(|_| self.error(line, format!("expected an integer, found '{word}'")))
    }

    fn float(&self, line: usize, word: &str) -> Result<f64, MeshError> {
        word.parse()
            .map_err(|_| self.error(line, format!("expected a number, found '{word}'")))
    }

    /// Reads the header count and checks the body length.
    fn body(&self, min_cols: usize) -> Result<&[(usize, Vec<&'a str>)], MeshError> {
        let (line, header) = self
            .lines
            .first()
            .ok_or_else(|| self.error(1, "empty file"))?;
        let count = self.int(*line, header[0])?;
        let body = &self.lines[1..];
        if count < 0 || body.len() != count as usize {
            return Err(self.error(
                *line,
                format!("header announces {count} records, found {}", body.len()),
            ));
        }
        for (line, cols) in body {
            if cols.len() < min_cols {
                return Err(self.error(*line, format!("expected {min_cols} columns")));
            }
        }
        Ok(body)
    }
}

fn one_based(rows: &Rows<'_>, line: usize, word: &str, len: usize) -> Result<usize, MeshError> {
    let i = rows.int(line, word)?;
    if i < 1 || i as usize > len {
        return Err(MeshError::Topology(format!(
            "{}:{line}: index {i} outside 1..={len}",
            rows.file
        )));
    }
    Ok(i as usize - 1)
}

/// Parses node / ele / optional edge-marker file contents.
pub fn import_mesh<T: Real>(node: &str, ele: &str, edge: Option<&str>) -> Result<Mesh<T>, MeshError> {
    let nodes = Rows::new("node", node);
    let body = nodes.body(3)?;
    let mut vertices = vec![Vector2::zeros(); body.len()];
    let mut seen = vec![false; body.len()];
    for (line, cols) in body {
        let i = one_based(&nodes, *line, cols[0], body.len())?;
        if seen[i] {
            return Err(nodes.error(*line, format!("vertex {} defined twice", i + 1)));
        }
        seen[i] = true;
        vertices[i] = Vector2::new(
            lit::<T>(nodes.float(*line, cols[1])?),
            lit::<T>(nodes.float(*line, cols[2])?),
        );
    }
    check_duplicates(&vertices)?;

    let eles = Rows::new("ele", ele);
    let body = eles.body(4)?;
    let mut triangles = vec![[0usize; 3]; body.len()];
    let mut seen = vec![false; body.len()];
    for (line, cols) in body {
        let t = one_based(&eles, *line, cols[0], body.len())?;
        if seen[t] {
            return Err(eles.error(*line, format!("triangle {} defined twice", t + 1)));
        }
        seen[t] = true;
        for k in 0..3 {
            triangles[t][k] = one_based(&eles, *line, cols[k + 1], vertices.len())?;
        }
    }

    let mut tags = BTreeMap::new();
    if let Some(text) = edge {
        let edges = Rows::new("edge", text);
        for (line, cols) in &edges.lines {
            if cols.len() < 3 {
                return Err(edges.error(*line, "expected `v1 v2 marker`"));
            }
            let a = one_based(&edges, *line, cols[0], vertices.len())?;
            let b = one_based(&edges, *line, cols[1], vertices.len())?;
            let code = edges.int(*line, cols[2])?;
            Marker::from_code(code)?;
            tags.insert(edge_key(a, b), code);
        }
    }

    let mesh = Mesh::from_parts(vertices, triangles, &tags)?;
    for &key in tags.keys() {
        let on_boundary = mesh
            .boundary_edges
            .iter()
            .any(|&e| mesh.edges[e].vertices == [key.0, key.1]);
        if !on_boundary {
            return Err(MeshError::Topology(format!(
                "marked edge ({}, {}) is not a boundary edge",
                key.0 + 1,
                key.1 + 1
            )));
        }
    }
    Ok(mesh)
}

fn check_duplicates<T: Real>(vertices: &[Vector2<T>]) -> Result<(), MeshError> {
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    let x = |i: usize| to_f64(vertices[i].x);
    let y = |i: usize| to_f64(vertices[i].y);
    order.sort_by(|&a, &b| x(a).total_cmp(&x(b)));
    for (k, &a) in order.iter().enumerate() {
        for &b in &order[k + 1..] {
            if x(b) - x(a) > DUPLICATE_TOL {
                break;
            }
            if (y(b) - y(a)).abs() <= DUPLICATE_TOL {
                return Err(MeshError::DuplicateVertex {
                    a: a.min(b) + 1,
                    b: a.max(b) + 1,
                });
            }
        }
    }
    Ok(())
}

/// Writes `<stem>.node`, `<stem>.ele` and `<stem>.edge`.
pub fn write_mesh_files<T: Real>(
    mesh: &Mesh<T>,
    partition: Option<&BoundaryPartition<T>>,
    stem: &Path,
) -> Result<(), MeshError> {
    let (node, ele, edge) = export_mesh(mesh, partition);
    std::fs::write(stem.with_extension("node"), node)?;
    std::fs::write(stem.with_extension("ele"), ele)?;
    std::fs::write(stem.with_extension("edge"), edge)?;
    Ok(())
}

/// Reads `<stem>.node` and `<stem>.ele`, plus `<stem>.edge` when present.
pub fn read_mesh_files<T: Real>(stem: &Path) -> Result<Mesh<T>, MeshError> {
    let node = std::fs::read_to_string(stem.with_extension("node"))?;
    let ele = std::fs::read_to_string(stem.with_extension("ele"))?;
    let edge_path = stem.with_extension("edge");
    let edge = if edge_path.exists() {
        Some(std::fs::read_to_string(edge_path)?)
    } else {
        None
    };
    import_mesh(&node, &ele, edge.as_deref())
}
