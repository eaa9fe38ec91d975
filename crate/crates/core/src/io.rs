//! Text formats: graph edge lists, OFF meshes, point CSVs and matrix CSVs.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spaces::{DiscreteSpectrumSpace, GraphData, MeshData, Point, Space};

/// Meaningful lines with their 1-based numbers; `#` starts a comment.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// Parses an edge list: a node count `N`, then lines `i j [w]` (weight defaults to 1).
pub fn parse_graph_edgelist(text: &str) -> Result<GraphData> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "missing node count"))?;
    let num_nodes: usize = header
        .parse()
        .map_err(|_| Error::parse(line_no, format!("expected a node count, got {header:?}")))?;
    if num_nodes == 0 {
        return Err(Error::parse(line_no, "graph must have at least one node"));
    }
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::parse(line_no, format!("expected \"i j [w]\", got {line:?}")));
        }
        let node = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("invalid node index {s:?}")))
        };
        let (i, j) = (node(fields[0])?, node(fields[1])?);
        let w = match fields.get(2) {
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| Error::parse(line_no, format!("invalid weight {s:?}")))?,
            None => 1.0,
        };
        if i == j {
            return Err(Error::parse(line_no, format!("self-loop at node {i}")));
        }
        if i >= num_nodes || j >= num_nodes {
            return Err(Error::parse(
                line_no,
                format!("node index {} out of range 0..{num_nodes}", i.max(j)),
            ));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::parse(line_no, format!("negative or non-finite weight {w}")));
        }
        let key = (i.min(j), i.max(j));
        if !seen.insert(key) {
            return Err(Error::parse(line_no, format!("duplicate edge ({}, {})", key.0, key.1)));
        }
        edges.push((key.0, key.1, w));
    }
    GraphData::new(num_nodes, edges)
}

/// Parses an OFF file restricted to triangle faces.
pub fn parse_off_mesh(text: &str) -> Result<MeshData> {
    let mut lines = content_lines(text);
    let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty OFF file"))?;
    // Some writers put the counts on the header line: "OFF V F E".
    let mut header_fields = header.split_whitespace();
    if header_fields.next() != Some("OFF") {
        return Err(Error::parse(
            line_no,
            format!("expected \"OFF\" header, got {header:?}"),
        ));
    }
    let rest: Vec<&str> = header_fields.collect();
    let (count_line, counts) = if rest.is_empty() {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(line_no + 1, "missing counts line"))?;
        (n, l.split_whitespace().collect::<Vec<_>>())
    } else {
        (line_no, rest)
    };
    if counts.len() != 3 {
        return Err(Error::parse(count_line, "expected counts \"V F E\""));
    }
    let parse_count = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::parse(count_line, format!("invalid count {s:?}")))
    };
    let (nv, nf) = (parse_count(counts[0])?, parse_count(counts[1])?);
    parse_count(counts[2])?;

    let mut vertices = Vec::with_capacity(nv);
    let mut faces = Vec::with_capacity(nf);
    for (line_no, line) in lines.by_ref() {
        if vertices.len() < nv {
            let coords = line
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::parse(line_no, format!("invalid vertex line {line:?}")))?;
            if coords.len() != 3 {
                return Err(Error::parse(
                    line_no,
                    format!("expected 3 coordinates, got {}", coords.len()),
                ));
            }
            vertices.push([coords[0], coords[1], coords[2]]);
        } else if faces.len() < nf {
            let fields = line
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::parse(line_no, format!("invalid face line {line:?}")))?;
            if fields.is_empty() || fields[0] != 3 || fields.len() != 4 {
                return Err(Error::parse(line_no, format!("non-triangular face {line:?}")));
            }
            let face = [fields[1], fields[2], fields[3]];
            if let Some(&bad) = face.iter().find(|&&i| i >= nv) {
                return Err(Error::parse(line_no, format!("face references vertex {bad} of {nv}")));
            }
            faces.push(face);
        } else {
            return Err(Error::parse(line_no, "more lines than the counts declare"));
        }
    }
    if vertices.len() != nv || faces.len() != nf {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!(
                "counts mismatch: declared {nv} vertices and {nf} faces, found {} and {}",
                vertices.len(),
                faces.len()
            ),
        ));
    }
    MeshData::new(vertices, faces)
}

/// Number of CSV columns a point of `space` occupies.
pub fn point_width(space: &Space) -> usize {
    match space {
        Space::Circle(_) | Space::Graph(_) | Space::Mesh(_) => 1,
        Space::Hypersphere(s) => s.dim() + 1,
        Space::Su2(_) => 4,
        Space::Product(p) => p.factors().iter().map(point_width).sum(),
    }
}

fn point_from_fields(space: &Space, fields: &[&str], line: usize) -> Result<Point> {
    let reals = || {
        fields
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(line, format!("invalid number {s:?}")))
            })
            .collect::<Result<Vec<f64>>>()
    };
    let raw = match space {
        Space::Circle(_) => Point::Angle(reals()?[0]),
        Space::Hypersphere(_) => Point::Vector(reals()?),
        Space::Su2(_) => {
            let v = reals()?;
            Point::Quaternion([v[0], v[1], v[2], v[3]])
        }
        Space::Graph(_) | Space::Mesh(_) => {
            let s = fields[0].trim();
            Point::Index(
                s.parse::<usize>()
                    .map_err(|_| Error::parse(line, format!("invalid index {s:?}")))?,
            )
        }
        Space::Product(p) => {
            let mut parts = Vec::with_capacity(p.factors().len());
            let mut offset = 0;
            for f in p.factors() {
                let w = point_width(f);
                parts.push(point_from_fields(f, &fields[offset..offset + w], line)?);
                offset += w;
            }
            Point::Tuple(parts)
        }
    };
    space
        .validate_point(&raw)
        .map_err(|e| Error::parse(line, e.to_string()))
}

/// Parses one point per comma-separated row, validating against `space`.
pub fn parse_points_csv(text: &str, space: &Space) -> Result<Vec<Point>> {
    let width = point_width(space);
    content_lines(text)
        .map(|(line_no, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != width {
                return Err(Error::parse(
                    line_no,
                    format!("expected {width} columns, got {}", fields.len()),
                ));
            }
            point_from_fields(space, &fields, line_no)
        })
        .collect()
}

/// Parses a column of reals, one per row (targets files).
pub fn parse_values_csv(text: &str) -> Result<Vec<f64>> {
    content_lines(text)
        .map(|(line_no, line)| {
            line.parse::<f64>()
                .map_err(|_| Error::parse(line_no, format!("invalid number {line:?}")))
        })
        .collect()
}

/// Comma-separated rows with shortest round-trip decimal formatting.
pub fn format_matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(m: &DMatrix<f64>, path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, format_matrix_csv(m))
}
