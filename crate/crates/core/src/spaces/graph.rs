use std::collections::HashSet;

use nalgebra::DMatrix;

use super::{ascending_order, check_num_levels, clean_eigenvalues, DiscreteSpectrumSpace, Level, Point};
use crate::error::{Error, Result};

/// An undirected weighted graph. Edges are stored with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphData {
    num_nodes: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl GraphData {
    /// Validates and normalizes an edge list; `(i, j)` with `i > j` is stored as `(j, i)`.
    pub fn new(num_nodes: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::InvalidGraph("graph must have at least one node".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut normalized = Vec::with_capacity(edges.len());
        for (i, j, w) in edges {
            validate_edge(num_nodes, i, j, w)?;
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", key.0, key.1)));
            }
            normalized.push((key.0, key.1, w));
        }
        Ok(GraphData {
            num_nodes,
            edges: normalized,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Unnormalized Laplacian `D - W`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.num_nodes;
        let mut lap = DMatrix::zeros(n, n);
        for &(i, j, w) in &self.edges {
            lap[(i, j)] -= w;
            lap[(j, i)] -= w;
            lap[(i, i)] += w;
            lap[(j, j)] += w;
        }
        lap
    }
}

pub(crate) fn validate_edge(num_nodes: usize, i: usize, j: usize, w: f64) -> Result<()> {
    if i >= num_nodes || j >= num_nodes {
        return Err(Error::InvalidGraph(format!(
            "edge ({i}, {j}) references a node outside 0..{num_nodes}"
        )));
    }
    if i == j {
        return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
    }
    if !w.is_finite() || w < 0.0 {
        return Err(Error::InvalidGraph(format!(
            "edge ({i}, {j}) has invalid weight {w}; weights must be finite and nonnegative"
        )));
    }
    Ok(())
}

/// Graph nodes with levels from a dense eigendecomposition of `D - W`.
///
/// Every eigenpair is its own level (`d_l = 1`), eigenvectors scaled so that
/// `(1/N) Σ_i f_l(i)² = 1`.
#[derive(Debug, Clone)]
pub struct GraphSpace {
    num_nodes: usize,
    levels: Vec<Level>,
    /// `N × L`, column `l` holds `f_l`.
    eigenfunctions: DMatrix<f64>,
}

impl GraphSpace {
    /// `num_levels = None` keeps every eigenpair.
    pub fn new(graph: &GraphData, num_levels: Option<usize>) -> Result<Self> {
        let n = graph.num_nodes();
        let num_levels = num_levels.unwrap_or(n);
        check_num_levels(num_levels)?;
        if num_levels > n {
            return Err(Error::domain(format!(
                "requested {num_levels} levels but the graph has {n} nodes"
            )));
        }
        let eig = graph.laplacian().symmetric_eigen();
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        clean_eigenvalues(&mut values)?;
        let order = ascending_order(&values);
        let scale = (n as f64).sqrt();
        let mut funcs = DMatrix::zeros(n, num_levels);
        let mut levels = Vec::with_capacity(num_levels);
        for (l, &k) in order.iter().take(num_levels).enumerate() {
            funcs.set_column(l, &(eig.eigenvectors.column(k) * scale));
            levels.push(Level {
                index: l,
                eigenvalue: values[k],
                dimension: 1,
            });
        }
        Ok(GraphSpace {
            num_nodes: n,
            levels,
            eigenfunctions: funcs,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// `N × L` matrix of scaled eigenvectors.
    pub fn eigenvector_matrix(&self) -> &DMatrix<f64> {
        &self.eigenfunctions
    }
}

pub(crate) fn index(p: &Point) -> usize {
    match p {
        Point::Index(i) => *i,
        other => panic!("expected an index, got {other:?}"),
    }
}

pub(crate) fn validate_index(p: &Point, n: usize, what: &str) -> Result<Point> {
    match p {
        Point::Index(i) if *i < n => Ok(p.clone()),
        Point::Index(i) => Err(Error::point(format!("{what} index {i} out of range 0..{n}"))),
        other => Err(Error::point(format!("expected a {what} index, got {other:?}"))),
    }
}

impl DiscreteSpectrumSpace for GraphSpace {
    fn name(&self) -> &'static str {
        "graph"
    }

    fn dim_constant(&self) -> usize {
        0
    }

    fn levels(&self) -> &[Level] {
        &self.levels
    }

    fn validate_point(&self, p: &Point) -> Result<Point> {
        validate_index(p, self.num_nodes, "node")
    }

    fn level_sums(&self, x: &Point, y: &Point) -> Vec<f64> {
        let (i, j) = (index(x), index(y));
        let f = &self.eigenfunctions;
        (0..self.levels.len()).map(|l| f[(i, l)] * f[(j, l)]).collect()
    }

    fn eigenfunctions(&self, level: usize, x: &Point) -> Option<Vec<f64>> {
        Some(vec![self.eigenfunctions[(index(x), level)]])
    }

    fn variance_probe(&self) -> Vec<(f64, Point)> {
        let w = 1.0 / self.num_nodes as f64;
        (0..self.num_nodes).map(|i| (w, Point::Index(i))).collect()
    }

    fn mean_level_diagonal(&self) -> Vec<f64> {
        let w = 1.0 / self.num_nodes as f64;
        self.eigenfunctions
            .column_iter()
            .map(|c| w * c.norm_squared())
            .collect()
    }
}
