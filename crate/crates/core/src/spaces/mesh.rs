use nalgebra::{DMatrix, Vector3};

use super::graph::{index, validate_index};
use super::{ascending_order, check_num_levels, clean_eigenvalues, DiscreteSpectrumSpace, Level, Point};
use crate::error::{Error, Result};

/// A triangle mesh with counterclockwise faces.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshData {
    vertices: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
}

impl MeshData {
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.is_empty() || faces.is_empty() {
            return Err(Error::InvalidMesh("mesh needs at least one vertex and one face".into()));
        }
        if let Some(v) = vertices.iter().position(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidMesh(format!("vertex {v} has a non-finite coordinate")));
        }
        let mut referenced = vec![false; vertices.len()];
        for (f, face) in faces.iter().enumerate() {
            for &i in face {
                if i >= vertices.len() {
                    return Err(Error::InvalidMesh(format!(
                        "face {f} references vertex {i}, but there are only {}",
                        vertices.len()
                    )));
                }
                referenced[i] = true;
            }
            if face_is_degenerate(&vertices, face) {
                return Err(Error::InvalidMesh(format!("face {f} is degenerate (zero area)")));
            }
        }
        if let Some(v) = referenced.iter().position(|r| !r) {
            return Err(Error::InvalidMesh(format!("vertex {v} is not used by any face")));
        }
        Ok(MeshData { vertices, faces })
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    fn corner(&self, i: usize) -> Vector3<f64> {
        Vector3::from(self.vertices[i])
    }

    /// Cotangent stiffness matrix: off-diagonal `-(cot α + cot β)/2` per edge,
    /// rows summing to zero.
    pub fn cotangent_laplacian(&self) -> Result<DMatrix<f64>> {
        let n = self.num_vertices();
        let mut lap = DMatrix::zeros(n, n);
        for (f, face) in self.faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b, c) = (face[k], face[(k + 1) % 3], face[(k + 2) % 3]);
                // angle at a, opposite edge (b, c)
                let u = self.corner(b) - self.corner(a);
                let v = self.corner(c) - self.corner(a);
                let cot = u.dot(&v) / u.cross(&v).norm();
                if !cot.is_finite() {
                    return Err(Error::InvalidMesh(format!("face {f} has a non-finite cotangent")));
                }
                let w = 0.5 * cot;
                lap[(b, c)] -= w;
                lap[(c, b)] -= w;
                lap[(b, b)] += w;
                lap[(c, c)] += w;
            }
        }
        Ok(lap)
    }

    /// Barycentric lumped mass: a third of each incident triangle's area.
    pub fn lumped_mass(&self) -> Vec<f64> {
        let mut mass = vec![0.0; self.num_vertices()];
        for face in &self.faces {
            let area = 0.5
                * (self.corner(face[1]) - self.corner(face[0]))
                    .cross(&(self.corner(face[2]) - self.corner(face[0])))
                    .norm();
            for &i in face {
                mass[i] += area / 3.0;
            }
        }
        mass
    }
}

fn face_is_degenerate(vertices: &[[f64; 3]], face: &[usize; 3]) -> bool {
    if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
        return true;
    }
    let p: Vec<Vector3<f64>> = face.iter().map(|&i| Vector3::from(vertices[i])).collect();
    let e = [p[1] - p[0], p[2] - p[1], p[0] - p[2]];
    let longest = e.iter().map(|v| v.norm_squared()).fold(0.0, f64::max);
    let twice_area = e[0].cross(&e[2]).norm();
    !(twice_area > 1e-12 * longest)
}

/// Mesh vertices with levels from the cotangent Laplacian and lumped mass.
///
/// Solves `M^{-1/2} L M^{-1/2} u = λ u`; eigenfunctions are `f = M^{-1/2} u`
/// scaled to unit mean square under the normalized mass.
#[derive(Debug, Clone)]
pub struct MeshSpace {
    levels: Vec<Level>,
    eigenfunctions: DMatrix<f64>,
    /// Lumped mass normalized to a probability vector.
    mass: Vec<f64>,
}

impl MeshSpace {
    pub fn new(mesh: &MeshData, num_levels: usize) -> Result<Self> {
        let n = mesh.num_vertices();
        check_num_levels(num_levels)?;
        if num_levels > n {
            return Err(Error::domain(format!(
                "requested {num_levels} levels but the mesh has {n} vertices"
            )));
        }
        let stiffness = mesh.cotangent_laplacian()?;
        let mass = mesh.lumped_mass();
        let total: f64 = mass.iter().sum();
        let inv_sqrt: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        let sym = DMatrix::from_fn(n, n, |i, j| inv_sqrt[i] * stiffness[(i, j)] * inv_sqrt[j]);
        let eig = sym.symmetric_eigen();
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        clean_eigenvalues(&mut values)?;
        let order = ascending_order(&values);

        // Σ_i (m_i / total) f(i)² = 1 with f = sqrt(total) M^{-1/2} u.
        let scale = total.sqrt();
        let mut funcs = DMatrix::zeros(n, num_levels);
        let mut levels = Vec::with_capacity(num_levels);
        for (l, &k) in order.iter().take(num_levels).enumerate() {
            let u = eig.eigenvectors.column(k);
            for i in 0..n {
                funcs[(i, l)] = scale * inv_sqrt[i] * u[i];
            }
            levels.push(Level {
                index: l,
                eigenvalue: values[k],
                dimension: 1,
            });
        }
        Ok(MeshSpace {
            levels,
            eigenfunctions: funcs,
            mass: mass.iter().map(|m| m / total).collect(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.mass.len()
    }

    /// Normalized lumped vertex masses (sum to 1).
    pub fn vertex_measure(&self) -> &[f64] {
        &self.mass
    }

    pub fn eigenvector_matrix(&self) -> &DMatrix<f64> {
        &self.eigenfunctions
    }
}

impl DiscreteSpectrumSpace for MeshSpace {
    fn name(&self) -> &'static str {
        "mesh"
    }

    fn dim_constant(&self) -> usize {
        2
    }

    fn levels(&self) -> &[Level] {
        &self.levels
    }

    fn validate_point(&self, p: &Point) -> Result<Point> {
        validate_index(p, self.num_vertices(), "vertex")
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
        self.mass
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, Point::Index(i)))
            .collect()
    }

    fn mean_level_diagonal(&self) -> Vec<f64> {
        self.eigenfunctions
            .column_iter()
            .map(|c| c.iter().zip(&self.mass).map(|(f, m)| m * f * f).sum())
            .collect()
    }
}
