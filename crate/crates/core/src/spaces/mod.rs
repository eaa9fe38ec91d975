//! Discrete-spectrum spaces: their Laplacian eigenvalues, level sums `G_l` and
//! point representations.

mod circle;
mod graph;
mod hypersphere;
mod mesh;
mod product;
mod su2;

pub use circle::Circle;
pub use graph::{GraphData, GraphSpace};
pub use hypersphere::Hypersphere;
pub use mesh::{MeshData, MeshSpace};
pub use product::ProductSpace;
pub use su2::{quaternion_from_matrix, Su2};

use crate::error::{Error, Result};

/// Unit-norm deviations up to this size are renormalized; larger ones are rejected.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// A point on one of the supported spaces.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    /// Angle in radians on the circle.
    Angle(f64),
    /// Unit vector in ambient coordinates (hyperspheres).
    Vector(Vec<f64>),
    /// Unit quaternion `(a, b, c, d)` standing for `[[a+bi, c+di], [-c+di, a-bi]]` in SU(2).
    Quaternion([f64; 4]),
    /// Node or vertex index.
    Index(usize),
    /// One point per factor of a product space.
    Tuple(Vec<Point>),
}

/// One spectral level: eigenvalue `λ_l` and the number `d_l` of eigenfunctions it groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub index: usize,
    pub eigenvalue: f64,
    pub dimension: usize,
}

pub trait DiscreteSpectrumSpace {
    fn name(&self) -> &'static str;

    /// The constant `n` entering the Matérn exponent `ν + n/2`.
    fn dim_constant(&self) -> usize;

    /// Retained levels ordered by nondecreasing eigenvalue.
    fn levels(&self) -> &[Level];

    /// Checks a point and returns its canonical (possibly renormalized) form.
    fn validate_point(&self, p: &Point) -> Result<Point>;

    /// `G_l(x, y)` for every retained level. Points must already be validated.
    fn level_sums(&self, x: &Point, y: &Point) -> Vec<f64>;

    /// The `d_l` eigenfunction values `f_{l,s}(x)`, when the space knows them explicitly.
    fn eigenfunctions(&self, level: usize, x: &Point) -> Option<Vec<f64>>;

    /// Probability measure used to normalize variances: `(weight, point)` pairs.
    fn variance_probe(&self) -> Vec<(f64, Point)>;

    /// Fixed design points for synthesizing features of levels without explicit
    /// eigenfunctions.
    fn design_points(&self, _count: usize, _seed: u64) -> Option<Vec<Point>> {
        None
    }

    /// `E[G_l(x, x)]` under the variance-probe measure, one entry per level.
    fn mean_level_diagonal(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.levels().len()];
        for (w, p) in self.variance_probe() {
            for (a, g) in acc.iter_mut().zip(self.level_sums(&p, &p)) {
                *a += w * g;
            }
        }
        acc
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.levels().iter().map(|l| l.eigenvalue).collect()
    }

    /// Total number of eigenfunctions over all retained levels.
    fn feature_dimension(&self) -> usize {
        self.levels().iter().map(|l| l.dimension).sum()
    }
}

/// Any supported space.
#[derive(Debug, Clone)]
pub enum Space {
    Circle(Circle),
    Hypersphere(Hypersphere),
    Su2(Su2),
    Graph(GraphSpace),
    Mesh(MeshSpace),
    Product(ProductSpace),
}

macro_rules! dispatch {
    ($self:ident, $s:ident => $e:expr) => {
        match $self {
            Space::Circle($s) => $e,
            Space::Hypersphere($s) => $e,
            Space::Su2($s) => $e,
            Space::Graph($s) => $e,
            Space::Mesh($s) => $e,
            Space::Product($s) => $e,
        }
    };
}

impl DiscreteSpectrumSpace for Space {
    fn name(&self) -> &'static str {
        dispatch!(self, s => s.name())
    }
    fn dim_constant(&self) -> usize {
        dispatch!(self, s => s.dim_constant())
    }
    fn levels(&self) -> &[Level] {
        dispatch!(self, s => s.levels())
    }
    fn validate_point(&self, p: &Point) -> Result<Point> {
        dispatch!(self, s => s.validate_point(p))
    }
    fn level_sums(&self, x: &Point, y: &Point) -> Vec<f64> {
        dispatch!(self, s => s.level_sums(x, y))
    }
    fn eigenfunctions(&self, level: usize, x: &Point) -> Option<Vec<f64>> {
        dispatch!(self, s => s.eigenfunctions(level, x))
    }
    fn variance_probe(&self) -> Vec<(f64, Point)> {
        dispatch!(self, s => s.variance_probe())
    }
    fn design_points(&self, count: usize, seed: u64) -> Option<Vec<Point>> {
        dispatch!(self, s => s.design_points(count, seed))
    }
    fn mean_level_diagonal(&self) -> Vec<f64> {
        dispatch!(self, s => s.mean_level_diagonal())
    }
}

impl From<Circle> for Space {
    fn from(s: Circle) -> Self {
        Space::Circle(s)
    }
}
impl From<Hypersphere> for Space {
    fn from(s: Hypersphere) -> Self {
        Space::Hypersphere(s)
    }
}
impl From<Su2> for Space {
    fn from(s: Su2) -> Self {
        Space::Su2(s)
    }
}
impl From<GraphSpace> for Space {
    fn from(s: GraphSpace) -> Self {
        Space::Graph(s)
    }
}
impl From<MeshSpace> for Space {
    fn from(s: MeshSpace) -> Self {
        Space::Mesh(s)
    }
}
impl From<ProductSpace> for Space {
    fn from(s: ProductSpace) -> Self {
        Space::Product(s)
    }
}

pub(crate) fn check_num_levels(num_levels: usize) -> Result<()> {
    if num_levels == 0 {
        return Err(Error::domain("number of levels must be at least 1"));
    }
    Ok(())
}

/// Normalizes `v` to unit length, rejecting deviations beyond [`NORM_TOLERANCE`].
pub(crate) fn unit_vector(v: &[f64]) -> Result<Vec<f64>> {
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::point("non-finite coordinate"));
    }
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::point("zero norm"));
    }
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::point(format!(
            "norm {norm} deviates from 1 by more than {NORM_TOLERANCE}"
        )));
    }
    Ok(v.iter().map(|c| c / norm).collect())
}

/// Eigenvalues of a PSD operator computed numerically: tiny negatives become 0,
/// anything below `-1e-10 * max` is an error.
pub(crate) fn clean_eigenvalues(values: &mut [f64]) -> Result<()> {
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    let floor = -1e-10 * max - 1e-12;
    for v in values.iter_mut() {
        if !v.is_finite() {
            return Err(Error::Numerical("non-finite eigenvalue".into()));
        }
        if *v < floor {
            return Err(Error::Numerical(format!(
                "Laplacian eigenvalue {v} is significantly negative"
            )));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// Index order sorting eigenvalues ascending; equal values keep their original order.
pub(crate) fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}
