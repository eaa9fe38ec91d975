//! Finite-dimensional feature maps `φ` with `φ(x)ᵀφ(x') = k(x, x')` for the
//! truncated kernel, and prior sampling `f = ζᵀφ`, `ζ ~ N(0, I)`.
//!
//! Levels with explicit eigenfunctions (circle, graphs, meshes) use them
//! directly. Levels known only through `G_l` (hyperspheres, SU(2)) get
//! features synthesized from a fixed design set `Z`: with
//! `B = [G_l(z_a, z_b)] = V Λ Vᵀ`, the features are `Λ^{-1/2} Vᵀ [G_l(z_a, x)]_a`.
//! Since `G_l(·, x)` lies in the span of the level's eigenfunctions, this is
//! exact as soon as `Z` determines that span.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernels::{MaternGeometricKernel, ProductGeometricKernel, ProductParams};
use crate::spaces::{DiscreteSpectrumSpace, Point, Space};
use crate::spectral::KernelParams;

/// Eigenvalues of the design Gram matrix below this fraction of the largest are dropped.
const DESIGN_RANK_TOLERANCE: f64 = 1e-10;
const DESIGN_SEED: u64 = 0x6765_6f6b_6572_6e6c;

/// Seed and count for drawing samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub seed: u64,
    pub num_samples: usize,
}

impl SampleSpec {
    pub fn new(seed: u64, num_samples: usize) -> Result<Self> {
        if num_samples == 0 {
            return Err(Error::domain("number of samples must be positive"));
        }
        Ok(SampleSpec { seed, num_samples })
    }

    /// Generator for stream `stream` of this seed; stream 0 drives prior weights.
    pub(crate) fn rng(&self, stream: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Orthonormal basis of one level.
#[derive(Debug)]
enum LevelBasis {
    Explicit {
        level: usize,
    },
    Synthesized {
        level: usize,
        design: Vec<Point>,
        /// `d × M` map from design evaluations to features.
        projection: DMatrix<f64>,
    },
    /// Product level: Kronecker product of factor level bases.
    Tensor(Vec<Arc<LevelBasis>>),
}

impl LevelBasis {
    fn build(space: &Space, level: usize, cache: &mut HashMap<(usize, usize), Arc<LevelBasis>>) -> Result<LevelBasis> {
        if let Space::Product(prod) = space {
            let comps = prod.components(level);
            let mut parts = Vec::with_capacity(comps.len());
            for (k, (factor, &l)) in prod.factors().iter().zip(comps).enumerate() {
                let basis = match cache.get(&(k, l)) {
                    Some(b) => b.clone(),
                    None => {
                        let b = Arc::new(LevelBasis::build(factor, l, &mut HashMap::new())?);
                        cache.insert((k, l), b.clone());
                        b
                    }
                };
                parts.push(basis);
            }
            return Ok(LevelBasis::Tensor(parts));
        }
        let probe = space.variance_probe();
        if space.eigenfunctions(level, &probe[0].1).is_some() {
            return Ok(LevelBasis::Explicit { level });
        }
        synthesize(space, level)
    }

    fn eval(&self, space: &Space, x: &Point) -> Vec<f64> {
        match self {
            LevelBasis::Explicit { level } => space
                .eigenfunctions(*level, x)
                .expect("explicit level has eigenfunctions"),
            LevelBasis::Synthesized {
                level,
                design,
                projection,
            } => {
                let g = DVector::from_iterator(design.len(), design.iter().map(|z| space.level_sums(z, x)[*level]));
                (projection * g).iter().copied().collect()
            }
            LevelBasis::Tensor(parts) => {
                let (Space::Product(prod), Point::Tuple(xs)) = (space, x) else {
                    unreachable!("tensor bases live on product spaces");
                };
                let mut acc = vec![1.0];
                for ((basis, factor), xi) in parts.iter().zip(prod.factors()).zip(xs) {
                    let f = basis.eval(factor, xi);
                    acc = acc.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
                }
                acc
            }
        }
    }
}

fn synthesize(space: &Space, level: usize) -> Result<LevelBasis> {
    let d = space.levels()[level].dimension;
    let m = d + d.div_ceil(2) + 8;
    let design = space
        .design_points(m, DESIGN_SEED ^ level as u64)
        .ok_or_else(|| Error::Numerical(format!("{} provides no design points", space.name())))?;
    let gram = DMatrix::from_fn(m, m, |a, b| space.level_sums(&design[a], &design[b])[level]);
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let max = eig.eigenvalues[order[0]];
    let keep: Vec<usize> = order
        .into_iter()
        .take(d)
        .filter(|&k| eig.eigenvalues[k] > DESIGN_RANK_TOLERANCE * max)
        .collect();
    if keep.len() < d {
        return Err(Error::Numerical(format!(
            "design set spans only {} of {d} dimensions at level {level}",
            keep.len()
        )));
    }
    let mut projection = DMatrix::zeros(d, m);
    for (r, &k) in keep.iter().enumerate() {
        let s = eig.eigenvalues[k].sqrt().recip();
        projection.set_row(r, &(eig.eigenvectors.column(k).transpose() * s));
    }
    Ok(LevelBasis::Synthesized {
        level,
        design,
        projection,
    })
}

#[derive(Debug, Clone)]
enum MapKind {
    Levels {
        space: Arc<Space>,
        scales: Vec<f64>,
        bases: Vec<Arc<LevelBasis>>,
    },
    /// `σ · kron(φ̂_1, ..., φ̂_m)` for product kernels.
    Tensor { factors: Vec<FeatureMap>, scale: f64 },
}

/// Deterministic feature map `φ: X → R^ℓ`.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    kind: MapKind,
    dim: usize,
}

/// Feature map of the truncated kernel: per level, `sqrt(σ² Φ(λ_l) / C)` times
/// an orthonormal basis of the level.
pub fn default_feature_map(kernel: &MaternGeometricKernel, params: &KernelParams) -> Result<FeatureMap> {
    let coef = kernel.coefficients(params)?;
    let space = kernel.space_arc().clone();
    let mut cache = HashMap::new();
    let bases = (0..coef.len())
        .map(|l| LevelBasis::build(&space, l, &mut cache).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureMap {
        dim: space.feature_dimension(),
        kind: MapKind::Levels {
            scales: coef.iter().map(|c| c.sqrt()).collect(),
            bases,
            space,
        },
    })
}

/// Feature map of a product kernel: the Kronecker product of unit-amplitude
/// factor maps, scaled by `σ`. Its dimension is the product of the factor dimensions.
pub fn product_feature_map(kernel: &ProductGeometricKernel, params: &ProductParams) -> Result<FeatureMap> {
    if params.factors.len() != kernel.factors().len() {
        return Err(Error::ShapeMismatch {
            expected: kernel.factors().len(),
            found: params.factors.len(),
        });
    }
    if !(params.sigma2 > 0.0) || !params.sigma2.is_finite() {
        return Err(Error::domain(format!(
            "amplitude must be positive, got {}",
            params.sigma2
        )));
    }
    let factors = kernel
        .factors()
        .iter()
        .zip(&params.factors)
        .map(|(k, p)| default_feature_map(k, &p.with_sigma2(1.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureMap {
        dim: factors.iter().map(|f| f.dim).product(),
        kind: MapKind::Tensor {
            factors,
            scale: params.sigma2.sqrt(),
        },
    })
}

impl FeatureMap {
    /// Feature dimension `ℓ`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn validate(&self, x: &Point) -> Result<Point> {
        match &self.kind {
            MapKind::Levels { space, .. } => space.validate_point(x),
            MapKind::Tensor { factors, .. } => match x {
                Point::Tuple(t) if t.len() == factors.len() => Ok(Point::Tuple(
                    t.iter()
                        .zip(factors)
                        .map(|(p, f)| f.validate(p))
                        .collect::<Result<_>>()?,
                )),
                other => Err(Error::point(format!(
                    "expected a tuple of {} factor points, got {other:?}",
                    factors.len()
                ))),
            },
        }
    }

    fn eval_valid(&self, x: &Point) -> Vec<f64> {
        match &self.kind {
            MapKind::Levels { space, scales, bases } => {
                let mut out = Vec::with_capacity(self.dim);
                for (basis, s) in bases.iter().zip(scales) {
                    out.extend(basis.eval(space, x).into_iter().map(|v| v * s));
                }
                out
            }
            MapKind::Tensor { factors, scale } => {
                let Point::Tuple(xs) = x else {
                    unreachable!("validated as tuple")
                };
                let mut acc = vec![*scale];
                for (f, xi) in factors.iter().zip(xs) {
                    let v = f.eval_valid(xi);
                    acc = acc.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
                }
                acc
            }
        }
    }

    /// `φ(x)`.
    pub fn evaluate(&self, x: &Point) -> Result<Vec<f64>> {
        Ok(self.eval_valid(&self.validate(x)?))
    }
}

/// `N × ℓ` matrix with rows `φ(xs[i])`.
pub fn feature_matrix(fm: &FeatureMap, xs: &[Point]) -> Result<DMatrix<f64>> {
    let mut out = DMatrix::zeros(xs.len(), fm.dim());
    for (i, x) in xs.iter().enumerate() {
        let row = fm.evaluate(x)?;
        for (j, v) in row.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

/// `num_samples × N` matrix of prior draws `ζᵀφ(xs[j])`, fresh `ζ` per row.
///
/// The first `k` rows depend only on the seed, not on `num_samples`.
pub fn sample_prior(fm: &FeatureMap, xs: &[Point], spec: &SampleSpec) -> Result<DMatrix<f64>> {
    let phi = feature_matrix(fm, xs)?;
    let zeta = draw_weights(fm.dim(), spec);
    // Row by row: a batched product may round differently as num_samples changes.
    let mut out = DMatrix::zeros(spec.num_samples, xs.len());
    for (r, z) in zeta.row_iter().enumerate() {
        out.row_mut(r).copy_from(&(&phi * z.transpose()).transpose());
    }
    Ok(out)
}

/// `num_samples × ℓ` standard normal weights.
pub(crate) fn draw_weights(dim: usize, spec: &SampleSpec) -> DMatrix<f64> {
    let mut rng = spec.rng(0);
    let mut zeta = DMatrix::zeros(spec.num_samples, dim);
    for r in 0..spec.num_samples {
        for c in 0..dim {
            zeta[(r, c)] = StandardNormal.sample(&mut rng);
        }
    }
    zeta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Kernel;
    use crate::spaces::{Circle, GraphData, GraphSpace, Hypersphere, Su2};

    #[test]
    fn circle_feature_dimension() {
        let k = MaternGeometricKernel::new(Space::from(Circle::new(10).unwrap()));
        let fm = default_feature_map(&k, &k.init_params()).unwrap();
        assert_eq!(fm.dim(), 19);
    }

    #[test]
    fn graph_gram_equals_kernel() {
        let g = GraphData::new(5, vec![(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 0.5), (0, 4, 1.0)]).unwrap();
        let k = MaternGeometricKernel::new(Space::from(GraphSpace::new(&g, None).unwrap()));
        let params = KernelParams::new(1.5, 0.8, 2.0).unwrap();
        let fm = default_feature_map(&k, &params).unwrap();
        let xs: Vec<Point> = (0..5).map(Point::Index).collect();
        let phi = feature_matrix(&fm, &xs).unwrap();
        let gram = &phi * phi.transpose();
        let kxx = k.gram_matrix(&params, &xs).unwrap();
        assert!((gram - kxx).amax() < 1e-12);
    }

    #[test]
    fn synthesized_sphere_features() {
        let k = MaternGeometricKernel::new(Space::from(Hypersphere::new(2, 12).unwrap()));
        let params = k.init_params();
        let fm = default_feature_map(&k, &params).unwrap();
        assert_eq!(fm.dim(), 144);
        let xs = vec![
            Point::Vector(vec![0.0, 0.0, 1.0]),
            Point::Vector(vec![0.6, 0.0, 0.8]),
            Point::Vector(vec![0.0, -1.0, 0.0]),
        ];
        let phi = feature_matrix(&fm, &xs).unwrap();
        let gram = &phi * phi.transpose();
        let kxx = k.gram_matrix(&params, &xs).unwrap();
        assert!((gram - kxx).amax() < 1e-8);
    }

    #[test]
    fn synthesized_su2_features() {
        let k = MaternGeometricKernel::new(Space::from(Su2::new(5).unwrap()));
        let params = KernelParams::heat(0.7, 1.0).unwrap();
        let fm = default_feature_map(&k, &params).unwrap();
        let xs = vec![
            Point::Quaternion([1.0, 0.0, 0.0, 0.0]),
            Point::Quaternion([0.5, 0.5, 0.5, 0.5]),
            Point::Quaternion([0.0, 0.6, 0.0, 0.8]),
        ];
        let phi = feature_matrix(&fm, &xs).unwrap();
        let gram = &phi * phi.transpose();
        let kxx = k.gram_matrix(&params, &xs).unwrap();
        assert!((gram - kxx).amax() < 1e-8);
    }

    #[test]
    fn empty_point_list() {
        let k = MaternGeometricKernel::new(Space::from(Circle::new(4).unwrap()));
        let fm = default_feature_map(&k, &k.init_params()).unwrap();
        let phi = feature_matrix(&fm, &[]).unwrap();
        assert_eq!(phi.shape(), (0, 7));
    }

    #[test]
    fn sampling_is_deterministic_and_extends() {
        let k = MaternGeometricKernel::new(Space::from(Circle::new(8).unwrap()));
        let fm = default_feature_map(&k, &k.init_params()).unwrap();
        let xs: Vec<Point> = (0..4).map(|i| Point::Angle(i as f64)).collect();
        let a = sample_prior(&fm, &xs, &SampleSpec::new(7, 3).unwrap()).unwrap();
        let b = sample_prior(&fm, &xs, &SampleSpec::new(7, 3).unwrap()).unwrap();
        let c = sample_prior(&fm, &xs, &SampleSpec::new(7, 5).unwrap()).unwrap();
        let d = sample_prior(&fm, &xs, &SampleSpec::new(8, 3).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c.rows(0, 3));
        assert_ne!(a, d);
        assert_eq!(a.shape(), (3, 4));
        assert!(SampleSpec::new(1, 0).is_err());
    }
}
