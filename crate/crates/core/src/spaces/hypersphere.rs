use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_num_levels, unit_vector, DiscreteSpectrumSpace, Level, Point};
use crate::error::{Error, Result};
use crate::special::{binomial, gegenbauer_all, gegenbauer_at_one};

/// The unit hypersphere `S^n ⊂ R^{n+1}`.
///
/// Level `l` is the full eigenspace of degree-`l` spherical harmonics, with
/// `λ_l = l(l + n - 1)`. The addition theorem gives
/// `G_l(x, x') = d_l C_l^α(⟨x, x'⟩) / C_l^α(1)` with `α = (n - 1)/2`.
#[derive(Debug, Clone)]
pub struct Hypersphere {
    dim: usize,
    levels: Vec<Level>,
    alpha: f64,
    at_one: Vec<f64>,
}

/// Number of degree-`l` spherical harmonics on `S^n`.
pub(crate) fn harmonic_dimension(n: usize, l: usize) -> usize {
    if l == 0 {
        return 1;
    }
    let (n, l) = (n as u64, l as u64);
    ((2 * l + n - 1) * binomial(l + n - 2, l) / (n - 1)) as usize
}

impl Hypersphere {
    pub fn new(dim: usize, num_levels: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::domain(format!(
                "hypersphere dimension must be at least 2, got {dim}"
            )));
        }
        check_num_levels(num_levels)?;
        let levels = (0..num_levels)
            .map(|l| Level {
                index: l,
                eigenvalue: (l * (l + dim - 1)) as f64,
                dimension: harmonic_dimension(dim, l),
            })
            .collect();
        let alpha = 0.5 * (dim as f64 - 1.0);
        Ok(Hypersphere {
            dim,
            levels,
            alpha,
            at_one: gegenbauer_at_one(num_levels - 1, alpha),
        })
    }

    /// Intrinsic dimension `n` of `S^n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Level sums as a function of the inner product `t = ⟨x, x'⟩`, clamped to `[-1, 1]`.
    pub fn level_sums_at(&self, t: f64) -> Vec<f64> {
        let t = t.clamp(-1.0, 1.0);
        gegenbauer_all(self.levels.len() - 1, self.alpha, t)
            .into_iter()
            .zip(&self.at_one)
            .zip(&self.levels)
            .map(|((c, c1), lv)| lv.dimension as f64 * c / c1)
            .collect()
    }
}

pub(crate) fn vector(p: &Point) -> &[f64] {
    match p {
        Point::Vector(v) => v,
        other => panic!("expected an ambient vector, got {other:?}"),
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fibonacci lattice of `count` points on `S²`.
pub(crate) fn fibonacci_sphere(count: usize) -> Vec<Point> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Point::Vector(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// `count` independent uniform points on `S^{ambient-1}` from a seeded stream.
pub(crate) fn random_unit_vectors(ambient: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..ambient).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-8 {
            out.push(v.iter().map(|c| c / norm).collect());
        }
    }
    out
}

impl DiscreteSpectrumSpace for Hypersphere {
    fn name(&self) -> &'static str {
        "hypersphere"
    }

    fn dim_constant(&self) -> usize {
        self.dim
    }

    fn levels(&self) -> &[Level] {
        &self.levels
    }

    fn validate_point(&self, p: &Point) -> Result<Point> {
        match p {
            Point::Vector(v) if v.len() == self.dim + 1 => Ok(Point::Vector(unit_vector(v)?)),
            Point::Vector(v) => Err(Error::point(format!(
                "expected {} coordinates, got {}",
                self.dim + 1,
                v.len()
            ))),
            other => Err(Error::point(format!(
                "hypersphere expects an ambient vector, got {other:?}"
            ))),
        }
    }

    fn level_sums(&self, x: &Point, y: &Point) -> Vec<f64> {
        self.level_sums_at(dot(vector(x), vector(y)))
    }

    fn eigenfunctions(&self, _level: usize, _x: &Point) -> Option<Vec<f64>> {
        None
    }

    fn variance_probe(&self) -> Vec<(f64, Point)> {
        let mut north = vec![0.0; self.dim + 1];
        north[self.dim] = 1.0;
        vec![(1.0, Point::Vector(north))]
    }

    fn design_points(&self, count: usize, seed: u64) -> Option<Vec<Point>> {
        Some(if self.dim == 2 {
            fibonacci_sphere(count)
        } else {
            random_unit_vectors(self.dim + 1, count, seed)
                .into_iter()
                .map(Point::Vector)
                .collect()
        })
    }
}
