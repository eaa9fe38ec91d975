//! Kernel objects: Matérn/heat kernels on a single space and products of them.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spaces::{DiscreteSpectrumSpace, Point, Space};
use crate::spectral::{normalization_constant, relative_spectral_weights, KernelParams, SpectralWeights};

/// Common interface of the kernels, used by the GP routines.
pub trait Kernel {
    type Params;

    /// Validates points, returning their canonical forms.
    fn validate_points(&self, xs: &[Point]) -> Result<Vec<Point>>;

    /// `K[i][j] = k(xs[i], ys[j])`.
    fn kernel_matrix(&self, params: &Self::Params, xs: &[Point], ys: &[Point]) -> Result<DMatrix<f64>>;

    /// Symmetric `K[i][j] = k(xs[i], xs[j])`.
    fn gram_matrix(&self, params: &Self::Params, xs: &[Point]) -> Result<DMatrix<f64>>;

    fn kernel_diag(&self, params: &Self::Params, xs: &[Point]) -> Result<DVector<f64>>;

    /// Amplitude σ² of the kernel under `params`.
    fn amplitude(&self, params: &Self::Params) -> f64;
}

/// Heat or Matérn kernel on a discrete-spectrum space.
///
/// Hyperparameters are passed per call; the handle only caches data that does
/// not depend on them.
#[derive(Debug, Clone)]
pub struct MaternGeometricKernel {
    space: Arc<Space>,
    eigenvalues: Vec<f64>,
    mean_diagonal: Vec<f64>,
}

impl MaternGeometricKernel {
    pub fn new(space: impl Into<Arc<Space>>) -> Self {
        let space = space.into();
        MaternGeometricKernel {
            eigenvalues: space.eigenvalues(),
            mean_diagonal: space.mean_level_diagonal(),
            space,
        }
    }

    /// `ν = 5/2`, `κ = 1`, `σ² = 1`.
    pub fn init_params(&self) -> KernelParams {
        KernelParams::default()
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<Space> {
        &self.space
    }

    /// Per-level weights relative to `Φ(0)`, with the matching normalization constant.
    pub fn spectral_weights(&self, params: &KernelParams) -> Result<SpectralWeights> {
        let mut w = relative_spectral_weights(&self.eigenvalues, params, self.space.dim_constant())?;
        w.normalization = normalization_constant(&w.weights, &self.mean_diagonal)?;
        Ok(w)
    }

    /// Per-level coefficients `σ² Φ(λ_l) / C`.
    pub fn coefficients(&self, params: &KernelParams) -> Result<Vec<f64>> {
        Ok(self.spectral_weights(params)?.coefficients(params.sigma2))
    }

    /// Single kernel value `k(x, y)`.
    pub fn evaluate(&self, params: &KernelParams, x: &Point, y: &Point) -> Result<f64> {
        let x = self.space.validate_point(x)?;
        let y = self.space.validate_point(y)?;
        let coef = self.coefficients(params)?;
        Ok(self.eval_with(&coef, &x, &y))
    }

    fn eval_with(&self, coef: &[f64], x: &Point, y: &Point) -> f64 {
        dot(coef, &self.space.level_sums(x, y))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Kernel for MaternGeometricKernel {
    type Params = KernelParams;

    fn validate_points(&self, xs: &[Point]) -> Result<Vec<Point>> {
        xs.iter().map(|p| self.space.validate_point(p)).collect()
    }

    fn kernel_matrix(&self, params: &KernelParams, xs: &[Point], ys: &[Point]) -> Result<DMatrix<f64>> {
        let xs = self.validate_points(xs)?;
        let ys = self.validate_points(ys)?;
        let coef = self.coefficients(params)?;
        Ok(DMatrix::from_fn(xs.len(), ys.len(), |i, j| {
            self.eval_with(&coef, &xs[i], &ys[j])
        }))
    }

    fn gram_matrix(&self, params: &KernelParams, xs: &[Point]) -> Result<DMatrix<f64>> {
        let xs = self.validate_points(xs)?;
        let coef = self.coefficients(params)?;
        let n = xs.len();
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.eval_with(&coef, &xs[i], &xs[j]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        Ok(k)
    }

    fn kernel_diag(&self, params: &KernelParams, xs: &[Point]) -> Result<DVector<f64>> {
        let xs = self.validate_points(xs)?;
        let coef = self.coefficients(params)?;
        Ok(DVector::from_iterator(
            xs.len(),
            xs.iter().map(|x| self.eval_with(&coef, x, x)),
        ))
    }

    fn amplitude(&self, params: &KernelParams) -> f64 {
        params.sigma2
    }
}

/// Per-factor parameters and the shared amplitude of a [`ProductGeometricKernel`].
///
/// The factors' own `sigma2` fields are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductParams {
    pub factors: Vec<KernelParams>,
    pub sigma2: f64,
}

/// `k(x, x') = σ² Π_i k̂_i(x_i, x_i')` with unit-amplitude factor kernels, each
/// with its own smoothness and lengthscale.
#[derive(Debug, Clone)]
pub struct ProductGeometricKernel {
    factors: Vec<MaternGeometricKernel>,
}

impl ProductGeometricKernel {
    pub fn new(factors: Vec<MaternGeometricKernel>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::domain("a product kernel needs at least two factors"));
        }
        Ok(ProductGeometricKernel { factors })
    }

    pub fn factors(&self) -> &[MaternGeometricKernel] {
        &self.factors
    }

    /// Each factor's default parameters and `σ² = 1`.
    pub fn init_params(&self) -> ProductParams {
        ProductParams {
            factors: self.factors.iter().map(|f| f.init_params()).collect(),
            sigma2: 1.0,
        }
    }

    fn factor_coefficients(&self, params: &ProductParams) -> Result<Vec<Vec<f64>>> {
        if params.factors.len() != self.factors.len() {
            return Err(Error::ShapeMismatch {
                expected: self.factors.len(),
                found: params.factors.len(),
            });
        }
        if !(params.sigma2 > 0.0) || !params.sigma2.is_finite() {
            return Err(Error::domain(format!(
                "amplitude must be positive and finite, got {}",
                params.sigma2
            )));
        }
        self.factors
            .iter()
            .zip(&params.factors)
            .map(|(k, p)| k.coefficients(&p.with_sigma2(1.0)))
            .collect()
    }

    fn eval_with(&self, coefs: &[Vec<f64>], sigma2: f64, x: &Point, y: &Point) -> f64 {
        let (Point::Tuple(x), Point::Tuple(y)) = (x, y) else {
            unreachable!("points are validated as tuples");
        };
        let mut acc = sigma2;
        for (k, ((c, xi), yi)) in self.factors.iter().zip(coefs.iter().zip(x).zip(y)) {
            acc *= k.eval_with(c, xi, yi);
        }
        acc
    }

    pub fn evaluate(&self, params: &ProductParams, x: &Point, y: &Point) -> Result<f64> {
        let pts = self.validate_points(&[x.clone(), y.clone()])?;
        let coefs = self.factor_coefficients(params)?;
        Ok(self.eval_with(&coefs, params.sigma2, &pts[0], &pts[1]))
    }
}

impl Kernel for ProductGeometricKernel {
    type Params = ProductParams;

    fn validate_points(&self, xs: &[Point]) -> Result<Vec<Point>> {
        xs.iter()
            .map(|p| match p {
                Point::Tuple(t) if t.len() == self.factors.len() => Ok(Point::Tuple(
                    t.iter()
                        .zip(&self.factors)
                        .map(|(q, k)| k.space().validate_point(q))
                        .collect::<Result<_>>()?,
                )),
                Point::Tuple(t) => Err(Error::point(format!(
                    "expected a tuple of {} factor points, got {}",
                    self.factors.len(),
                    t.len()
                ))),
                other => Err(Error::point(format!(
                    "product kernel expects tuple points, got {other:?}"
                ))),
            })
            .collect()
    }

    fn kernel_matrix(&self, params: &ProductParams, xs: &[Point], ys: &[Point]) -> Result<DMatrix<f64>> {
        let xs = self.validate_points(xs)?;
        let ys = self.validate_points(ys)?;
        let coefs = self.factor_coefficients(params)?;
        Ok(DMatrix::from_fn(xs.len(), ys.len(), |i, j| {
            self.eval_with(&coefs, params.sigma2, &xs[i], &ys[j])
        }))
    }

    fn gram_matrix(&self, params: &ProductParams, xs: &[Point]) -> Result<DMatrix<f64>> {
        let xs = self.validate_points(xs)?;
        let coefs = self.factor_coefficients(params)?;
        let n = xs.len();
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.eval_with(&coefs, params.sigma2, &xs[i], &xs[j]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        Ok(k)
    }

    fn kernel_diag(&self, params: &ProductParams, xs: &[Point]) -> Result<DVector<f64>> {
        let xs = self.validate_points(xs)?;
        let coefs = self.factor_coefficients(params)?;
        Ok(DVector::from_iterator(
            xs.len(),
            xs.iter().map(|x| self.eval_with(&coefs, params.sigma2, x, x)),
        ))
    }

    fn amplitude(&self, params: &ProductParams) -> f64 {
        params.sigma2
    }
}
