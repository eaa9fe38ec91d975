//! Gaussian-process regression with a zero prior mean.
//!
//! Closed-form posterior moments
//!
//! ```text
//! μ(·)     = K_{·x} (K_xx + Σ)^{-1} y
//! k(·, ·') = K_{··'} - K_{·x} (K_xx + Σ)^{-1} K_{x·'}
//! ```
//!
//! and pathwise posterior draws `f(·) + K_{·x} (K_xx + Σ)^{-1} (y - f(x) - ε)`
//! built from prior draws `f` and noise draws `ε ~ N(0, Σ)`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::features::{sample_prior, FeatureMap, SampleSpec};
use crate::kernels::Kernel;
use crate::spaces::Point;

/// Observation noise covariance.
#[derive(Debug, Clone, PartialEq)]
pub enum Noise {
    /// `Σ = s I`.
    Scalar(f64),
    /// Full symmetric PSD covariance.
    Matrix(DMatrix<f64>),
}

/// Training inputs, targets and noise model.
#[derive(Debug, Clone)]
pub struct RegressionProblem {
    train: Vec<Point>,
    targets: DVector<f64>,
    noise: Noise,
    jitter: f64,
}

impl RegressionProblem {
    pub fn new(train: Vec<Point>, targets: DVector<f64>, noise: Noise) -> Result<Self> {
        let n = train.len();
        if targets.len() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                found: targets.len(),
            });
        }
        if targets.iter().any(|y| !y.is_finite()) {
            return Err(Error::domain("targets must be finite"));
        }
        match &noise {
            Noise::Scalar(s) if !(*s >= 0.0) || !s.is_finite() => {
                return Err(Error::domain(format!("noise variance must be nonnegative, got {s}")));
            }
            Noise::Matrix(m) => check_covariance(m, n)?,
            _ => {}
        }
        Ok(RegressionProblem {
            train,
            targets,
            noise,
            jitter: 0.0,
        })
    }

    /// Adds `jitter · I` to `K_xx + Σ` before factorizing.
    pub fn with_jitter(mut self, jitter: f64) -> Result<Self> {
        if !(jitter >= 0.0) || !jitter.is_finite() {
            return Err(Error::domain(format!("jitter must be nonnegative, got {jitter}")));
        }
        self.jitter = jitter;
        Ok(self)
    }

    pub fn train(&self) -> &[Point] {
        &self.train
    }

    pub fn targets(&self) -> &DVector<f64> {
        &self.targets
    }

    pub fn noise(&self) -> &Noise {
        &self.noise
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    fn noise_matrix(&self) -> DMatrix<f64> {
        let n = self.train.len();
        match &self.noise {
            Noise::Scalar(s) => DMatrix::from_diagonal_element(n, n, *s),
            Noise::Matrix(m) => m.clone(),
        }
    }

    /// `n × S` matrix of noise draws `ε ~ N(0, Σ)`.
    fn draw_noise(&self, spec: &SampleSpec) -> DMatrix<f64> {
        let n = self.train.len();
        let mut rng = spec.rng(1);
        let mut z = DMatrix::zeros(n, spec.num_samples);
        // column-major fill keeps the first k columns independent of the sample count
        for s in 0..spec.num_samples {
            for i in 0..n {
                z[(i, s)] = StandardNormal.sample(&mut rng);
            }
        }
        match &self.noise {
            Noise::Scalar(v) => z * v.sqrt(),
            Noise::Matrix(m) => psd_factor(m) * z,
        }
    }
}

fn check_covariance(m: &DMatrix<f64>, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            found: m.nrows().max(m.ncols()),
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("noise covariance must be finite"));
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    if (m - m.transpose()).amax() > 1e-12 * scale {
        return Err(Error::domain("noise covariance must be symmetric"));
    }
    if n > 0 {
        let min = m.clone().symmetric_eigenvalues().min();
        if min < -1e-10 * m.trace().abs().max(scale) {
            return Err(Error::domain(format!(
                "noise covariance must be positive semi-definite (min eigenvalue {min})"
            )));
        }
    }
    Ok(())
}

/// `L` with `L Lᵀ = m` for a symmetric PSD `m`; tiny negative eigenvalues are clipped.
fn psd_factor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let sqrt = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    eig.eigenvectors * DMatrix::from_diagonal(&sqrt)
}

/// Validated training points and the Cholesky factor of `K_xx + Σ + jitter I`.
struct Conditioned {
    train: Vec<Point>,
    chol: Cholesky<f64, Dyn>,
}

fn condition<K: Kernel>(k: &K, params: &K::Params, prob: &RegressionProblem) -> Result<Conditioned> {
    let train = k.validate_points(&prob.train)?;
    let n = train.len();
    let mut a = k.gram_matrix(params, &train)? + prob.noise_matrix();
    for i in 0..n {
        a[(i, i)] += prob.jitter;
    }
    let chol = Cholesky::new(a)
        .ok_or_else(|| Error::Numerical("K_xx + Σ is not positive definite; add noise or jitter".into()))?;
    Ok(Conditioned { train, chol })
}

/// Posterior mean at `xtest`.
pub fn posterior_mean<K: Kernel>(
    k: &K,
    params: &K::Params,
    prob: &RegressionProblem,
    xtest: &[Point],
) -> Result<DVector<f64>> {
    Ok(posterior(k, params, prob, xtest)?.0)
}

/// Posterior covariance at `xtest`, symmetrized.
pub fn posterior_cov<K: Kernel>(
    k: &K,
    params: &K::Params,
    prob: &RegressionProblem,
    xtest: &[Point],
) -> Result<DMatrix<f64>> {
    Ok(posterior(k, params, prob, xtest)?.1)
}

/// Posterior mean and covariance sharing one factorization.
pub fn posterior<K: Kernel>(
    k: &K,
    params: &K::Params,
    prob: &RegressionProblem,
    xtest: &[Point],
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let prior = k.gram_matrix(params, xtest)?;
    if prob.train.is_empty() {
        return Ok((DVector::zeros(xtest.len()), prior));
    }
    let cond = condition(k, params, prob)?;
    let kxs = k.kernel_matrix(params, &cond.train, xtest)?;
    let mean = kxs.transpose() * cond.chol.solve(&prob.targets);
    let v = cond
        .chol
        .l()
        .solve_lower_triangular(&kxs)
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let cov = prior - v.transpose() * v;
    let cov = (&cov + cov.transpose()) * 0.5;
    Ok((mean, cov))
}

/// `num_samples × N_test` matrix of pathwise-conditioned posterior draws.
///
/// Prior draws come from `fm` on the joint set of training and test points; the
/// update uses the exact kernel matrices of `k`.
pub fn pathwise_sample<K: Kernel>(
    fm: &FeatureMap,
    k: &K,
    params: &K::Params,
    prob: &RegressionProblem,
    xtest: &[Point],
    spec: &SampleSpec,
) -> Result<DMatrix<f64>> {
    let n = prob.train.len();
    let joint: Vec<Point> = prob.train.iter().chain(xtest).cloned().collect();
    let prior = sample_prior(fm, &joint, spec)?;
    let prior_test = prior.columns(n, xtest.len()).into_owned();
    if n == 0 {
        return Ok(prior_test);
    }
    let cond = condition(k, params, prob)?;
    let prior_train = prior.columns(0, n).transpose();
    // y - f(x) - ε, one column per sample
    let mut residual = -prob.draw_noise(spec) - prior_train;
    for mut col in residual.column_iter_mut() {
        col += &prob.targets;
    }
    let kxs = k.kernel_matrix(params, &cond.train, xtest)?.transpose();
    let mut out = prior_test;
    for (s, r) in residual.column_iter().enumerate() {
        let update = &kxs * cond.chol.solve(&r.into_owned());
        let mut row = out.row_mut(s);
        row += update.transpose();
    }
    Ok(out)
}
