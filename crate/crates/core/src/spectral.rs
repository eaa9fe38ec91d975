//! Spectral weight functions and assembly of kernel values from per-level sums.
//!
//! Every kernel in this crate has the form
//!
//! ```text
//! k(x, x') = (σ² / C) Σ_l Φ(λ_l) G_l(x, x')
//! ```
//!
//! where `G_l` is the level sum of eigenfunction products and `Φ` is either the
//! heat weight `exp(-κ²λ/2)` or the Matérn weight `(2ν/κ² + λ)^{-(ν + n/2)}`.
//! The constant `C` makes the measure-averaged variance equal to σ².

use crate::error::{Error, Result};

/// Smoothness, lengthscale and amplitude of a heat or Matérn kernel.
///
/// `nu = f64::INFINITY` selects the heat kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub nu: f64,
    pub kappa: f64,
    pub sigma2: f64,
}

impl KernelParams {
    pub fn new(nu: f64, kappa: f64, sigma2: f64) -> Result<Self> {
        let params = KernelParams { nu, kappa, sigma2 };
        params.validate()?;
        Ok(params)
    }

    /// Heat kernel parameters (`nu = ∞`).
    pub fn heat(kappa: f64, sigma2: f64) -> Result<Self> {
        Self::new(f64::INFINITY, kappa, sigma2)
    }

    pub fn is_heat(&self) -> bool {
        self.nu == f64::INFINITY
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::domain(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::domain(format!(
                "lengthscale must be positive and finite, got {}",
                self.kappa
            )));
        }
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::domain(format!(
                "amplitude must be positive and finite, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }

    pub fn with_sigma2(self, sigma2: f64) -> Self {
        KernelParams { sigma2, ..self }
    }
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            nu: 2.5,
            kappa: 1.0,
            sigma2: 1.0,
        }
    }
}

/// Heat weight `exp(-κ²λ/2)`.
pub fn phi_heat(lambda: f64, kappa: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("eigenvalue must be nonnegative, got {lambda}")));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain(format!("lengthscale must be positive, got {kappa}")));
    }
    Ok((-0.5 * kappa * kappa * lambda).exp())
}

/// Matérn weight `(2ν/κ² + λ)^{-(ν + n/2)}`.
///
/// This is the gamma-mixture integral of heat weights with the factor
/// `Γ(ν + n/2)` removed; it cancels in the normalization. For large `ν` the
/// absolute value underflows; kernels use [`matern_relative_weight`].
pub fn phi_matern(lambda: f64, nu: f64, kappa: f64, n_dim: usize) -> Result<f64> {
    check_matern(lambda, nu, kappa)?;
    let beta = 2.0 * nu / (kappa * kappa);
    Ok((beta + lambda).powf(-(nu + 0.5 * n_dim as f64)))
}

/// `Φ(λ) / Φ(0) = (1 + λκ²/(2ν))^{-(ν + n/2)}`, finite for any `ν`.
pub fn matern_relative_weight(lambda: f64, nu: f64, kappa: f64, n_dim: usize) -> Result<f64> {
    check_matern(lambda, nu, kappa)?;
    let beta = 2.0 * nu / (kappa * kappa);
    Ok((-(nu + 0.5 * n_dim as f64) * (lambda / beta).ln_1p()).exp())
}

fn check_matern(lambda: f64, nu: f64, kappa: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("eigenvalue must be nonnegative, got {lambda}")));
    }
    if nu == f64::INFINITY {
        return Err(Error::domain("nu = inf must use the heat weight"));
    }
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("nu must be positive, got {nu}")));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain(format!("lengthscale must be positive, got {kappa}")));
    }
    Ok(())
}

/// Per-level weights `Φ(λ_l)` and the normalization constant `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralWeights {
    pub weights: Vec<f64>,
    pub normalization: f64,
}

impl SpectralWeights {
    /// Combined per-level coefficients `σ² Φ(λ_l) / C`.
    pub fn coefficients(&self, sigma2: f64) -> Vec<f64> {
        let scale = sigma2 / self.normalization;
        self.weights.iter().map(|w| w * scale).collect()
    }
}

/// Unnormalized weights for the given eigenvalues; `normalization` is left at 1.
pub fn spectral_weights(eigenvalues: &[f64], params: &KernelParams, n_dim: usize) -> Result<SpectralWeights> {
    weights_with(eigenvalues, params, n_dim, phi_matern)
}

/// Weights divided by `Φ(0)`: same kernel after normalization, but free of the
/// underflow that `(2ν/κ²)^{-(ν+n/2)}` hits for large `ν`.
pub fn relative_spectral_weights(eigenvalues: &[f64], params: &KernelParams, n_dim: usize) -> Result<SpectralWeights> {
    weights_with(eigenvalues, params, n_dim, matern_relative_weight)
}

fn weights_with(
    eigenvalues: &[f64],
    params: &KernelParams,
    n_dim: usize,
    matern: fn(f64, f64, f64, usize) -> Result<f64>,
) -> Result<SpectralWeights> {
    if eigenvalues.is_empty() {
        return Err(Error::domain("no spectral levels"));
    }
    params.validate()?;
    let weights = eigenvalues
        .iter()
        .map(|&lambda| {
            if params.is_heat() {
                phi_heat(lambda, params.kappa)
            } else {
                matern(lambda, params.nu, params.kappa, n_dim)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralWeights {
        weights,
        normalization: 1.0,
    })
}

/// `C = Σ_l w_l · E[G_l(x, x)]`, the expectation taken over the space's
/// variance-probe measure.
pub fn normalization_constant(weights: &[f64], mean_level_diagonal: &[f64]) -> Result<f64> {
    if weights.len() != mean_level_diagonal.len() {
        return Err(Error::ShapeMismatch {
            expected: weights.len(),
            found: mean_level_diagonal.len(),
        });
    }
    let c: f64 = weights.iter().zip(mean_level_diagonal).map(|(w, g)| w * g).sum();
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Numerical(format!(
            "normalization constant is not positive and finite: {c}"
        )));
    }
    Ok(c)
}

/// `(σ²/C) Σ_l w_l g_l`.
pub fn evaluate_kernel(weights: &SpectralWeights, sigma2: f64, level_sums: &[f64]) -> Result<f64> {
    if level_sums.len() != weights.weights.len() {
        return Err(Error::ShapeMismatch {
            expected: weights.weights.len(),
            found: level_sums.len(),
        });
    }
    let s: f64 = weights.weights.iter().zip(level_sums).map(|(w, g)| w * g).sum();
    Ok(sigma2 / weights.normalization * s)
}
