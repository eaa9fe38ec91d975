//! Heat and Matérn kernels on discrete-spectrum spaces: circles, hyperspheres,
//! SU(2), weighted graphs, triangle meshes and their products.
//!
//! Kernels are assembled from Laplacian eigen-levels,
//! `k(x, x') = (σ²/C) Σ_l Φ(λ_l) G_l(x, x')`, and come with finite feature
//! maps for prior sampling and with exact and pathwise GP regression.
//!
//! ```
//! use geokernels::{Hypersphere, Kernel, MaternGeometricKernel, Point, Space};
//!
//! let kernel = MaternGeometricKernel::new(Space::from(Hypersphere::new(2, 30).unwrap()));
//! let params = kernel.init_params();
//! let xs = vec![
//!     Point::Vector(vec![0.0, 0.0, 1.0]),
//!     Point::Vector(vec![0.0, 1.0, 0.0]),
//! ];
//! let k = kernel.gram_matrix(&params, &xs).unwrap();
//! assert!((k[(0, 1)] - 0.356).abs() < 1e-3);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod features;
pub mod gp;
pub mod io;
pub mod kernels;
pub mod spaces;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use features::{default_feature_map, feature_matrix, product_feature_map, sample_prior, FeatureMap, SampleSpec};
pub use gp::{pathwise_sample, posterior, posterior_cov, posterior_mean, Noise, RegressionProblem};
pub use kernels::{Kernel, MaternGeometricKernel, ProductGeometricKernel, ProductParams};
pub use spaces::{
    Circle, DiscreteSpectrumSpace, GraphData, GraphSpace, Hypersphere, Level, MeshData, MeshSpace, Point, ProductSpace,
    Space, Su2,
};
pub use special::gegenbauer_eval;
pub use spectral::{
    evaluate_kernel, matern_relative_weight, normalization_constant, phi_heat, phi_matern, relative_spectral_weights,
    spectral_weights, KernelParams, SpectralWeights,
};
