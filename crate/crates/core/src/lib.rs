//! # heavyeig
//!
//! Monte Carlo laboratory for the largest eigenvalues of sample covariance
//! matrices `XXᵀ` built from a `p × n` matrix `X` whose rows are independent
//! linear processes `X_it = Σ_j c_j Z_{i,t-j}` driven by regularly varying
//! noise with tail index `α ∈ (0, 4)`.
//!
//! As `n, p → ∞` the point process of the centered and scaled eigenvalues
//! `a_np⁻²(λ_i − n μ)` converges to a Poisson process with intensity
//! `ν(x, ∞) = x^{-α/2} (Σ_j c_j²)^{α/2}`, so the largest eigenvalue is
//! asymptotically Fréchet with parameter `α/2`. This crate simulates the
//! model, computes spectra and the diagonal-coupling diagnostics, and provides
//! the closed-form limit laws to compare against.
//!
//! ## Modules
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`rv_noise`] | noise families, exact survival functions, `a_m`, truncated moments |
//! | [`linproc`] | coefficient profiles, row filtering, latent-chain random coefficients |
//! | [`spectra`] | Gram matrices, top-k eigenvalues, order statistics, norms |
//! | [`limits`] | Poisson intensity, Fréchet / order-statistic CDFs, Γ-sum sampling |
//! | [`montecarlo`] | seeded experiments, KS, count statistics, large deviations |
//!
//! The linear algebra and limit laws are generic over the scalar type
//! (anything implementing [`Real`], i.e. `f32` or `f64`); the aliases below fix
//! the `f64` instantiation used by the simulation pipeline.

pub mod error;
pub mod limits;
pub mod linalg;
pub mod linproc;
pub mod montecarlo;
pub mod rv_noise;
pub mod scalar;
pub mod seed;
pub mod spectra;

pub use error::{Error, Result};
pub use scalar::Real;

pub use limits::LimitLaw;
pub use linproc::{CoefficientProfile, ProfileKind, RandomCoefficientModel};
pub use linalg::Matrix;
pub use montecarlo::{ExperimentConfig, ResultRow, ResultTable};
pub use rv_noise::{NoiseFamily, TailModel};
pub use spectra::SpectralSample;

/// Dense row-major matrix of `f64`.
pub type Matrix64 = linalg::Matrix<f64>;
/// Dense row-major matrix of `f32`.
pub type Matrix32 = linalg::Matrix<f32>;
/// Spectral summary in double precision.
pub type SpectralSample64 = spectra::SpectralSample<f64>;
/// Spectral summary in single precision.
pub type SpectralSample32 = spectra::SpectralSample<f32>;
/// Limit law in double precision.
pub type LimitLaw64 = limits::LimitLaw<f64>;
/// Limit law in single precision.
pub type LimitLaw32 = limits::LimitLaw<f32>;
