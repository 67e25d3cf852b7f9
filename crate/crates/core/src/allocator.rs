//! Closed-form portfolio selection when the covariance is `S G_N S`.
//!
//! The mean-variance optimum `Sigma^{-1} alpha / (2 lambda)` reduces to
//! subtracting a damped cross-sectional mean from the alpha Z-scores. The
//! multivariate-Laplace (negative exponential utility) optimum is the same
//! vector rescaled by `Omega(Z)`, where `Z^2` is the Mahalanobis length of
//! alpha.
//!
//! Note that the Laplace `Omega` tends to 2, not 1, as `Z -> 0`.

use serde::Serialize;

use crate::cross_section::IsotropicModel;
use crate::error::{Error, Result};

/// Below this `u = Z^2 / (N + 1)` the Laplace factor is evaluated by series.
pub const OMEGA_SERIES_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaVector {
    alphas: Vec<f64>,
    z_scores: Vec<f64>,
}

impl AlphaVector {
    /// Expected per-period returns and their Z-scores `alpha_i / sigma_i`.
    pub fn new(alphas: Vec<f64>, sigmas: &[f64]) -> Result<Self> {
        if alphas.len() != sigmas.len() {
            return Err(Error::DimensionMismatch {
                expected: sigmas.len(),
                got: alphas.len(),
            });
        }
        if let Some(a) = alphas.iter().find(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite alpha {a}")));
        }
        let z_scores = alphas.iter().zip(sigmas).map(|(a, s)| a / s).collect();
        Ok(Self { alphas, z_scores })
    }

    pub fn for_model(alphas: Vec<f64>, model: &IsotropicModel) -> Result<Self> {
        Self::new(alphas, model.sigmas())
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn z_scores(&self) -> &[f64] {
        &self.z_scores
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationResult {
    pub weights: Vec<f64>,
    pub lambda: f64,
    pub z_sq: f64,
    /// 1 for mean-variance.
    pub omega: f64,
    pub centering: f64,
}

/// `rho N / (1 + (N-1) rho)`: how much of the mean Z-score is subtracted.
pub fn centering_factor(rho: f64, n: usize) -> f64 {
    let nf = n as f64;
    rho * nf / (1.0 + (nf - 1.0) * rho)
}

fn check(model: &IsotropicModel, alpha: &AlphaVector) -> Result<()> {
    if alpha.len() != model.n() {
        return Err(Error::DimensionMismatch {
            expected: model.n(),
            got: alpha.len(),
        });
    }
    let corr = model.correlation();
    if corr.is_singular() {
        return Err(Error::Singular {
            n: corr.n(),
            rho: corr.rho(),
        });
    }
    Ok(())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// `alpha^T Sigma^{-1} alpha
///  = N / (1 - rho) (mean(z^2) - rho N / (1 + (N-1) rho) mean(z)^2)`,
/// clamped at zero against rounding.
pub fn mahalanobis_z_sq(model: &IsotropicModel, alpha: &AlphaVector) -> Result<f64> {
    check(model, alpha)?;
    let z = alpha.z_scores();
    let n = z.len();
    let rho = model.rho();
    let zbar = mean(z);
    let z2bar = z.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let q = n as f64 / (1.0 - rho) * (z2bar - centering_factor(rho, n) * zbar * zbar);
    Ok(q.max(0.0))
}

/// Mean-variance weights
/// `S^{-1} (z - c mean(z) 1) / (2 lambda (1 - rho))` with `c` the
/// [`centering_factor`].
pub fn mvo_isotropic(
    model: &IsotropicModel,
    alpha: &AlphaVector,
    lambda: f64,
) -> Result<AllocationResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "risk aversion must be positive and finite, got {lambda}"
        )));
    }
    check(model, alpha)?;
    let z = alpha.z_scores();
    let rho = model.rho();
    let centering = centering_factor(rho, z.len());
    let shift = centering * mean(z);
    let scale = 2.0 * lambda * (1.0 - rho);
    let weights = z
        .iter()
        .zip(model.sigmas())
        .map(|(zi, s)| (zi - shift) / (s * scale))
        .collect();
    Ok(AllocationResult {
        weights,
        lambda,
        z_sq: mahalanobis_z_sq(model, alpha)?,
        omega: 1.0,
        centering,
    })
}

/// Multivariate-Laplace factor `(sqrt(1 + 4u) - 1) / u` with
/// `u = Z^2 / (N + 1)`, evaluated as `4 / (1 + sqrt(1 + 4u))` and by its
/// Taylor series `2 - 2u + 4u^2 - 10u^3` near zero.
pub fn laplace_omega(z_sq: f64, n: usize) -> f64 {
    let u = z_sq.max(0.0) / (n as f64 + 1.0);
    if u < OMEGA_SERIES_THRESHOLD {
        2.0 + u * (-2.0 + u * (4.0 - 10.0 * u))
    } else {
        4.0 / (1.0 + (1.0 + 4.0 * u).sqrt())
    }
}

/// The factor exactly as displayed, `(sqrt(1 + 4u) - 1) / u`. Loses
/// precision for small `u` and is undefined at zero.
pub fn laplace_omega_literal(z_sq: f64, n: usize) -> f64 {
    let u = z_sq / (n as f64 + 1.0);
    ((1.0 + 4.0 * u).sqrt() - 1.0) / u
}

/// Utility-dependent rescaling of the mean-variance solution.
pub trait ScalingFunction {
    fn omega(&self, z_sq: f64, n: usize) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Gaussian;

impl ScalingFunction for Gaussian {
    fn omega(&self, _z_sq: f64, _n: usize) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Laplace;

impl ScalingFunction for Laplace {
    fn omega(&self, z_sq: f64, n: usize) -> f64 {
        laplace_omega(z_sq, n)
    }
}

/// Mean-variance weights multiplied by `scaling.omega(Z^2, N)`.
pub fn scaled_allocation<F: ScalingFunction + ?Sized>(
    model: &IsotropicModel,
    alpha: &AlphaVector,
    lambda: f64,
    scaling: &F,
) -> Result<AllocationResult> {
    let mut res = mvo_isotropic(model, alpha, lambda)?;
    let omega = scaling.omega(res.z_sq, model.n());
    res.weights.iter_mut().for_each(|w| *w *= omega);
    res.omega = omega;
    Ok(res)
}

pub fn laplace_allocation(
    model: &IsotropicModel,
    alpha: &AlphaVector,
    lambda: f64,
) -> Result<AllocationResult> {
    scaled_allocation(model, alpha, lambda, &Laplace)
}
