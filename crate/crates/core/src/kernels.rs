//! Similarity kernels that gate the repulsive modulation term.
//!
//! A kernel maps a personal best `p` and the global best `g` to a value in
//! `[0, 1]` that is 1 when they coincide and decays with their distance. Three
//! families are available:
//!
//! * [`KernelFamily::GaussianDirect`]: `exp(-|p - g|^2 / (2 sigma^2))`.
//! * [`KernelFamily::KlExp`]: `exp(-alpha * KL(P || Q))` where `P` and `Q` are
//!   isotropic Gaussians of bandwidth `sigma_k` centred on `p` and `g`. With
//!   `alpha = sigma_k^2 / sigma^2` this is the same function as the Gaussian
//!   kernel.
//! * [`KernelFamily::HellingerExp`]: `exp(-alpha * H^2(P, Q))` using the
//!   squared Hellinger distance, which saturates at 1 for distant points.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KernelError {
    #[error("{name} must be strictly positive and finite, got {value}")]
    NonPositiveBandwidth { name: &'static str, value: f64 },
    #[error("vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    #[serde(rename = "gaussian")]
    GaussianDirect,
    #[serde(rename = "kl")]
    KlExp,
    #[serde(rename = "hellinger")]
    HellingerExp,
}

impl KernelFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelFamily::GaussianDirect => "gaussian",
            KernelFamily::KlExp => "kl",
            KernelFamily::HellingerExp => "hellinger",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(KernelFamily::GaussianDirect),
            "kl" => Ok(KernelFamily::KlExp),
            "hellinger" => Ok(KernelFamily::HellingerExp),
            other => Err(format!(
                "unknown kernel `{other}` (expected gaussian, kl or hellinger)"
            )),
        }
    }
}

/// A fully parameterized kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Bandwidth of the direct Gaussian kernel.
    pub sigma: f64,
    /// Bandwidth of the Gaussian embedding used by the divergence families.
    pub sigma_k: f64,
    /// Decay rate applied to the divergence.
    pub alpha: f64,
}

/// Fraction of the box diagonal used as the default bandwidth.
pub const DEFAULT_BETA: f64 = 0.1;

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Result<Self, KernelError> {
        Self::new(KernelFamily::GaussianDirect, sigma, sigma, 1.0)
    }

    pub fn new(
        family: KernelFamily,
        sigma: f64,
        sigma_k: f64,
        alpha: f64,
    ) -> Result<Self, KernelError> {
        let spec = Self {
            family,
            sigma,
            sigma_k,
            alpha,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Kernel whose bandwidth is `beta` times the diagonal `|ub - lb|`.
    /// The divergence families embed with `sigma_k = sigma`, so `KlExp` with
    /// `alpha = 1` reproduces the Gaussian kernel.
    pub fn scaled_to_box(
        family: KernelFamily,
        beta: f64,
        alpha: f64,
        lb: &[f64],
        ub: &[f64],
    ) -> Result<Self, KernelError> {
        let sigma = beta * box_diagonal(lb, ub);
        Self::new(family, sigma, sigma, alpha)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        check_bandwidth("sigma", self.sigma)?;
        check_bandwidth("sigma_k", self.sigma_k)?;
        check_bandwidth("alpha", self.alpha)
    }

    /// Kernel value from a precomputed squared distance `|p - g|^2`.
    #[inline]
    pub fn value_from_sq_distance(&self, dist_sq: f64) -> f64 {
        match self.family {
            KernelFamily::GaussianDirect => (-dist_sq / (2.0 * self.sigma * self.sigma)).exp(),
            KernelFamily::KlExp => {
                (-self.alpha * (dist_sq / (2.0 * self.sigma_k * self.sigma_k))).exp()
            }
            KernelFamily::HellingerExp => {
                let h2 = 1.0 - (-dist_sq / (8.0 * self.sigma_k * self.sigma_k)).exp();
                (-self.alpha * h2).exp()
            }
        }
    }
}

/// Euclidean length of `ub - lb`.
pub fn box_diagonal(lb: &[f64], ub: &[f64]) -> f64 {
    lb.iter()
        .zip(ub)
        .map(|(l, u)| (u - l) * (u - l))
        .sum::<f64>()
        .sqrt()
}

fn check_bandwidth(name: &'static str, value: f64) -> Result<(), KernelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(KernelError::NonPositiveBandwidth { name, value })
    }
}

fn sq_distance(p: &[f64], g: &[f64]) -> Result<f64, KernelError> {
    if p.len() != g.len() {
        return Err(KernelError::LengthMismatch {
            left: p.len(),
            right: g.len(),
        });
    }
    Ok(p.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum())
}

pub fn gaussian_kernel(p: &[f64], g: &[f64], sigma: f64) -> Result<f64, KernelError> {
    check_bandwidth("sigma", sigma)?;
    let d2 = sq_distance(p, g)?;
    Ok((-d2 / (2.0 * sigma * sigma)).exp())
}

/// `KL(N(p, sigma_k^2 I) || N(g, sigma_k^2 I)) = |p - g|^2 / (2 sigma_k^2)`.
pub fn kl_isotropic_gaussians(p: &[f64], g: &[f64], sigma_k: f64) -> Result<f64, KernelError> {
    check_bandwidth("sigma_k", sigma_k)?;
    let d2 = sq_distance(p, g)?;
    Ok(d2 / (2.0 * sigma_k * sigma_k))
}

/// `H^2 = 1 - exp(-|p - g|^2 / (8 sigma_k^2))` for equal-covariance
/// isotropic Gaussians.
pub fn hellinger_sq_isotropic_gaussians(
    p: &[f64],
    g: &[f64],
    sigma_k: f64,
) -> Result<f64, KernelError> {
    check_bandwidth("sigma_k", sigma_k)?;
    let d2 = sq_distance(p, g)?;
    Ok(1.0 - (-d2 / (8.0 * sigma_k * sigma_k)).exp())
}

pub fn kernel_value(spec: &KernelSpec, p: &[f64], g: &[f64]) -> Result<f64, KernelError> {
    spec.validate()?;
    match spec.family {
        KernelFamily::GaussianDirect => gaussian_kernel(p, g, spec.sigma),
        KernelFamily::KlExp => Ok((-spec.alpha * kl_isotropic_gaussians(p, g, spec.sigma_k)?).exp()),
        KernelFamily::HellingerExp => {
            Ok((-spec.alpha * hellinger_sq_isotropic_gaussians(p, g, spec.sigma_k)?).exp())
        }
    }
}
