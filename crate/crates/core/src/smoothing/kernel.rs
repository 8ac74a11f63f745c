use serde::{Deserialize, Serialize};

use crate::domain::radial;
use crate::error::{Error, Result};

/// Radial nodes used to compute the normalization constant.
const NORMALIZATION_NODES: usize = 200_000;

/// The standard bump `C exp(-1 / (1 - |y|^2))` on the open unit ball,
/// normalized to unit mass in dimension `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    dim: usize,
    normalization: f64,
}

/// Midpoint rule for `int_0^1 g(r) dr`.
fn radial_quadrature(g: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / NORMALIZATION_NODES as f64;
    (0..NORMALIZATION_NODES)
        .map(|j| g((j as f64 + 0.5) * h))
        .sum::<f64>()
        * h
}

fn bare(r: f64) -> f64 {
    radial::bump_derivs(r * r, 1.0)[0]
}

impl Kernel {
    pub fn standard(dim: usize) -> Result<Self> {
        let mass = match dim {
            1 => 2.0 * radial_quadrature(bare),
            2 => 2.0 * std::f64::consts::PI * radial_quadrature(|r| r * bare(r)),
            _ => {
                return Err(Error::InvalidDomain(format!(
                    "kernel dimension {dim} not in {{1, 2}}"
                )))
            }
        };
        Ok(Self {
            dim,
            normalization: 1.0 / mass,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The constant `C`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn profile(&self, y: &[f64]) -> f64 {
        let s: f64 = y.iter().map(|v| v * v).sum();
        self.normalization * radial::bump_derivs(s, 1.0)[0]
    }

    /// `D_alpha` of the profile, `|alpha| <= 3`.
    pub fn profile_derivative(&self, alpha: &[usize], y: &[f64]) -> f64 {
        let s: f64 = y.iter().map(|v| v * v).sum();
        let d = radial::bump_derivs(s, 1.0);
        self.normalization * radial::partial(&d, y, &radial::axes_of(alpha))
    }

    /// `phi_eps(x) = eps^(-n) phi(x / eps)`.
    pub fn scaled(&self, epsilon: f64, x: &[f64]) -> f64 {
        self.scaled_derivative(&[], epsilon, x)
    }

    /// `D_alpha phi_eps(x) = eps^(-n - |alpha|) (D_alpha phi)(x / eps)`.
    pub fn scaled_derivative(&self, alpha: &[usize], epsilon: f64, x: &[f64]) -> f64 {
        let order: usize = alpha.iter().sum();
        let y: Vec<f64> = x.iter().map(|v| v / epsilon).collect();
        epsilon.powi(-((self.dim + order) as i32)) * self.profile_derivative(alpha, &y)
    }

    /// `int |D_alpha phi|` over the unit ball, by fine quadrature.
    pub fn derivative_mass(&self, alpha: &[usize]) -> f64 {
        match self.dim {
            1 => 2.0 * radial_quadrature(|r| self.profile_derivative(alpha, &[r]).abs()),
            _ => {
                // mixed partials are not radial; use a tensor midpoint rule
                let n = 1000;
                let h = 2.0 / n as f64;
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let y = [-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h];
                        acc += self.profile_derivative(alpha, &y).abs();
                    }
                }
                acc * h * h
            }
        }
    }
}
