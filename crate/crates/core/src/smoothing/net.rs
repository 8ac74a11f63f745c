use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::Kernel;
use super::mollifier::{convolve, MollifierElement};
use crate::domain::GridFunction;
use crate::error::{Error, Result};
use crate::numerics::fit_loglog_slope;

/// A decreasing schedule of scales for one kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothNet {
    kernel: Kernel,
    epsilons: Vec<f64>,
}

impl SmoothNet {
    pub fn new(kernel: Kernel, epsilons: Vec<f64>) -> Result<Self> {
        if epsilons.is_empty() {
            return Err(Error::InvalidParameter("empty epsilon schedule".into()));
        }
        if epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter(format!(
                "epsilon schedule {epsilons:?} is not strictly decreasing"
            )));
        }
        for &e in &epsilons {
            MollifierElement::new(kernel.clone(), e)?;
        }
        Ok(Self { kernel, epsilons })
    }

    /// `eps_j = eps_0 2^(-j)` for `j < count`.
    pub fn geometric(kernel: Kernel, epsilon0: f64, count: usize) -> Result<Self> {
        let eps = (0..count)
            .map(|j| epsilon0 * 0.5f64.powi(j as i32))
            .collect();
        Self::new(kernel, eps)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn members(&self) -> impl Iterator<Item = MollifierElement> + '_ {
        self.epsilons.iter().map(|&e| {
            MollifierElement::new(self.kernel.clone(), e).expect("validated at construction")
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetRow {
    pub epsilon: f64,
    pub error: f64,
    pub trusted_fraction: f64,
}

/// `||f_eps - f||_p` over the eps-eroded interior, one row per net member in
/// decreasing eps order.
pub fn net_convergence(net: &SmoothNet, f: &GridFunction, p: f64) -> Result<Vec<NetRow>> {
    let members: Vec<MollifierElement> = net.members().collect();
    members
        .par_iter()
        .map(|m| {
            let smoothed = convolve(m, f)?;
            Ok(NetRow {
                epsilon: m.epsilon(),
                error: smoothed.distance(f, p)?,
                trusted_fraction: smoothed.trusted_fraction(),
            })
        })
        .collect()
}

/// Fitted log-log slope of error against epsilon.
pub fn convergence_slope(rows: &[NetRow]) -> Option<f64> {
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let err: Vec<f64> = rows.iter().map(|r| r.error).collect();
    fit_loglog_slope(&eps, &err)
}
