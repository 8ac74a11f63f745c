use serde::{Deserialize, Serialize};

use super::derivative::estimate_weak_derivative;
use super::multi_index::MultiIndex;
use crate::domain::{GridFunction, SymbolicFunction};
use crate::error::{Error, Result};
use crate::smoothing::{convolve, MollifierElement};

/// Where the derivatives `D_alpha f` come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    /// Explicit candidates for every `1 <= |alpha| <= k`.
    Supplied(Vec<(MultiIndex, GridFunction)>),
    /// `D_alpha (phi_eps * f)`; every term is then measured on the eps-eroded
    /// interior, including `alpha = 0`.
    Estimated { epsilon: f64 },
    /// Classical derivatives of the symbolic function the samples came from,
    /// evaluated off the singular set.
    Analytic(SymbolicFunction),
}

impl DerivativeSource {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Supplied(_) => "supplied",
            Self::Estimated { .. } => "estimated",
            Self::Analytic(_) => "analytic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevTerm {
    pub alpha: MultiIndex,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevReport {
    pub k: usize,
    pub p: f64,
    pub source: String,
    pub terms: Vec<SobolevTerm>,
    pub total: f64,
}

/// Combines per-multi-index norms into `||f||_{k,p}`: the `l^p` sum for
/// finite `p`, the plain sum of sups for `p = inf`.
pub fn combine_norms(norms: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        norms.iter().sum()
    } else {
        norms.iter().map(|n| n.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `||f||_{k,p}` with derivatives from `source`.
pub fn sobolev_norm(
    f: &GridFunction,
    k: usize,
    p: f64,
    source: &DerivativeSource,
) -> Result<SobolevReport> {
    let grid = f.grid();
    let alphas = MultiIndex::up_to(grid.dim(), k)?;
    let mask = match source {
        DerivativeSource::Estimated { epsilon } => Some(grid.eroded_mask(*epsilon)),
        _ => None,
    };
    let norm_of = |g: &GridFunction| match &mask {
        Some(m) => g.lp_norm_masked(p, m),
        None => g.lp_norm(p),
    };
    let mut terms = Vec::with_capacity(alphas.len());
    for alpha in alphas {
        let unavailable = |reason: &str| Error::DerivativeUnavailable {
            alpha: alpha.components().to_vec(),
            reason: reason.into(),
        };
        let norm = if alpha.order() == 0 {
            norm_of(f)?
        } else {
            match source {
                DerivativeSource::Supplied(list) => {
                    let (_, u) = list
                        .iter()
                        .find(|(a, _)| *a == alpha)
                        .ok_or_else(|| unavailable("not supplied"))?;
                    if u.grid() != grid {
                        return Err(Error::GridMismatch);
                    }
                    norm_of(u)?
                }
                DerivativeSource::Estimated { epsilon } => {
                    let est =
                        estimate_weak_derivative(f, &alpha, *epsilon).map_err(|e| match e {
                            Error::EmptyTrustedInterior { .. } => {
                                unavailable("empty trusted interior")
                            }
                            other => other,
                        })?;
                    norm_of(&est.function)?
                }
                DerivativeSource::Analytic(sym) => {
                    norm_of(&sym.sample_derivative(alpha.components(), grid)?)?
                }
            }
        };
        terms.push(SobolevTerm { alpha, norm });
    }
    let norms: Vec<f64> = terms.iter().map(|t| t.norm).collect();
    Ok(SobolevReport {
        k,
        p,
        source: source.name().into(),
        total: combine_norms(&norms, p),
        terms,
    })
}

/// `||phi_eps * f - f||_{k,p}` over the eps-eroded interior, comparing
/// `D_alpha (phi_eps * f)` against the supplied weak derivatives.
pub fn mollified_sobolev_distance(
    f: &GridFunction,
    derivatives: &[(MultiIndex, GridFunction)],
    k: usize,
    p: f64,
    epsilon: f64,
) -> Result<f64> {
    let grid = f.grid();
    let m = MollifierElement::standard(grid.dim(), epsilon)?;
    let mut norms = Vec::new();
    for alpha in MultiIndex::up_to(grid.dim(), k)? {
        if alpha.order() == 0 {
            norms.push(convolve(&m, f)?.distance(f, p)?);
            continue;
        }
        let (_, u) = derivatives
            .iter()
            .find(|(a, _)| *a == alpha)
            .ok_or_else(|| Error::DerivativeUnavailable {
                alpha: alpha.components().to_vec(),
                reason: "not supplied".into(),
            })?;
        norms.push(estimate_weak_derivative(f, &alpha, epsilon)?.distance(u, p)?);
    }
    Ok(combine_norms(&norms, p))
}
