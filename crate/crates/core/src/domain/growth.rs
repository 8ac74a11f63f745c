//! Divergence detection under grid refinement.
//!
//! For a power singularity `|x - c|^(-beta)` in `n` dimensions the midpoint
//! sum behaves like `I + C h^(n - beta) + O(h^2)`, with `I` finite only when
//! `beta < n`. Successive differences of the sum therefore decay like
//! `h^(n - beta)` when the integral converges and grow when it diverges, so
//! the log-log slope of `|Delta Q|` against resolution estimates `beta - n`
//! directly. The raw slopes of `Q` itself are also reported, but they are
//! too flat near the critical exponent to separate the two cases.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::function::GridFunction;
use super::grid::{validate_ladder, Grid};
use super::symbolic::SymbolicFunction;
use crate::error::Result;
use crate::numerics::fit_loglog_slope;

/// Slopes within this distance of zero are reported as marginal.
pub const MARGINAL_SLOPE: f64 = 0.025;

/// Number of trailing increments used for the final slope.
const FIT_WINDOW: usize = 3;

/// Anything that can be sampled on a grid.
pub trait Field: Sync {
    fn sample_on(&self, grid: &Grid) -> Result<GridFunction>;
}

impl Field for SymbolicFunction {
    fn sample_on(&self, grid: &Grid) -> Result<GridFunction> {
        self.sample(grid)
    }
}

impl Field for GridFunction {
    /// Only defined on the function's own grid.
    fn sample_on(&self, grid: &Grid) -> Result<GridFunction> {
        if grid != self.grid() {
            return Err(crate::Error::GridMismatch);
        }
        Ok(self.clone())
    }
}

/// Classical derivative of a symbolic function, sampled off its singular set.
#[derive(Debug, Clone)]
pub struct ClassicalDerivative<'a> {
    pub function: &'a SymbolicFunction,
    pub alpha: Vec<usize>,
}

impl Field for ClassicalDerivative<'_> {
    fn sample_on(&self, grid: &Grid) -> Result<GridFunction> {
        self.function.sample_derivative(&self.alpha, grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Integrable,
    Divergent,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub p: f64,
    /// Nodes along the first axis per rung.
    pub resolutions: Vec<usize>,
    /// `integrate(|f|^p)` per rung, or `max |f|` for `p = inf`.
    pub values: Vec<f64>,
    /// Log-log slopes of `values` between consecutive rungs.
    pub norm_slopes: Vec<f64>,
    /// Log-log slopes of successive increments of `values`.
    pub increment_slopes: Vec<f64>,
    /// Fitted increment slope over the finest rungs; `None` when the
    /// increments vanish (the sum is resolution independent).
    pub slope: Option<f64>,
    pub verdict: Verdict,
}

/// Classifies `f` as `p`-integrable or not from its behaviour on `ladder`.
pub fn norm_growth(f: &dyn Field, p: f64, ladder: &[Grid]) -> Result<GrowthReport> {
    validate_ladder(ladder)?;
    let values = ladder
        .par_iter()
        .map(|g| f.sample_on(g)?.lp_power_integral(p))
        .collect::<Result<Vec<f64>>>()?;
    let resolution: Vec<f64> = ladder.iter().map(|g| 1.0 / g.max_spacing()).collect();

    let norm_slopes = values
        .windows(2)
        .zip(resolution.windows(2))
        .map(|(q, r)| {
            if q[0] > 0.0 && q[1] > 0.0 {
                (q[1] / q[0]).ln() / (r[1] / r[0]).ln()
            } else {
                0.0
            }
        })
        .collect();

    let last = *values.last().unwrap();
    let floor = 1e-12 * (1.0 + last.abs());
    let increments: Vec<f64> = values.windows(2).map(|q| (q[1] - q[0]).abs()).collect();
    // increment j spans rungs j and j + 1; index it by the coarser rung
    let increment_slopes = increments
        .windows(2)
        .zip(resolution.windows(2))
        .map(|(d, r)| {
            if d[0] > floor && d[1] > floor {
                (d[1] / d[0]).ln() / (r[1] / r[0]).ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();

    let start = increments.len().saturating_sub(FIT_WINDOW);
    let slope = if increments.last().is_none_or(|&d| d <= floor) {
        None
    } else {
        let (xs, ys): (Vec<f64>, Vec<f64>) = (start..increments.len())
            .filter(|&j| increments[j] > floor)
            .map(|j| (resolution[j], increments[j]))
            .unzip();
        fit_loglog_slope(&xs, &ys)
    };
    let verdict = match slope {
        None => Verdict::Integrable,
        Some(s) if s < -MARGINAL_SLOPE => Verdict::Integrable,
        Some(s) if s > MARGINAL_SLOPE => Verdict::Divergent,
        Some(_) => Verdict::Marginal,
    };
    Ok(GrowthReport {
        p,
        resolutions: ladder.iter().map(|g| g.nodes_per_axis()[0]).collect(),
        values,
        norm_slopes,
        increment_slopes,
        slope,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;

    fn ladder() -> Vec<Grid> {
        Grid::dyadic_ladder(&BoxDomain::interval(-1.0, 1.0).unwrap(), 7, 13).unwrap()
    }

    fn verdict(a: f64, p: f64) -> GrowthReport {
        norm_growth(&SymbolicFunction::power(&[0.0], a), p, &ladder()).unwrap()
    }

    #[test]
    fn power_verdicts_follow_the_criterion() {
        assert_eq!(verdict(0.3, 2.0).verdict, Verdict::Integrable);
        assert_eq!(verdict(0.6, 2.0).verdict, Verdict::Divergent);
        assert_eq!(verdict(0.45, 2.0).verdict, Verdict::Integrable);
        assert_eq!(verdict(0.55, 2.0).verdict, Verdict::Divergent);
    }

    #[test]
    fn slope_estimates_distance_to_critical_exponent() {
        for (a, p) in [(0.3, 2.0), (0.7, 2.0), (0.2, 1.0), (0.8, 1.5)] {
            let s = verdict(a, p).slope.unwrap();
            assert!((s - (a * p - 1.0)).abs() < 0.01, "a={a} p={p} slope={s}");
        }
    }

    #[test]
    fn constant_is_resolution_independent() {
        let r = norm_growth(&SymbolicFunction::constant(1.0), 3.0, &ladder()).unwrap();
        assert_eq!(r.slope, None);
        assert_eq!(r.verdict, Verdict::Integrable);
        assert!(r.norm_slopes.iter().all(|s| s.abs() < 1e-12));
    }

    #[test]
    fn sup_norm_of_power_diverges() {
        assert_eq!(verdict(0.2, f64::INFINITY).verdict, Verdict::Divergent);
        let abs = norm_growth(&SymbolicFunction::abs(), f64::INFINITY, &ladder()).unwrap();
        assert_eq!(abs.verdict, Verdict::Integrable);
    }

    #[test]
    fn two_dimensional_threshold_is_two() {
        let d = BoxDomain::square(-1.0, 1.0).unwrap();
        let ladder = Grid::dyadic_ladder(&d, 5, 9).unwrap();
        let below = norm_growth(&SymbolicFunction::power(&[0.0, 0.0], 0.8), 2.0, &ladder).unwrap();
        let above = norm_growth(&SymbolicFunction::power(&[0.0, 0.0], 1.2), 2.0, &ladder).unwrap();
        assert_eq!(below.verdict, Verdict::Integrable);
        assert_eq!(above.verdict, Verdict::Divergent);
    }

    #[test]
    fn short_ladder_rejected() {
        let short = &ladder()[..3];
        assert!(norm_growth(&SymbolicFunction::abs(), 2.0, short).is_err());
    }
}
