use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tables::GroupoidTables;
use crate::error::{Error, Result};

/// Finite Haar system: a positive weight per arrow, read as `μ^{t(γ)}(γ)`,
/// a probability vector `ν` on objects and the modular function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarSystem {
    /// Density against counting measure on each target fibre.
    pub weights: Vec<f64>,
    pub base: Vec<f64>,
    pub modular: Vec<f64>,
}

impl HaarSystem {
    /// Counting measure on every fibre, uniform `ν`.
    pub fn counting(g: &GroupoidTables) -> Self {
        Self::constant(g, 1.0).expect("unit weights are valid")
    }

    /// The same weight `c` on every arrow, uniform `ν`.
    pub fn constant(g: &GroupoidTables, c: f64) -> Result<Self> {
        Self::new(g, vec![c; g.arrow_count()], uniform(g.object_count()))
    }

    /// `μ^f ≡ c_f` on the fibre of `f`. Invariance is not implied unless the
    /// constants agree across objects joined by an arrow.
    pub fn per_object(g: &GroupoidTables, constants: &[f64]) -> Result<Self> {
        if constants.len() != g.object_count() {
            return Err(Error::InvalidHaar(format!(
                "{} constants for {} objects",
                constants.len(),
                g.object_count()
            )));
        }
        let weights = g.arrows.iter().map(|a| constants[a.target]).collect();
        Self::new(g, weights, uniform(g.object_count()))
    }

    pub fn new(g: &GroupoidTables, weights: Vec<f64>, base: Vec<f64>) -> Result<Self> {
        if weights.len() != g.arrow_count() {
            return Err(Error::InvalidHaar(format!(
                "{} weights for {} arrows",
                weights.len(),
                g.arrow_count()
            )));
        }
        if let Some(a) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidHaar(format!(
                "weight of arrow {a} is not positive"
            )));
        }
        if base.len() != g.object_count() {
            return Err(Error::InvalidHaar(format!(
                "base measure has {} entries for {} objects",
                base.len(),
                g.object_count()
            )));
        }
        if base.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidHaar("base weights must be positive".into()));
        }
        let total: f64 = base.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidHaar(format!(
                "base weights sum to {total}, not 1"
            )));
        }
        let counting = weights.iter().all(|&w| w == 1.0);
        let flat = base.iter().all(|&v| v == base[0]);
        let modular = if counting && flat {
            vec![1.0; g.arrow_count()]
        } else {
            let size: Vec<f64> = (0..g.object_count())
                .map(|f| g.target_fibre(f).len() as f64)
                .collect();
            g.arrows
                .iter()
                .map(|a| base[a.target] * size[a.target] / (base[a.source] * size[a.source]))
                .collect()
        };
        Ok(Self {
            weights,
            base,
            modular,
        })
    }

    /// Fibre mass `κ₀(f)`.
    pub fn fibre_mass(&self, g: &GroupoidTables, f: usize) -> f64 {
        g.target_fibre(f).iter().map(|&a| self.weights[a]).sum()
    }
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Seeded functions on arrows, uniform in `[-1, 1]`.
pub fn random_arrow_functions(g: &GroupoidTables, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..g.arrow_count())
                .map(|_| rng.random_range(-1.0..=1.0))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrowDefect {
    pub arrow: usize,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarReport {
    pub max_defect: f64,
    /// One entry per non-unit arrow, maximized over the panel.
    pub per_arrow: Vec<ArrowDefect>,
}

/// Compares `Σ F(γ₁γ₂) μ^{s(γ₁)}(γ₂)` over composable `γ₂` with
/// `Σ F(γ₃) μ^{t(γ₁)}(γ₃)` for each non-unit `γ₁`.
pub fn haar_invariance_check(
    g: &GroupoidTables,
    h: &HaarSystem,
    panel: &[Vec<f64>],
) -> Result<HaarReport> {
    if h.weights.len() != g.arrow_count() {
        return Err(Error::InvalidHaar(
            "system does not match the groupoid".into(),
        ));
    }
    if let Some(f) = panel.iter().find(|f| f.len() != g.arrow_count()) {
        return Err(Error::SectionMismatch {
            expected: g.arrow_count(),
            got: f.len(),
        });
    }
    let per_arrow: Vec<ArrowDefect> = (0..g.arrow_count())
        .filter(|&a| !g.is_unit(a))
        .map(|a| {
            let left_fibre = g.target_fibre(g.source(a));
            let right_fibre = g.target_fibre(g.target(a));
            let defect = panel
                .iter()
                .map(|f| {
                    let lhs: f64 = left_fibre
                        .iter()
                        .filter_map(|&b| g.compose(a, b).map(|ab| f[ab] * h.weights[b]))
                        .sum();
                    let rhs: f64 = right_fibre.iter().map(|&c| f[c] * h.weights[c]).sum();
                    (lhs - rhs).abs()
                })
                .fold(0.0, f64::max);
            ArrowDefect { arrow: a, defect }
        })
        .collect();
    let max_defect = per_arrow.iter().map(|d| d.defect).fold(0.0, f64::max);
    Ok(HaarReport {
        max_defect,
        per_arrow,
    })
}
