use serde::{Deserialize, Serialize};

use super::section::Section;
use crate::error::{Error, Result};
use crate::groupoid::{GroupoidTables, HaarSystem};

/// `L²` of the target fibre of `anchor` under `μ^anchor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertFibre {
    pub anchor: usize,
    pub basis: Vec<usize>,
    pub weights: Vec<f64>,
}

impl HilbertFibre {
    pub fn new(g: &GroupoidTables, h: &HaarSystem, f: usize) -> Result<Self> {
        if f >= g.object_count() {
            return Err(Error::UnknownObject(f));
        }
        let basis = g.target_fibre(f);
        let weights = basis.iter().map(|&a| h.weights[a]).collect();
        Ok(Self {
            anchor: f,
            basis,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter()
            .zip(v)
            .zip(&self.weights)
            .map(|((a, b), w)| a * b * w)
            .sum()
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.inner(u, u).sqrt()
    }
}

/// `ν` on objects and the measures it induces on arrows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeasureSet {
    pub base: Vec<f64>,
    pub fibres: Vec<HilbertFibre>,
    /// `m(γ) = ν(t(γ)) μ^{t(γ)}(γ)`.
    pub arrow_measure: Vec<f64>,
    /// `m⁻¹(γ) = m(γ⁻¹)`.
    pub inverse_measure: Vec<f64>,
    /// `m_o(γ) = Δ(γ)^{-1/2} m(γ)`.
    pub symmetric_measure: Vec<f64>,
    /// `m²(γ₁, γ₂) = m(γ₁) μ^{s(γ₁)}(γ₂)` on composable pairs `[γ₁, γ₂]`.
    pub pair_measure: Vec<([usize; 2], f64)>,
}

impl BundleMeasureSet {
    pub fn new(g: &GroupoidTables, h: &HaarSystem) -> Result<Self> {
        if h.weights.len() != g.arrow_count() || h.base.len() != g.object_count() {
            return Err(Error::InvalidHaar(
                "system does not match the groupoid".into(),
            ));
        }
        let fibres = (0..g.object_count())
            .map(|f| HilbertFibre::new(g, h, f))
            .collect::<Result<Vec<_>>>()?;
        let arrow_measure: Vec<f64> = g
            .arrows
            .iter()
            .zip(&h.weights)
            .map(|(a, w)| h.base[a.target] * w)
            .collect();
        let inverse_measure = g.inverse.iter().map(|&i| arrow_measure[i]).collect();
        let symmetric_measure = arrow_measure
            .iter()
            .zip(&h.modular)
            .map(|(m, d)| m / d.sqrt())
            .collect();
        let mut pair_measure = Vec::new();
        for (a, &m) in arrow_measure.iter().enumerate() {
            for b in g.target_fibre(g.source(a)) {
                pair_measure.push(([a, b], m * h.weights[b]));
            }
        }
        Ok(Self {
            base: h.base.clone(),
            fibres,
            arrow_measure,
            inverse_measure,
            symmetric_measure,
            pair_measure,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.arrow_measure.iter().sum()
    }
}

/// `Σ_f ν(f) ⟨φ|_f, ψ|_f⟩_f`.
pub fn section_inner(phi: &Section, psi: &Section, b: &BundleMeasureSet) -> Result<f64> {
    let arrows: usize = b.fibres.iter().map(HilbertFibre::dim).sum();
    for s in [phi, psi] {
        if s.len() != arrows {
            return Err(Error::SectionMismatch {
                expected: arrows,
                got: s.len(),
            });
        }
    }
    Ok(b.fibres
        .iter()
        .zip(&b.base)
        .map(|(fb, nu)| {
            let u: Vec<f64> = fb.basis.iter().map(|&a| phi.get(a)).collect();
            let v: Vec<f64> = fb.basis.iter().map(|&a| psi.get(a)).collect();
            nu * fb.inner(&u, &v)
        })
        .sum())
}

pub fn section_norm(phi: &Section, b: &BundleMeasureSet) -> Result<f64> {
    Ok(section_inner(phi, phi, b)?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_norm() {
        for n in 1..5 {
            let g = GroupoidTables::full(n);
            let b = BundleMeasureSet::new(&g, &HaarSystem::counting(&g)).unwrap();
            let e = Section::identity(&g);
            assert!((section_inner(&e, &e, &b).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn all_ones_on_two_objects() {
        let g = GroupoidTables::full(2);
        let b = BundleMeasureSet::new(&g, &HaarSystem::counting(&g)).unwrap();
        let one = Section::uniform(&g);
        // each fibre has two arrows, one of them the unit
        assert_eq!(section_inner(&one, &one, &b).unwrap(), 2.0);
        assert_eq!(b.total_mass(), 2.0);
    }

    #[test]
    fn orthogonal_supports() {
        let g = GroupoidTables::full(3);
        let b = BundleMeasureSet::new(&g, &HaarSystem::counting(&g)).unwrap();
        let x = Section::delta(&g, 1).unwrap();
        let y = Section::delta(&g, 2).unwrap();
        assert_eq!(section_inner(&x, &y, &b).unwrap(), 0.0);
    }

    #[test]
    fn measures_under_weights() {
        let g = GroupoidTables::full(2);
        let h = HaarSystem::new(&g, vec![1.0, 2.0, 3.0, 4.0], vec![0.25, 0.75]).unwrap();
        let b = BundleMeasureSet::new(&g, &h).unwrap();
        assert_eq!(b.arrow_measure, vec![0.25, 0.5, 2.25, 3.0]);
        assert_eq!(b.inverse_measure, vec![0.25, 2.25, 0.5, 3.0]);
        assert_eq!(b.pair_measure.len(), 8);
    }
}
