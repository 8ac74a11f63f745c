use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{GroupoidTables, HaarSystem};

/// A real value on every arrow, units included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Section {
    values: Vec<f64>,
}

impl Section {
    pub fn new(g: &GroupoidTables, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.arrow_count() {
            return Err(Error::SectionMismatch {
                expected: g.arrow_count(),
                got: values.len(),
            });
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { node });
        }
        Ok(Self { values })
    }

    pub fn zeros(g: &GroupoidTables) -> Self {
        Self {
            values: vec![0.0; g.arrow_count()],
        }
    }

    /// 1 on units, 0 elsewhere.
    pub fn identity(g: &GroupoidTables) -> Self {
        Self {
            values: g
                .arrows
                .iter()
                .map(|a| if a.unit { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    /// 1 on every arrow.
    pub fn uniform(g: &GroupoidTables) -> Self {
        Self {
            values: vec![1.0; g.arrow_count()],
        }
    }

    pub fn delta(g: &GroupoidTables, arrow: usize) -> Result<Self> {
        g.arrow(arrow)?;
        let mut s = Self::zeros(g);
        s.values[arrow] = 1.0;
        Ok(s)
    }

    /// Reads `m[target][source]` at every arrow; cells without an arrow must be zero.
    pub fn from_matrix(g: &GroupoidTables, m: &[Vec<f64>]) -> Result<Self> {
        let n = g.object_count();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "section matrix is not {n} x {n}"
            )));
        }
        for (t, row) in m.iter().enumerate() {
            for (s, &v) in row.iter().enumerate() {
                if v != 0.0 && g.find(t, s).is_none() {
                    return Err(Error::InvalidParameter(format!(
                        "nonzero value at missing arrow ({t}, {s})"
                    )));
                }
            }
        }
        Self::new(g, g.arrows.iter().map(|a| m[a.target][a.source]).collect())
    }

    /// Arrow matrix, zero where there is no arrow.
    pub fn to_matrix(&self, g: &GroupoidTables) -> Vec<Vec<f64>> {
        let n = g.object_count();
        let mut m = vec![vec![0.0; n]; n];
        for (a, arrow) in g.arrows.iter().enumerate() {
            m[arrow.target][arrow.source] = self.values[a];
        }
        m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, arrow: usize) -> f64 {
        self.values[arrow]
    }

    /// `a self + b other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SectionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    /// Restriction to the target fibre of `f`, in fibre order.
    pub fn restrict(&self, g: &GroupoidTables, f: usize) -> Vec<f64> {
        g.target_fibre(f).iter().map(|&a| self.values[a]).collect()
    }

    fn check(&self, g: &GroupoidTables) -> Result<()> {
        if self.len() != g.arrow_count() {
            return Err(Error::SectionMismatch {
                expected: g.arrow_count(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

/// Mass that would land on a missing arrow `(target, source)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leak {
    pub target: usize,
    pub source: usize,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convolution {
    pub section: Section,
    /// One entry per missing arrow that has at least one factorization.
    pub leakage: Vec<Leak>,
}

impl Convolution {
    pub fn total_leakage(&self) -> f64 {
        self.leakage.iter().map(|l| l.mass.abs()).sum()
    }
}

/// `(φ * ψ)(i, l) = Σ_j φ(i, j) ψ(j, l) μ^i((i, j))` over middle objects
/// `j` with both factors present, summed in increasing `j`.
pub fn convolve_sections(
    phi: &Section,
    psi: &Section,
    g: &GroupoidTables,
    h: &HaarSystem,
) -> Result<Convolution> {
    phi.check(g)?;
    psi.check(g)?;
    if h.weights.len() != g.arrow_count() {
        return Err(Error::InvalidHaar(
            "system does not match the groupoid".into(),
        ));
    }
    let n = g.object_count();
    let mut values = vec![0.0; g.arrow_count()];
    let mut leakage = Vec::new();
    for i in 0..n {
        for l in 0..n {
            let mut mass = 0.0;
            let mut factored = false;
            for j in 0..n {
                if let (Some(a), Some(b)) = (g.find(i, j), g.find(j, l)) {
                    mass += phi.values[a] * psi.values[b] * h.weights[a];
                    factored = true;
                }
            }
            match g.find(i, l) {
                Some(c) => values[c] = mass,
                None if factored => leakage.push(Leak {
                    target: i,
                    source: l,
                    mass,
                }),
                None => {}
            }
        }
    }
    Ok(Convolution {
        section: Section { values },
        leakage,
    })
}

/// `φ*(γ) = φ(γ⁻¹)`.
pub fn section_involution(phi: &Section, g: &GroupoidTables) -> Result<Section> {
    phi.check(g)?;
    Ok(Section {
        values: g.inverse.iter().map(|&i| phi.values[i]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_object_matrix_product() {
        let g = GroupoidTables::full(2);
        let h = HaarSystem::counting(&g);
        let phi = Section::from_matrix(&g, &[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let psi = Section::from_matrix(&g, &[vec![5.0, 6.0], vec![7.0, 8.0]]).unwrap();
        let c = convolve_sections(&phi, &psi, &g, &h).unwrap();
        assert_eq!(
            c.section.to_matrix(&g),
            vec![vec![19.0, 22.0], vec![43.0, 50.0]]
        );
        assert!(c.leakage.is_empty());
        let t = section_involution(&phi, &g).unwrap();
        assert_eq!(t.to_matrix(&g), vec![vec![1.0, 3.0], vec![2.0, 4.0]]);
    }

    #[test]
    fn identity_is_two_sided_unit() {
        let m = vec![
            vec![true, true, false],
            vec![true, false, true],
            vec![false, true, true],
        ];
        let g = GroupoidTables::from_matrix(vec!["a".into(), "b".into(), "c".into()], &m).unwrap();
        let h = HaarSystem::counting(&g);
        let e = Section::identity(&g);
        let psi = Section::new(&g, (0..g.arrow_count()).map(|a| a as f64 + 0.5).collect()).unwrap();
        assert_eq!(convolve_sections(&e, &psi, &g, &h).unwrap().section, psi);
        assert_eq!(convolve_sections(&psi, &e, &g, &h).unwrap().section, psi);
    }

    #[test]
    fn leakage_on_missing_arrow() {
        // (0, 2) is missing but factors through 1
        let m = vec![
            vec![true, true, false],
            vec![true, true, true],
            vec![false, true, true],
        ];
        let g = GroupoidTables::from_matrix(vec!["a".into(), "b".into(), "c".into()], &m).unwrap();
        let h = HaarSystem::counting(&g);
        let phi = Section::uniform(&g);
        let c = convolve_sections(&phi, &phi, &g, &h).unwrap();
        assert_eq!(
            c.leakage,
            vec![
                Leak {
                    target: 0,
                    source: 2,
                    mass: 1.0
                },
                Leak {
                    target: 2,
                    source: 0,
                    mass: 1.0
                },
            ]
        );
        assert_eq!(c.section.get(g.find(1, 1).unwrap()), 3.0);
    }

    #[test]
    fn involution_is_exact() {
        let g = GroupoidTables::full(3);
        let phi = Section::new(&g, (0..9).map(|a| (a as f64).sin()).collect()).unwrap();
        let back = section_involution(&section_involution(&phi, &g).unwrap(), &g).unwrap();
        assert_eq!(back, phi);
        let e = Section::identity(&g);
        assert_eq!(section_involution(&e, &g).unwrap(), e);
    }

    #[test]
    fn rejects_values_on_missing_arrows() {
        let g = GroupoidTables::units_only(2);
        assert!(Section::from_matrix(&g, &[vec![1.0, 1.0], vec![0.0, 1.0]]).is_err());
        assert!(Section::new(&g, vec![1.0]).is_err());
    }
}
