use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hilbert::{section_norm, BundleMeasureSet};
use super::section::{convolve_sections, Section};
use crate::error::{Error, Result};
use crate::groupoid::{GroupoidTables, HaarSystem};
use crate::numerics::matrix_rank;
use crate::partial::Catalog;
use crate::smoothing::{convolve, Kernel, MollifierElement, SmoothNet};

/// Relative pivot tolerance for fibre ranks.
pub const RANK_TOL: f64 = 1e-9;

/// Ordered family of sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalNet {
    pub members: Vec<Section>,
}

impl FundamentalNet {
    pub fn new(members: Vec<Section>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter(
                "a net needs at least one member".into(),
            ));
        }
        Ok(Self { members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Member `τ` is the sum of the deltas at position `τ` of every target
    /// fibre that long.
    pub fn delta(g: &GroupoidTables) -> Self {
        let fibres: Vec<Vec<usize>> = (0..g.object_count()).map(|f| g.target_fibre(f)).collect();
        let longest = fibres.iter().map(Vec::len).max().unwrap_or(0);
        let members = (0..longest)
            .map(|tau| {
                let mut values = vec![0.0; g.arrow_count()];
                for fb in &fibres {
                    if let Some(&a) = fb.get(tau) {
                        values[a] = 1.0;
                    }
                }
                Section::new(g, values).expect("sized to the groupoid")
            })
            .collect();
        Self { members }
    }

    /// Every member is the identity section.
    pub fn constant_identity(g: &GroupoidTables, count: usize) -> Self {
        Self {
            members: vec![Section::identity(g); count],
        }
    }

    /// `e_τ = (1 - 2^{-τ}) e + 2^{-τ} u` for `τ = 1..=count`, with `u` the all-ones section.
    pub fn blend(g: &GroupoidTables, count: usize) -> Self {
        let e = Section::identity(g);
        let u = Section::uniform(g);
        let members = (1..=count)
            .map(|tau| {
                let w = 0.5f64.powi(tau as i32);
                e.combine(1.0 - w, &u, w).expect("same groupoid")
            })
            .collect();
        Self { members }
    }

    /// `φ_τ(f, h) = ∫ (φ_{ε_τ} * f) h` over the trusted region of the catalog grid.
    pub fn pairing(catalog: &Catalog, g: &GroupoidTables, net: &SmoothNet) -> Result<Self> {
        check_catalog(catalog, g)?;
        let realized = (0..catalog.len())
            .map(|i| catalog.realize(i))
            .collect::<Result<Vec<_>>>()?;
        let members = net
            .epsilons()
            .par_iter()
            .map(|&eps| {
                let m = MollifierElement::new(net.kernel().clone(), eps)?;
                let smoothed = realized
                    .iter()
                    .map(|f| convolve(&m, f))
                    .collect::<Result<Vec<_>>>()?;
                let values = g
                    .arrows
                    .iter()
                    .map(|a| {
                        let s = &smoothed[a.target];
                        Ok(s.function
                            .mul(&realized[a.source])?
                            .integrate_masked(&s.trusted))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Section::new(g, values)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    /// `φ_τ(f, h) = ρ(d(f, h) / ε_τ) / ρ(0)` with `ρ` the one-dimensional
    /// kernel profile and `d` the catalog's `L^p` distance. Units get 1 and
    /// every other arrow fades out once `ε_τ` drops below its distance.
    pub fn shadow(distances: &[Vec<f64>], g: &GroupoidTables, epsilons: &[f64]) -> Result<Self> {
        let n = g.object_count();
        if distances.len() != n || distances.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(format!(
                "distance table is not {n} x {n}"
            )));
        }
        if epsilons.is_empty() || epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidParameter(
                "shadow scales must be positive".into(),
            ));
        }
        let kernel = Kernel::standard(1)?;
        let peak = kernel.profile(&[0.0]);
        let members = epsilons
            .iter()
            .map(|&eps| {
                let values = g
                    .arrows
                    .iter()
                    .map(|a| kernel.profile(&[distances[a.target][a.source] / eps]) / peak)
                    .collect();
                Section::new(g, values)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }
}

fn check_catalog(catalog: &Catalog, g: &GroupoidTables) -> Result<()> {
    if catalog.len() != g.object_count() {
        return Err(Error::InvalidParameter(format!(
            "groupoid has {} objects, catalog has {} entries",
            g.object_count(),
            catalog.len()
        )));
    }
    Ok(())
}

/// `‖f_i - f_j‖_p` on the catalog grid.
pub fn catalog_distances(catalog: &Catalog) -> Result<Vec<Vec<f64>>> {
    let realized = (0..catalog.len())
        .map(|i| catalog.realize(i))
        .collect::<Result<Vec<_>>>()?;
    realized
        .iter()
        .map(|f| {
            realized
                .iter()
                .map(|h| f.sub(h)?.lp_norm(catalog.p()))
                .collect()
        })
        .collect()
}

/// Geometric scales `ε_0 2^{-τ}` starting at twice the largest distance.
pub fn shadow_scales(distances: &[Vec<f64>], count: usize) -> Vec<f64> {
    let top = distances
        .iter()
        .flatten()
        .copied()
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    (0..count)
        .map(|tau| 2.0 * top * 0.5f64.powi(tau as i32))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetReport {
    pub fibre_sizes: Vec<usize>,
    /// `ranks[f][τ]`: rank of the first `τ + 1` members restricted to the fibre of `f`.
    pub ranks: Vec<Vec<usize>>,
    /// Number of members needed to span each fibre, `None` if never.
    pub spanning_index: Vec<Option<usize>>,
}

impl NetReport {
    pub fn spans(&self) -> bool {
        self.spanning_index.iter().all(Option::is_some)
    }
}

pub fn fundamental_net_check(net: &FundamentalNet, g: &GroupoidTables) -> Result<NetReport> {
    if let Some(s) = net.members.iter().find(|s| s.len() != g.arrow_count()) {
        return Err(Error::SectionMismatch {
            expected: g.arrow_count(),
            got: s.len(),
        });
    }
    let per_object: Vec<(usize, Vec<usize>, Option<usize>)> = (0..g.object_count())
        .into_par_iter()
        .map(|f| {
            let size = g.target_fibre(f).len();
            let rows: Vec<Vec<f64>> = net.members.iter().map(|s| s.restrict(g, f)).collect();
            let ranks: Vec<usize> = (1..=rows.len())
                .map(|t| matrix_rank(&rows[..t], RANK_TOL))
                .collect();
            let span = ranks.iter().position(|&r| r == size).map(|t| t + 1);
            (size, ranks, span)
        })
        .collect();
    Ok(NetReport {
        fibre_sizes: per_object.iter().map(|r| r.0).collect(),
        ranks: per_object.iter().map(|r| r.1.clone()).collect(),
        spanning_index: per_object.iter().map(|r| r.2).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsRow {
    pub index: usize,
    pub deviation: f64,
    pub leakage: f64,
}

/// `‖φ_τ * ψ - ψ‖` along the net, in the bundle norm.
pub fn dynamics_demo(
    net: &FundamentalNet,
    psi: &Section,
    g: &GroupoidTables,
    h: &HaarSystem,
) -> Result<Vec<DynamicsRow>> {
    let b = BundleMeasureSet::new(g, h)?;
    net.members
        .iter()
        .enumerate()
        .map(|(index, phi)| {
            let c = convolve_sections(phi, psi, g, h)?;
            Ok(DynamicsRow {
                index,
                deviation: section_norm(&c.section.sub(psi)?, &b)?,
                leakage: c.total_leakage(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BoxDomain, SymbolicFunction};
    use crate::partial::CatalogEntry;

    fn three_catalog() -> Catalog {
        let d = BoxDomain::interval(-1.0, 1.0).unwrap();
        let entries = vec![
            CatalogEntry::new("one", SymbolicFunction::constant(1.0)),
            CatalogEntry::new("bump", SymbolicFunction::bump(&[0.2], 0.5)),
            CatalogEntry::new("power", SymbolicFunction::power(&[0.3], 0.3)),
        ];
        Catalog::on_domain(entries, 2.0, 0, &d).unwrap()
    }

    #[test]
    fn delta_net_spans_at_fibre_size() {
        let m = vec![
            vec![true, true, false],
            vec![true, true, true],
            vec![false, true, false],
        ];
        let g = GroupoidTables::from_matrix(vec!["a".into(), "b".into(), "c".into()], &m).unwrap();
        let r = fundamental_net_check(&FundamentalNet::delta(&g), &g).unwrap();
        assert_eq!(r.fibre_sizes, vec![2, 3, 2]);
        assert_eq!(r.spanning_index, vec![Some(2), Some(3), Some(2)]);
    }

    #[test]
    fn zero_net_never_spans() {
        let g = GroupoidTables::full(2);
        let net = FundamentalNet::new(vec![Section::zeros(&g); 3]).unwrap();
        let r = fundamental_net_check(&net, &g).unwrap();
        assert_eq!(r.ranks, vec![vec![0, 0, 0]; 2]);
        assert!(!r.spans());
    }

    #[test]
    fn pairing_net_spans_generic_catalog() {
        let c = three_catalog();
        let g = GroupoidTables::full(3);
        let net = SmoothNet::new(Kernel::standard(1).unwrap(), vec![0.4, 0.2, 0.1, 0.05]).unwrap();
        let r = fundamental_net_check(&FundamentalNet::pairing(&c, &g, &net).unwrap(), &g).unwrap();
        assert!(r.spans(), "{r:?}");
    }

    #[test]
    fn blend_deviation_halves() {
        let g = GroupoidTables::full(3);
        let h = HaarSystem::counting(&g);
        let psi = Section::new(&g, (0..9).map(|a| 1.0 + a as f64).collect()).unwrap();
        let rows = dynamics_demo(&FundamentalNet::blend(&g, 10), &psi, &g, &h).unwrap();
        let b = BundleMeasureSet::new(&g, &h).unwrap();
        let diff = Section::uniform(&g).sub(&Section::identity(&g)).unwrap();
        let c = section_norm(&convolve_sections(&diff, &psi, &g, &h).unwrap().section, &b).unwrap();
        for r in &rows {
            let expected = 0.5f64.powi(r.index as i32 + 1) * c;
            assert!((r.deviation - expected).abs() <= 1e-12 * c);
        }
        let id = dynamics_demo(&FundamentalNet::constant_identity(&g, 3), &psi, &g, &h).unwrap();
        assert!(id.iter().all(|r| r.deviation == 0.0));
    }

    #[test]
    fn shadow_net_approaches_identity() {
        let c = three_catalog();
        let g = GroupoidTables::full(3);
        let h = HaarSystem::counting(&g);
        let d = catalog_distances(&c).unwrap();
        let net = FundamentalNet::shadow(&d, &g, &shadow_scales(&d, 8)).unwrap();
        let rows = dynamics_demo(&net, &Section::uniform(&g), &g, &h).unwrap();
        for w in rows[1..].windows(2) {
            assert!(w[1].deviation <= w[0].deviation);
        }
        assert_eq!(rows.last().unwrap().deviation, 0.0);
    }
}
