use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::catalog::Catalog;
use super::gamma::{product_verdict, GammaRelation, GammaVerdict};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierReport {
    /// `left[g] = {f : (f, g) in Gamma}`.
    pub left: Vec<Vec<usize>>,
    /// `right[f] = {g : (f, g) in Gamma}`.
    pub right: Vec<Vec<usize>>,
    /// Entries that multiply every entry on both sides.
    pub universal: Vec<usize>,
    /// `left[x] == right[x]` for every entry.
    pub commutative: bool,
}

pub fn multipliers(gamma: &GammaRelation) -> MultiplierReport {
    let n = gamma.len();
    let left: Vec<Vec<usize>> = (0..n)
        .map(|g| (0..n).filter(|&f| gamma.contains(f, g)).collect())
        .collect();
    let right: Vec<Vec<usize>> = (0..n)
        .map(|f| (0..n).filter(|&g| gamma.contains(f, g)).collect())
        .collect();
    let universal = (0..n)
        .filter(|&m| (0..n).all(|g| gamma.contains(m, g) && gamma.contains(g, m)))
        .collect();
    let commutative = left == right;
    MultiplierReport {
        left,
        right,
        universal,
        commutative,
    }
}

/// Row of the product `f_i f_j` against every catalog entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRow {
    pub left: usize,
    pub right: usize,
    pub product: String,
    pub row: Vec<GammaVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealViolation {
    pub multiplier: usize,
    pub entry: usize,
    /// Entry the product `m f` failed to multiply although `f` did.
    pub against: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealReport {
    pub universal: Vec<usize>,
    pub rows: Vec<ProductRow>,
    pub violations: Vec<IdealViolation>,
}

/// For every pair in Gamma, recomputes the multiplier row of the product.
/// When one factor `m` is universal, `m f` must keep every partner of `f`
/// (up to marginal verdicts); failures are listed as violations.
pub fn ideal_check(catalog: &Catalog, gamma: &GammaRelation) -> Result<IdealReport> {
    let n = catalog.len();
    let universal = multipliers(gamma).universal;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .filter(|&(i, j)| gamma.contains(i, j))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(i, j)| {
            let h = catalog.function(i)?.times(catalog.function(j)?);
            let row = (0..n)
                .map(|g| Ok(product_verdict(catalog, &h, catalog.function(g)?)?.verdict))
                .collect::<Result<Vec<_>>>()?;
            Ok(ProductRow {
                left: i,
                right: j,
                product: h.to_string(),
                row,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut violations = Vec::new();
    for r in &rows {
        for (m, f) in [(r.left, r.right), (r.right, r.left)] {
            if !universal.contains(&m) {
                continue;
            }
            for g in 0..n {
                if gamma.contains(f, g) && r.row[g] == GammaVerdict::Out {
                    violations.push(IdealViolation {
                        multiplier: m,
                        entry: f,
                        against: g,
                    });
                }
            }
        }
    }
    violations.dedup();
    Ok(IdealReport {
        universal,
        rows,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BoxDomain, SymbolicFunction};
    use crate::partial::{build_gamma, CatalogEntry};

    fn mixed() -> Catalog {
        let d = BoxDomain::interval(-1.0, 1.0).unwrap();
        let entries = vec![
            CatalogEntry::new("one", SymbolicFunction::constant(1.0)),
            CatalogEntry::new("mollifier", SymbolicFunction::bump(&[0.0], 0.3)),
            CatalogEntry::new("power(0.2)", SymbolicFunction::power(&[0.0], 0.2)),
            CatalogEntry::new("power(0.45)", SymbolicFunction::power(&[0.0], 0.45)),
        ];
        Catalog::on_domain(entries, 2.0, 0, &d).unwrap()
    }

    #[test]
    fn universal_multipliers() {
        let c = mixed();
        let g = build_gamma(&c).unwrap();
        let m = multipliers(&g);
        assert_eq!(m.universal, vec![0, 1]);
        assert!(m.commutative);
        assert_eq!(m.left[3], vec![0, 1]);
    }

    #[test]
    fn ideals_hold() {
        let c = mixed();
        let g = build_gamma(&c).unwrap();
        let report = ideal_check(&c, &g).unwrap();
        assert!(report.violations.is_empty());
        // 1 * f keeps the row of f
        for r in report.rows.iter().filter(|r| r.left == 0) {
            let original: Vec<GammaVerdict> = (0..c.len()).map(|k| g.verdict(r.right, k)).collect();
            assert_eq!(r.row, original);
        }
        // power(0.2)^2 = power(0.4) pairs only with bounded entries
        let sq = report
            .rows
            .iter()
            .find(|r| r.left == 2 && r.right == 2)
            .unwrap();
        assert_eq!(sq.product, "power(0, 0.4)");
        assert_eq!(
            sq.row,
            vec![
                GammaVerdict::In,
                GammaVerdict::In,
                GammaVerdict::Out,
                GammaVerdict::Out
            ]
        );
    }
}
