use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tables::GroupoidTables;
use crate::domain::{norm_growth, Field, Grid, GridFunction, SymbolicFunction, Verdict};
use crate::error::{Error, Result};
use crate::partial::Catalog;
use crate::smoothing::{convolve, required_nodes, MollifierElement, SmoothNet};

/// Minimum rungs left after dropping those that cannot resolve `epsilon`.
const MIN_RUNGS: usize = 3;

/// `f_eps g`, with `f_eps` precomputed on each rung of a ladder.
pub struct MollifiedProductField<'a> {
    rungs: &'a [GridFunction],
    g: &'a SymbolicFunction,
}

impl Field for MollifiedProductField<'_> {
    fn sample_on(&self, grid: &Grid) -> Result<GridFunction> {
        let f = self
            .rungs
            .iter()
            .find(|r| r.grid() == grid)
            .ok_or(Error::GridMismatch)?;
        f.mul(&self.g.sample(grid)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibreActionRow {
    pub entry: usize,
    pub epsilon: f64,
    /// Whether `f_eps g_j` is integrable, per catalog entry `j`; `None` when marginal.
    pub row: Vec<Option<bool>>,
    /// Partners gained by mollifying.
    pub gains: Vec<usize>,
    /// Partners lost by mollifying.
    pub losses: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibreActionReport {
    pub rows: Vec<FibreActionRow>,
    /// Total lost partners over all rows.
    pub violations: usize,
}

impl FibreActionReport {
    pub fn preserved(&self) -> bool {
        self.violations == 0
    }
}

/// Replaces each entry `f` by `f_eps` for every member of the net and
/// recomputes its row of the relation numerically.
///
/// Only `k = 0` catalogs are supported: the rows are decided by refinement
/// growth of `f_eps g` in `L^p`.
pub fn fibre_action_check(
    catalog: &Catalog,
    g: &GroupoidTables,
    net: &SmoothNet,
) -> Result<FibreActionReport> {
    if catalog.k() != 0 {
        return Err(Error::InvalidParameter(
            "fibre action rows are only computed for k = 0".into(),
        ));
    }
    if g.object_count() != catalog.len() {
        return Err(Error::InvalidParameter(format!(
            "groupoid has {} objects, catalog has {} entries",
            g.object_count(),
            catalog.len()
        )));
    }
    let n = catalog.len();
    let jobs: Vec<(usize, f64)> = (0..n)
        .flat_map(|i| net.epsilons().iter().map(move |&e| (i, e)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, eps)| {
            let m = MollifierElement::new(net.kernel().clone(), eps)?;
            let ladder: Vec<Grid> = catalog
                .ladder()
                .iter()
                .filter(|grid| 2.0 * eps / grid.max_spacing() >= required_nodes(0) as f64)
                .cloned()
                .collect();
            if ladder.len() < MIN_RUNGS {
                return Err(Error::UnderResolved {
                    epsilon: eps,
                    nodes_across: 2.0 * eps
                        / catalog.ladder().last().map_or(1.0, Grid::max_spacing),
                    required: required_nodes(0),
                });
            }
            let f = catalog.function(i)?;
            let rungs = ladder
                .iter()
                .map(|grid| Ok(convolve(&m, &f.sample(grid)?)?.function))
                .collect::<Result<Vec<_>>>()?;
            let row = (0..n)
                .map(|j| {
                    let field = MollifiedProductField {
                        rungs: &rungs,
                        g: catalog.function(j)?,
                    };
                    Ok(match norm_growth(&field, catalog.p(), &ladder)?.verdict {
                        Verdict::Integrable => Some(true),
                        Verdict::Divergent => Some(false),
                        Verdict::Marginal => None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let gains = (0..n)
                .filter(|&j| row[j] == Some(true) && !g.related(i, j))
                .collect();
            let losses = (0..n)
                .filter(|&j| row[j] == Some(false) && g.related(i, j))
                .collect();
            Ok(FibreActionRow {
                entry: i,
                epsilon: eps,
                row,
                gains,
                losses,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = rows.iter().map(|r| r.losses.len()).sum();
    Ok(FibreActionReport { rows, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;
    use crate::groupoid::build_groupoid;
    use crate::partial::{build_gamma, CatalogEntry};
    use crate::smoothing::Kernel;

    #[test]
    fn mollified_power_only_gains() {
        let d = BoxDomain::interval(-1.0, 1.0).unwrap();
        let entries = vec![
            CatalogEntry::new("one", SymbolicFunction::constant(1.0)),
            CatalogEntry::new("bump", SymbolicFunction::bump(&[0.2], 0.5)),
            CatalogEntry::new("power(0.3)", SymbolicFunction::power(&[0.0], 0.3)),
            CatalogEntry::new("power(0.45)", SymbolicFunction::power(&[0.0], 0.45)),
        ];
        let c = Catalog::on_domain(entries, 2.0, 0, &d).unwrap();
        let g = build_groupoid(&build_gamma(&c).unwrap()).unwrap();
        let net = SmoothNet::new(Kernel::standard(1).unwrap(), vec![0.1]).unwrap();
        let r = fibre_action_check(&c, &g, &net).unwrap();
        assert!(r.preserved());
        for row in &r.rows {
            assert_eq!(row.row, vec![Some(true); 4], "entry {}", row.entry);
        }
        let p3 = r.rows.iter().find(|row| row.entry == 2).unwrap();
        assert_eq!(p3.gains, vec![2, 3]);
        assert!(r.rows[0].gains.is_empty() && r.rows[1].gains.is_empty());
    }
}
