use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::catalog::Catalog;
use crate::domain::{norm_growth, SymbolicFunction, Verdict};
use crate::error::{Error, Result};
use crate::weak::{analytic_membership, sobolev_membership, Membership};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaVerdict {
    In,
    Out,
    Marginal,
}

impl GammaVerdict {
    pub fn letter(self) -> char {
        match self {
            Self::In => 'I',
            Self::Out => 'O',
            Self::Marginal => 'M',
        }
    }

    fn from_membership(m: Membership) -> Self {
        match m {
            Membership::Member => Self::In,
            Membership::NonMember => Self::Out,
            Membership::Marginal => Self::Marginal,
        }
    }

    fn from_growth(v: Verdict) -> Self {
        match v {
            Verdict::Integrable => Self::In,
            Verdict::Divergent => Self::Out,
            Verdict::Marginal => Self::Marginal,
        }
    }
}

/// Verdict on one product together with the evidence behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub verdict: GammaVerdict,
    /// From the singularity model, when the product's family supports it.
    pub analytic: Option<GammaVerdict>,
    /// From refinement growth of the product (and of its classical
    /// derivatives when `k > 0`); `None` when no numeric test applies.
    pub numeric: Option<GammaVerdict>,
    /// Largest `(j - d) p - n` over orders and sites, when analytic.
    pub criterion: Option<f64>,
}

/// Decides whether the product `f g` lies in `W^{k,p}` of the catalog's domain.
pub fn product_verdict(
    catalog: &Catalog,
    f: &SymbolicFunction,
    g: &SymbolicFunction,
) -> Result<PairVerdict> {
    let product = f.times(g);
    let (p, k) = (catalog.p(), catalog.k());
    let analytic = match analytic_membership(&product, k, p, catalog.grid().domain()) {
        Ok(checks) => Some(checks),
        Err(Error::UnsupportedFamily(_)) => None,
        Err(e) => return Err(e),
    };
    let criterion = analytic.as_ref().and_then(|checks| {
        checks
            .iter()
            .filter_map(|c| c.criterion)
            .fold(None, |acc: Option<f64>, c| {
                Some(acc.map_or(c, |a| a.max(c)))
            })
    });
    let analytic_verdict = analytic.as_ref().map(|checks| {
        let worst = checks
            .iter()
            .fold(Membership::Member, |acc, c| match (acc, c.analytic) {
                (Membership::NonMember, _) | (_, Membership::NonMember) => Membership::NonMember,
                (Membership::Marginal, _) | (_, Membership::Marginal) => Membership::Marginal,
                _ => Membership::Member,
            });
        GammaVerdict::from_membership(worst)
    });
    let numeric = if k == 0 {
        Some(GammaVerdict::from_growth(
            norm_growth(&product, p, catalog.ladder())?.verdict,
        ))
    } else if analytic.is_some() {
        let report = sobolev_membership(&product, k, p, catalog.ladder())?;
        let verdicts: Vec<Verdict> = report.orders.iter().filter_map(|o| o.numeric).collect();
        if report.orders.iter().any(|o| !o.weak_exists) {
            // divergence of a missing derivative has no numeric face
            None
        } else {
            Some(GammaVerdict::from_growth(
                verdicts
                    .iter()
                    .copied()
                    .max_by_key(|v| match v {
                        Verdict::Integrable => 0,
                        Verdict::Marginal => 1,
                        Verdict::Divergent => 2,
                    })
                    .unwrap_or(Verdict::Integrable),
            ))
        }
    } else {
        None
    };
    let verdict = analytic_verdict.or(numeric).ok_or_else(|| {
        Error::UnsupportedFamily(format!("no criterion applies to {product} at k = {k}"))
    })?;
    Ok(PairVerdict {
        verdict,
        analytic: analytic_verdict,
        numeric,
        criterion,
    })
}

/// `(f_i, f_j) in Gamma`.
pub fn gamma_member(catalog: &Catalog, i: usize, j: usize) -> Result<PairVerdict> {
    product_verdict(catalog, catalog.function(i)?, catalog.function(j)?)
}

/// The relation on a catalog: `M[i][j]` iff the product is decidedly in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRelation {
    pub names: Vec<String>,
    pub p: f64,
    pub k: usize,
    pub verdicts: Vec<Vec<PairVerdict>>,
}

impl GammaRelation {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn verdict(&self, i: usize, j: usize) -> GammaVerdict {
        self.verdicts[i][j].verdict
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.verdict(i, j) == GammaVerdict::In
    }

    pub fn matrix(&self) -> Vec<Vec<bool>> {
        (0..self.len())
            .map(|i| (0..self.len()).map(|j| self.contains(i, j)).collect())
            .collect()
    }

    /// First asymmetric pair, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.verdict(i, j) != self.verdict(j, i))
    }

    /// Builds a relation directly from a boolean matrix, for finite models
    /// that do not come from a catalog.
    pub fn from_matrix(names: Vec<String>, matrix: &[Vec<bool>]) -> Result<Self> {
        let n = names.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(format!("matrix is not {n} x {n}")));
        }
        if let Some((i, j)) = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| matrix[i][j] != matrix[j][i])
        {
            return Err(Error::NotSymmetric(i, j));
        }
        let verdicts = matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&b| PairVerdict {
                        verdict: if b {
                            GammaVerdict::In
                        } else {
                            GammaVerdict::Out
                        },
                        analytic: None,
                        numeric: None,
                        criterion: None,
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            names,
            p: f64::NAN,
            k: 0,
            verdicts,
        })
    }

    /// Matrix CSV: a header of names, then one row per entry with verdict letters.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![String::new()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (i, name) in self.names.iter().enumerate() {
            let mut row = vec![name.clone()];
            row.extend((0..self.len()).map(|j| self.verdict(i, j).letter().to_string()));
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Evaluates every ordered pair of the catalog.
pub fn build_gamma(catalog: &Catalog) -> Result<GammaRelation> {
    let n = catalog.len();
    let flat = (0..n * n)
        .into_par_iter()
        .map(|c| gamma_member(catalog, c / n, c % n))
        .collect::<Result<Vec<_>>>()?;
    let verdicts = flat.chunks(n).map(<[PairVerdict]>::to_vec).collect();
    Ok(GammaRelation {
        names: catalog.names(),
        p: catalog.p(),
        k: catalog.k(),
        verdicts,
    })
}
