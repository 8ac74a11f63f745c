use serde::{Deserialize, Serialize};

use crate::domain::{BoxDomain, Grid, GridFunction, SymbolicFunction};
use crate::error::{Error, Result};
use crate::weak::{analytic_membership, default_ladder, Membership};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub function: SymbolicFunction,
}

impl CatalogEntry {
    pub fn new(name: impl Into<String>, function: SymbolicFunction) -> Self {
        Self {
            name: name.into(),
            function,
        }
    }
}

/// A finite list of `L^p` functions on one domain, with the grid they are
/// realized on and the refinement ladder used for numeric verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
    p: f64,
    k: usize,
    grid: Grid,
    ladder: Vec<Grid>,
}

/// Nodes of the default evaluation grid per axis.
const DEFAULT_NODES: [usize; 2] = [512, 128];

impl Catalog {
    /// Validates names and requires every entry to lie in `L^p`.
    pub fn new(
        entries: Vec<CatalogEntry>,
        p: f64,
        k: usize,
        grid: Grid,
        ladder: Vec<Grid>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidCatalog("no entries".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|o| o.name == e.name) {
                return Err(Error::InvalidCatalog(format!(
                    "duplicate name '{}'",
                    e.name
                )));
            }
        }
        if ladder.first().is_some_and(|g| g.domain() != grid.domain()) {
            return Err(Error::InvalidCatalog(
                "ladder and grid live on different domains".into(),
            ));
        }
        crate::domain::validate_ladder(&ladder)?;
        for e in &entries {
            let checks = analytic_membership(&e.function, 0, p, grid.domain())?;
            if checks[0].analytic != Membership::Member {
                return Err(Error::InvalidCatalog(format!(
                    "'{}' ({}) is not in L^{p}",
                    e.name, e.function
                )));
            }
        }
        if k > crate::domain::radial::MAX_ORDER {
            return Err(Error::OrderUnsupported { order: k });
        }
        Ok(Self {
            entries,
            p,
            k,
            grid,
            ladder,
        })
    }

    /// Default grid and ladder on `domain`.
    pub fn on_domain(
        entries: Vec<CatalogEntry>,
        p: f64,
        k: usize,
        domain: &BoxDomain,
    ) -> Result<Self> {
        let grid = Grid::uniform(domain.clone(), DEFAULT_NODES[domain.dim() - 1])?;
        Self::new(entries, p, k, grid, default_ladder(domain)?)
    }

    /// `|x|^(-a)` on `(-1, 1)` for each exponent, named `power(a)`.
    pub fn power_family(exponents: &[f64], p: f64) -> Result<Self> {
        let entries = exponents
            .iter()
            .map(|&a| CatalogEntry::new(format!("power({a})"), SymbolicFunction::power(&[0.0], a)))
            .collect();
        Self::on_domain(entries, p, 0, &BoxDomain::interval(-1.0, 1.0)?)
    }

    /// Power catalog whose relation is genuinely partial at `p = 2`:
    /// `0.45` pairs with nothing, and `0.1 - 0.35` pairs while `0.2 - 0.35` does not.
    pub fn partial_power_demo() -> Result<Self> {
        Self::power_family(&[0.1, 0.2, 0.35, 0.45], 2.0)
    }

    /// Three bounded entries, so every product stays in `L^p`.
    pub fn full_demo() -> Result<Self> {
        let bump = SymbolicFunction::bump(&[0.0], 0.5);
        let entries = vec![
            CatalogEntry::new("one", SymbolicFunction::constant(1.0)),
            CatalogEntry::new("bump", bump.clone()),
            CatalogEntry::new(
                "two_plus_bump",
                SymbolicFunction::sum(vec![SymbolicFunction::constant(2.0), bump]),
            ),
        ];
        Self::on_domain(entries, 2.0, 0, &BoxDomain::interval(-1.0, 1.0)?)
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ladder(&self) -> &[Grid] {
        &self.ladder
    }

    pub fn function(&self, i: usize) -> Result<&SymbolicFunction> {
        self.entries
            .get(i)
            .map(|e| &e.function)
            .ok_or(Error::UnknownObject(i))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    /// Entry `i` sampled on the evaluation grid.
    pub fn realize(&self, i: usize) -> Result<GridFunction> {
        self.function(i)?.sample(&self.grid)
    }

    /// Same entries at other exponents.
    pub fn with_exponents(&self, p: f64, k: usize) -> Result<Self> {
        Self::new(
            self.entries.clone(),
            p,
            k,
            self.grid.clone(),
            self.ladder.clone(),
        )
    }

    /// Replaces entry `i`.
    pub fn with_entry(&self, i: usize, entry: CatalogEntry) -> Result<Self> {
        let mut entries = self.entries.clone();
        *entries.get_mut(i).ok_or(Error::UnknownObject(i))? = entry;
        Self::new(
            entries,
            self.p,
            self.k,
            self.grid.clone(),
            self.ladder.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_non_members() {
        let d = BoxDomain::interval(-1.0, 1.0).unwrap();
        let e = CatalogEntry::new("a", SymbolicFunction::constant(1.0));
        assert!(Catalog::on_domain(vec![e.clone(), e], 2.0, 0, &d).is_err());
        let bad = CatalogEntry::new("big", SymbolicFunction::power(&[0.0], 0.7));
        assert!(matches!(
            Catalog::on_domain(vec![bad], 2.0, 0, &d),
            Err(Error::InvalidCatalog(_))
        ));
    }

    #[test]
    fn demo_catalogs_build() {
        assert_eq!(Catalog::partial_power_demo().unwrap().len(), 4);
        assert_eq!(Catalog::full_demo().unwrap().len(), 3);
    }
}
