//! The relation Gamma of compatible products, multipliers and the
//! reciprocal involution on finite catalogs.

mod catalog;
mod gamma;
mod involution;
mod multipliers;

pub use catalog::{Catalog, CatalogEntry};
pub use gamma::{
    build_gamma, gamma_member, product_verdict, GammaRelation, GammaVerdict, PairVerdict,
};
pub use involution::{involution, involutivity_defect, star_antihom_check, StarCheck, DEFAULT_ETA};
pub use multipliers::{
    ideal_check, multipliers, IdealReport, IdealViolation, MultiplierReport, ProductRow,
};
