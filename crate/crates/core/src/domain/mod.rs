//! Boxes, grids, sampled functions and quadrature.

mod function;
mod grid;
mod growth;
pub mod radial;
mod symbolic;

pub use function::GridFunction;
pub use grid::{validate_ladder, BoxDomain, Grid, Point, MIN_NODES_PER_AXIS};
pub use growth::{norm_growth, ClassicalDerivative, Field, GrowthReport, Verdict, MARGINAL_SLOPE};
pub use symbolic::{Locus, Singularities, Site, SymbolicFunction};
