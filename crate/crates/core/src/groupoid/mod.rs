//! The finite groupoid over a symmetric relation, its fibres, bisections
//! and Haar systems.

mod action;
mod bisection;
mod fibre;
mod haar;
mod tables;

pub use action::{fibre_action_check, FibreActionReport, FibreActionRow, MollifiedProductField};
pub use bisection::{enumerate_bisections, Bisection, MAX_BISECTION_OBJECTS};
pub use fibre::{fibre, Direction, Fibre};
pub use haar::{
    haar_invariance_check, random_arrow_functions, ArrowDefect, HaarReport, HaarSystem,
};
pub use tables::{
    axiom_check, build_groupoid, Arrow, AxiomReport, DefinedSide, GroupoidTables, PartialityDefect,
};
