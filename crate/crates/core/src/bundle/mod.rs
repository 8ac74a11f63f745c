//! Sections over the groupoid, their convolution algebra, the Hilbert
//! bundle of target fibres and the left regular representation.

mod hilbert;
mod nets;
mod regular;
mod section;

pub use hilbert::{section_inner, section_norm, BundleMeasureSet, HilbertFibre};
pub use nets::{
    catalog_distances, dynamics_demo, fundamental_net_check, shadow_scales, DynamicsRow,
    FundamentalNet, NetReport, RANK_TOL,
};
pub use regular::{
    homomorphism_check, inverse_check, left_regular, unitarity_check, RegularOperator,
    RepresentationCheck,
};
pub use section::{convolve_sections, section_involution, Convolution, Leak, Section};
