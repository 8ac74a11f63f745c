//! Weak derivatives, Sobolev norms and membership.

mod derivative;
mod membership;
mod multi_index;
mod panel;
mod sobolev;

pub use derivative::{
    estimate_weak_derivative, mollify_commutes, piecewise_constant_search, uniqueness_constant,
    verify_weak_derivative, CandidateSearch, WeakResidual, MAX_CANDIDATES,
};
pub use membership::{
    analytic_membership, default_ladder, sobolev_membership, Membership, MembershipReport,
    OrderCheck, MARGINAL_BAND,
};
pub use multi_index::MultiIndex;
pub use panel::{TestFunctionPanel, DEFAULT_PANEL_SIZE, DEFAULT_SEED, MIN_PANEL_SIZE};
pub use sobolev::{
    combine_norms, mollified_sobolev_distance, sobolev_norm, DerivativeSource, SobolevReport,
    SobolevTerm,
};
