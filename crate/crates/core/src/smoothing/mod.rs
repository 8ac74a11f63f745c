//! The smooth algebra: the standard bump kernel, its scalings, and
//! convolution against grid functions.

mod kernel;
mod mollifier;
mod net;

pub use kernel::Kernel;
pub use mollifier::{
    closure_check, convolve, convolve_derivative, make_mollifier, required_nodes, ClosureReport,
    Mollified, MollifierElement,
};
pub use net::{convergence_slope, net_convergence, NetRow, SmoothNet};
