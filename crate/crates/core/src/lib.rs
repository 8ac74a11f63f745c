//! Mollifiers, weak derivatives and Sobolev membership on sampled boxes,
//! the partial product relation they induce on a catalog of functions, and
//! the finite groupoid, Haar system and convolution algebra built on it.
//!
//! The guide in `book/` walks through each layer; its snippets run as
//! doc-tests of this crate.

pub mod acceptance;
pub mod bundle;
pub mod domain;
pub mod error;
pub mod groupoid;
pub mod numerics;
pub mod partial;
pub mod smoothing;
pub mod weak;

pub use error::{Error, Result};

// One module per chapter so a failing snippet names its chapter.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            pub struct $name;
        };
    }
    chapter!(Introduction, "introduction.md");
    chapter!(Domains, "domains.md");
    chapter!(Mollifiers, "mollifiers.md");
    chapter!(WeakDerivatives, "weak-derivatives.md");
    chapter!(PartialAlgebra, "partial-algebra.md");
    chapter!(Groupoids, "groupoids.md");
    chapter!(Haar, "haar.md");
    chapter!(Representations, "representations.md");
    chapter!(Cli, "cli.md");
    chapter!(Acceptance, "acceptance.md");

    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
}
