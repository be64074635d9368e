//! Weighted L² extension of holomorphic functions from curves in ℂ².
//!
//! `fockext` works in the Bargmann–Fock setting: ambient functions are
//! entire functions on ℂ² with finite norm against `e^{-|z|²}` (or a
//! positive-definite quadratic weight), and data live on a complex curve
//! `W ⊂ ℂ²`, possibly singular. The crate provides
//!
//! * exact and quadrature Fock norms, ball averages and Bergman-type
//!   sup/gradient ratios ([`fock`]),
//! * constructors and surface sampling for the model hyperbola, the curve
//!   `xy sin y = 1`, line arrangements and the comb ([`geometry`]),
//! * the density tensor, density ratios, the singular weight `s_r` and the
//!   gradient diagnostic of `e^{s_r/2}` ([`density`]),
//! * uniform-flatness certificates ([`uniflat`]),
//! * the explicit and minimal extension operators for the model curve
//!   ([`extend_model`]), minimal-norm extension from collocation data and
//!   branch induction at normal crossings ([`extend_min`]),
//! * the interpolation blow-up on the comb ([`counterexample`]).
//!
//! The `book/` directory at the repository root walks through the concepts;
//! its code listings are compiled as doc-tests of this crate.

pub mod counterexample;
pub mod density;
pub mod error;
pub mod extend_min;
pub mod extend_model;
pub mod fock;
pub mod geometry;
pub mod linalg;
pub mod point;
pub mod poly;
pub mod quad;
pub mod report;
pub mod rng;
pub mod roots;
pub mod uniflat;
pub mod weight;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use point::Point2;
pub use poly::{Poly1, Poly2};
pub use weight::Weight;

// Compile the book's listings as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/fock.md")]
    mod fock {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/density.md")]
    mod density {}
    #[doc = include_str!("../../../book/src/flatness.md")]
    mod flatness {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/minimal.md")]
    mod minimal {}
    #[doc = include_str!("../../../book/src/comb.md")]
    mod comb {}
}
