//! Stability of rank-one torsion-free sheaves on nodal curves, seen through the
//! dual graph, and the Namikawa decompositions of tropical Jacobians.
//!
//! All arithmetic is exact over the rationals. See the guide in `book/` for a
//! walk through the main concepts.

pub mod breakdiv;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod jacobian;
pub mod linalg;
pub mod lp;
pub mod rational;
pub mod reduce;
pub mod stability;
pub mod svg;
pub mod verify;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/oda-seshadri.md")]
    mod oda_seshadri {}
    #[doc = include_str!("../../../book/src/jacobian.md")]
    mod jacobian {}
    #[doc = include_str!("../../../book/src/break-divisors.md")]
    mod break_divisors {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
