pub mod complexes;
pub mod error;
pub mod experiments;
pub mod homology;
pub mod interleave;
pub mod io;
pub mod measures;
pub mod metric;
pub mod rng;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/metrics.md")]
mod book_metrics {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/bifiltrations.md")]
mod book_bifiltrations {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/invariants.md")]
mod book_invariants {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/measures.md")]
mod book_measures {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/interleavings.md")]
mod book_interleavings {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/experiments.md")]
mod book_experiments {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
