//! Exact computational engine for lozenge tilings of the triangular lattice
//! with triangular holes.
//!
//! The crate is `no_std` (with `alloc`). It evaluates the coupling function
//! exactly, assembles correlation determinants, derives lozenge placement
//! probabilities and the discrete orientation field, builds the limiting
//! ζ-matrices and Coulomb fields, lifts probabilities to average height
//! surfaces, and provides an independent tiling-enumeration oracle.

#![cfg_attr(not(test), no_std)]
// `!(x <= tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod continuum;
pub mod correlation;
pub mod coupling;
pub mod ddouble;
pub mod eisenstein;
mod error;
pub mod exact;
pub mod lattice;
pub mod oracle;
pub mod surface;

pub use error::Error;
