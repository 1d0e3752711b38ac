//! File formats, caching, parallel evaluation and the command-line front end for `lozenge-core`.

// `!(x <= tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod cli;
pub mod error;
pub mod io;
pub mod verify;

pub use cli::{dispatch, run, RunConfig};
pub use error::CliError;
