//! Hausdorff dimension computations for self-similar groups acting on the
//! m-adic rooted tree.

pub mod bsv;
pub mod cli;
pub mod dimension;
pub mod error;
pub mod intlin;
pub mod logindex;
pub mod perm;
pub mod tree;

pub use error::{Error, Result};
