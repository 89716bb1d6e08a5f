//! Exact counts of simply ramified covers of the punctured plane `ℂ×`, computed both as
//! transposition factorizations in `S_d` and as sums of graph integrals, with tools to
//! cross-check the two.

pub mod cli;
pub mod covers;
mod decimal;
pub mod error;
pub mod graph;
pub mod integrals;
pub mod partition;
pub mod perm;

pub use error::{Error, Result};
