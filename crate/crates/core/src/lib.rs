//! Lower bounds on the rate at which GHZ states can be distilled from
//! multipartite pure states, together with a simulator for the randomized
//! partition protocol behind them.

// Guards written as `!(x > 0.0)` deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod lp;
pub mod marginals;
pub mod protocol;
pub mod rng;
pub mod states;
pub mod subrank;

pub use error::{Error, Result};
