//! Exact enumeration oracle and convergence estimation.

mod convergence;
mod dp;

pub use convergence::*;
pub use dp::*;
