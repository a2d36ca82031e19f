//! Joint complete monotonicity of reciprocal polynomial nets `1/p(m,n)`,
//! their representing measures, and weighted 2-shifts built from them.

pub mod error;
pub mod measures;
pub mod monotonicity;
pub mod operators;
pub mod poly;

pub use error::{Error, Result};
