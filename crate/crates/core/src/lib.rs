//! Self-similar tilings from rational power series over F_p.

pub mod cli;
pub mod error;
pub mod expand;
pub mod ff;
pub mod poly;
pub mod scenarios;
pub mod substitution;
pub mod tiling;

pub use error::{Error, Result};
