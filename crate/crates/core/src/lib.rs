//! Exact simulation and verification of betting strategies whose wagers are
//! restricted to a prescribed set.

pub mod domination;
pub mod error;
pub mod evasion;
pub mod harness;
pub mod martingale;
pub mod value;
pub mod wagerset;

pub use error::{Error, Result};
pub use value::{Precision, Value};
pub use wagerset::{ScalingAnswer, WagerSet};
