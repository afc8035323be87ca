//! Profunctorial semantics of multiplicative linear logic (with Mix) on finite
//! groupoids, and semantic correctness checking of proof structures.

pub mod check;
pub mod error;
pub mod creed;
pub mod defin;
pub mod grpd;
pub mod interp;
pub mod mll;
pub mod prof;
pub mod total;
mod union_find;

pub use error::{Error, Result};
pub use grpd::{Groupoid, GroupoidFunctor, Mor, Obj, Subgroup};
