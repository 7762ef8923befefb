//! Algebraic unramified Brauer groups of homogeneous spaces with finite
//! stabilizer, computed from norm maps on conjugacy classes.

pub mod abelian;
pub mod brauer;
pub mod cohomology;
pub mod corpus;
pub mod error;
pub mod galois;
pub mod group;
pub mod job;
pub mod norms;
pub mod oracle;

pub use error::{Error, Result};
