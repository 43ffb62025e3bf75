//! Class groups, zero-sum sequences and the arithmetic of Krull monoids.
//!
//! All arithmetic is exact. Finite groups are handled completely; infinite
//! ones only under explicit caps, and every result carries the cap it was
//! computed under.

pub mod abelian;
pub mod error;
pub mod krull;
pub mod lengths;
pub mod realize;
pub mod zerosum;

pub use error::{Error, Result};
