//! Coset combinatorics of W(E7) over W(E6) and of W(D6) over its J and L
//! invariance subgroups, together with the unit-argument hypergeometric
//! numerics for the M, J and L functions they act on.

pub mod acceptance;
pub mod error;
pub mod coxeter;
pub mod correspond;
pub mod exactalg;
pub mod hypnum;
pub mod sample;

pub use error::{Error, Result};
