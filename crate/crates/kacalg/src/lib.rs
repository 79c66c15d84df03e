//! Finite-dimensional Kac algebras, iterated crossed products, Jones basic
//! constructions and relative-commutant solvers, with a desk-scale
//! verification harness for the quantum double inclusion invariants.

pub mod algebra;
pub mod crossed;
pub mod error;
pub mod kac;
pub mod gns;
pub mod jones;
pub mod linalg;
pub mod scalar;
pub mod tower;
pub mod zoo;

pub use error::{KacError, Result};
