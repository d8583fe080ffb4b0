//! Computational universal algebra on small finite algebras: congruence
//! lattices, term-condition centralizers, similarity of subdirectly
//! irreducible algebras, and bridges between meet-irreducible congruences.

pub mod algebra;
pub mod bridges;
pub mod builtin;
pub mod closure;
pub mod commutator;
pub mod congruence;
pub mod error;
pub mod harness;
pub mod io;
pub mod limits;
pub mod relation;
pub mod similarity;
pub mod terms;

pub use algebra::{ElementMap, FiniteAlgebra, Operation, ProductCodec};
pub use congruence::Congruence;
pub use error::{Error, Result};
pub use limits::Limits;
pub use relation::{BinRel, Quad, QuadRel};
