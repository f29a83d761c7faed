//! Exact graded linear algebra, Tate series seminorms and tame Galois descent
//! for closed polydiscs and laces over Laurent series fields.

pub mod descent;
pub mod error;
pub mod finite_field;
pub mod graded_field;
pub mod laurent;
pub mod linalg;
pub mod scenario;
pub mod tate;
pub mod value_group;
pub mod zshape;

pub use error::{Error, Result};
pub use finite_field::{FiniteField, Fq};
pub use value_group::{Gamma, Point, Rational, ValueOrZero};
