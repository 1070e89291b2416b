//! Semi-competitive differential game logic over finite models.

pub mod calculus;
pub mod model;
pub mod oracle;
pub mod semantics;
pub mod syntax;
pub mod transform;

/// Exact scalar used throughout.
pub type Rational = num_rational::BigRational;
