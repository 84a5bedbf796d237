//! Exact arithmetic: integer-coefficient polynomials, rational functions, resultants, real
//! root isolation and small polynomial systems.

pub mod gcd;
pub mod linalg;
pub mod poly;
pub mod resultant;
pub mod rf;
pub mod roots;
pub mod ser;
pub mod solve;
pub mod var;

pub use gcd::{gcd, squarefree_part};
pub use poly::MultiPoly;
pub use resultant::resultant;
pub use rf::{RationalFunction, RfError};
pub use roots::{isolate_real_roots, Interval, IsolatingBox};
pub use solve::{solve_system, SolveOutcome, SolveReport};
pub use var::{Mono, Var};

/// Exact rational numbers.
pub type BigRational = rug::Rational;
