//! Exact 2-descent and the Cassels-Tate pairing on the 2-Selmer group of
//! elliptic curves `y^2 = (x - e1)(x - e2)(x - e3)` over Q.

pub mod arith;
pub mod covering;
pub mod error;
pub mod descent;
pub mod local;
pub mod pairing;

pub use arith::{Place, Rational, SquareClass};
pub use error::{Error, Result};
pub use local::{AlgebraClass, SymbolValue};
