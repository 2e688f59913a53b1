//! Numerical toolkit for oscillatory integrals with complex polynomial phases:
//! derivative functionals, certified Newton iterations, sublevel-set measures,
//! root-cluster bounds and the moment-curve coefficient problem.

pub mod cpoly;
pub mod error;
pub mod fit;
pub mod functionals;
pub mod hensel;
pub mod oscint;
pub mod psbound;
pub mod sublevel;
pub mod tarry;

pub use cpoly::C64;
pub use error::{Error, ErrorKind, Result};
