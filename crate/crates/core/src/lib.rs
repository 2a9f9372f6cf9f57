//! Exact symbolic checks for quasihomogeneous degenerations over the
//! projective line: polynomial and ideal arithmetic over Q, sl2 and torus
//! actions, the quadric and F4 families with their gluings, cyclic quotient
//! terminality, and the combinatorics of ruled surfaces and twisted bundles.

pub mod actions;
pub mod degenerations;
pub mod groebner;
pub mod ideal;
mod linalg;
mod parse;
pub mod poly;
pub mod ruled;
pub mod singular;

pub use groebner::{Budget, IdealError};
pub use ideal::Ideal;
pub use poly::{Coeff, Monomial, MonomialOrder, PolyError, Polynomial, SubstitutionMap, VarContext};
