//! Rational self-maps of multiprojective spaces given by integer
//! multihomogeneous polynomials, iterated symbolically with full cancellation.

pub mod gcd;
pub mod map;
pub mod poly;

pub use map::{
    fiber_degree, iterate_multidegrees, IterateOptions, IterateResult, MultiHomPoly, RationalError,
    RationalMapDesc, DEFAULT_DEGREE_CAP, DEFAULT_ITERATES,
};
pub use poly::Poly;
