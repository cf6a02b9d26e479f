//! Dynamical degrees of monomial maps on products of projective lines and of
//! multihomogeneous rational maps on multiprojective spaces, together with
//! relative degrees for maps preserving a coordinate fibration.

pub mod cli;
pub mod cohomology;
pub mod degrees;
pub mod matrix;
pub mod monomial;
pub mod oracle;
pub mod profile;
pub mod rational;
