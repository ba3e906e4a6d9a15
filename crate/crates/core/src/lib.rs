//! Extremal monic polynomials and Widom factors for measures on compact
//! subsets of the real line, together with the potential theory of
//! finite-gap sets needed to evaluate them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod extremal;
pub mod isotorus;
pub mod measures;
pub mod orthopoly;
pub mod potential;
pub mod quadrature;
pub mod szego;
mod tridiag;

pub use error::{Error, Result};
