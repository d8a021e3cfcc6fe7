//! Computation kernels for experiments on Dirichlet L-functions over the
//! polynomial ring F_q[T].
//!
//! Everything in this crate is deterministic: fixed summation orders,
//! table-driven roots of unity, and integer exponent arithmetic wherever a
//! character value is needed. IO, parallel sweeps and report formats live in
//! the companion CLI crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;

pub mod bounds;
pub mod dft;
pub mod ffpoly;
pub mod lseries;
pub mod mollifier;
pub mod moments;
pub mod residue;
pub mod sum;

pub use error::{Error, Result};
