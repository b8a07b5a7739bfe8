//! Energy-stable continuous Galerkin discretisation in summation-by-parts form.
//!
//! The crate builds Gauss-Lobatto Lagrange elements, the per-element SBP
//! operators (mass `P`, weak derivative `Qx`, boundary `B`, strong derivative
//! `Dx`), Galerkin-weighted artificial dissipation, and the globally merged
//! CG system with weakly imposed (SAT) boundary conditions. On top of that
//! sit steady and transient drivers for advection-diffusion, linear
//! advection and split-form Burgers, plus error metrics and a WENO3
//! finite-difference baseline.
//!
//! Everything here is `no_std` + `alloc`; file formats and the command line
//! live in the `sbpcg` crate.

#![no_std]

extern crate alloc;

pub mod banded;
pub mod basis;
pub mod dissipation;
mod error;
pub mod fp;
pub mod mesh;
pub mod metrics;
pub mod sat;
pub mod sbp;
pub mod solvers;
pub mod weno;

pub use error::{Error, Result};

/// Dense matrix type used for element-level operators.
pub type Matrix = nalgebra::DMatrix<f64>;
