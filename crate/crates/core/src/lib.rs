//! Numerical laboratory for the extension operator of space curves and its
//! restriction to hypersurfaces and fractal measures.
//!
//! The crate is organised bottom-up:
//! [`curve`] (derivative oracles, torsion, finite type, rescalings),
//! [`measure`] (quadrature measures on spheres, hyperplanes, singular sets and
//! graph submanifolds), [`engine`] (oscillatory quadrature and norms),
//! [`extremal`] (stationary map, curvature matrix, Knapp boxes, input families),
//! [`exponents`] (closed-form exponent regions) and [`harness`] (sweeps, slope
//! fits, the randomized lower bound and the CLI drivers).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod curve;
pub mod engine;
pub mod error;
pub mod exponents;
pub mod extremal;
pub mod harness;
pub mod measure;
pub mod quadrature;
pub mod rational;

pub use error::{Error, Result};
