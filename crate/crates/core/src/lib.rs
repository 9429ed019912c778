//! Logarithmic potential operator on the Poincaré disk.
//!
//! The crate is layered bottom-up:
//!
//! - [`hypgeo`]: disk model geometry, geodesics, reflections, hyperbolic disks.
//! - [`domain`]: quadrature grids, masks, fields and two-point polarization.
//! - [`operator`]: the kernel `½ log(1/[z,w])` and its symmetric Nyström matrix.
//! - [`spectral`]: dense symmetric eigensolvers and a radial reference solver.
//! - [`experiments`]: seeded numerical checks with serializable reports.
//! - [`cli`]: the `hyplog` command line.

pub mod cli;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod hypgeo;
pub mod operator;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
