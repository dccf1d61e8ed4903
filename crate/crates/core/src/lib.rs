//! Boundary force measurements for an elastic inclusion with a strain-gradient
//! interface under antiplane shear, and the inverse problems built on them.
//!
//! * [`forward`] synthesizes the kernel of `Lambda - Lambda_0` for a
//!   concentric disk inclusion and its collocation matrix.
//! * [`probe`] builds Poisson-kernel right-hand sides for sampling points.
//! * [`inversion`] adds noise, decomposes the matrix and evaluates the
//!   spectral cut-off factorization indicator on a grid.
//! * [`parameters`] computes the coercivity threshold and fits
//!   `(mu, mu_s, ell2)` to kernel data.
//! * [`pipeline`] and [`cli`] run complete experiments.

pub mod cli;
pub mod error;
pub mod forward;
pub mod inversion;
pub mod parameters;
pub mod pipeline;
pub mod probe;

pub use error::{Error, Result};
