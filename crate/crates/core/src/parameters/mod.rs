//! Inverse parameter problem: the coercivity threshold and kernel-data fits.

mod coercivity;
mod fit;

pub use coercivity::{
    compute_mu0, disk_positivity_margin, positivity_polynomial, positivity_slope, CoercivityReport,
};
pub use fit::{fit_parameters, linearized_seed, FitResult};
