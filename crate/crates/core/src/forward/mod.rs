//! Analytic forward model for a concentric disk inclusion with a
//! strain-gradient interface in antiplane shear.

mod displacement;
mod kernel;
mod matrix;
mod modes;
mod params;

pub use displacement::{solve_displacement, BoundaryData, DisplacementField, FieldMode, PolarPoint};
pub use kernel::{build_kernel_spectrum, evaluate_kernel, KernelSpectrum};
pub use matrix::{assemble_dtn_matrix, boundary_nodes, forward_apply, DtnMatrix, MATRIX_MAGIC};
pub use modes::{kappa_closed_form, solve_mode_system, ModeCoefficients};
pub use params::MaterialParams;
