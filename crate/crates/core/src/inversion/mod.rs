//! Noise model, spectral decomposition and the regularized factorization
//! imaging functional.

mod filter;
mod imaging;
mod noise;
mod svd;

pub use filter::{filter_factor, FilterKind, RegularizationSpec};
pub use imaging::{
    build_imaging_map, image_from_svd, indicator, GridPoint, GridSpec, Imager, ImagingMap, Indicator,
    DEGENERATE_THRESHOLD,
};
pub use noise::{inject_noise, power_iteration_norm, relative_perturbation, unit_noise_matrix, NoiseSpec};
pub use svd::{decompose, SvdSystem};
