use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::DtnMatrix;

const POWER_ITERATIONS: usize = 200;
const POWER_TOLERANCE: f64 = 1e-10;

/// Relative multiplicative noise `A_ij (1 + delta E_ij)`, `||E||_2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub delta: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(delta: f64, seed: u64) -> Result<Self> {
        let spec = NoiseSpec { delta, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn noiseless() -> Self {
        NoiseSpec { delta: 0.0, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta.is_finite() && self.delta >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("must be finite and >= 0, got {}", self.delta),
            })
        }
    }
}

/// Spectral norm estimate by power iteration on `E^T E`.
///
/// Returns `(estimate, converged)`.
pub fn power_iteration_norm(e: &DMatrix<f64>) -> (f64, bool) {
    let n = e.ncols();
    if n == 0 {
        return (0.0, true);
    }
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let w = e.transpose() * (e * &v);
        let norm = w.norm();
        if norm == 0.0 {
            return (0.0, true);
        }
        let next = norm.sqrt();
        v = w / norm;
        if (next - estimate).abs() <= POWER_TOLERANCE * next {
            return (next, true);
        }
        estimate = next;
    }
    (estimate, false)
}

/// Uniform `[-1, 1]` entries, drawn row-major from a ChaCha8 stream seeded by
/// `seed`, rescaled to unit spectral norm.
pub fn unit_noise_matrix(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = DMatrix::from_row_iterator(n, n, (0..n * n).map(|_| rng.random_range(-1.0..=1.0)));
    let (estimate, converged) = power_iteration_norm(&e);
    // Power iteration stalls when the top two singular values are close; the
    // direct norm settles it.
    let direct = e.clone().singular_values().max();
    let norm = if converged && (estimate - direct).abs() <= POWER_TOLERANCE * direct {
        estimate
    } else {
        direct
    };
    if norm > 0.0 {
        e / norm
    } else {
        e
    }
}

pub fn inject_noise(a: &DtnMatrix, spec: &NoiseSpec) -> Result<DtnMatrix> {
    spec.validate()?;
    if spec.delta == 0.0 {
        return Ok(a.clone());
    }
    let e = unit_noise_matrix(a.size(), spec.seed);
    let noisy = a.as_matrix().zip_map(&e, |aij, eij| aij * (1.0 + spec.delta * eij));
    DtnMatrix::from_matrix(noisy)
}

/// `||A^delta - A||_2 / ||A||_2`.
pub fn relative_perturbation(clean: &DtnMatrix, noisy: &DtnMatrix) -> f64 {
    let diff = noisy.as_matrix() - clean.as_matrix();
    let denom = clean.as_matrix().clone().singular_values().max();
    if denom == 0.0 {
        return 0.0;
    }
    diff.singular_values().max() / denom
}
