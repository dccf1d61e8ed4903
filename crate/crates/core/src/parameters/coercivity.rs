//! Sufficient threshold `mu0` on the modulus ratio for positivity of the
//! interface operator minus `(1 - mu)` times the inclusion DtN map.
//!
//! With `u(z) = mu_s z^2 + mu_s ell2 z^4 - (1 - mu) z - |1 - mu| b`, positivity
//! follows from `u(z_min) > 0` and `u'(z_min) > 0`. On a disk of radius `rho`
//! the square root of the surface Laplacian has eigenvalues `n / rho`, so
//! `z_min = 1 / rho`; the report also carries the value obtained when the
//! conditions are evaluated at `sqrt(1 / rho)` instead.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::forward::MaterialParams;

const BISECTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoercivityReport {
    pub mu0: f64,
    pub z_min: f64,
    pub b_norm: f64,
    /// `u_{mu0}(z_min)`.
    pub u_at_mu0: f64,
    /// `u'_{mu0}(z_min)`.
    pub du_at_mu0: f64,
    /// `max(0, 1 - (mu_s z + mu_s ell2 z^3))`, only defined for `b_norm = 0`.
    pub closed_form: Option<f64>,
    /// Evaluation point of the alternative convention, `sqrt(1 / rho)`.
    pub z_alt: f64,
    pub mu0_alt: f64,
}

impl CoercivityReport {
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mu0={}", self.mu0);
        let _ = writeln!(out, "z_min={}", self.z_min);
        let _ = writeln!(out, "b_norm={}", self.b_norm);
        let _ = writeln!(out, "u_at_mu0={:e}", self.u_at_mu0);
        let _ = writeln!(out, "du_at_mu0={:e}", self.du_at_mu0);
        match self.closed_form {
            Some(v) => {
                let _ = writeln!(out, "closed_form={v}");
            }
            None => out.push_str("closed_form=\n"),
        }
        let _ = writeln!(out, "z_alt={}", self.z_alt);
        let _ = writeln!(out, "mu0_alt={}", self.mu0_alt);
        out
    }

    pub fn to_csv(&self) -> String {
        let closed = self.closed_form.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "mu0,z_min,b_norm,u_at_mu0,du_at_mu0,closed_form,z_alt,mu0_alt\n{},{},{},{:e},{:e},{},{},{}\n",
            self.mu0, self.z_min, self.b_norm, self.u_at_mu0, self.du_at_mu0, closed, self.z_alt, self.mu0_alt
        )
    }
}

/// `u_mu(z)`.
pub fn positivity_polynomial(z: f64, mu: f64, mu_s: f64, ell2: f64, b_norm: f64) -> f64 {
    mu_s * z * z + mu_s * ell2 * z.powi(4) - (1.0 - mu) * z - (1.0 - mu).abs() * b_norm
}

/// `u_mu'(z)`.
pub fn positivity_slope(z: f64, mu: f64, mu_s: f64, ell2: f64) -> f64 {
    2.0 * mu_s * z + 4.0 * mu_s * ell2 * z.powi(3) - (1.0 - mu)
}

fn threshold_at(z: f64, mu_s: f64, ell2: f64, b_norm: f64) -> f64 {
    let holds = |mu: f64| {
        positivity_polynomial(z, mu, mu_s, ell2, b_norm) > 0.0 && positivity_slope(z, mu, mu_s, ell2) > 0.0
    };
    if holds(0.0) {
        return 0.0;
    }
    // holds(1) is guaranteed: both expressions reduce to positive interface terms.
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn compute_mu0(params: &MaterialParams, b_norm: f64) -> Result<CoercivityReport> {
    if !(b_norm.is_finite() && b_norm >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "b_norm",
            reason: format!("must be finite and >= 0, got {b_norm}"),
        });
    }
    let (mu_s, ell2) = (params.mu_s(), params.ell2());
    let z_min = 1.0 / params.rho();
    let mu0 = threshold_at(z_min, mu_s, ell2, b_norm);
    let z_alt = z_min.sqrt();
    let closed_form =
        (b_norm == 0.0).then(|| f64::max(0.0, 1.0 - (mu_s * z_min + mu_s * ell2 * z_min.powi(3))));
    Ok(CoercivityReport {
        mu0,
        z_min,
        b_norm,
        u_at_mu0: positivity_polynomial(z_min, mu0, mu_s, ell2, b_norm),
        du_at_mu0: positivity_slope(z_min, mu0, mu_s, ell2),
        closed_form,
        z_alt,
        mu0_alt: threshold_at(z_alt, mu_s, ell2, b_norm),
    })
}

/// Minimum over `n = 1..=n_max` of the diagonal entries
/// `mu_s l^2 + mu_s ell2 l^4 - (1 - mu) l - |1 - mu| b`, `l = n / rho`, of the
/// interface operator minus `(1 - mu)` times the disk DtN map (plus the `B` bound).
pub fn disk_positivity_margin(params: &MaterialParams, mu: f64, b_norm: f64, n_max: usize) -> f64 {
    (1..=n_max)
        .map(|n| {
            let l = n as f64 / params.rho();
            positivity_polynomial(l, mu, params.mu_s(), params.ell2(), b_norm)
        })
        .fold(f64::INFINITY, f64::min)
}
