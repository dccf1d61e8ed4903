use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Material description of the concentric-disk configuration.
///
/// The outer shear modulus is scaled to one, so `mu` is the inclusion to
/// matrix modulus ratio. The interface carries stiffness `mu_s` and squared
/// gradient length `ell2`; the inclusion boundary is the circle of radius
/// `rho` inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct MaterialParams {
    mu: f64,
    mu_s: f64,
    ell2: f64,
    rho: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawParams {
    mu: f64,
    mu_s: f64,
    ell2: f64,
    rho: f64,
}

impl TryFrom<RawParams> for MaterialParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        MaterialParams::new(raw.mu, raw.mu_s, raw.ell2, raw.rho)
    }
}

impl From<MaterialParams> for RawParams {
    fn from(p: MaterialParams) -> Self {
        RawParams {
            mu: p.mu,
            mu_s: p.mu_s,
            ell2: p.ell2,
            rho: p.rho,
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

impl MaterialParams {
    pub fn new(mu: f64, mu_s: f64, ell2: f64, rho: f64) -> Result<Self> {
        positive("mu", mu)?;
        positive("mu_s", mu_s)?;
        positive("ell2", ell2)?;
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("must lie in (0, 1), got {rho}"),
            });
        }
        Ok(MaterialParams { mu, mu_s, ell2, rho })
    }

    /// The first numerical example: rho = 0.7, mu = 2, mu_s = 0.1, ell2 = 1e-3.
    pub fn example_one() -> Self {
        MaterialParams {
            mu: 2.0,
            mu_s: 0.1,
            ell2: 1e-3,
            rho: 0.7,
        }
    }

    /// Bypasses validation so fixtures can reach the zero-interface limit.
    #[cfg(test)]
    pub(crate) fn unchecked(mu: f64, mu_s: f64, ell2: f64, rho: f64) -> Self {
        MaterialParams { mu, mu_s, ell2, rho }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn mu_s(&self) -> f64 {
        self.mu_s
    }

    pub fn ell2(&self) -> f64 {
        self.ell2
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        Self::new(mu, self.mu_s, self.ell2, self.rho)
    }

    /// Interface contribution `(mu_s n + mu_s ell2 n^3 / rho^2) / rho` of mode `n`
    /// after dividing the stress-jump row by `n rho^(n-1)`.
    pub(crate) fn interface_weight(&self, n: f64) -> f64 {
        let rho = self.rho;
        (self.mu_s * n + self.mu_s * self.ell2 * n.powi(3) / (rho * rho)) / rho
    }
}
