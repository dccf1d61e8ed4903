use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regularization filter families. Only spectral cut-off ships.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterKind {
    #[default]
    SpectralCutoff,
}

impl FilterKind {
    pub fn factor(self, t: f64, alpha: f64) -> f64 {
        match self {
            FilterKind::SpectralCutoff => filter_factor(t, alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationSpec {
    pub alpha: f64,
    #[serde(default)]
    pub filter: FilterKind,
}

impl RegularizationSpec {
    pub fn spectral_cutoff(alpha: f64) -> Result<Self> {
        let spec = RegularizationSpec {
            alpha,
            filter: FilterKind::SpectralCutoff,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_finite() && self.alpha > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("must be finite and > 0, got {}", self.alpha),
            })
        }
    }

    pub fn factor(&self, t: f64) -> f64 {
        self.filter.factor(t, self.alpha)
    }
}

/// Spectral cut-off: 1 when `t^2 >= alpha`, else 0.
pub fn filter_factor(t: f64, alpha: f64) -> f64 {
    if t * t >= alpha {
        1.0
    } else {
        0.0
    }
}
