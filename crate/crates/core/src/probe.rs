//! Right-hand sides for the range test: boundary traces of the normal
//! derivative of the unit-disk Dirichlet Green's function (the Poisson kernel).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::forward::boundary_nodes;

/// Sampling point `z = r (cos theta_z, sin theta_z)` strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    r: f64,
    theta_z: f64,
}

impl SamplePoint {
    pub fn new(r: f64, theta_z: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) || !theta_z.is_finite() {
            return Err(Error::OutsideDomain { r });
        }
        Ok(SamplePoint { r, theta_z })
    }

    pub fn from_cartesian(x: f64, y: f64) -> Result<Self> {
        Self::new(x.hypot(y), y.atan2(x))
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta_z(&self) -> f64 {
        self.theta_z
    }

    pub fn x(&self) -> f64 {
        self.r * self.theta_z.cos()
    }

    pub fn y(&self) -> f64 {
        self.r * self.theta_z.sin()
    }
}

/// `(1 / 2 pi) (1 - r^2) / (r^2 + 1 - 2 r cos(theta - theta_z))`.
pub fn poisson_normal_derivative(z: &SamplePoint, theta: f64) -> f64 {
    let r = z.r;
    (1.0 - r * r) / (r * r + 1.0 - 2.0 * r * (theta - z.theta_z).cos()) / (2.0 * PI)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeVector {
    /// Poisson kernel sampled at the collocation nodes.
    pub raw: Vec<f64>,
    /// `raw` minus its discrete mean.
    pub centered: Vec<f64>,
    /// `centered / norm_raw`.
    pub normalized: Vec<f64>,
    /// Euclidean norm of `raw` (not of `centered`).
    pub norm_raw: f64,
}

pub fn assemble_probe(z: &SamplePoint, n: usize) -> Result<ProbeVector> {
    if n < 4 {
        return Err(Error::InvalidParameter {
            name: "n_boundary",
            reason: format!("need at least 4 collocation nodes, got {n}"),
        });
    }
    let raw: Vec<f64> = boundary_nodes(n)
        .into_iter()
        .map(|t| poisson_normal_derivative(z, t))
        .collect();
    // Shifted mean: exact for constant data (the origin), where the plain sum rounds.
    let shift = raw[0];
    let offset = raw.iter().map(|v| v - shift).sum::<f64>() / n as f64;
    let centered: Vec<f64> = raw.iter().map(|v| (v - shift) - offset).collect();
    let norm_raw = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let normalized = centered.iter().map(|v| v / norm_raw).collect();
    Ok(ProbeVector {
        raw,
        centered,
        normalized,
        norm_raw,
    })
}
