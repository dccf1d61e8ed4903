//! Full displacement field for given boundary data.

use crate::error::{Error, Result};
use crate::forward::{solve_mode_system, MaterialParams, ModeCoefficients};

/// Real Fourier series `f0 + sum_{n>=1} (cos[n-1] cos n theta + sin[n-1] sin n theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub f0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl BoundaryData {
    pub fn constant(f0: f64) -> Self {
        BoundaryData {
            f0,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn n_max(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    fn coeff(&self, n: usize) -> (f64, f64) {
        (
            self.cos.get(n - 1).copied().unwrap_or(0.0),
            self.sin.get(n - 1).copied().unwrap_or(0.0),
        )
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        (1..=self.n_max()).fold(self.f0, |acc, n| {
            let (c, s) = self.coeff(n);
            let t = n as f64 * theta;
            acc + c * t.cos() + s * t.sin()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

/// Coefficients of one retained mode, cosine and sine parts side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMode {
    pub n: usize,
    pub coefficients: ModeCoefficients,
    pub f_cos: f64,
    pub f_sin: f64,
}

impl FieldMode {
    /// `(a_n, b_n, c_n)` for the cosine part.
    pub fn cos_coefficients(&self) -> (f64, f64, f64) {
        let c = &self.coefficients;
        (c.a_tilde * self.f_cos, c.b_tilde * self.f_cos, c.c_tilde * self.f_cos)
    }

    pub fn sin_coefficients(&self) -> (f64, f64, f64) {
        let c = &self.coefficients;
        (c.a_tilde * self.f_sin, c.b_tilde * self.f_sin, c.c_tilde * self.f_sin)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    pub params: MaterialParams,
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub modes: Vec<FieldMode>,
    pub grid: Vec<PolarPoint>,
    pub values: Vec<f64>,
}

impl DisplacementField {
    /// Evaluates the series at `(r, theta)`: annulus branch for `r > rho`,
    /// inclusion branch for `r <= rho`.
    pub fn evaluate(&self, r: f64, theta: f64) -> f64 {
        let rho = self.params.rho();
        let inside = r <= rho;
        self.modes.iter().fold(if inside { self.c0 } else { self.a0 }, |acc, m| {
            let t = m.n as f64 * theta;
            let radial = if inside {
                m.coefficients.disk_profile(r)
            } else {
                m.coefficients.annulus_profile(r, rho)
            };
            acc + radial * (m.f_cos * t.cos() + m.f_sin * t.sin())
        })
    }
}

pub fn solve_displacement(
    params: &MaterialParams,
    data: &BoundaryData,
    grid: &[PolarPoint],
) -> Result<DisplacementField> {
    if let Some(p) = grid.iter().find(|p| !(p.r >= 0.0 && p.r <= 1.0)) {
        return Err(Error::OutsideDomain { r: p.r });
    }
    let modes = (1..=data.n_max())
        .map(|n| {
            let (f_cos, f_sin) = data.coeff(n);
            Ok(FieldMode {
                n,
                coefficients: solve_mode_system(n as i64, params)?,
                f_cos,
                f_sin,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut field = DisplacementField {
        params: *params,
        a0: data.f0,
        b0: 0.0,
        c0: data.f0,
        modes,
        grid: grid.to_vec(),
        values: Vec::new(),
    };
    field.values = grid.iter().map(|p| field.evaluate(p.r, p.theta)).collect();
    Ok(field)
}
