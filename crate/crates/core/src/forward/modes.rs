//! Per-mode transmission problem for the concentric disk.
//!
//! For a boundary datum `e^{i n theta}` the displacement is
//! `a r^|n| + b r^-|n|` in the annulus and `c r^|n|` in the inclusion. The
//! Dirichlet row, trace continuity at `r = rho` and the stress jump with the
//! fourth-order interface operator form a 3x3 system for the normalized
//! coefficients `(a~, b~, c~)`.

use crate::error::{Error, Result};
use crate::forward::MaterialParams;

/// Normalized Fourier coefficients of mode `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub n: i64,
    pub a_tilde: f64,
    pub b_tilde: f64,
    pub c_tilde: f64,
    /// `a~ - b~`.
    pub sigma: f64,
    /// `b~ / rho^(2|n|)`, kept so the annulus series can be evaluated without
    /// forming `r^-|n|` for large `n`.
    pub b_reduced: f64,
    /// Max over rows of the componentwise backward error of the equilibrated system.
    pub residual: f64,
}

impl ModeCoefficients {
    /// `|n| (sigma_n - 1)`, evaluated as `-2 |n| b~` (the Dirichlet row gives
    /// `a~ = 1 - b~`) so the result keeps its relative accuracy when
    /// `b~ ~ rho^(2|n|)` is far below machine epsilon.
    pub fn kappa(&self) -> f64 {
        -2.0 * self.n.unsigned_abs() as f64 * self.b_tilde
    }

    /// Radial profile `a~ r^|n| + b~ r^-|n|` in the annulus.
    pub fn annulus_profile(&self, r: f64, rho: f64) -> f64 {
        let m = self.n.unsigned_abs() as f64;
        self.a_tilde * r.powf(m) + self.b_reduced * rho.powf(m) * (rho / r).powf(m)
    }

    /// `d/dr` of [`Self::annulus_profile`].
    pub fn annulus_profile_dr(&self, r: f64, rho: f64) -> f64 {
        let m = self.n.unsigned_abs() as f64;
        m * (self.a_tilde * r.powf(m - 1.0)
            - self.b_reduced * rho.powf(m) * (rho / r).powf(m) / r)
    }

    /// Radial profile `c~ r^|n|` in the inclusion.
    pub fn disk_profile(&self, r: f64) -> f64 {
        self.c_tilde * r.powf(self.n.unsigned_abs() as f64)
    }

    pub fn disk_profile_dr(&self, r: f64) -> f64 {
        let m = self.n.unsigned_abs() as f64;
        m * self.c_tilde * r.powf(m - 1.0)
    }
}

/// Solves the 3x3 mode system by Gaussian elimination with partial pivoting.
///
/// The unknowns are `(a~, b~ / rho^(2|n|), c~)`; the continuity row is divided
/// by `rho^(2|n|)` and the stress row by `|n| rho^(|n|-1)`, which keeps every
/// entry O(1) for all `n`.
pub fn solve_mode_system(n: i64, params: &MaterialParams) -> Result<ModeCoefficients> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "mode system is defined for n != 0 only".into(),
        });
    }
    let m = n.unsigned_abs() as f64;
    let q = params.rho().powf(2.0 * m);
    let stiffness = params.mu() + params.interface_weight(m);

    let system = [
        [1.0, q, 0.0],
        [1.0, 1.0, -1.0],
        [1.0, -1.0, -stiffness],
    ];
    let rhs = [1.0, 0.0, 0.0];

    let (x, det) = eliminate(system, rhs);
    if det.is_nan() || det.abs() < 1e-300 {
        return Err(Error::DegenerateModeSystem { n, det });
    }

    let residual = (0..3)
        .map(|i| {
            let lhs: f64 = (0..3).map(|j| system[i][j] * x[j]).sum();
            let scale: f64 = (0..3).map(|j| (system[i][j] * x[j]).abs()).sum::<f64>() + rhs[i].abs();
            if scale > 0.0 {
                (lhs - rhs[i]).abs() / scale
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);

    let [a_tilde, b_reduced, c_tilde] = x;
    let b_tilde = q * b_reduced;
    Ok(ModeCoefficients {
        n,
        a_tilde,
        b_tilde,
        c_tilde,
        sigma: a_tilde - b_tilde,
        b_reduced,
        residual,
    })
}

fn eliminate(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> ([f64; 3], f64) {
    let mut det = 1.0;
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if pivot != col {
            a.swap(pivot, col);
            b.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        if p == 0.0 {
            return ([f64::NAN; 3], 0.0);
        }
        let pivot_row = a[col];
        for row in col + 1..3 {
            let factor = a[row][col] / p;
            for (dst, src) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= factor * src;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    (x, det)
}

/// Closed-form kernel coefficient
///
/// ```text
/// kappa_n = |n| 2 rho^(2|n|) X_n / (Y_n - rho^(2|n|) X_n)
/// X_n = rho^3 (mu - 1)|n| + rho^2 mu_s n^2 + mu_s ell2 n^4
/// Y_n = rho^3 (mu + 1)|n| + rho^2 mu_s n^2 + mu_s ell2 n^4
/// ```
///
/// with `kappa_0 = 0`. The denominator is evaluated as
/// `2 rho^3 |n| + (1 - rho^(2|n|)) X_n`, which equals `Y_n - rho^(2|n|) X_n`
/// and avoids cancellation when `rho^(2|n|)` is close to one.
pub fn kappa_closed_form(n: i64, params: &MaterialParams) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let m = n.unsigned_abs() as f64;
    let rho = params.rho();
    let rho3 = rho * rho * rho;
    let x = contrast_term(m, params);
    let log_q = 2.0 * m * rho.ln();
    let q = log_q.exp();
    let one_minus_q = -log_q.exp_m1();
    let denom = 2.0 * rho3 * m + one_minus_q * x;
    if denom.is_nan() || denom.abs() < 1e-300 {
        return Err(Error::KernelDenominatorUnderflow { n });
    }
    Ok(m * 2.0 * q * x / denom)
}

/// `X_n = rho^3 (mu - 1)|n| + rho^2 mu_s n^2 + mu_s ell2 n^4`.
fn contrast_term(m: f64, params: &MaterialParams) -> f64 {
    let rho = params.rho();
    let rho2 = rho * rho;
    rho2 * rho * (params.mu() - 1.0) * m + rho2 * params.mu_s() * m * m + params.mu_s() * params.ell2() * m.powi(4)
}
