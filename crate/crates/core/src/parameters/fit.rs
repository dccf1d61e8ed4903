//! Recovery of `(mu, mu_s, ell2)` from kernel coefficients with the inclusion
//! radius known.
//!
//! Every `kappa_n` depends on the parameters only through
//! `X_n = rho^3 (mu - 1) n + rho^2 mu_s n^2 + mu_s ell2 n^4`, and the map
//! `X_n -> kappa_n` is invertible for fixed `n` and `rho`. The fit runs a
//! Levenberg-Marquardt iteration in log-parameter space on relative residuals,
//! started from the best of the supplied guess, a coarse log-grid scan and a
//! seed obtained by inverting `X_n` and solving the resulting linear problem.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::forward::MaterialParams;

const MAX_ITERATIONS: usize = 200;
const STEP_TOLERANCE: f64 = 1e-12;
const RELATIVE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub mu: f64,
    pub mu_s: f64,
    pub ell2: f64,
    /// Root-mean-square of `kappa_model - kappa_data` over the modes used.
    pub residual: f64,
    pub iterations: usize,
}

impl FitResult {
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mu={}", self.mu);
        let _ = writeln!(out, "mu_s={}", self.mu_s);
        let _ = writeln!(out, "ell2={}", self.ell2);
        let _ = writeln!(out, "residual={:e}", self.residual);
        let _ = writeln!(out, "iterations={}", self.iterations);
        out
    }

    /// `param,value` rows.
    pub fn to_csv(&self) -> String {
        format!(
            "param,value\nmu,{}\nmu_s,{}\nell2,{}\nresidual,{:e}\niterations,{}\n",
            self.mu, self.mu_s, self.ell2, self.residual, self.iterations
        )
    }
}

#[derive(Debug, Clone)]
struct Problem {
    rho: f64,
    modes: Vec<f64>,
    data: Vec<f64>,
    weights: Vec<f64>,
}

impl Problem {
    fn new(kappa_data: &[(i64, f64)], rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("must lie in (0, 1), got {rho}"),
            });
        }
        let mut rows: Vec<(i64, f64)> = kappa_data.iter().copied().filter(|&(n, _)| n >= 1).collect();
        if rows.iter().any(|(_, k)| !k.is_finite()) {
            return Err(Error::NonFinite);
        }
        rows.sort_by_key(|&(n, _)| n);
        rows.dedup_by_key(|r| r.0);
        let peak = rows.iter().map(|(_, k)| k.abs()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(Error::ZeroContrast);
        }
        rows.retain(|(_, k)| k.abs() > RELATIVE_FLOOR * peak);
        if rows.len() < 3 {
            return Err(Error::InvalidParameter {
                name: "kappa_data",
                reason: format!("need at least 3 usable modes with n >= 1, got {}", rows.len()),
            });
        }
        Ok(Problem {
            rho,
            modes: rows.iter().map(|&(n, _)| n as f64).collect(),
            weights: rows.iter().map(|&(_, k)| 1.0 / k.abs()).collect(),
            data: rows.into_iter().map(|(_, k)| k).collect(),
        })
    }

    fn q(&self, n: f64) -> (f64, f64) {
        let log_q = 2.0 * n * self.rho.ln();
        (log_q.exp(), -log_q.exp_m1())
    }

    /// `kappa(X)` and `d kappa / d X` for mode `n`.
    fn kappa_of_x(&self, n: f64, x: f64) -> (f64, f64) {
        let rho3 = self.rho.powi(3);
        let (q, one_minus_q) = self.q(n);
        let denom = 2.0 * rho3 * n + one_minus_q * x;
        let kappa = 2.0 * n * q * x / denom;
        let slope = 2.0 * n * q * 2.0 * rho3 * n / (denom * denom);
        (kappa, slope)
    }

    fn x_terms(&self, n: f64, p: &Vector3<f64>) -> (f64, Vector3<f64>) {
        let (mu, mu_s, ell2) = (p[0].exp(), p[1].exp(), p[2].exp());
        let rho = self.rho;
        let t_mu = rho.powi(3) * n * mu;
        let t_s = rho * rho * mu_s * n * n;
        let t_l = mu_s * ell2 * n.powi(4);
        let x = rho.powi(3) * (mu - 1.0) * n + t_s + t_l;
        (x, Vector3::new(t_mu, t_s + t_l, t_l))
    }

    fn residuals(&self, p: &Vector3<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.modes.len(),
            self.modes.iter().zip(&self.data).zip(&self.weights).map(|((&n, &k), &w)| {
                let (x, _) = self.x_terms(n, p);
                (self.kappa_of_x(n, x).0 - k) * w
            }),
        )
    }

    fn jacobian(&self, p: &Vector3<f64>) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.modes.len(), 3);
        for (row, (&n, &w)) in self.modes.iter().zip(&self.weights).enumerate() {
            let (x, dx) = self.x_terms(n, p);
            let slope = self.kappa_of_x(n, x).1;
            for c in 0..3 {
                j[(row, c)] = w * slope * dx[c];
            }
        }
        j
    }

    fn cost(&self, p: &Vector3<f64>) -> f64 {
        let c = self.residuals(p).norm_squared();
        if c.is_finite() {
            c
        } else {
            f64::INFINITY
        }
    }

    fn rms_misfit(&self, p: &Vector3<f64>) -> f64 {
        let sum: f64 = self
            .modes
            .iter()
            .zip(&self.data)
            .map(|(&n, &k)| {
                let (x, _) = self.x_terms(n, p);
                (self.kappa_of_x(n, x).0 - k).powi(2)
            })
            .sum();
        (sum / self.modes.len() as f64).sqrt()
    }

    fn result(&self, p: &Vector3<f64>, iterations: usize) -> FitResult {
        FitResult {
            mu: p[0].exp(),
            mu_s: p[1].exp(),
            ell2: p[2].exp(),
            residual: self.rms_misfit(p),
            iterations,
        }
    }
}

fn log_params(mu: f64, mu_s: f64, ell2: f64) -> Vector3<f64> {
    Vector3::new(mu.ln(), mu_s.ln(), ell2.ln())
}

fn logspace(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| 10f64.powf(lo + (hi - lo) * i as f64 / (count - 1) as f64))
}

/// Seed from the exact inversion `X_n = 2 rho^3 n kappa / (2 n q - (1 - q) kappa)`
/// followed by weighted linear least squares for `(mu - 1, mu_s, mu_s ell2)`
/// in the basis `(rho^3 n, rho^2 n^2, n^4)`. `None` when the linear solution is
/// not physically admissible.
pub fn linearized_seed(kappa_data: &[(i64, f64)], rho: f64) -> Result<Option<(f64, f64, f64)>> {
    let problem = Problem::new(kappa_data, rho)?;
    Ok(problem.linearized_seed())
}

impl Problem {
    fn linearized_seed(&self) -> Option<(f64, f64, f64)> {
        let rho = self.rho;
        let rho3 = rho.powi(3);
        let m = self.modes.len();
        let mut design = DMatrix::zeros(m, 3);
        let mut rhs = DVector::zeros(m);
        for (i, (&n, &k)) in self.modes.iter().zip(&self.data).enumerate() {
            let (q, one_minus_q) = self.q(n);
            let x = 2.0 * rho3 * n * k / (2.0 * n * q - one_minus_q * k);
            if !x.is_finite() {
                return None;
            }
            let w = 1.0 / x.abs().max(f64::MIN_POSITIVE);
            design[(i, 0)] = w * rho3 * n;
            design[(i, 1)] = w * rho * rho * n * n;
            design[(i, 2)] = w * n.powi(4);
            rhs[i] = w * x;
        }
        // column equilibration before the SVD solve
        let scales: Vec<f64> = (0..3).map(|c| design.column(c).norm().max(f64::MIN_POSITIVE)).collect();
        for (c, s) in scales.iter().enumerate() {
            design.column_mut(c).scale_mut(1.0 / s);
        }
        let sol = design.svd(true, true).solve(&rhs, 1e-15).ok()?;
        let (contrast, mu_s, mu_s_ell2) = (sol[0] / scales[0], sol[1] / scales[1], sol[2] / scales[2]);
        let mu = 1.0 + contrast;
        let ell2 = mu_s_ell2 / mu_s;
        (mu > 0.0 && mu_s > 0.0 && ell2 > 0.0 && ell2.is_finite()).then_some((mu, mu_s, ell2))
    }
}

enum Outcome {
    Converged(Vector3<f64>, usize),
    Exhausted(Vector3<f64>),
}

fn levenberg_marquardt(problem: &Problem, start: Vector3<f64>) -> Outcome {
    let mut p = start;
    let mut cost = problem.cost(&p);
    let mut lambda = 1e-3;
    for iter in 1..=MAX_ITERATIONS {
        let r = problem.residuals(&p);
        let j = problem.jacobian(&p);
        let jtj: Matrix3<f64> = (j.transpose() * &j).fixed_view::<3, 3>(0, 0).into_owned();
        let g: Vector3<f64> = (j.transpose() * &r).fixed_rows::<3>(0).into_owned();
        if !jtj.iter().all(|v| v.is_finite()) {
            return Outcome::Exhausted(p);
        }
        loop {
            let mut damped = jtj;
            for d in 0..3 {
                damped[(d, d)] += lambda * jtj[(d, d)].max(1e-300);
            }
            let step = match damped.lu().solve(&(-g)) {
                Some(s) if s.iter().all(|v| v.is_finite()) => s,
                _ => {
                    lambda *= 10.0;
                    if lambda > 1e300 {
                        return Outcome::Exhausted(p);
                    }
                    continue;
                }
            };
            if step.norm() < STEP_TOLERANCE {
                return Outcome::Converged(p, iter);
            }
            let trial = p + step;
            let trial_cost = problem.cost(&trial);
            if trial_cost < cost {
                p = trial;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                break;
            }
            lambda *= 4.0;
        }
        if cost == 0.0 {
            return Outcome::Converged(p, iter);
        }
    }
    Outcome::Exhausted(p)
}

/// Least-squares recovery of `(mu, mu_s, ell2)` from `(n, kappa_n)` pairs.
pub fn fit_parameters(
    kappa_data: &[(i64, f64)],
    rho: f64,
    init: Option<MaterialParams>,
) -> Result<FitResult> {
    let problem = Problem::new(kappa_data, rho)?;

    let default = log_params(2.0, 0.1, 1e-3);
    let mut scan_best = (problem.cost(&default), default);
    for mu in logspace(-1.0, 2.0, 5) {
        for mu_s in logspace(-4.0, 1.0, 5) {
            for ell2 in logspace(-10.0, -1.0, 5) {
                let p = log_params(mu, mu_s, ell2);
                let c = problem.cost(&p);
                if c < scan_best.0 {
                    scan_best = (c, p);
                }
            }
        }
    }

    let mut starts = vec![scan_best.1];
    if let Some(init) = init {
        starts.push(log_params(init.mu(), init.mu_s(), init.ell2()));
    }
    if let Some((mu, mu_s, ell2)) = problem.linearized_seed() {
        starts.push(log_params(mu, mu_s, ell2));
    }

    let mut best_converged: Option<(f64, Vector3<f64>, usize)> = None;
    let mut best_any: Option<(f64, Vector3<f64>)> = None;
    let mut total_iterations = 0;
    for start in starts {
        let (p, converged_at) = match levenberg_marquardt(&problem, start) {
            Outcome::Converged(p, it) => (p, Some(it)),
            Outcome::Exhausted(p) => (p, None),
        };
        total_iterations += converged_at.unwrap_or(MAX_ITERATIONS);
        let c = problem.cost(&p);
        if best_any.as_ref().is_none_or(|b| c < b.0) {
            best_any = Some((c, p));
        }
        if let Some(it) = converged_at {
            if best_converged.as_ref().is_none_or(|b| c < b.0) {
                best_converged = Some((c, p, it));
            }
        }
    }

    match best_converged {
        Some((_, p, it)) => Ok(problem.result(&p, it)),
        None => {
            let (_, p) = best_any.expect("at least one start");
            let best = problem.result(&p, total_iterations);
            Err(Error::FitDiverged {
                iterations: total_iterations,
                residual: best.residual,
                best,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::build_kernel_spectrum;

    fn data(p: &MaterialParams, n_max: usize) -> Vec<(i64, f64)> {
        let spec = build_kernel_spectrum(p, n_max).unwrap();
        (1..=n_max as i64).map(|n| (n, spec.kappa(n))).collect()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn recovers_first_example() {
        let truth = MaterialParams::example_one();
        let fit = fit_parameters(&data(&truth, 40), 0.7, None).unwrap();
        assert!(rel(fit.mu, 2.0) <= 1e-6, "{fit:?}");
        assert!(rel(fit.mu_s, 0.1) <= 1e-6, "{fit:?}");
        assert!(rel(fit.ell2, 1e-3) <= 1e-6, "{fit:?}");
    }

    #[test]
    fn recovers_soft_inclusion() {
        let truth = MaterialParams::new(0.8, 0.01, 1e-5, 0.8).unwrap();
        let fit = fit_parameters(&data(&truth, 40), 0.8, None).unwrap();
        assert!(rel(fit.mu, 0.8) <= 1e-5, "{fit:?}");
        assert!(rel(fit.mu_s, 0.01) <= 1e-5, "{fit:?}");
        assert!(rel(fit.ell2, 1e-5) <= 1e-5, "{fit:?}");
    }

    #[test]
    fn zero_data_is_unidentifiable() {
        let zeros: Vec<(i64, f64)> = (1..=10).map(|n| (n, 0.0)).collect();
        assert!(matches!(fit_parameters(&zeros, 0.7, None), Err(Error::ZeroContrast)));
    }

    #[test]
    fn too_few_modes() {
        let truth = MaterialParams::example_one();
        let d = data(&truth, 2);
        assert!(matches!(
            fit_parameters(&d, 0.7, None),
            Err(Error::InvalidParameter { name: "kappa_data", .. })
        ));
    }

    #[test]
    fn seed_is_close_for_clean_data() {
        let truth = MaterialParams::new(5.0, 0.05, 2e-4, 0.6).unwrap();
        let (mu, mu_s, ell2) = linearized_seed(&data(&truth, 30), 0.6).unwrap().unwrap();
        assert!(rel(mu, 5.0) < 1e-6);
        assert!(rel(mu_s, 0.05) < 1e-6);
        assert!(rel(ell2, 2e-4) < 1e-4);
    }

    #[test]
    fn exports() {
        let f = FitResult {
            mu: 2.0,
            mu_s: 0.1,
            ell2: 0.001,
            residual: 0.0,
            iterations: 4,
        };
        assert_eq!(f.to_key_value(), "mu=2\nmu_s=0.1\nell2=0.001\nresidual=0e0\niterations=4\n");
        assert!(f.to_csv().starts_with("param,value\nmu,2\n"));
    }
}
