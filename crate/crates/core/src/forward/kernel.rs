use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::forward::{kappa_closed_form, MaterialParams};

/// Truncated Fourier coefficients `kappa_0..=kappa_{n_max}` of the kernel of
/// `Lambda - Lambda_0`. Negative modes follow from `kappa_{-n} = kappa_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpectrum {
    kappa: Vec<f64>,
}

impl KernelSpectrum {
    /// Wraps raw coefficients; `kappa[0]` must be zero and every entry finite.
    pub fn from_coefficients(kappa: Vec<f64>) -> Result<Self> {
        if kappa.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "n_max",
                reason: "spectrum needs at least kappa_0 and kappa_1".into(),
            });
        }
        if kappa[0] != 0.0 {
            return Err(Error::InvalidParameter {
                name: "kappa_0",
                reason: format!("must be zero, got {}", kappa[0]),
            });
        }
        if kappa.iter().any(|k| !k.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(KernelSpectrum { kappa })
    }

    pub fn n_max(&self) -> usize {
        self.kappa.len() - 1
    }

    /// `kappa_n` for any integer `n`; zero beyond the truncation.
    pub fn kappa(&self, n: i64) -> f64 {
        self.kappa
            .get(n.unsigned_abs() as usize)
            .copied()
            .unwrap_or(0.0)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.kappa
    }

    /// `n,kappa_n` CSV, one row per stored mode.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,kappa_n\n");
        for (n, k) in self.kappa.iter().enumerate() {
            let _ = writeln!(out, "{n},{k:e}");
        }
        out
    }

    /// Parses the `n,kappa_n` format written by [`Self::to_csv`] into `(n, kappa)` pairs.
    pub fn parse_csv(text: &str) -> Result<Vec<(i64, f64)>> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next().map(str::trim) {
            Some("n,kappa_n") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header `n,kappa_n`, found {other:?}"
                )))
            }
        }
        lines
            .map(|line| {
                let (n, k) = line
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("bad row `{line}`")))?;
                let n = n
                    .trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad mode `{n}`: {e}")))?;
                let k = k
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad coefficient `{k}`: {e}")))?;
                Ok((n, k))
            })
            .collect()
    }
}

pub fn build_kernel_spectrum(params: &MaterialParams, n_max: usize) -> Result<KernelSpectrum> {
    if n_max < 1 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            reason: "must be at least 1".into(),
        });
    }
    let kappa = (0..=n_max as i64)
        .map(|n| kappa_closed_form(n, params))
        .collect::<Result<Vec<_>>>()?;
    KernelSpectrum::from_coefficients(kappa)
}

/// `K(theta, phi) = sum_{n=1}^{n_max} 2 kappa_n cos(n (theta - phi))`.
pub fn evaluate_kernel(spec: &KernelSpectrum, theta: f64, phi: f64) -> f64 {
    let d = theta - phi;
    spec.kappa
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, k)| 2.0 * k * (n as f64 * d).cos())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex_free::complex_sum;

    /// Complex exponential summation over `|n| = 1..=n_max`, kept free of the
    /// cosine shortcut used by `evaluate_kernel`.
    mod num_complex_free {
        pub fn complex_sum(kappa: &[f64], d: f64) -> (f64, f64) {
            let mut re = 0.0;
            let mut im = 0.0;
            for n in 1..kappa.len() as i64 {
                for s in [n, -n] {
                    let angle = s as f64 * d;
                    re += kappa[n as usize] * angle.cos();
                    im += kappa[n as usize] * angle.sin();
                }
            }
            (re, im)
        }
    }

    #[test]
    fn example_spectrum_positive() {
        let spec = build_kernel_spectrum(&MaterialParams::example_one(), 100).unwrap();
        assert_eq!(spec.coefficients().len(), 101);
        assert_eq!(spec.kappa(0), 0.0);
        assert!(spec.coefficients()[1..].iter().all(|&k| k > 0.0));
        assert_eq!(spec.kappa(-7), spec.kappa(7));
        assert_eq!(spec.kappa(500), 0.0);
    }

    #[test]
    fn zero_contrast_spectrum_vanishes() {
        let p = MaterialParams::unchecked(1.0, 0.0, 1e-3, 0.7);
        let spec = build_kernel_spectrum(&p, 50).unwrap();
        assert!(spec.coefficients().iter().all(|&k| k == 0.0));
        assert_eq!(evaluate_kernel(&spec, 0.3, 1.9), 0.0);
    }

    #[test]
    fn truncation_to_one_mode() {
        let p = MaterialParams::example_one();
        let spec = build_kernel_spectrum(&p, 1).unwrap();
        assert_eq!(spec.coefficients(), &[0.0, kappa_closed_form(1, &p).unwrap()]);
        assert!(build_kernel_spectrum(&p, 0).is_err());
    }

    #[test]
    fn kernel_diagonal_matches_complex_sum() {
        let spec = build_kernel_spectrum(&MaterialParams::example_one(), 100).unwrap();
        let direct = evaluate_kernel(&spec, 1.234, 1.234);
        let (re, im) = complex_sum(spec.coefficients(), 0.0);
        assert!(im.abs() < 1e-15);
        assert!((direct - re).abs() < 1e-14 * re.abs());
        let expected: f64 = spec.coefficients().iter().map(|k| 2.0 * k).sum();
        assert!((direct - expected).abs() < 1e-14);
        for d in [0.1, 0.7, 2.5, 4.0] {
            let (re, im) = complex_sum(spec.coefficients(), d);
            assert!(im.abs() < 1e-14);
            assert!((evaluate_kernel(&spec, d, 0.0) - re).abs() < 1e-13);
        }
    }

    #[test]
    fn csv_round_trip() {
        let spec = build_kernel_spectrum(&MaterialParams::example_one(), 10).unwrap();
        let parsed = KernelSpectrum::parse_csv(&spec.to_csv()).unwrap();
        assert_eq!(parsed.len(), 11);
        for (n, k) in parsed {
            assert_eq!(k, spec.kappa(n));
        }
        assert!(KernelSpectrum::parse_csv("x,y\n1,2").is_err());
    }
}
