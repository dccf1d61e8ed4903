//! Regularized factorization imaging functional over a sampling grid.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::DtnMatrix;
use crate::inversion::{decompose, inject_noise, NoiseSpec, RegularizationSpec, SvdSystem};
use crate::probe::{assemble_probe, SamplePoint};

/// Indicator values below this are treated as a vanished sum.
pub const DEGENERATE_THRESHOLD: f64 = 1e-300;

/// Cartesian sampling lattice over `[-r_max, r_max]^2`, clipped to `|z| <= r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub resolution: usize,
    pub r_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            resolution: 101,
            r_max: 0.95,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub ix: usize,
    pub iy: usize,
    pub x: f64,
    pub y: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidParameter {
                name: "resolution",
                reason: format!("need at least 2 lattice points per axis, got {}", self.resolution),
            });
        }
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(Error::InvalidParameter {
                name: "r_max",
                reason: format!("must lie in (0, 1), got {}", self.r_max),
            });
        }
        Ok(())
    }

    /// Lattice coordinates along one axis. For odd resolutions the node
    /// lattice contains zero, so it is shifted by half a cell.
    pub fn axis(&self) -> Vec<f64> {
        let n = self.resolution;
        let h = 2.0 * self.r_max / (n - 1) as f64;
        let shift = if n % 2 == 1 { 0.5 * h } else { 0.0 };
        (0..n).map(|i| -self.r_max + i as f64 * h + shift).collect()
    }

    pub fn points(&self) -> Result<Vec<GridPoint>> {
        self.validate()?;
        let axis = self.axis();
        let mut out = Vec::new();
        for (iy, &y) in axis.iter().enumerate() {
            for (ix, &x) in axis.iter().enumerate() {
                if x.hypot(y) <= self.r_max {
                    out.push(GridPoint { ix, iy, x, y });
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: "no lattice point inside r_max".into(),
            });
        }
        Ok(out)
    }
}

/// Result of the range test at one sampling point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Indicator {
    /// `sum phi^2(sigma_j) / sigma_j |<u_j, b_z>|^2`, strictly positive.
    Value(f64),
    /// The filtered sum vanished (probe zero, or every term filtered out).
    Degenerate,
}

impl Indicator {
    pub fn w_reg(self) -> Option<f64> {
        match self {
            Indicator::Value(v) => Some(1.0 / v),
            Indicator::Degenerate => None,
        }
    }
}

/// The retained part of an SVD, shared read-only across sampling points.
#[derive(Debug, Clone)]
pub struct Imager {
    n: usize,
    weights: DVector<f64>,
    u_t: DMatrix<f64>,
}

impl Imager {
    pub fn new(svd: &SvdSystem, reg: &RegularizationSpec) -> Result<Self> {
        reg.validate()?;
        let n = svd.u.nrows();
        let kept: Vec<usize> = (0..svd.len())
            .filter(|&j| {
                let s = svd.singular_values[j];
                s > 0.0 && reg.factor(s) != 0.0
            })
            .collect();
        let weights = DVector::from_iterator(
            kept.len(),
            kept.iter().map(|&j| {
                let s = svd.singular_values[j];
                let phi = reg.factor(s);
                phi * phi / s
            }),
        );
        let u_t = DMatrix::from_fn(kept.len(), n, |r, c| svd.u[(c, kept[r])]);
        Ok(Imager { n, weights, u_t })
    }

    pub fn retained(&self) -> usize {
        self.weights.len()
    }

    pub fn indicator(&self, z: &SamplePoint) -> Result<Indicator> {
        let probe = assemble_probe(z, self.n)?;
        let b = DVector::from_vec(probe.normalized);
        let proj = &self.u_t * b;
        let value: f64 = proj
            .iter()
            .zip(self.weights.iter())
            .map(|(p, w)| w * p * p)
            .sum();
        Ok(if value >= DEGENERATE_THRESHOLD {
            Indicator::Value(value)
        } else {
            Indicator::Degenerate
        })
    }
}

pub fn indicator(z: &SamplePoint, svd: &SvdSystem, reg: &RegularizationSpec, n: usize) -> Result<Indicator> {
    if svd.u.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: svd.u.nrows(),
            actual: n,
        });
    }
    Imager::new(svd, reg)?.indicator(z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImagingMap {
    pub grid: GridSpec,
    pub points: Vec<GridPoint>,
    pub w_reg: Vec<Option<f64>>,
    pub w: Vec<Option<f64>>,
}

impl ImagingMap {
    fn from_indicators(grid: GridSpec, points: Vec<GridPoint>, ind: Vec<Indicator>) -> Result<Self> {
        let w_reg: Vec<Option<f64>> = ind
            .into_iter()
            .map(|i| i.w_reg().filter(|v| v.is_finite()))
            .collect();
        let peak = w_reg.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !peak.is_finite() {
            return Err(Error::ImagingMapEmpty);
        }
        let w = w_reg.iter().map(|v| v.map(|v| v / peak)).collect();
        Ok(ImagingMap {
            grid,
            points,
            w_reg,
            w,
        })
    }

    /// `(|z|, W)` for every non-degenerate point.
    pub fn radial_samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .zip(&self.w)
            .filter_map(|(p, w)| w.map(|w| (p.x.hypot(p.y), w)))
    }

    /// Mean W over `|z| < rho` divided by mean W over `|z| > rho`.
    pub fn contrast(&self, rho: f64) -> f64 {
        let (mut si, mut ni, mut so, mut no) = (0.0, 0usize, 0.0, 0usize);
        for (r, w) in self.radial_samples() {
            if r < rho {
                si += w;
                ni += 1;
            } else if r > rho {
                so += w;
                no += 1;
            }
        }
        (si / ni as f64) / (so / no as f64)
    }

    pub fn degenerate_count(&self) -> usize {
        self.w.iter().filter(|w| w.is_none()).count()
    }

    /// `x,y,w_reg,w`; degenerate points leave the last two fields empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,w_reg,w\n");
        for ((p, wr), w) in self.points.iter().zip(&self.w_reg).zip(&self.w) {
            let _ = write!(out, "{},{},", p.x, p.y);
            if let Some(v) = wr {
                let _ = write!(out, "{v:e}");
            }
            out.push(',');
            if let Some(v) = w {
                let _ = write!(out, "{v:e}");
            }
            out.push('\n');
        }
        out
    }

    /// Plain (P2) PGM, top row = largest y. W maps linearly onto 0..=255;
    /// degenerate and clipped lattice cells are 0.
    pub fn to_pgm(&self) -> String {
        let n = self.grid.resolution;
        let mut pixels = vec![0u8; n * n];
        for (p, w) in self.points.iter().zip(&self.w) {
            if let Some(w) = w {
                let row = n - 1 - p.iy;
                pixels[row * n + p.ix] = (w.clamp(0.0, 1.0) * 255.0).round() as u8;
            }
        }
        let mut out = format!("P2\n{n} {n}\n255\n");
        for row in pixels.chunks(n) {
            let mut line = String::new();
            for v in row {
                let token = v.to_string();
                if !line.is_empty() && line.len() + 1 + token.len() > 70 {
                    out.push_str(&line);
                    out.push('\n');
                    line.clear();
                }
                if !line.is_empty() {
                    line.push(' ');
                }
                line.push_str(&token);
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Evaluates the imaging functional on every grid point from a prepared SVD.
pub fn image_from_svd(svd: &SvdSystem, reg: &RegularizationSpec, grid: &GridSpec) -> Result<ImagingMap> {
    let imager = Imager::new(svd, reg)?;
    let points = grid.points()?;
    let ind = points
        .par_iter()
        .map(|p| SamplePoint::from_cartesian(p.x, p.y).and_then(|z| imager.indicator(&z)))
        .collect::<Result<Vec<_>>>()?;
    ImagingMap::from_indicators(*grid, points, ind)
}

pub fn build_imaging_map(
    a: &DtnMatrix,
    noise: &NoiseSpec,
    reg: &RegularizationSpec,
    grid: &GridSpec,
) -> Result<ImagingMap> {
    grid.validate()?;
    reg.validate()?;
    let noisy = inject_noise(a, noise)?;
    let svd = decompose(&noisy)?;
    image_from_svd(&svd, reg, grid)
}
