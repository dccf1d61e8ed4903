use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forward::KernelSpectrum;

/// Eight-byte tag that opens the binary matrix format.
pub const MATRIX_MAGIC: &[u8; 8] = b"SHTOMO01";

/// Collocation matrix of `Lambda - Lambda_0` on `N` equispaced nodes
/// `theta_j = 2 pi j / N`, with `A[j][k] = K(theta_j, theta_k) / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DtnMatrix {
    data: DMatrix<f64>,
}

impl DtnMatrix {
    pub fn from_matrix(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                actual: data.ncols(),
            });
        }
        Ok(DtnMatrix { data })
    }

    pub fn size(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Row-major CSV, no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.data.row_iter() {
            let mut first = true;
            for v in row.iter() {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{v:e}");
            }
            out.push('\n');
        }
        out
    }

    /// `SHTOMO01`, rows and cols as little-endian `u64`, then row-major `f64` LE.
    pub fn to_bytes(&self) -> Vec<u8> {
        let (rows, cols) = self.data.shape();
        let mut out = Vec::with_capacity(24 + 8 * rows * cols);
        out.extend_from_slice(MATRIX_MAGIC);
        out.extend_from_slice(&(rows as u64).to_le_bytes());
        out.extend_from_slice(&(cols as u64).to_le_bytes());
        for i in 0..rows {
            for j in 0..cols {
                out.extend_from_slice(&self.data[(i, j)].to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 24 || &bytes[..8] != MATRIX_MAGIC {
            return Err(Error::Parse("missing SHTOMO01 header".into()));
        }
        let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap()) as usize;
        let (rows, cols) = (word(8), word(16));
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(8))
            .and_then(|n| n.checked_add(24))
            .ok_or_else(|| Error::Parse("matrix dimensions overflow".into()))?;
        if bytes.len() != expected {
            return Err(Error::Parse(format!(
                "expected {expected} bytes for a {rows}x{cols} matrix, found {}",
                bytes.len()
            )));
        }
        let values = bytes[24..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        Self::from_matrix(DMatrix::from_row_iterator(rows, cols, values))
    }
}

/// Collocation nodes `2 pi j / N`.
pub fn boundary_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

/// Assembles the circulant collocation matrix.
///
/// Only the first column is evaluated; the phase `n m mod N` is reduced
/// exactly in integers and `c[N - m]` is mirrored from `c[m]`, so the result is
/// circulant and symmetric bit for bit.
pub fn assemble_dtn_matrix(spec: &KernelSpectrum, n: usize) -> Result<DtnMatrix> {
    if n < 4 {
        return Err(Error::InvalidParameter {
            name: "n_boundary",
            reason: format!("need at least 4 collocation nodes, got {n}"),
        });
    }
    let kappa = spec.coefficients();
    let mut column = vec![0.0; n];
    for m in 0..=n / 2 {
        let value: f64 = kappa
            .iter()
            .enumerate()
            .skip(1)
            .map(|(mode, k)| {
                let phase = (mode * m) % n;
                2.0 * k * (2.0 * PI * phase as f64 / n as f64).cos()
            })
            .sum();
        column[m] = value / n as f64;
        column[(n - m) % n] = column[m];
    }
    let data = DMatrix::from_fn(n, n, |j, k| column[(j + n - k) % n]);
    Ok(DtnMatrix { data })
}

pub fn forward_apply(a: &DtnMatrix, f: &[f64]) -> Result<Vec<f64>> {
    if f.len() != a.size() {
        return Err(Error::DimensionMismatch {
            expected: a.size(),
            actual: f.len(),
        });
    }
    let y = &a.data * DVector::from_column_slice(f);
    Ok(y.iter().copied().collect())
}
