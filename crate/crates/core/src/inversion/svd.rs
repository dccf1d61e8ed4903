use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forward::DtnMatrix;

/// Full SVD `A = U diag(sigma) V^T` with singular values in descending order.
#[derive(Debug, Clone)]
pub struct SvdSystem {
    pub singular_values: DVector<f64>,
    /// Left singular vectors as columns.
    pub u: DMatrix<f64>,
    /// Right singular vectors, transposed (rows are `v_j^T`).
    pub v_t: DMatrix<f64>,
}

impl SvdSystem {
    pub fn len(&self) -> usize {
        self.singular_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.singular_values.is_empty()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.u * DMatrix::from_diagonal(&self.singular_values) * &self.v_t
    }
}

pub fn decompose(a: &DtnMatrix) -> Result<SvdSystem> {
    let m = a.as_matrix();
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let svd = m.clone().svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::NonFinite),
    };
    let sigma = svd.singular_values;

    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));

    let n = sigma.len();
    let singular_values = DVector::from_iterator(n, order.iter().map(|&i| sigma[i]));
    let u = DMatrix::from_fn(u.nrows(), n, |r, c| u[(r, order[c])]);
    let v_t = DMatrix::from_fn(n, v_t.ncols(), |r, c| v_t[(order[r], c)]);
    Ok(SvdSystem {
        singular_values,
        u,
        v_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{assemble_dtn_matrix, build_kernel_spectrum, MaterialParams};

    fn example() -> DtnMatrix {
        let spec = build_kernel_spectrum(&MaterialParams::example_one(), 100).unwrap();
        assemble_dtn_matrix(&spec, 128).unwrap()
    }

    #[test]
    fn zero_matrix() {
        let a = DtnMatrix::from_matrix(DMatrix::zeros(8, 8)).unwrap();
        let s = decompose(&a).unwrap();
        assert!(s.singular_values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let a = example();
        let s = decompose(&a).unwrap();
        let sigma1 = s.singular_values[0];
        let err = (s.reconstruct() - a.as_matrix()).amax();
        assert!(err <= 1e-10 * sigma1);
        let n = a.size();
        let id = DMatrix::<f64>::identity(n, n);
        assert!((s.u.transpose() * &s.u - &id).amax() <= 1e-12);
        assert!((&s.v_t * s.v_t.transpose() - &id).amax() <= 1e-12);
        assert!(s.singular_values.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn singular_values_match_eigenvalue_magnitudes() {
        let a = example();
        let s = decompose(&a).unwrap();
        let mut eig: Vec<f64> = a
            .as_matrix()
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .map(|v| v.abs())
            .collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        for (sv, ev) in s.singular_values.iter().zip(&eig) {
            assert!((sv - ev).abs() <= 1e-10);
        }
    }

    #[test]
    fn sign_flip_invariant() {
        let a = example();
        let neg = DtnMatrix::from_matrix(-a.as_matrix()).unwrap();
        let s1 = decompose(&a).unwrap();
        let s2 = decompose(&neg).unwrap();
        for (x, y) in s1.singular_values.iter().zip(s2.singular_values.iter()) {
            assert!((x - y).abs() <= 1e-15 * s1.singular_values[0]);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = DMatrix::zeros(4, 4);
        m[(1, 2)] = f64::NAN;
        let a = DtnMatrix::from_matrix(m).unwrap();
        assert!(matches!(decompose(&a), Err(Error::NonFinite)));
    }
}
