//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Eigen-decomposition `A = V diag(lambda) V^T` of a symmetric matrix.
/// Eigenvalues come back unsorted; column `k` of the returned matrix is the
/// eigenvector for `lambda[k]`.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    // Row-major working copy; symmetric so the column-major buffer works as-is.
    let mut m: Vec<f64> = a.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n == 1 {
        return Ok((vec![m[0]], DMatrix::from_element(1, 1, 1.0)));
    }

    let norm = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok((vec![0.0; n], DMatrix::identity(n, n)));
    }
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;

    for sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                // Skip once the off-diagonal entry is negligible against both
                // diagonal entries (relative criterion keeps small eigenvalues accurate).
                if apq.abs() <= f64::EPSILON * (app.abs() * aqq.abs()).sqrt() * 0.5
                    || apq.abs() < tiny * norm
                {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            let lambda = (0..n).map(|i| m[i * n + i]).collect();
            return Ok((lambda, DMatrix::from_row_slice(n, n, &v)));
        }
        if sweep + 1 == MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[i * n + j].powi(2))
                .sum::<f64>()
                .sqrt();
            return Err(Error::numerical(
                "Jacobi eigensolver did not converge",
                MAX_SWEEPS,
                off / norm,
            ));
        }
    }
    unreachable!()
}
