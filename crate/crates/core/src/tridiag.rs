//! Eigen-decomposition of a real symmetric tridiagonal matrix by the
//! implicit QL algorithm with Wilkinson shifts.

use crate::error::{Error, Result};

/// Eigenvalues and orthonormal eigenvectors (`vectors[k]` belongs to `values[k]`).
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// `diag` has length `n`, `off` length `n - 1`.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::InvalidArgument("tridiagonal shape".into()));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // z[i][k]: component i of eigenvector k
    let mut z = vec![vec![0.0; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::FactorizationFailed("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let t = row[i + 1];
                    row[i + 1] = s * row[i] + c * t;
                    row[i] = c * row[i] - s * t;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let vectors = (0..n).map(|k| z.iter().map(|row| row[k]).collect()).collect();
    Ok(TridiagonalEigen { values: d, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn free_block_spectrum() {
        let n = 9;
        let eig = symmetric_tridiagonal_eigen(&vec![0.0; n], &vec![1.0; n - 1]).unwrap();
        let mut got = eig.values.clone();
        got.sort_by(f64::total_cmp);
        let mut want: Vec<f64> = (1..=n).map(|k| 2.0 * (k as f64 * PI / (n as f64 + 1.0)).cos()).collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-13);
        }
    }

    #[test]
    fn eigenpairs_and_orthonormality() {
        let d = [0.3, -1.2, 2.0, 0.7, -0.1, 1.5];
        let e = [0.9, -0.4, 1.1, 0.25, -0.8];
        let eig = symmetric_tridiagonal_eigen(&d, &e).unwrap();
        let n = d.len();
        for (lam, v) in eig.values.iter().zip(&eig.vectors) {
            for i in 0..n {
                let mut av = d[i] * v[i];
                if i > 0 {
                    av += e[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    av += e[i] * v[i + 1];
                }
                assert!((av - lam * v[i]).abs() < 1e-13);
            }
        }
        for j in 0..n {
            for k in 0..n {
                let dot: f64 = (0..n).map(|i| eig.vectors[j][i] * eig.vectors[k][i]).sum();
                assert!((dot - if j == k { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn one_by_one() {
        let eig = symmetric_tridiagonal_eigen(&[4.5], &[]).unwrap();
        assert_eq!(eig.values, vec![4.5]);
        assert_eq!(eig.vectors, vec![vec![1.0]]);
    }
}
