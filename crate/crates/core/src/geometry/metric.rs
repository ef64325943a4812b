use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::Float;

use super::{PointConfig, SqEntries, SquaredDistanceMatrix};
use crate::error::{Error, Result};
use crate::linalg;

/// Relative eigenvalue cutoff below which spectral directions are dropped.
pub const EIGEN_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NegativeTypeReport {
    /// Largest `g` with `sum_{i<j} m_ij l_i l_j <= -g` over unit vectors `l`
    /// orthogonal to the all-ones vector.
    pub slack: f64,
    pub witness_lambda: Vec<f64>,
}

impl NegativeTypeReport {
    pub fn is_negative_type(&self, tol: f64) -> bool {
        self.slack >= -tol
    }

    pub fn is_strict(&self, tol: f64) -> bool {
        self.slack > tol
    }
}

pub fn squared_distance_matrix(config: &PointConfig) -> SquaredDistanceMatrix {
    let n = config.len();
    let sq = match &config.exact {
        Some(e) => {
            let mut rows = vec![vec![crate::rational::zero(); n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = e.sq_dist(i, j);
                    rows[j][i] = v.clone();
                    rows[i][j] = v;
                }
            }
            SqEntries::Rational(rows)
        }
        None => {
            let mut rows = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = config.sq_dist(i, j);
                    rows[i][j] = v;
                    rows[j][i] = v;
                }
            }
            SqEntries::Float(rows)
        }
    };
    SquaredDistanceMatrix { n, sq }
}

fn to_dmatrix(m: &SquaredDistanceMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.n, m.n, |i, j| m.float(i, j))
}

/// Evaluates `sum_{i<j} m_ij l_i l_j`.
pub fn form_value(m: &SquaredDistanceMatrix, lambda: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..m.n {
        for j in i + 1..m.n {
            s += m.float(i, j) * lambda[i] * lambda[j];
        }
    }
    s
}

pub fn negative_type_slack(m: &SquaredDistanceMatrix) -> Result<NegativeTypeReport> {
    m.validate()?;
    let n = m.n;
    if n < 2 {
        return Err(Error::invalid(format!(
            "negative type needs at least 2 points, got {n}"
        )));
    }
    let q = linalg::helmert(n);
    let b = q.transpose() * to_dmatrix(m) * &q;
    let (vals, vecs) = linalg::sym_eigen(&b);
    let top = vals[0];
    let lambda: DVector<f64> = &q * vecs.column(0);
    let norm = lambda.norm();
    let mut witness: Vec<f64> = lambda.iter().map(|x| x / norm).collect();
    // Sign convention: first non-negligible entry positive.
    if let Some(first) = witness.iter().find(|x| x.abs() > 1e-9) {
        if *first < 0.0 {
            witness.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(NegativeTypeReport {
        slack: -0.5 * top,
        witness_lambda: witness,
    })
}

/// Classical multidimensional scaling of a squared-distance matrix.
///
/// Keeps the eigen-directions of the doubly centered Gram matrix above
/// `EIGEN_CUTOFF` times the largest eigenvalue magnitude; the result has
/// that many coordinates. Points are centered at their centroid.
pub fn embed_distance_matrix(m: &SquaredDistanceMatrix, tol: f64) -> Result<PointConfig> {
    m.validate()?;
    let n = m.n;
    if n == 0 {
        return PointConfig::new(0, Vec::new());
    }
    if n >= 2 {
        let report = negative_type_slack(m)?;
        if report.slack < -tol {
            return Err(Error::NotEmbeddable {
                slack: report.slack,
                witness: report.witness_lambda,
            });
        }
    }
    let d = to_dmatrix(m);
    let j = DMatrix::<f64>::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let g = (&j * d * &j) * -0.5;
    let (vals, vecs) = linalg::sym_eigen(&g);
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let keep: Vec<usize> = (0..n)
        .filter(|&k| scale > 0.0 && vals[k] > EIGEN_CUTOFF * scale)
        .collect();
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| keep.iter().map(|&k| vecs[(i, k)] * vals[k].sqrt()).collect())
        .collect();
    let config = PointConfig::new(keep.len(), points)?;

    let floor = tol.max(64.0 * f64::EPSILON * m.max_entry().max(1.0));
    let mut worst = 0.0f64;
    for i in 0..n {
        for k in i + 1..n {
            worst = worst.max((config.sq_dist(i, k) - m.float(i, k)).abs());
        }
    }
    if worst > floor {
        return Err(Error::NotEmbeddable {
            slack: -worst,
            witness: Vec::new(),
        });
    }
    Ok(config)
}
