use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{circumsphere, PointConfig, SquaredDistanceMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    pub f: PointConfig,
    /// `|f_i - f_j|^2 - m_ij` for `i < j`, row by row.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub radius: f64,
}

/// Concatenates brick and spread coordinates, `f_i = w_i (+) z_i`, and
/// checks that the result realizes `target`.
pub fn assemble_and_verify(
    target: &SquaredDistanceMatrix,
    w: &PointConfig,
    z: &PointConfig,
    spread_norm: f64,
    tol: f64,
) -> Result<Assembly> {
    let n = target.n;
    if w.len() != n || z.len() != n {
        return Err(Error::invalid(format!(
            "{} brick and {} spread points for {n} targets",
            w.len(),
            z.len()
        )));
    }
    let f = w.concat_pointwise(z)?;
    let mut residuals = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            residuals.push(f.sq_dist(i, j) - target.float(i, j));
        }
    }
    let max_residual = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    if !(max_residual <= tol * target.max_entry().max(1.0)) {
        return Err(Error::Verification {
            message: format!("assembled points miss the target by {max_residual:e}"),
            residuals,
        });
    }
    let radius = if n >= 2 { circumsphere(&f)?.0 } else { 0.0 };
    if n >= 2 && !(radius > spread_norm) {
        return Err(Error::Verification {
            message: format!("circumradius {radius} does not exceed the spread norm {spread_norm}"),
            residuals: alloc::vec![radius - spread_norm],
        });
    }
    Ok(Assembly {
        f,
        residuals,
        max_residual,
        radius,
    })
}
