use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{circumsphere, embed_distance_matrix, negative_type_slack, PointConfig, SquaredDistanceMatrix};

/// The simplex with every squared distance lowered by `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Shrink {
    pub slack: f64,
    pub beta: f64,
    pub shrunk: SquaredDistanceMatrix,
    pub original: PointConfig,
    pub s1: PointConfig,
    pub rho: f64,
    pub rho_prime: f64,
}

/// Lowers every squared distance by `beta = slack / (8 d^2)`, which keeps
/// the matrix strictly of negative type, and embeds the result.
///
/// Fails with a verification error when the shrunk simplex does not have
/// the smaller circumradius.
pub fn step1_shrink(m: &SquaredDistanceMatrix, tol: f64) -> Result<Shrink> {
    m.validate()?;
    let n = m.n;
    if n < 2 {
        return Err(Error::NotASimplex(format!("{n} point(s)")));
    }
    let report = negative_type_slack(m)?;
    if report.slack < -tol {
        return Err(Error::NotEmbeddable {
            slack: report.slack,
            witness: report.witness_lambda,
        });
    }
    let d = (n - 1) as f64;
    if report.slack <= tol.max(1e-12 * m.max_entry()) {
        return Err(Error::NotASimplex(format!(
            "points are affinely dependent (slack {:e})",
            report.slack
        )));
    }
    let beta = report.slack / (8.0 * d * d);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { m.float(i, j) - beta }).collect())
        .collect();
    let shrunk = SquaredDistanceMatrix::from_float(rows)?;
    let original = embed_distance_matrix(m, tol)?;
    let s1 = embed_distance_matrix(&shrunk, tol)?;
    if original.dim != n - 1 || s1.dim != n - 1 {
        return Err(Error::NotASimplex("embedding lost a dimension".into()));
    }
    let (rho, _) = circumsphere(&original)?;
    let (rho_prime, _) = circumsphere(&s1)?;
    if !(rho_prime < rho) {
        return Err(Error::Verification {
            message: format!("radius ordering: shrunk circumradius {rho_prime} is not below {rho}"),
            residuals: alloc::vec![rho_prime - rho],
        });
    }
    Ok(Shrink {
        slack: report.slack,
        beta,
        shrunk,
        original,
        s1,
        rho,
        rho_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sq(rows: Vec<Vec<f64>>) -> SquaredDistanceMatrix {
        SquaredDistanceMatrix::from_float(rows).unwrap()
    }

    #[test]
    fn equilateral_triangle() {
        let m = sq(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]);
        let s = step1_shrink(&m, 1e-9).unwrap();
        assert!((s.slack - 0.5).abs() < 1e-12);
        assert!((s.beta - 0.5 / 32.0).abs() < 1e-15);
        assert!((s.s1.sq_dist(0, 1) - (1.0 - 1.0 / 64.0)).abs() < 1e-12);
        assert!(s.rho_prime < s.rho);
        assert!((s.rho - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_violating_inputs() {
        let line = sq(vec![vec![0.0, 1.0, 4.0], vec![1.0, 0.0, 1.0], vec![4.0, 1.0, 0.0]]);
        assert!(matches!(step1_shrink(&line, 1e-9), Err(Error::NotASimplex(_))));
        let bad = sq(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 9.0], vec![1.0, 9.0, 0.0]]);
        assert!(matches!(step1_shrink(&bad, 1e-9), Err(Error::NotEmbeddable { .. })));
        assert!(matches!(step1_shrink(&sq(vec![vec![0.0]]), 1e-9), Err(Error::NotASimplex(_))));
    }

    #[test]
    fn obtuse_triangle_breaks_radius_ordering() {
        // Circumcenter far outside: the shrunk copy has a larger circumradius.
        let m = sq(vec![vec![0.0, 1.0, 3.61], vec![1.0, 0.0, 1.0], vec![3.61, 1.0, 0.0]]);
        let r = step1_shrink(&m, 1e-9);
        assert!(matches!(r, Err(Error::Verification { .. })), "{r:?}");
    }
}
