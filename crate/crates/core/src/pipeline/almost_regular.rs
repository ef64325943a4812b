use alloc::format;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{embed_distance_matrix, form_value, negative_type_slack, PointConfig, SquaredDistanceMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct AlmostRegular {
    pub config: PointConfig,
    /// Largest value of the negative-type form over admissible unit vectors.
    pub form_value: f64,
    pub max_deviation: f64,
}

/// Realizes squared distances whose square roots all lie within `eps` of
/// `beta`, for `eps < beta / (64 d^2)`.
pub fn realize_almost_regular(m: &SquaredDistanceMatrix, beta: f64, eps: f64, tol: f64) -> Result<AlmostRegular> {
    m.validate()?;
    let n = m.n;
    if !(beta > 0.0) || !(eps >= 0.0) {
        return Err(Error::invalid("band center must be positive and width nonnegative"));
    }
    if n < 2 {
        return Ok(AlmostRegular {
            config: embed_distance_matrix(m, tol)?,
            form_value: 0.0,
            max_deviation: 0.0,
        });
    }
    let d = (n - 1) as f64;
    if !(eps < beta / (64.0 * d * d)) {
        return Err(Error::invalid(format!(
            "band width {eps:e} is not below beta/(64 d^2) = {:e}",
            beta / (64.0 * d * d)
        )));
    }
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let x = m.float(i, j).sqrt();
            dev = dev.max((x - beta).abs());
        }
    }
    if dev > eps {
        return Err(Error::invalid(format!(
            "distance deviates from {beta} by {dev:e}, more than {eps:e}"
        )));
    }
    let report = negative_type_slack(m)?;
    let form_value = form_value(m, &report.witness_lambda);
    if !(form_value < -beta * beta / 4.0) {
        return Err(Error::Verification {
            message: format!("form value {form_value:e} is not below -beta^2/4"),
            residuals: alloc::vec![form_value + beta * beta / 4.0],
        });
    }
    let config = embed_distance_matrix(m, tol.max(1e-9))?;
    Ok(AlmostRegular {
        config,
        form_value,
        max_deviation: dev,
    })
}
