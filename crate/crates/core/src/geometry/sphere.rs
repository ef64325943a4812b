use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::Float;

use super::PointConfig;
use crate::error::{Error, Result};
use crate::rational;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Circumcenter within the affine hull and the common distance to it.
///
/// Affinely dependent sets are accepted when some maximal independent subset
/// has a circumcenter equidistant from all the remaining points.
pub fn circumsphere(config: &PointConfig) -> Result<(f64, Vec<f64>)> {
    let n = config.len();
    if n == 0 {
        return Err(Error::invalid("circumsphere of an empty configuration"));
    }
    let p0 = &config.points[0];
    if n == 1 {
        return Ok((0.0, p0.clone()));
    }
    let mut max_sq = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            max_sq = max_sq.max(config.sq_dist(i, j));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if config.sq_dist(i, j) <= 1e-24 * max_sq || max_sq == 0.0 {
                return Err(Error::Degenerate(format!("points {i} and {j} coincide")));
            }
        }
    }

    let diffs: Vec<Vec<f64>> = config.points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();

    // Greedy Gram-Schmidt to pick a maximal affinely independent subset.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    for (k, v) in diffs.iter().enumerate() {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&r, b);
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nr = dot(&r, &r).sqrt();
        if nr > 1e-9 * dot(v, v).sqrt() {
            r.iter_mut().for_each(|x| *x /= nr);
            basis.push(r);
            chosen.push(k);
        }
    }

    let m = chosen.len();
    let g = DMatrix::from_fn(m, m, |a, b| dot(&diffs[chosen[a]], &diffs[chosen[b]]));
    let rhs = DVector::from_fn(m, |a, _| 0.5 * g[(a, a)]);
    let t = g
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("singular circumcenter system".into()))?;
    let mut center = p0.clone();
    for (a, &k) in chosen.iter().enumerate() {
        center.iter_mut().zip(&diffs[k]).for_each(|(c, d)| *c += t[a] * d);
    }
    let dist = |p: &[f64]| p.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let radius = dist(p0);
    for (i, p) in config.points.iter().enumerate() {
        if (dist(p) - radius).abs() > 1e-9 * radius.max(1.0) {
            return Err(Error::Degenerate(format!(
                "no center in the affine hull is equidistant from point {i}"
            )));
        }
    }
    Ok((radius, center))
}

pub fn diameter(config: &PointConfig) -> f64 {
    let n = config.len();
    match &config.exact {
        Some(e) => {
            let mut best = rational::zero();
            for i in 0..n {
                for j in i + 1..n {
                    let v = e.sq_dist(i, j);
                    if v > best {
                        best = v;
                    }
                }
            }
            rational::to_f64(&best).sqrt()
        }
        None => {
            let mut best = 0.0f64;
            for i in 0..n {
                for j in i + 1..n {
                    best = best.max(config.sq_dist(i, j));
                }
            }
            best.sqrt()
        }
    }
}
