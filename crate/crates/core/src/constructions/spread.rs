use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::labels::tuple_label;
use crate::error::{Error, Result};
use crate::geometry::{ExactCoords, PointConfig};
use crate::rational::{self, Rational};

/// Largest spread truncation materialized in one go.
pub const MAX_SPREAD_POINTS: usize = 200_000;

/// Weight vector `c` of a spread configuration; points are
/// `sum_l c_l e_{j_l}` over increasing `k`-tuples `j`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpreadSpec {
    pub c: Vec<f64>,
}

impl SpreadSpec {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::invalid("spread weight vector must be nonempty"));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("spread weights must be finite"));
        }
        Ok(SpreadSpec { c })
    }

    pub fn k(&self) -> usize {
        self.c.len()
    }

    pub fn norm(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// The single point for tuple `j` (1-based indices) in dimension `dim`.
    pub fn point(&self, tuple: &[usize], dim: usize) -> Vec<f64> {
        let mut p = vec![0.0; dim];
        for (l, &j) in tuple.iter().enumerate() {
            p[j - 1] = self.c[l];
        }
        p
    }
}

fn binom(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let mut r: usize = 1;
    for i in 0..k.min(n - k) {
        r = r.checked_mul(n - i)? / (i + 1);
    }
    Some(r)
}

/// All increasing `k`-tuples over `ground`, in lexicographic order.
pub fn spread_points(spec: &SpreadSpec, ground: &[usize]) -> Result<PointConfig> {
    let mut ground = ground.to_vec();
    ground.sort_unstable();
    ground.dedup();
    if ground.first() == Some(&0) {
        return Err(Error::invalid("ground indices start at 1"));
    }
    let k = spec.k();
    if ground.len() < k {
        return Err(Error::invalid(format!(
            "ground set of size {} has no {k}-tuples",
            ground.len()
        )));
    }
    let count = binom(ground.len(), k).filter(|&c| c <= MAX_SPREAD_POINTS);
    if count.is_none() {
        return Err(Error::SizeLimit(format!(
            "C({}, {k}) spread points exceed {MAX_SPREAD_POINTS}",
            ground.len()
        )));
    }
    let dim = *ground.last().unwrap();
    let exact_c: Vec<Rational> = spec.c.iter().map(|&x| rational::from_f64(x)).collect::<Result<_>>()?;

    let mut idx: Vec<usize> = (0..k).collect();
    let mut points = Vec::new();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    loop {
        let tuple: Vec<usize> = idx.iter().map(|&i| ground[i]).collect();
        points.push(spec.point(&tuple, dim));
        let mut row = vec![rational::zero(); dim];
        for (l, &j) in tuple.iter().enumerate() {
            row[j - 1] = exact_c[l].clone();
        }
        rows.push(row);
        labels.push(tuple_label(&tuple));

        // Next combination.
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(PointConfig {
                    dim,
                    points,
                    labels: Some(labels),
                    exact: Some(ExactCoords::plain(rows)),
                });
            }
            pos -= 1;
            if idx[pos] < ground.len() - k + pos {
                break;
            }
        }
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}
