use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, Signed, Zero};

use super::labels::pair_label;
use crate::error::{Error, Result};
use crate::geometry::{ExactBlock, ExactCoords, PointConfig};
use crate::rational::{self, Rational};

/// Segment configuration parameters: squared length `a_sq` and ratio `gamma`.
///
/// The point for a pair `{i,j}` is `beta*e_i - beta*gamma*e_j` with
/// `beta^2 = a_sq / (2 (1 + gamma + gamma^2))`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SegmentSpec {
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q"))]
    pub a_sq: Rational,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q"))]
    pub gamma: Rational,
}

impl SegmentSpec {
    pub fn new(a_sq: Rational, gamma: Rational) -> Result<Self> {
        if !a_sq.is_positive() {
            return Err(Error::invalid(format!("segment length must be positive, got a^2 = {}", rational::format(&a_sq))));
        }
        if !gamma.is_positive() {
            return Err(Error::invalid(format!("gamma must be positive, got {}", rational::format(&gamma))));
        }
        Ok(SegmentSpec { a_sq, gamma })
    }

    /// From a rational length `a` (squared internally).
    pub fn from_length(a: Rational, gamma: Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::invalid("segment length must be positive"));
        }
        Self::new(&a * &a, gamma)
    }

    fn denom(&self) -> Rational {
        rational::one() + &self.gamma + &self.gamma * &self.gamma
    }

    pub fn beta_sq(&self) -> Rational {
        &self.a_sq / (rational::int(2) * self.denom())
    }

    pub fn beta(&self) -> f64 {
        rational::to_f64(&self.beta_sq()).sqrt()
    }

    pub fn a(&self) -> f64 {
        rational::to_f64(&self.a_sq).sqrt()
    }

    /// The three squared distances that depend on gamma:
    /// shared first index, shared second index, disjoint.
    pub fn gamma_values(&self) -> [Rational; 3] {
        let b2 = rational::int(2) * self.beta_sq();
        let g2 = &self.gamma * &self.gamma;
        [&b2 * &g2, b2.clone(), &b2 * (rational::one() + g2)]
    }

    /// The four possible nonzero squared distances.
    pub fn distance_set(&self) -> Vec<Rational> {
        let [s1, s2, s3] = self.gamma_values();
        let mut v = vec![s1, s2, s3, self.a_sq.clone()];
        v.sort();
        v.dedup();
        v
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.a_sq.clone(), self.gamma.clone()).map(|_| ())
    }
}

pub type Pair = (usize, usize);

pub fn check_pair(e: Pair) -> Result<()> {
    if e.0 == 0 || e.0 >= e.1 {
        return Err(Error::invalid(format!(
            "malformed pair {{{},{}}}: need 1 <= i < j",
            e.0, e.1
        )));
    }
    Ok(())
}

/// Points `y_e` for the given pairs, in order, labeled `{i,j}`.
pub fn segment_config_points(spec: &SegmentSpec, pairs: &[Pair]) -> Result<PointConfig> {
    spec.validate()?;
    for &e in pairs {
        check_pair(e)?;
    }
    let dim = pairs.iter().map(|e| e.1).max().unwrap_or(0);
    let beta = spec.beta();
    let gamma = rational::to_f64(&spec.gamma);
    let mut points = Vec::with_capacity(pairs.len());
    let mut rows = Vec::with_capacity(pairs.len());
    let mut labels: Vec<String> = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        let mut p = vec![0.0; dim];
        p[i - 1] = beta;
        p[j - 1] = -beta * gamma;
        points.push(p);
        let mut q = vec![Rational::zero(); dim];
        q[i - 1] = rational::one();
        q[j - 1] = -spec.gamma.clone();
        rows.push(q);
        labels.push(pair_label((i, j)));
    }
    Ok(PointConfig {
        dim,
        points,
        labels: Some(labels),
        exact: Some(ExactCoords {
            blocks: vec![ExactBlock {
                scale_sq: spec.beta_sq(),
                coords: rows,
            }],
        }),
    })
}

/// Closed-form squared distance between `y_e` and `y_e2`.
pub fn predicted_sq_distance(e: Pair, e2: Pair, spec: &SegmentSpec) -> Result<Rational> {
    check_pair(e)?;
    check_pair(e2)?;
    let [shared_first, shared_second, disjoint] = spec.gamma_values();
    Ok(if e == e2 {
        Rational::zero()
    } else if e.0 == e2.0 {
        shared_first
    } else if e.1 == e2.1 {
        shared_second
    } else if e.1 == e2.0 || e2.1 == e.0 {
        spec.a_sq.clone()
    } else {
        disjoint
    })
}

/// All pairs of `[n]` in lexicographic order.
pub fn all_pairs(n: usize) -> Vec<Pair> {
    let mut v = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            v.push((i, j));
        }
    }
    v
}
