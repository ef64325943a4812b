use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, Signed};

use crate::error::{Error, Result};
use crate::geometry::{ExactBlock, ExactCoords, PointConfig};
use crate::rational::{self, Rational};

pub const MAX_BRICK_DIM: usize = 20;

/// Box with squared side lengths `sides_sq`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BrickSpec {
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q::vec"))]
    pub sides_sq: Vec<Rational>,
}

impl BrickSpec {
    pub fn new(sides_sq: Vec<Rational>) -> Result<Self> {
        if let Some(s) = sides_sq.iter().find(|s| !s.is_positive()) {
            return Err(Error::invalid(format!("brick side must be positive, got squared side {}", rational::format(s))));
        }
        Ok(BrickSpec { sides_sq })
    }

    /// From side lengths (taken exactly as floats and squared).
    pub fn from_sides(sides: &[f64]) -> Result<Self> {
        let sq = sides
            .iter()
            .map(|&a| {
                if a.is_nan() || a <= 0.0 {
                    return Err(Error::invalid(format!("brick side must be positive, got {a}")));
                }
                let q = rational::from_f64(a)?;
                Ok(&q * &q)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sq)
    }

    pub fn sides(&self) -> Vec<f64> {
        self.sides_sq.iter().map(|s| rational::to_f64(s).sqrt()).collect()
    }
}

/// The `2^d` vertices, labeled by bit strings with axis 0 first; vertex
/// order is binary counting with axis 0 most significant.
pub fn brick_points(spec: &BrickSpec) -> Result<PointConfig> {
    BrickSpec::new(spec.sides_sq.clone())?;
    let d = spec.sides_sq.len();
    if d > MAX_BRICK_DIM {
        return Err(Error::SizeLimit(format!("brick of dimension {d} exceeds {MAX_BRICK_DIM}")));
    }
    let sides = spec.sides();
    let n = 1usize << d;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut blocks: Vec<ExactBlock> = spec
        .sides_sq
        .iter()
        .map(|s| ExactBlock {
            scale_sq: s.clone(),
            coords: Vec::with_capacity(n),
        })
        .collect();
    for v in 0..n {
        let bits: Vec<bool> = (0..d).map(|x| (v >> (d - 1 - x)) & 1 == 1).collect();
        points.push((0..d).map(|x| if bits[x] { sides[x] } else { 0.0 }).collect());
        labels.push(bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>());
        for (x, blk) in blocks.iter_mut().enumerate() {
            blk.coords.push(vec![if bits[x] { rational::one() } else { rational::zero() }]);
        }
    }
    Ok(PointConfig {
        dim: d,
        points,
        labels: Some(labels),
        exact: Some(ExactCoords { blocks }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{diameter, squared_distance_matrix};
    use crate::rational::int;

    #[test]
    fn three_four_five() {
        let b = brick_points(&BrickSpec::from_sides(&[3.0, 4.0]).unwrap()).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(diameter(&b), 5.0);
        assert_eq!(b.label(2), "10");
        assert_eq!(b.points[2], vec![3.0, 0.0]);
    }

    #[test]
    fn unit_cube_distance_counts() {
        let b = brick_points(&BrickSpec::new(vec![int(1); 3]).unwrap()).unwrap();
        let m = squared_distance_matrix(&b);
        let mut counts = [0usize; 4];
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    let v = m.rational(i, j).unwrap();
                    counts[rational::to_f64(v) as usize] += 1;
                }
            }
        }
        // Ordered pairs, so twice the unordered counts 12, 12, 4.
        assert_eq!(counts[1..], [24, 24, 8]);
    }

    #[test]
    fn limits() {
        assert!(BrickSpec::from_sides(&[1.0, 0.0]).is_err());
        let big = BrickSpec::new(vec![int(1); 21]).unwrap();
        assert!(matches!(brick_points(&big), Err(Error::SizeLimit(_))));
        let seg = brick_points(&BrickSpec::from_sides(&[2.5]).unwrap()).unwrap();
        assert_eq!(seg.points, vec![vec![0.0], vec![2.5]]);
    }
}
