use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::Float;

use crate::constructions::{all_pairs, BrickSpec};
use crate::error::{Error, Result};
use crate::geometry::{PointConfig, SquaredDistanceMatrix};
use crate::linalg;
use crate::rational;

/// Largest point count for the cut decomposition fallback.
pub const MAX_CUT_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum EmbedMethod {
    PairSystem,
    CutDecomposition,
}

/// One brick axis: vertices in `subset` sit at `sqrt(side_sq)`, the rest at 0.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BrickAxis {
    pub subset: Vec<usize>,
    pub side_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BrickEmbedding {
    pub method: EmbedMethod,
    /// All axes, including zero-length ones.
    pub axes: Vec<BrickAxis>,
    /// The brick spanned by the positive axes.
    pub spec: BrickSpec,
    /// Vertex bit strings over the positive axes.
    pub vertices: Vec<String>,
    pub points: PointConfig,
    pub residual: f64,
}

fn cut_column(subset_mask: u64, pairs: &[(usize, usize)]) -> Vec<f64> {
    pairs
        .iter()
        .map(|&(p, q)| {
            let a = subset_mask >> p & 1;
            let b = subset_mask >> q & 1;
            if a != b {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Adds `col` to an orthonormal basis if it is independent of it.
fn extend_basis(basis: &mut Vec<Vec<f64>>, col: &[f64]) -> bool {
    let mut v = col.to_vec();
    for _ in 0..2 {
        for b in basis.iter() {
            let dot: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-9 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    basis.push(v);
    true
}

fn mask_of(subset: &[usize]) -> u64 {
    subset.iter().fold(0, |m, &v| m | 1 << v)
}

/// Writes the squared distances as a nonnegative combination of cut
/// semimetrics, i.e. places the points on the vertices of a brick.
///
/// The primary axes are the two-element subsets, giving a square linear
/// system. When that system is singular or has a negative solution, the
/// distances are fit by nonnegative least squares over all cuts.
pub fn brick_embed(m: &SquaredDistanceMatrix, tol: f64) -> Result<BrickEmbedding> {
    m.validate()?;
    let n = m.n;
    if n < 2 {
        return Err(Error::invalid("brick embedding needs at least two points"));
    }
    if n > 63 {
        return Err(Error::SizeLimit(format!("{n} points")));
    }
    let pairs: Vec<(usize, usize)> = all_pairs(n).iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    let np = pairs.len();
    let rhs = DVector::from_iterator(np, pairs.iter().map(|&(p, q)| m.float(p, q)));
    let scale = m.max_entry().max(1.0);

    let mut solved: Option<(EmbedMethod, Vec<BrickAxis>)> = None;
    let mut pair_solution: Option<Vec<f64>> = None;
    if n >= 3 {
        let a = DMatrix::from_fn(np, np, |r, c| cut_column(mask_of(&[pairs[c].0, pairs[c].1]), &pairs)[r]);
        if linalg::inverse_condition(&a) > 1e-10 {
            if let Some(u) = linalg::solve(&a, &rhs) {
                pair_solution = Some(u.iter().copied().collect());
                if u.iter().all(|&x| x >= -tol * scale) {
                    let axes = pairs
                        .iter()
                        .zip(u.iter())
                        .map(|(&(p, q), &x)| BrickAxis {
                            subset: vec![p, q],
                            side_sq: x.max(0.0),
                        })
                        .collect();
                    solved = Some((EmbedMethod::PairSystem, axes));
                }
            }
        }
    }
    let (method, axes) = match solved {
        Some(s) => s,
        None => {
            if n > MAX_CUT_POINTS {
                return Err(match pair_solution {
                    Some(u) => Error::NotEmbeddable {
                        slack: u.iter().copied().fold(f64::INFINITY, f64::min),
                        witness: u,
                    },
                    None => Error::Degenerate(format!("pair system of {n} points is singular")),
                });
            }
            let cuts: Vec<u64> = (1..(1u64 << (n - 1))).collect();
            let a = DMatrix::from_fn(np, cuts.len(), |r, c| cut_column(cuts[c], &pairs)[r]);
            let u = linalg::nnls(&a, &rhs, 1e-14 * scale);
            let mut basis = Vec::new();
            let mut axes = Vec::new();
            for (c, &mask) in cuts.iter().enumerate() {
                if u[c] > 1e-15 * scale && extend_basis(&mut basis, &cut_column(mask, &pairs)) {
                    axes.push((mask, u[c]));
                }
            }
            // Zero-length axes complete the brick to one axis per pair.
            let by_size = cuts.iter().copied().filter(|c| c.count_ones() <= 2).chain(cuts.iter().copied().filter(|c| c.count_ones() > 2));
            for mask in by_size {
                if basis.len() >= np {
                    break;
                }
                if axes.iter().all(|a| a.0 != mask) && extend_basis(&mut basis, &cut_column(mask, &pairs)) {
                    axes.push((mask, 0.0));
                }
            }
            let axes = axes
                .into_iter()
                .map(|(mask, x)| BrickAxis {
                    subset: (0..n).filter(|&v| mask >> v & 1 == 1).collect(),
                    side_sq: x,
                })
                .collect();
            (EmbedMethod::CutDecomposition, axes)
        }
    };

    let positive: Vec<&BrickAxis> = axes.iter().filter(|a| a.side_sq > 0.0).collect();
    let spec = BrickSpec::new(
        positive
            .iter()
            .map(|a| rational::from_f64(a.side_sq))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let mut points = Vec::with_capacity(n);
    let mut vertices = Vec::with_capacity(n);
    for v in 0..n {
        let bits: Vec<bool> = positive.iter().map(|a| a.subset.contains(&v)).collect();
        points.push(
            positive
                .iter()
                .zip(&bits)
                .map(|(a, &b)| if b { a.side_sq.sqrt() } else { 0.0 })
                .collect(),
        );
        vertices.push(bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>());
    }
    let points = PointConfig::new(positive.len(), points)?.with_labels(vertices.clone())?;
    let mut residual = 0.0f64;
    for &(p, q) in &pairs {
        residual = residual.max((points.sq_dist(p, q) - m.float(p, q)).abs());
    }
    let floor = tol.max(64.0 * f64::EPSILON) * scale;
    if residual > floor {
        return Err(Error::NotEmbeddable {
            slack: -residual,
            witness: axes.iter().map(|a| a.side_sq).collect(),
        });
    }
    Ok(BrickEmbedding {
        method,
        axes,
        spec,
        vertices,
        points,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular(n: usize, x: f64) -> SquaredDistanceMatrix {
        SquaredDistanceMatrix::from_float((0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { x }).collect()).collect()).unwrap()
    }

    #[test]
    fn regular_triangle_uses_pairs() {
        let b = brick_embed(&regular(3, 2.0), 1e-9).unwrap();
        assert_eq!(b.method, EmbedMethod::PairSystem);
        assert_eq!(b.axes.len(), 3);
        for a in &b.axes {
            assert!((a.side_sq - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn four_points_fall_back_to_cuts() {
        let b = brick_embed(&regular(4, 1.0), 1e-9).unwrap();
        assert_eq!(b.method, EmbedMethod::CutDecomposition);
        assert_eq!(b.axes.len(), 6);
        assert!(b.residual < 1e-12);
        let two = brick_embed(&regular(2, 3.0), 1e-9).unwrap();
        assert_eq!(two.spec.sides_sq.len(), 1);
        assert!((two.points.sq_dist(0, 1) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn regular_pentagon_of_distances() {
        let b = brick_embed(&regular(5, 1.0), 1e-9).unwrap();
        assert_eq!(b.method, EmbedMethod::PairSystem);
        for a in &b.axes {
            assert!((a.side_sq - 1.0 / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_hypermetric_distances_fail() {
        // The path 0-1-2 with squared distances violating the triangle
        // inequality for the l1 metric of a brick.
        let m = SquaredDistanceMatrix::from_float(vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(brick_embed(&m, 1e-9), Err(Error::NotEmbeddable { .. })));
    }

    fn axis(b: &BrickEmbedding, p: usize, q: usize) -> f64 {
        b.axes.iter().find(|a| a.subset == vec![p, q]).unwrap().side_sq
    }

    #[test]
    fn right_triangle_has_a_zero_axis() {
        let m = SquaredDistanceMatrix::from_float(vec![vec![0.0, 25.0, 16.0], vec![25.0, 0.0, 9.0], vec![16.0, 9.0, 0.0]]).unwrap();
        let b = brick_embed(&m, 1e-9).unwrap();
        assert_eq!(axis(&b, 1, 2), 16.0);
        assert_eq!(axis(&b, 0, 2), 9.0);
        assert_eq!(axis(&b, 0, 1), 0.0);
        assert_eq!(b.spec.sides_sq.len(), 2);
    }

    #[test]
    fn nearly_regular_triangle() {
        let x = 1.01f64 * 1.01;
        let m = SquaredDistanceMatrix::from_float(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, x], vec![1.0, x, 0.0]]).unwrap();
        let b = brick_embed(&m, 1e-9).unwrap();
        let u: Vec<f64> = b.axes.iter().map(|a| a.side_sq).collect();
        assert!(u.iter().all(|&v| v > 0.0));
        assert!(u[0] != u[2] && b.residual < 1e-9);
    }
}
