//! Finite point sets, squared-distance matrices and the metric operations
//! on them.

mod copies;
mod metric;
mod sphere;

pub use copies::{congruent, find_copies, CongruenceMap};
pub use metric::{embed_distance_matrix, form_value, negative_type_slack, squared_distance_matrix, NegativeTypeReport, EIGEN_CUTOFF};
pub use sphere::{circumsphere, diameter};

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{Float, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A labeled list of points in a common dimension.
///
/// `exact`, when present, describes the same points as blocks of rational
/// coordinates scaled by square roots of rationals, so squared distances
/// can be evaluated without rounding even when coordinates are irrational.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointConfig {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub labels: Option<Vec<String>>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub exact: Option<ExactCoords>,
}

/// Squared distance between points `i` and `j` is
/// `sum over blocks of scale_sq * |coords[i] - coords[j]|^2`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExactCoords {
    pub blocks: Vec<ExactBlock>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExactBlock {
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q"))]
    pub scale_sq: Rational,
    /// One row per point.
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q::mat"))]
    pub coords: Vec<Vec<Rational>>,
}

impl ExactCoords {
    pub fn sq_dist(&self, i: usize, j: usize) -> Rational {
        let mut total = Rational::zero();
        for b in &self.blocks {
            let mut s = Rational::zero();
            for (x, y) in b.coords[i].iter().zip(&b.coords[j]) {
                let d = x - y;
                s += &d * &d;
            }
            total += &b.scale_sq * s;
        }
        total
    }

    fn select(&self, idx: &[usize]) -> ExactCoords {
        ExactCoords {
            blocks: self
                .blocks
                .iter()
                .map(|b| ExactBlock {
                    scale_sq: b.scale_sq.clone(),
                    coords: idx.iter().map(|&i| b.coords[i].clone()).collect(),
                })
                .collect(),
        }
    }

    /// Exact coordinates of plain rational points.
    pub fn plain(rows: Vec<Vec<Rational>>) -> ExactCoords {
        ExactCoords {
            blocks: alloc::vec![ExactBlock {
                scale_sq: rational::one(),
                coords: rows,
            }],
        }
    }
}

impl PointConfig {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        let c = PointConfig {
            dim,
            points,
            labels: None,
            exact: None,
        };
        c.validate()?;
        Ok(c)
    }

    /// Dimension taken from the first point (0 when empty).
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.len());
        Self::new(dim, points)
    }

    /// Points with exactly known rational coordinates.
    pub fn from_rational_points(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| r.iter().map(rational::to_f64).collect())
            .collect();
        let mut c = Self::from_points(points)?;
        c.exact = Some(ExactCoords::plain(rows));
        c.validate()?;
        Ok(c)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        self.labels = Some(labels);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != self.dim {
                return Err(Error::invalid(format!(
                    "point {i} has {} coordinates, expected {}",
                    p.len(),
                    self.dim
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("point {i} has a non-finite coordinate")));
            }
        }
        if let Some(l) = &self.labels {
            if l.len() != self.points.len() {
                return Err(Error::invalid(format!(
                    "{} labels for {} points",
                    l.len(),
                    self.points.len()
                )));
            }
        }
        if let Some(e) = &self.exact {
            for b in &e.blocks {
                if b.coords.len() != self.points.len() {
                    return Err(Error::invalid("exact block row count does not match point count"));
                }
                if b.scale_sq.is_negative() {
                    return Err(Error::invalid("negative exact block scale"));
                }
                let w = b.coords.first().map_or(0, |r| r.len());
                if b.coords.iter().any(|r| r.len() != w) {
                    return Err(Error::invalid("ragged exact block"));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        self.points[i]
            .iter()
            .zip(&self.points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.sq_dist(i, j).sqrt()
    }

    pub fn exact_sq_dist(&self, i: usize, j: usize) -> Option<Rational> {
        self.exact.as_ref().map(|e| e.sq_dist(i, j))
    }

    pub fn norm(&self, i: usize) -> f64 {
        self.points[i].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn subset(&self, idx: &[usize]) -> PointConfig {
        PointConfig {
            dim: self.dim,
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
            labels: self.labels.as_ref().map(|l| idx.iter().map(|&i| l[i].clone()).collect()),
            exact: self.exact.as_ref().map(|e| e.select(idx)),
        }
    }

    /// Joins point `i` of `self` with point `i` of `other` (same count).
    pub fn concat_pointwise(&self, other: &PointConfig) -> Result<PointConfig> {
        if self.len() != other.len() {
            return Err(Error::invalid(format!(
                "pointwise concatenation of {} and {} points",
                self.len(),
                other.len()
            )));
        }
        let points = self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(ExactCoords {
                blocks: a.blocks.iter().chain(&b.blocks).cloned().collect(),
            }),
            _ => None,
        };
        Ok(PointConfig {
            dim: self.dim + other.dim,
            points,
            labels: self.labels.clone(),
            exact,
        })
    }
}

/// Cartesian product: point `a*b` is the concatenation of `a` and `b`,
/// enumerated with the first factor varying slowest.
pub fn product(a: &PointConfig, b: &PointConfig) -> PointConfig {
    let mut points = Vec::with_capacity(a.len() * b.len());
    let mut labels = Vec::with_capacity(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            points.push(a.points[i].iter().chain(&b.points[j]).copied().collect());
            labels.push(format!("{}*{}", a.label(i), b.label(j)));
        }
    }
    let exact = match (&a.exact, &b.exact) {
        (Some(ea), Some(eb)) => {
            let nb = b.len();
            let na = a.len();
            let mut blocks = Vec::new();
            for blk in &ea.blocks {
                blocks.push(ExactBlock {
                    scale_sq: blk.scale_sq.clone(),
                    coords: (0..na * nb).map(|k| blk.coords[k / nb].clone()).collect(),
                });
            }
            for blk in &eb.blocks {
                blocks.push(ExactBlock {
                    scale_sq: blk.scale_sq.clone(),
                    coords: (0..na * nb).map(|k| blk.coords[k % nb].clone()).collect(),
                });
            }
            Some(ExactCoords { blocks })
        }
        _ => None,
    };
    PointConfig {
        dim: a.dim + b.dim,
        points,
        labels: Some(labels),
        exact,
    }
}

/// Squared distances, exact or float.
#[derive(Debug, Clone, PartialEq)]
pub enum SqEntries {
    Rational(Vec<Vec<Rational>>),
    Float(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquaredDistanceMatrix {
    pub n: usize,
    pub sq: SqEntries,
}

impl SquaredDistanceMatrix {
    pub fn from_float(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = SquaredDistanceMatrix {
            n: rows.len(),
            sq: SqEntries::Float(rows),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_rational(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let m = SquaredDistanceMatrix {
            n: rows.len(),
            sq: SqEntries::Rational(rows),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        match &self.sq {
            SqEntries::Float(rows) => {
                check_shape(rows, n)?;
                for i in 0..n {
                    if rows[i][i] != 0.0 {
                        return Err(Error::invalid(format!("nonzero diagonal entry at {i}")));
                    }
                    for j in 0..n {
                        let v = rows[i][j];
                        if !v.is_finite() || v < 0.0 {
                            return Err(Error::invalid(format!("entry ({i},{j}) = {v} is not a nonnegative number")));
                        }
                        if v != rows[j][i] {
                            return Err(Error::invalid(format!("matrix not symmetric at ({i},{j})")));
                        }
                    }
                }
            }
            SqEntries::Rational(rows) => {
                check_shape(rows, n)?;
                for i in 0..n {
                    if !rows[i][i].is_zero() {
                        return Err(Error::invalid(format!("nonzero diagonal entry at {i}")));
                    }
                    for j in 0..n {
                        if rows[i][j].is_negative() {
                            return Err(Error::invalid(format!("negative entry at ({i},{j})")));
                        }
                        if rows[i][j] != rows[j][i] {
                            return Err(Error::invalid(format!("matrix not symmetric at ({i},{j})")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.sq, SqEntries::Rational(_))
    }

    pub fn mode(&self) -> &'static str {
        match self.sq {
            SqEntries::Rational(_) => "rational",
            SqEntries::Float(_) => "float",
        }
    }

    pub fn float(&self, i: usize, j: usize) -> f64 {
        match &self.sq {
            SqEntries::Float(r) => r[i][j],
            SqEntries::Rational(r) => rational::to_f64(&r[i][j]),
        }
    }

    pub fn rational(&self, i: usize, j: usize) -> Option<&Rational> {
        match &self.sq {
            SqEntries::Rational(r) => Some(&r[i][j]),
            SqEntries::Float(_) => None,
        }
    }

    pub fn to_float(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.float(i, j)).collect()).collect()
    }

    pub fn max_entry(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(self.float(i, j));
            }
        }
        m
    }
}

fn check_shape<T>(rows: &[Vec<T>], n: usize) -> Result<()> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid(format!("matrix is not {n} x {n}")));
    }
    Ok(())
}

#[cfg(feature = "serde")]
mod sdm_serde {
    use super::*;
    use serde::de::Error as _;
    use serde::ser::SerializeStruct;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    impl Serialize for SquaredDistanceMatrix {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            let mut st = s.serialize_struct("SquaredDistanceMatrix", 3)?;
            st.serialize_field("n", &self.n)?;
            st.serialize_field("mode", self.mode())?;
            match &self.sq {
                SqEntries::Float(rows) => st.serialize_field("sq", rows)?,
                SqEntries::Rational(rows) => {
                    let text: Vec<Vec<String>> = rows.iter().map(|r| rational::format_all(r)).collect();
                    st.serialize_field("sq", &text)?
                }
            }
            st.end()
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Num(f64),
        Text(String),
    }

    #[derive(Deserialize)]
    struct Raw {
        n: usize,
        mode: String,
        sq: Vec<Vec<Entry>>,
    }

    impl<'de> Deserialize<'de> for SquaredDistanceMatrix {
        fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            let raw = Raw::deserialize(d)?;
            let m = match raw.mode.as_str() {
                "rational" => {
                    let rows = raw
                        .sq
                        .iter()
                        .map(|r| {
                            r.iter()
                                .map(|e| match e {
                                    Entry::Text(s) => rational::parse(s),
                                    Entry::Num(x) if x.fract() == 0.0 => rational::from_f64(*x),
                                    Entry::Num(x) => Err(Error::invalid(format!(
                                        "rational mode entry {x} must be a \"p/q\" string"
                                    ))),
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()
                        .map_err(D::Error::custom)?;
                    SquaredDistanceMatrix::from_rational(rows)
                }
                "float" => {
                    let rows = raw
                        .sq
                        .iter()
                        .map(|r| {
                            r.iter()
                                .map(|e| match e {
                                    Entry::Num(x) => Ok(*x),
                                    Entry::Text(s) => rational::parse_lenient(s).map(|q| rational::to_f64(&q)),
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()
                        .map_err(D::Error::custom)?;
                    SquaredDistanceMatrix::from_float(rows)
                }
                other => return Err(D::Error::custom(format!("unknown mode {other:?}"))),
            }
            .map_err(D::Error::custom)?;
            if m.n != raw.n {
                return Err(D::Error::custom(format!("n = {} but matrix has {} rows", raw.n, m.n)));
            }
            Ok(m)
        }
    }
}
