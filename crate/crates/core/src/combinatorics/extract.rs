use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use super::independent::{weighted_independent_set, IndependentSet};
use super::shift::adjacent;
use crate::constructions::labels::parse_pair_label;
use crate::constructions::{predicted_sq_distance, Pair, SegmentSpec};
use crate::error::{Error, Result};
use crate::geometry::PointConfig;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Fiber {
    pub base: Pair,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Extraction {
    /// Indices into V, increasing.
    pub subset: Vec<usize>,
    pub fibers: Vec<Fiber>,
    pub independent: IndependentSet,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q"))]
    pub ratio: Rational,
}

/// Base pairs read from labels of the form `{i,j}` or `{i,j}*...`.
pub fn base_labels(v: &PointConfig) -> Result<Vec<Pair>> {
    let labels = v
        .labels
        .as_ref()
        .ok_or_else(|| Error::invalid("points carry no base labels"))?;
    labels.iter().map(|l| parse_pair_label(l)).collect()
}

/// Union of fibers over an independent set of base pairs carrying at least
/// a quarter of the points.
///
/// Points are grouped by base pair, each fiber weighted by its share of V,
/// and the derandomized independent set is taken over those weights.
pub fn extract_dense_free_subset(v: &PointConfig, base: &[Pair], spec: &SegmentSpec, tol: f64) -> Result<Extraction> {
    if base.len() != v.len() {
        return Err(Error::invalid(format!("{} base labels for {} points", base.len(), v.len())));
    }
    if v.is_empty() {
        return Err(Error::invalid("empty sample"));
    }
    let mut groups: BTreeMap<Pair, Vec<usize>> = BTreeMap::new();
    for (i, &e) in base.iter().enumerate() {
        crate::constructions::check_pair(e)?;
        groups.entry(e).or_default().push(i);
    }
    let total = v.len() as i64;
    let fibers: Vec<Fiber> = groups
        .into_iter()
        .map(|(base, members)| Fiber { base, members })
        .collect();
    let pairs: Vec<Pair> = fibers.iter().map(|f| f.base).collect();
    let weights: Vec<Rational> = fibers
        .iter()
        .map(|f| rational::ratio(f.members.len() as i64, total))
        .collect();
    let independent = weighted_independent_set(&pairs, &weights)?;

    let mut subset: Vec<usize> = independent
        .indices
        .iter()
        .flat_map(|&k| fibers[k].members.iter().copied())
        .collect();
    subset.sort_unstable();
    let ratio = rational::ratio(subset.len() as i64, total);
    if ratio < rational::ratio(1, 4) {
        return Err(Error::Internal("extracted subset below a quarter of the sample".into()));
    }

    // The base projection of U must avoid distance a.
    let a = spec.a();
    for x in 0..independent.pairs.len() {
        for y in x + 1..independent.pairs.len() {
            let (e, f) = (independent.pairs[x], independent.pairs[y]);
            let d = rational::to_f64(&predicted_sq_distance(e, f, spec)?).sqrt();
            if adjacent(e, f) || (d - a).abs() <= tol {
                return Err(Error::Internal(format!(
                    "base pairs {{{},{}}} and {{{},{}}} realize the segment length",
                    e.0, e.1, f.0, f.1
                )));
            }
        }
    }
    Ok(Extraction {
        subset,
        fibers,
        independent,
        ratio,
    })
}
