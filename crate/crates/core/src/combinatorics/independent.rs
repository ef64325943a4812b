use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::shift::adjacent;
use crate::constructions::{check_pair, Pair};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IndependentSet {
    /// Positions into the input pair list, increasing.
    pub indices: Vec<usize>,
    pub pairs: Vec<Pair>,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q"))]
    pub weight: Rational,
    /// Color of each ground element, in increasing element order.
    pub coloring: Vec<(usize, u8)>,
}

/// Independent set of the shift graph carrying at least a quarter of the
/// weight.
///
/// Colors ground elements 0/1 one at a time in increasing order, keeping
/// the conditional expectation of the weight of pairs colored `(0,1)` from
/// dropping; pairs colored `(0,1)` form the answer. Ties go to color 0.
pub fn weighted_independent_set(pairs: &[Pair], weights: &[Rational]) -> Result<IndependentSet> {
    if pairs.len() != weights.len() {
        return Err(Error::invalid(format!("{} pairs but {} weights", pairs.len(), weights.len())));
    }
    if pairs.is_empty() {
        return Err(Error::invalid("empty pair set cannot carry a stochastic weight"));
    }
    let mut seen = BTreeSet::new();
    for &e in pairs {
        check_pair(e)?;
        if !seen.insert(e) {
            return Err(Error::invalid(format!("pair {{{},{}}} listed twice", e.0, e.1)));
        }
    }
    if weights.iter().any(|w| w.is_negative()) {
        return Err(Error::invalid("weights must be nonnegative"));
    }
    let total: Rational = weights.iter().sum();
    if total != rational::one() {
        return Err(Error::invalid(format!("weights sum to {}, not 1", rational::format(&total))));
    }

    let mut as_low: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut as_high: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &(lo, hi)) in pairs.iter().enumerate() {
        as_low.entry(lo).or_default().push(k);
        as_high.entry(hi).or_default().push(k);
        as_low.entry(hi).or_default();
        as_high.entry(lo).or_default();
    }
    let half = rational::ratio(1, 2);
    let mut color: BTreeMap<usize, u8> = BTreeMap::new();
    for (&v, lows) in &as_low {
        let gain0: Rational = lows.iter().map(|&k| &weights[k] * &half).sum();
        let gain1: Rational = as_high[&v]
            .iter()
            .filter(|&&k| color[&pairs[k].0] == 0)
            .map(|&k| weights[k].clone())
            .sum();
        color.insert(v, if gain0 >= gain1 { 0 } else { 1 });
    }

    let indices: Vec<usize> = (0..pairs.len())
        .filter(|&k| color[&pairs[k].0] == 0 && color[&pairs[k].1] == 1)
        .collect();
    let chosen: Vec<Pair> = indices.iter().map(|&k| pairs[k]).collect();
    let weight: Rational = indices.iter().map(|&k| weights[k].clone()).sum();

    if weight < rational::ratio(1, 4) {
        return Err(Error::Internal(format!(
            "extracted weight {} below 1/4",
            rational::format(&weight)
        )));
    }
    for a in 0..chosen.len() {
        for b in a + 1..chosen.len() {
            if adjacent(chosen[a], chosen[b]) {
                return Err(Error::Internal("extracted set is not independent".into()));
            }
        }
    }
    debug_assert!(!weight.is_zero());
    Ok(IndependentSet {
        indices,
        pairs: chosen,
        weight,
        coloring: color.into_iter().collect(),
    })
}
