//! Choice of the segment ratio from a finite separation margin.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::segment::SegmentSpec;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Positive rationals in Stern-Brocot breadth-first order, each level
/// listed as its elements above 1 in decreasing order, each followed by
/// its reciprocal: 1, 2, 1/2, 3, 1/3, 3/2, 2/3, 4, 1/4, 5/2, 2/5, ...
pub struct SternBrocot {
    level: Vec<(Rational, Rational, Rational)>,
    pending: Vec<Rational>,
    started: bool,
}

impl SternBrocot {
    pub fn new() -> Self {
        let big = |n: i64| BigInt::from(n);
        // Node 2/1 with bounds 1/1 and "1/0" (stored as the pair 1, 0).
        SternBrocot {
            level: alloc::vec![(rational::int(2), rational::int(1), Rational::new_raw(big(1), big(0)))],
            pending: Vec::new(),
            started: false,
        }
    }
}

impl Default for SternBrocot {
    fn default() -> Self {
        Self::new()
    }
}

fn mediant(a: &Rational, b: &Rational) -> Rational {
    Rational::new(a.numer() + b.numer(), a.denom() + b.denom())
}

impl Iterator for SternBrocot {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        if !self.started {
            self.started = true;
            return Some(rational::one());
        }
        if self.pending.is_empty() {
            let mut nodes: Vec<Rational> = self.level.iter().map(|(x, _, _)| x.clone()).collect();
            nodes.sort();
            for x in nodes.into_iter().rev() {
                self.pending.push(x.clone());
                self.pending.push(x.recip());
            }
            self.pending.reverse();
            let mut next = Vec::with_capacity(self.level.len() * 2);
            for (x, lo, hi) in self.level.drain(..) {
                next.push((mediant(&lo, &x), lo, x.clone()));
                let right = if hi.denom().is_zero() {
                    Rational::from_integer(x.numer() + BigInt::one())
                } else {
                    mediant(&x, &hi)
                };
                next.push((right, x, hi));
            }
            self.level = next;
        }
        self.pending.pop()
    }
}

/// Smallest distance from `v` to the sorted set `diffs`.
fn gap(v: &Rational, diffs: &[Rational]) -> Rational {
    let pos = diffs.partition_point(|x| x < v);
    let mut best: Option<Rational> = None;
    for k in [pos.wrapping_sub(1), pos] {
        if let Some(x) = diffs.get(k) {
            let g = (v - x).abs();
            if best.as_ref().map_or(true, |b| &g < b) {
                best = Some(g);
            }
        }
    }
    best.unwrap_or_else(|| Rational::from_integer(BigInt::from(i64::MAX)))
}

/// `{s - t : s in pattern + {0}, t in host + {0}}`, sorted and deduplicated.
pub fn difference_set(host_sq: &[Rational], pattern_sq: &[Rational]) -> Vec<Rational> {
    let mut s: Vec<Rational> = pattern_sq.to_vec();
    s.push(Rational::zero());
    let mut t: Vec<Rational> = host_sq.to_vec();
    t.push(Rational::zero());
    let mut d: Vec<Rational> = Vec::with_capacity(s.len() * t.len());
    for x in &s {
        for y in &t {
            d.push(x - y);
        }
    }
    d.sort();
    d.dedup();
    d
}

/// Smallest distance between the gamma-dependent squared distances of
/// `spec` and the difference set.
pub fn separation(spec: &SegmentSpec, diffs: &[Rational]) -> Rational {
    spec.gamma_values()
        .iter()
        .map(|v| gap(v, diffs))
        .min()
        .expect("three values")
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaChoice {
    pub gamma: Rational,
    pub separation: Rational,
    /// Candidates examined, including the accepted one.
    pub tried: usize,
}

/// First ratio in Stern-Brocot order whose three gamma-dependent squared
/// distances each stay at least `margin` away from every difference
/// `s - t` of a pattern and a host squared distance.
pub fn choose_gamma(
    a_sq: &Rational,
    host_sq: &[Rational],
    pattern_sq: &[Rational],
    margin: &Rational,
    budget: usize,
) -> Result<GammaChoice> {
    if !a_sq.is_positive() {
        return Err(Error::invalid("segment length must be positive"));
    }
    if !margin.is_positive() {
        return Err(Error::invalid("separation margin must be positive"));
    }
    let diffs = difference_set(host_sq, pattern_sq);
    let mut best = Rational::zero();
    for (k, gamma) in SternBrocot::new().take(budget).enumerate() {
        let spec = SegmentSpec::new(a_sq.clone(), gamma.clone())?;
        let sep = separation(&spec, &diffs);
        if &sep >= margin {
            return Ok(GammaChoice {
                gamma,
                separation: sep,
                tried: k + 1,
            });
        }
        if sep > best {
            best = sep;
        }
    }
    Err(Error::SearchFailure {
        reason: format!(
            "no ratio among {budget} candidates reaches margin {}",
            rational::format(margin)
        ),
        attempts: budget,
        best_residual: rational::to_f64(&best),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use alloc::vec;

    #[test]
    fn enumeration_order() {
        let got: Vec<Rational> = SternBrocot::new().take(11).collect();
        let want = vec![
            int(1),
            int(2),
            ratio(1, 2),
            int(3),
            ratio(1, 3),
            ratio(3, 2),
            ratio(2, 3),
            int(4),
            ratio(1, 4),
            ratio(5, 2),
            ratio(2, 5),
        ];
        assert_eq!(got, want);
        let level4: Vec<Rational> = SternBrocot::new().skip(7).take(8).collect();
        let mut above: Vec<Rational> = level4.iter().filter(|x| **x > int(1)).cloned().collect();
        above.sort();
        assert_eq!(above, vec![ratio(4, 3), ratio(5, 3), ratio(5, 2), int(4)]);
    }

    #[test]
    fn first_candidate_accepted() {
        let c = choose_gamma(&int(1), &[], &[int(1)], &ratio(1, 3), 100).unwrap();
        assert_eq!(c.gamma, int(1));
        assert_eq!(c.separation, ratio(1, 3));
        assert_eq!(c.tried, 1);
    }

    #[test]
    fn rejected_candidate_moves_on() {
        // gamma = 1 gives values 1/3, 2/3, which sit 0 away from 1/3.
        let c = choose_gamma(&int(1), &[], &[int(1), ratio(1, 3)], &ratio(1, 100), 100).unwrap();
        assert!(c.tried > 1);
        assert_eq!(c.gamma, int(2));
    }

    #[test]
    fn unreachable_margin_fails() {
        // Against {0, 1} no ratio separates by 0.4: the disjoint-pair value
        // stays within gamma/(1+gamma+gamma^2) <= 1/3 of 1.
        let r = choose_gamma(&int(1), &[], &[int(1)], &ratio(2, 5), 500);
        assert!(matches!(r, Err(Error::SearchFailure { .. })));
        assert!(choose_gamma(&int(0), &[], &[int(1)], &ratio(1, 3), 5).is_err());
    }
}
