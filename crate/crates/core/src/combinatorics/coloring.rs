use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{find_copies, CongruenceMap, PointConfig};

/// Largest number of colorings the exhaustive search will enumerate.
pub const MAX_COLORINGS: u64 = 1 << 25;

/// Number of colorings whose witnesses are stored in a certificate.
const STORED_WITNESSES: u64 = 4;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coloring {
    pub r: usize,
    pub colors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonochromaticWitness {
    pub coloring: Coloring,
    pub color: usize,
    pub copy: CongruenceMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    /// Every coloring has a monochromatic copy.
    Certificate,
    Counterexample,
    NoCounterexampleFound,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColorSearchReport {
    pub mode: alloc::string::String,
    pub seed: Option<u64>,
    pub r: usize,
    pub host_points: usize,
    pub pattern_copies: usize,
    pub colorings_checked: u64,
    pub verdict: Verdict,
    pub counterexample: Option<Coloring>,
    /// Witnesses for the first few colorings in enumeration order.
    pub witnesses: Vec<MonochromaticWitness>,
}

fn monochromatic(copy: &[usize], colors: &[usize]) -> Option<usize> {
    let c = colors[copy[0]];
    copy.iter().all(|&i| colors[i] == c).then_some(c)
}

/// Decides whether every `r`-coloring of `host` has a monochromatic copy
/// of `pattern`, or samples colorings looking for one without.
///
/// Exhaustive mode walks colorings lexicographically (point 0 most
/// significant) and reports the first one without a monochromatic copy.
pub fn monochromatic_copy_search(
    host: &PointConfig,
    pattern: &PointConfig,
    r: usize,
    tol: f64,
    mode: SearchMode,
) -> Result<ColorSearchReport> {
    if r == 0 {
        return Err(Error::invalid("need at least one color"));
    }
    if pattern.is_empty() {
        return Err(Error::invalid("empty pattern"));
    }
    let n = host.len();
    if let SearchMode::Exhaustive = mode {
        let total = (r as u64).checked_pow(n as u32).filter(|&t| t <= MAX_COLORINGS);
        if total.is_none() {
            return Err(Error::SizeLimit(format!(
                "{r}^{n} colorings exceed the exhaustive budget of 2^25"
            )));
        }
    }
    let maps = find_copies(host, pattern, tol, usize::MAX);
    let copies: Vec<Vec<usize>> = maps.iter().map(|m| m.correspondence.clone()).collect();

    let mut report = ColorSearchReport {
        mode: match mode {
            SearchMode::Exhaustive => "exhaustive".into(),
            SearchMode::Sampled { .. } => "sampled".into(),
        },
        seed: match mode {
            SearchMode::Sampled { seed, .. } => Some(seed),
            SearchMode::Exhaustive => None,
        },
        r,
        host_points: n,
        pattern_copies: copies.len(),
        colorings_checked: 0,
        verdict: Verdict::Certificate,
        counterexample: None,
        witnesses: Vec::new(),
    };

    let check = |colors: &[usize], report: &mut ColorSearchReport| -> bool {
        report.colorings_checked += 1;
        for (k, c) in copies.iter().enumerate() {
            if let Some(color) = monochromatic(c, colors) {
                if report.colorings_checked <= STORED_WITNESSES {
                    report.witnesses.push(MonochromaticWitness {
                        coloring: Coloring { r, colors: colors.to_vec() },
                        color,
                        copy: maps[k].clone(),
                    });
                }
                return true;
            }
        }
        report.counterexample = Some(Coloring { r, colors: colors.to_vec() });
        false
    };

    match mode {
        SearchMode::Exhaustive => {
            let mut colors = vec![0usize; n];
            loop {
                if !check(&colors, &mut report) {
                    report.verdict = Verdict::Counterexample;
                    return Ok(report);
                }
                // Increment with the last point least significant.
                let mut pos = n;
                loop {
                    if pos == 0 {
                        return Ok(report);
                    }
                    pos -= 1;
                    colors[pos] += 1;
                    if colors[pos] < r {
                        break;
                    }
                    colors[pos] = 0;
                }
            }
        }
        SearchMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut colors = vec![0usize; n];
            for _ in 0..samples {
                colors.iter_mut().for_each(|c| *c = rng.gen_range(0..r));
                if !check(&colors, &mut report) {
                    report.verdict = Verdict::Counterexample;
                    return Ok(report);
                }
            }
            report.verdict = Verdict::NoCounterexampleFound;
            Ok(report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{all_pairs, segment_config_points, SegmentSpec};
    use crate::rational::int;

    fn triangle_pattern(spec: &SegmentSpec) -> PointConfig {
        segment_config_points(spec, &[(1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn four_points_admit_a_bad_coloring() {
        let spec = SegmentSpec::new(int(1), int(2)).unwrap();
        let host = segment_config_points(&spec, &all_pairs(4)).unwrap();
        let rep = monochromatic_copy_search(&host, &triangle_pattern(&spec), 2, 0.0, SearchMode::Exhaustive).unwrap();
        assert_eq!(rep.verdict, Verdict::Counterexample);
        assert_eq!(rep.pattern_copies, 4);
        let bad = rep.counterexample.unwrap();
        assert_eq!(bad.colors.len(), 6);
    }

    #[test]
    fn single_color_reduces_to_copy_search() {
        let spec = SegmentSpec::new(int(1), int(2)).unwrap();
        let host = segment_config_points(&spec, &all_pairs(3)).unwrap();
        let rep = monochromatic_copy_search(&host, &triangle_pattern(&spec), 1, 0.0, SearchMode::Exhaustive).unwrap();
        assert_eq!(rep.verdict, Verdict::Certificate);
        assert_eq!(rep.colorings_checked, 1);
        let pair = segment_config_points(&spec, &[(1, 2), (2, 3)]).unwrap();
        let rep = monochromatic_copy_search(&pair, &triangle_pattern(&spec), 1, 0.0, SearchMode::Exhaustive).unwrap();
        assert_eq!(rep.verdict, Verdict::Counterexample);
    }

    #[test]
    fn budget_and_sampling() {
        let spec = SegmentSpec::new(int(1), int(2)).unwrap();
        let host = segment_config_points(&spec, &all_pairs(8)).unwrap();
        let pat = triangle_pattern(&spec);
        assert!(matches!(
            monochromatic_copy_search(&host, &pat, 2, 0.0, SearchMode::Exhaustive),
            Err(Error::SizeLimit(_))
        ));
        let a = monochromatic_copy_search(&host, &pat, 2, 0.0, SearchMode::Sampled { samples: 50, seed: 3 }).unwrap();
        let b = monochromatic_copy_search(&host, &pat, 2, 0.0, SearchMode::Sampled { samples: 50, seed: 3 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.verdict, Verdict::NoCounterexampleFound);
    }
}
