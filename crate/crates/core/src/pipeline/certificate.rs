//! Finite evidence that the pipeline output is P-Ramsey with density 1/4.
//!
//! One brick axis of the witness is replaced by a segment configuration of
//! the same length. Each trial samples a finite `V` inside
//! `segment x (other axes) x spread`, extracts the dense subset `U` and
//! checks that `U` holds no copy of `F`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spread_search::{autocorr, block_shape};
use super::PipelineTrace;
use crate::combinatorics::{extract_dense_free_subset, monochromatic_copy_search, SearchMode, Verdict};
use crate::constructions::labels::pair_label;
use crate::constructions::{
    all_pairs, choose_gamma, difference_set, segment_config_points, separation, Pair, SegmentSpec,
};
use crate::error::{Error, Result};
use crate::geometry::{embed_distance_matrix, find_copies, PointConfig, SquaredDistanceMatrix};
use crate::rational::{self, Rational};

/// Stern-Brocot candidates tried for the segment ratio.
pub const GAMMA_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityTrial {
    /// Segment ground set `[ground]`.
    pub ground: usize,
    pub pairs: Vec<Pair>,
    /// Points of the other factor: bits on the remaining brick axes and one
    /// shift per spread block.
    pub rest: Vec<RestPoint>,
    /// `V` is `pairs x rest`, pair-major.
    pub sample_size: usize,
    pub subset: Vec<usize>,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q"))]
    pub ratio: Rational,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q"))]
    pub separation: Rational,
    /// Copies of `F` in `V` and in `U` found by `find_copies`.
    pub copies_in_sample: usize,
    pub copies_in_subset: usize,
    /// Injections of `F` into `U` found by exhaustive enumeration.
    pub oracle_copies: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RestPoint {
    pub bits: Vec<bool>,
    pub shifts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColoringTrial {
    pub ground: usize,
    pub pattern_ground: usize,
    pub r: usize,
    pub pattern_copies: usize,
    pub colorings_checked: u64,
    /// Every coloring has a monochromatic copy.
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Certificate {
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q"))]
    pub mu: Rational,
    /// Index into the brick's positive axes replaced by the segment.
    pub axis: usize,
    pub segment: SegmentSpec,
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q"))]
    pub margin: Rational,
    /// Smallest separation over all trials.
    #[cfg_attr(feature = "serde", serde(with = "crate::rational::serde_q"))]
    pub separation: Rational,
    pub seed: u64,
    pub density_trials: Vec<DensityTrial>,
    pub coloring_trials: Vec<ColoringTrial>,
    pub valid: bool,
}

/// Counts injections of the pattern into the host that match every
/// pairwise distance within `tol`, by plain enumeration.
pub fn brute_force_copy_count(host_sq: &[Vec<f64>], pattern_sq: &[Vec<f64>], tol: f64) -> usize {
    let nh = host_sq.len();
    let np = pattern_sq.len();
    if np > nh {
        return 0;
    }
    let mut count = 0;
    let mut map = vec![0usize; np];
    loop {
        let injective = (0..np).all(|a| (a + 1..np).all(|b| map[a] != map[b]));
        if injective
            && (0..np).all(|a| {
                (a + 1..np).all(|b| (host_sq[map[a]][map[b]].sqrt() - pattern_sq[a][b].sqrt()).abs() <= tol)
            })
        {
            count += 1;
        }
        let mut pos = np;
        loop {
            if pos == 0 {
                return count;
            }
            pos -= 1;
            map[pos] += 1;
            if map[pos] < nh {
                break;
            }
            map[pos] = 0;
        }
    }
}

struct Factors<'a> {
    trace: &'a PipelineTrace,
    /// Positive brick axes other than the replaced one: (index, side_sq).
    others: Vec<(usize, f64)>,
    axis: usize,
    /// Per spread block: weight times squared radius, and `1 - autocorr` by lag.
    blocks: Vec<(f64, Vec<f64>)>,
    max_shift: Vec<usize>,
}

impl<'a> Factors<'a> {
    fn new(trace: &'a PipelineTrace) -> Result<Self> {
        let sides: Vec<f64> = trace.brick.spec.sides_sq.iter().map(rational::to_f64).collect();
        let axis = (0..sides.len())
            .max_by(|&a, &b| sides[a].partial_cmp(&sides[b]).unwrap().then(b.cmp(&a)))
            .ok_or_else(|| Error::CertificateInvalid("brick has no positive axis".into()))?;
        let others = (0..sides.len()).filter(|&x| x != axis).map(|x| (x, sides[x])).collect();
        let rec = &trace.spread;
        let r2 = rec.radius * rec.radius;
        let mut blocks = Vec::new();
        let mut max_shift = Vec::new();
        for b in &rec.blocks {
            let top = b.shifts.iter().copied().max().unwrap_or(0);
            let shape = block_shape(rec.block_len, b.omega);
            let gaps = (0..=top).map(|lag| 1.0 - autocorr(&shape, lag)).collect();
            blocks.push((r2 * b.weight.max(0.0), gaps));
            max_shift.push(top);
        }
        Ok(Factors {
            trace,
            others,
            axis,
            blocks,
            max_shift,
        })
    }

    /// The point of `brick' x spread` under vertex `i` of `F`.
    fn projection(&self, i: usize) -> RestPoint {
        let label = self.trace.brick.points.label(i);
        let bits: Vec<bool> = label.chars().map(|c| c == '1').collect();
        RestPoint {
            bits: self.others.iter().map(|&(x, _)| bits[x]).collect(),
            shifts: self.trace.spread.blocks.iter().map(|b| b.shifts[i]).collect(),
        }
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> RestPoint {
        RestPoint {
            bits: self.others.iter().map(|_| rng.gen_bool(0.5)).collect(),
            shifts: self.max_shift.iter().map(|&t| rng.gen_range(0..=t)).collect(),
        }
    }

    fn sq_dist(&self, p: &RestPoint, q: &RestPoint) -> f64 {
        if p == q {
            return 0.0;
        }
        let brick: f64 = self
            .others
            .iter()
            .zip(p.bits.iter().zip(&q.bits))
            .filter(|(_, (a, b))| a != b)
            .map(|(&(_, s), _)| s)
            .sum();
        let spread: f64 = self
            .blocks
            .iter()
            .zip(p.shifts.iter().zip(&q.shifts))
            .map(|((w, gaps), (&s, &t))| 2.0 * w * gaps[s.abs_diff(t)])
            .sum();
        brick + spread
    }
}

fn rationals(m: &[Vec<f64>]) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for v in &row[i + 1..] {
            out.push(rational::from_f64(*v)?);
        }
    }
    Ok(out)
}

fn sq_rows(c: &PointConfig) -> Vec<Vec<f64>> {
    (0..c.len()).map(|i| (0..c.len()).map(|j| c.sq_dist(i, j)).collect()).collect()
}

/// `pairs x rest`, pair-major, labelled `{i,j}*r`, with the base pair of
/// every point.
fn build_sample(spec: &SegmentSpec, pairs: &[Pair], rest_sq: &[Vec<f64>], tol: f64) -> Result<(PointConfig, Vec<Pair>)> {
    let seg = segment_config_points(spec, pairs)?;
    let rest_cfg = embed_distance_matrix(&SquaredDistanceMatrix::from_float(rest_sq.to_vec())?, tol.max(1e-9))?;
    let mut points = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut base = Vec::new();
    for (k, &e) in pairs.iter().enumerate() {
        for (r, q) in rest_cfg.points.iter().enumerate() {
            let mut p = seg.points[k].clone();
            p.extend_from_slice(q);
            points.push(p);
            labels.push(format!("{}*{r}", pair_label(e)));
            base.push(e);
        }
    }
    let v = PointConfig::new(seg.dim + rest_cfg.dim, points)?.with_labels(labels)?;
    Ok((v, base))
}

/// Rebuilds the sample `V` of density trial `k`; `subset` indexes into it.
pub fn density_sample(trace: &PipelineTrace, cert: &Certificate, k: usize) -> Result<PointConfig> {
    let trial = cert
        .density_trials
        .get(k)
        .ok_or_else(|| Error::invalid(format!("no density trial {k}")))?;
    let factors = Factors::new(trace)?;
    let rest_sq: Vec<Vec<f64>> = trial
        .rest
        .iter()
        .map(|p| trial.rest.iter().map(|q| factors.sq_dist(p, q)).collect())
        .collect();
    Ok(build_sample(&cert.segment, &trial.pairs, &rest_sq, trace.params.tol)?.0)
}

/// Samples `trials` finite sub-configurations of the witness, each with at
/// most `sample_size` points, and checks the density-1/4 extraction on each.
pub fn pramsey_certificate(trace: &PipelineTrace, trials: usize, sample_size: usize, seed: u64) -> Result<Certificate> {
    let tol = trace.params.tol;
    let factors = Factors::new(trace)?;
    let f_sq = trace.f_sq.to_float();
    let pattern = embed_distance_matrix(&trace.f_sq, tol.max(1e-9))?;
    let m = f_sq.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Samples first, so the ratio can be chosen against all of them.
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let ground = rng.gen_range(4..=5usize);
        let all = all_pairs(ground);
        // Room for the projection of F in every fiber when possible.
        let most = (sample_size / m).clamp(2, all.len());
        let count = if sample_size >= 2 { rng.gen_range(2..=most) } else { 1 };
        let mut pairs: Vec<Pair> = vec![(1, 2), (2, 3)];
        let mut rest_pairs: Vec<Pair> = all.into_iter().filter(|e| !pairs.contains(e)).collect();
        rest_pairs.shuffle(&mut rng);
        pairs.extend(rest_pairs);
        pairs.truncate(count);
        let per = (sample_size / pairs.len()).max(1);
        let mut rest: Vec<RestPoint> = Vec::with_capacity(per);
        for i in 0..m.min(per) {
            let p = factors.projection(i);
            if !rest.contains(&p) {
                rest.push(p);
            }
        }
        let mut guard = 0;
        while rest.len() < per && guard < 64 * per {
            guard += 1;
            let p = factors.random(&mut rng);
            if !rest.contains(&p) {
                rest.push(p);
            }
        }
        samples.push((ground, pairs, rest));
    }

    let rest_sq: Vec<Vec<Vec<f64>>> = samples
        .iter()
        .map(|(_, _, rest)| rest.iter().map(|p| rest.iter().map(|q| factors.sq_dist(p, q)).collect()).collect())
        .collect();
    let a_sq = trace.brick.spec.sides_sq[factors.axis].clone();
    let margin = rational::from_f64(trace.params.margin)?;
    let pattern_q = rationals(&f_sq)?;
    let mut host_q: Vec<Rational> = Vec::new();
    for r in &rest_sq {
        host_q.extend(rationals(r)?);
    }
    host_q.sort();
    host_q.dedup();
    let choice = choose_gamma(&a_sq, &host_q, &pattern_q, &margin, GAMMA_BUDGET)
        .map_err(|e| Error::CertificateInvalid(format!("no segment ratio reaches the margin: {e}")))?;
    let spec = SegmentSpec::new(a_sq, choice.gamma)?;

    let mut density_trials = Vec::with_capacity(trials);
    let mut least = choice.separation.clone();
    for ((ground, pairs, rest), rsq) in samples.into_iter().zip(&rest_sq) {
        let sep = separation(&spec, &difference_set(&rationals(rsq)?, &pattern_q));
        if sep < margin {
            return Err(Error::CertificateInvalid(format!(
                "separation {} below the margin {}",
                rational::format(&sep),
                rational::format(&margin)
            )));
        }
        if sep < least {
            least = sep.clone();
        }
        let (v, base) = build_sample(&spec, &pairs, rsq, tol)?;
        let ext = extract_dense_free_subset(&v, &base, &spec, tol)?;
        let u = v.subset(&ext.subset);
        let copies_in_sample = find_copies(&v, &pattern, tol, usize::MAX).len();
        let copies_in_subset = find_copies(&u, &pattern, tol, usize::MAX).len();
        let oracle_copies = brute_force_copy_count(&sq_rows(&u), &f_sq, tol);
        let passed = ext.ratio >= rational::ratio(1, 4) && copies_in_subset == 0 && oracle_copies == 0;
        density_trials.push(DensityTrial {
            ground,
            pairs,
            rest,
            sample_size: v.len(),
            subset: ext.subset,
            ratio: ext.ratio,
            separation: sep,
            copies_in_sample,
            copies_in_subset,
            oracle_copies,
            passed,
        });
    }

    let mut coloring_trials = Vec::new();
    if trials > 0 {
        let host = segment_config_points(&spec, &all_pairs(6))?;
        let tri = segment_config_points(&spec, &all_pairs(3))?;
        let rep = monochromatic_copy_search(&host, &tri, 2, 0.0, SearchMode::Exhaustive)?;
        coloring_trials.push(ColoringTrial {
            ground: 6,
            pattern_ground: 3,
            r: 2,
            pattern_copies: rep.pattern_copies,
            colorings_checked: rep.colorings_checked,
            passed: rep.verdict == Verdict::Certificate,
        });
    }
    let valid = density_trials.iter().all(|t| t.passed) && coloring_trials.iter().all(|t| t.passed);
    Ok(Certificate {
        mu: rational::ratio(1, 4),
        axis: factors.axis,
        segment: spec,
        margin,
        separation: least,
        seed,
        density_trials,
        coloring_trials,
        valid,
    })
}
