//! Approximating a point set on a sphere by points of a spread
//! configuration.
//!
//! Every vertex reads one common weight at index 1 and, for each block, a
//! windowed cosine of length `kb` starting at its own shift inside the
//! block's region. Inner products are then sums of block autocorrelations
//! at the shift differences, which is linear in the block weights. Blocks
//! (a frequency plus one shift per vertex) are generated one at a time
//! against the current Gram residual, and the weights are refit by
//! nonnegative least squares.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PipelineParams;
use crate::constructions::SpreadSpec;
use crate::error::{Error, Result};
use crate::geometry::{circumsphere, PointConfig};
use crate::linalg;

/// A strictly increasing index tuple stored as runs `(start, len)` of
/// consecutive 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TupleRuns(pub Vec<(usize, usize)>);

impl TupleRuns {
    pub fn len(&self) -> usize {
        self.0.iter().map(|r| r.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn expand(&self) -> Vec<usize> {
        self.0.iter().flat_map(|&(s, l)| s..s + l).collect()
    }

    pub fn max_index(&self) -> usize {
        self.0.last().map_or(0, |&(s, l)| s + l - 1)
    }

    pub fn is_increasing(&self) -> bool {
        let mut last = 0;
        for &(s, l) in &self.0 {
            if l == 0 || s <= last {
                return false;
            }
            last = s + l - 1;
        }
        true
    }

    /// Image under `p -> p + gap` for `p >= cut` (order preserving).
    pub fn shifted(&self, cut: usize, gap: usize) -> TupleRuns {
        let mut out = Vec::new();
        for &(s, l) in &self.0 {
            let e = s + l;
            if e <= cut {
                out.push((s, l));
            } else if s >= cut {
                out.push((s + gap, l));
            } else {
                out.push((s, cut - s));
                out.push((cut + gap, e - cut));
            }
        }
        TupleRuns(out)
    }
}

/// Spread point `spread(c, J)` as a dense vector of length `dim`.
pub fn spread_point(c: &[f64], tuple: &TupleRuns, dim: usize) -> Vec<f64> {
    let mut p = vec![0.0; dim];
    let mut l = 0;
    for &(s, len) in &tuple.0 {
        for q in s..s + len {
            p[q - 1] = c[l];
            l += 1;
        }
    }
    p
}

/// One block of the weight vector: `sqrt(weight)` times the unit-norm
/// windowed cosine of frequency `omega`, read by vertex `i` from offset
/// `shifts[i]` of the block's region.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpreadBlock {
    pub omega: f64,
    pub weight: f64,
    pub shifts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadApprox {
    pub spec: SpreadSpec,
    /// The norm `c` was built with.
    pub radius: f64,
    /// Ground set size: every tuple lies in `[n]`.
    pub n: usize,
    pub tuples: Vec<TupleRuns>,
    pub s2: PointConfig,
    /// Largest distance between a target point and its spread point after
    /// the best orthogonal alignment.
    pub residual: f64,
    /// Height of the target above the affine hull of the input.
    pub lift: f64,
    pub renormalized: bool,
    pub block_len: usize,
    /// Squared common weight, as a fraction of `|c|^2`.
    pub common: f64,
    pub blocks: Vec<SpreadBlock>,
    pub refits: usize,
    pub seed: u64,
}

/// Rebuilds the dense spread points from `c` and the tuples.
pub fn spread_config(spec: &SpreadSpec, tuples: &[TupleRuns], n: usize) -> PointConfig {
    let points = tuples.iter().map(|t| spread_point(&spec.c, t, n)).collect();
    PointConfig {
        dim: n,
        points,
        labels: Some((0..tuples.len()).map(|i| format!("{i}")).collect()),
        exact: None,
    }
}

/// Weight vector and tuples for blocks of length `block_len` and norm
/// `radius`.
pub fn assemble_spread(
    radius: f64,
    common: f64,
    blocks: &[SpreadBlock],
    block_len: usize,
) -> Result<(SpreadSpec, Vec<TupleRuns>, usize)> {
    let m = blocks.first().map_or(1, |b| b.shifts.len());
    let mut c = Vec::with_capacity(1 + blocks.len() * block_len);
    c.push(radius * common.max(0.0).sqrt());
    let mut runs = vec![vec![(1usize, 1usize)]; m];
    let mut next = 2;
    for b in blocks {
        let amp = radius * b.weight.max(0.0).sqrt();
        c.extend(block_shape(block_len, b.omega).iter().map(|v| v * amp));
        for (i, r) in runs.iter_mut().enumerate() {
            r.push((next + b.shifts[i], block_len));
        }
        next += block_len + b.shifts.iter().copied().max().unwrap_or(0);
    }
    Ok((SpreadSpec::new(c)?, runs.into_iter().map(TupleRuns).collect(), next - 1))
}

/// Hann-windowed cosine of unit norm.
pub(crate) fn block_shape(kb: usize, omega: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..kb)
        .map(|l| {
            let s = (PI * (l as f64 + 0.5) / kb as f64).sin();
            s * s * (omega * l as f64).cos()
        })
        .collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

pub(crate) fn autocorr(c: &[f64], lag: usize) -> f64 {
    if lag >= c.len() {
        return 0.0;
    }
    c[..c.len() - lag].iter().zip(&c[lag..]).map(|(a, b)| a * b).sum()
}

/// Normalized autocorrelation of the window alone, lags `0..=max_lag`.
fn window_overlap(kb: usize, max_lag: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..kb)
        .map(|l| {
            let s = (PI * (l as f64 + 0.5) / kb as f64).sin();
            s * s
        })
        .collect();
    let a0 = autocorr(&w, 0);
    (0..=max_lag).map(|l| autocorr(&w, l) / a0).collect()
}

fn wrap(x: f64) -> f64 {
    let t = x - 2.0 * PI * (x / (2.0 * PI)).floor();
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

const OMEGA_GRID: usize = 2048;
const OMEGA_LO: f64 = 0.05 * PI;
const OMEGA_HI: f64 = 0.95 * PI;
const PHASE_RESTARTS: usize = 6;
const ANNEAL_STEPS: usize = 200;
/// Row weight of the unit-diagonal constraint in the refit.
const DIAG_WEIGHT: f64 = 4.0;
const MAX_BLOCK: usize = 1 << 17;
/// Largest Gram mismatch (relative to the squared radius) counted as a fit.
const GRAM_TOL: f64 = 1e-13;

/// A candidate block before weighting.
#[derive(Debug, Clone, PartialEq)]
struct Atom {
    omega: f64,
    shifts: Vec<i64>,
}

struct Dictionary {
    m: usize,
    pairs: Vec<(usize, usize)>,
    /// Normalized target inner products for the pairs.
    target: Vec<f64>,
    kb: usize,
    max_shift: i64,
    overlap: Vec<f64>,
    atoms: Vec<Atom>,
}

impl Dictionary {
    fn lag(&self, a: &Atom, p: usize) -> usize {
        let (i, j) = self.pairs[p];
        (a.shifts[i] - a.shifts[j]).unsigned_abs() as usize
    }

    /// Modelled normalized inner products of an atom on the pairs.
    fn column(&self, a: &Atom) -> Vec<f64> {
        (0..self.pairs.len())
            .map(|p| {
                let lag = self.lag(a, p);
                self.overlap.get(lag).copied().unwrap_or(0.0) * (a.omega * lag as f64).cos()
            })
            .collect()
    }

    fn exact_column(&self, a: &Atom) -> Vec<f64> {
        let shape = block_shape(self.kb, a.omega);
        (0..self.pairs.len()).map(|p| autocorr(&shape, self.lag(a, p))).collect()
    }

    /// Nonnegative fit of the target by the constant and the given columns.
    /// Returns the weights (constant first) and the unweighted residual.
    fn fit(&self, cols: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>, f64) {
        let np = self.pairs.len();
        let a = DMatrix::from_fn(np + 1, cols.len() + 1, |r, c| {
            if r == np {
                DIAG_WEIGHT
            } else if c == 0 {
                1.0
            } else {
                cols[c - 1][r]
            }
        });
        let b = DVector::from_fn(np + 1, |r, _| if r == np { DIAG_WEIGHT } else { self.target[r] });
        let x = linalg::nnls(&a, &b, 1e-16);
        let r = &b - &a * &x;
        let mut res: Vec<f64> = r.iter().copied().collect();
        res[np] /= DIAG_WEIGHT;
        let worst = res.iter().fold(0.0f64, |w, v| w.max(v.abs()));
        (x.iter().copied().collect(), res, worst)
    }

    /// Score of an atom against the residual: the decrease rate of the
    /// squared misfit when the atom enters with a small weight.
    fn score(&self, a: &Atom, res: &[f64]) -> f64 {
        let np = self.pairs.len();
        let col = self.column(a);
        col.iter().zip(res).map(|(c, r)| c * r).sum::<f64>() + DIAG_WEIGHT * DIAG_WEIGHT * res[np]
    }

    /// Phases maximizing `sum r_ij cos(theta_i - theta_j)`.
    fn phases(&self, res: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let m = self.m;
        let mut r = DMatrix::zeros(m, m);
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            r[(i, j)] = res[p];
            r[(j, i)] = res[p];
        }
        let value = |th: &[f64]| -> f64 {
            self.pairs.iter().enumerate().map(|(p, &(i, j))| res[p] * (th[i] - th[j]).cos()).sum()
        };
        let mut best = (f64::NEG_INFINITY, vec![0.0; m]);
        for _ in 0..PHASE_RESTARTS {
            let mut th: Vec<f64> = (0..m).map(|i| if i == 0 { 0.0 } else { rng.gen::<f64>() * 2.0 * PI }).collect();
            for _ in 0..50 {
                for i in 1..m {
                    let (mut re, mut im) = (0.0, 0.0);
                    for j in 0..m {
                        if j != i {
                            re += r[(i, j)] * th[j].cos();
                            im += r[(i, j)] * th[j].sin();
                        }
                    }
                    if re != 0.0 || im != 0.0 {
                        th[i] = im.atan2(re);
                    }
                }
            }
            let v = value(&th);
            if v > best.0 {
                best = (v, th);
            }
        }
        best.1
    }

    /// Realizable atom close to the phases `theta`, improved by annealing
    /// on shifts and frequency.
    fn quantize(&self, theta: &[f64], res: &[f64], rng: &mut ChaCha8Rng) -> (f64, Atom) {
        let t = self.max_shift;
        let mut best: Option<(f64, Atom)> = None;
        for g in 0..OMEGA_GRID {
            let omega = OMEGA_LO + (OMEGA_HI - OMEGA_LO) * (g as f64 + 0.5) / OMEGA_GRID as f64;
            let mut shifts = vec![0i64; self.m];
            for i in 1..self.m {
                let want = theta[i] - theta[0];
                let mut bt = (f64::INFINITY, 0);
                for s in -t..=t {
                    let e = wrap(omega * s as f64 - want).abs();
                    if e < bt.0 {
                        bt = (e, s);
                    }
                }
                shifts[i] = bt.1;
            }
            let atom = Atom { omega, shifts };
            let sc = self.score(&atom, res);
            if best.as_ref().map_or(true, |b| sc > b.0) {
                best = Some((sc, atom));
            }
        }
        let (mut best_sc, mut best_atom) = best.expect("grid is nonempty");
        let (mut cur_sc, mut cur) = (best_sc, best_atom.clone());
        let step = (OMEGA_HI - OMEGA_LO) / OMEGA_GRID as f64;
        let t0 = 0.05 * best_sc.abs().max(1e-300);
        for k in 0..ANNEAL_STEPS {
            let temp = t0 * 0.97f64.powi(k as i32);
            let mut next = cur.clone();
            if self.m > 1 && rng.gen::<f64>() < 0.6 {
                let i = rng.gen_range(1..self.m);
                let s = next.shifts[i] + if rng.gen::<bool>() { 1 } else { -1 };
                if s.abs() > t {
                    continue;
                }
                next.shifts[i] = s;
            } else {
                next.omega = (next.omega + step * (rng.gen::<f64>() * 4.0 - 2.0)).clamp(OMEGA_LO, OMEGA_HI);
            }
            let sc = self.score(&next, res);
            if sc >= cur_sc || rng.gen::<f64>() < ((sc - cur_sc) / temp).exp() {
                cur = next;
                cur_sc = sc;
                if cur_sc > best_sc {
                    best_sc = cur_sc;
                    best_atom = cur.clone();
                }
            }
        }
        let lo = *best_atom.shifts.iter().min().unwrap();
        best_atom.shifts.iter_mut().for_each(|s| *s -= lo);
        (best_sc, best_atom)
    }
}

/// Block length whose window loss at the largest lag stays below `loss`.
fn block_len_for(loss: f64, max_lag: usize) -> usize {
    let mut kb = 512;
    while kb < MAX_BLOCK && 1.0 - window_overlap(kb, max_lag)[max_lag] > loss {
        kb *= 2;
    }
    kb
}

/// Distance from each row of `target` to the matching row of `z` after the
/// best orthogonal alignment of the two point sets (both about the origin).
fn aligned_residual(target: &DMatrix<f64>, z: &PointConfig) -> f64 {
    let m = target.nrows();
    let gram = DMatrix::from_fn(m, m, |i, j| {
        z.points[i].iter().zip(&z.points[j]).map(|(a, b)| a * b).sum::<f64>()
    });
    let (vals, vecs) = linalg::sym_eigen(&gram);
    let w = m.max(target.ncols());
    let zc = DMatrix::from_fn(m, w, |i, k| if k < m { vecs[(i, k)] * vals[k].max(0.0).sqrt() } else { 0.0 });
    let tc = DMatrix::from_fn(m, w, |i, k| if k < target.ncols() { target[(i, k)] } else { 0.0 });
    let q = linalg::procrustes(&tc, &zc);
    let aligned = &tc * q.transpose();
    (0..m)
        .map(|i| (aligned.row(i) - zc.row(i)).norm())
        .fold(0.0, f64::max)
}

/// Finds `c`, tuples `J_i` and spread points `z_i = spread(c, J_i)` with
/// `|y_i - z_i| < delta` after alignment, where `y_i` are the points of
/// `s1` moved to a sphere of radius `radius`.
///
/// When `radius` exceeds the circumradius of `s1`, the points are lifted
/// off their affine hull by `sqrt(radius^2 - rho'^2)` and `|c| = radius`.
/// When it equals the circumradius, a lift of `delta/4` is used and `c` is
/// rescaled to norm `radius` afterwards.
pub fn spread_approximate(s1: &PointConfig, radius: f64, delta: f64, params: &PipelineParams) -> Result<SpreadApprox> {
    let m = s1.len();
    if m == 0 {
        return Err(Error::invalid("empty target"));
    }
    if !(delta > 0.0) {
        return Err(Error::SearchFailure {
            reason: "zero tolerance cannot be met".into(),
            attempts: 0,
            best_residual: f64::INFINITY,
        });
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("sphere radius must be positive"));
    }
    if m == 1 {
        let (spec, tuples, n) = assemble_spread(radius, 1.0, &[], 0)?;
        let s2 = spread_config(&spec, &tuples, n);
        return Ok(SpreadApprox {
            spec,
            radius,
            n,
            tuples,
            s2,
            residual: 0.0,
            lift: radius,
            renormalized: false,
            block_len: 0,
            common: 1.0,
            blocks: Vec::new(),
            refits: 0,
            seed: params.seed,
        });
    }

    let (rho, center) = circumsphere(s1).map_err(|e| Error::invalid(format!("target has no circumsphere: {e}")))?;
    if radius < rho * (1.0 - 1e-12) {
        return Err(Error::invalid(format!(
            "sphere radius {radius} is below the circumradius {rho}"
        )));
    }
    let renormalize = radius <= rho * (1.0 + 1e-12);
    let lift = if renormalize {
        (delta / 4.0).min(rho / 4.0)
    } else {
        (radius * radius - rho * rho).sqrt()
    };
    let lifted_radius = (rho * rho + lift * lift).sqrt();

    // Coordinates of the centered target in its own span.
    let centered: Vec<Vec<f64>> = s1
        .points
        .iter()
        .map(|p| p.iter().zip(&center).map(|(a, b)| a - b).collect())
        .collect();
    let gram0 = DMatrix::from_fn(m, m, |i, j| centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum::<f64>());
    let (vals, vecs) = linalg::sym_eigen(&gram0);
    let keep: Vec<usize> = (0..m).filter(|&k| vals[k] > 1e-12 * vals[0].abs().max(1e-300)).collect();
    let p = keep.len();
    let coords = DMatrix::from_fn(m, p, |i, k| vecs[(i, keep[k])] * vals[keep[k]].sqrt());
    let lifted = DMatrix::from_fn(m, p + 1, |i, k| if k < p { coords[(i, k)] } else { lift });
    let scale = lifted_radius * lifted_radius;
    let normalized = DMatrix::from_fn(m, m, |i, j| (gram0[(i, j)] + lift * lift) / scale);
    let margin = *linalg::sym_eigen(&normalized).0.last().unwrap();
    if !(margin > 1e-14) {
        return Err(Error::SearchFailure {
            reason: "target points are not affinely independent".into(),
            attempts: 0,
            best_residual: f64::INFINITY,
        });
    }

    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let target: Vec<f64> = pairs.iter().map(|&(i, j)| normalized[(i, j)]).collect();
    let max_shift: i64 = if m <= 3 { 12 } else { 20 };
    let kb = block_len_for(margin / 8.0, 2 * max_shift as usize);
    let mut dict = Dictionary {
        m,
        pairs,
        target,
        kb,
        max_shift,
        overlap: window_overlap(kb, 2 * max_shift as usize),
        atoms: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut refits = 0usize;
    let mut best = f64::INFINITY;
    let final_radius = if renormalize { rho } else { lifted_radius };

    'levels: while refits < params.search_budget {
        let mut cols: Vec<Vec<f64>> = dict.atoms.iter().map(|a| dict.column(a)).collect();
        while refits < params.search_budget {
            refits += 1;
            let (_, res, worst) = dict.fit(&cols);
            if worst <= GRAM_TOL {
                let (x, _) = {
                    let (x, _, _) = dict.fit(&cols);
                    (x, ())
                };
                let support: Vec<usize> = (0..dict.atoms.len()).filter(|&k| x[k + 1] > 0.0).collect();
                let exact: Vec<Vec<f64>> = support.iter().map(|&k| dict.exact_column(&dict.atoms[k])).collect();
                let (w, _, _) = dict.fit(&exact);
                let blocks: Vec<SpreadBlock> = support
                    .iter()
                    .enumerate()
                    .filter(|&(s, _)| w[s + 1] > 0.0)
                    .map(|(s, &k)| SpreadBlock {
                        omega: dict.atoms[k].omega,
                        weight: w[s + 1],
                        shifts: dict.atoms[k].shifts.iter().map(|&t| t as usize).collect(),
                    })
                    .collect();
                let (spec, tuples, n) = assemble_spread(final_radius, w[0], &blocks, dict.kb)?;
                let s2 = spread_config(&spec, &tuples, n);
                let residual = if renormalize {
                    aligned_residual(&coords, &s2)
                } else {
                    aligned_residual(&lifted, &s2)
                };
                best = best.min(residual);
                if residual < delta {
                    return Ok(SpreadApprox {
                        spec,
                        radius: final_radius,
                        n,
                        tuples,
                        s2,
                        residual,
                        lift,
                        renormalized: renormalize,
                        block_len: dict.kb,
                        common: w[0],
                        blocks,
                        refits,
                        seed: params.seed,
                    });
                }
                break;
            }
            let theta = dict.phases(&res, &mut rng);
            let (sc, atom) = dict.quantize(&theta, &res, &mut rng);
            if !(sc > 1e-15) || dict.atoms.contains(&atom) {
                break;
            }
            cols.push(dict.column(&atom));
            dict.atoms.push(atom);
        }
        if dict.kb >= MAX_BLOCK {
            break 'levels;
        }
        dict.kb *= 2;
        dict.max_shift += 4;
        dict.overlap = window_overlap(dict.kb, 2 * dict.max_shift as usize);
    }
    Err(Error::SearchFailure {
        reason: format!("no spread representation within {delta:e}"),
        attempts: refits,
        best_residual: best,
    })
}
