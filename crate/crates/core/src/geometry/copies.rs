use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::PointConfig;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// `correspondence[i]` is the host index that pattern point `i` maps to.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CongruenceMap {
    pub correspondence: Vec<usize>,
    pub max_residual: f64,
}

/// Pairwise comparison keys. In exact mode each distinct squared distance
/// is replaced by its rank, so equality of keys is exact equality.
struct Keys {
    host: Vec<f64>,
    pattern: Vec<f64>,
    nh: usize,
    np: usize,
    tol: f64,
    exact: bool,
}

impl Keys {
    fn build(host: &PointConfig, pattern: &PointConfig, tol: f64) -> Keys {
        let nh = host.len();
        let np = pattern.len();
        let exact = tol == 0.0 && host.is_exact() && pattern.is_exact();
        let (h, p) = if exact {
            let eh = host.exact.as_ref().unwrap();
            let ep = pattern.exact.as_ref().unwrap();
            let mut hq = vec![Rational::default(); nh * nh];
            let mut pq = vec![Rational::default(); np * np];
            let mut ranks: BTreeMap<Rational, usize> = BTreeMap::new();
            for i in 0..nh {
                for j in i + 1..nh {
                    let v = eh.sq_dist(i, j);
                    ranks.insert(v.clone(), 0);
                    hq[i * nh + j] = v.clone();
                    hq[j * nh + i] = v;
                }
            }
            for i in 0..np {
                for j in i + 1..np {
                    let v = ep.sq_dist(i, j);
                    ranks.insert(v.clone(), 0);
                    pq[i * np + j] = v.clone();
                    pq[j * np + i] = v;
                }
            }
            ranks.insert(Rational::default(), 0);
            for (k, r) in ranks.values_mut().enumerate() {
                *r = k;
            }
            (
                hq.iter().map(|v| ranks[v] as f64).collect(),
                pq.iter().map(|v| ranks[v] as f64).collect(),
            )
        } else {
            let mut h = vec![0.0; nh * nh];
            let mut p = vec![0.0; np * np];
            for i in 0..nh {
                for j in i + 1..nh {
                    let d = host.dist(i, j);
                    h[i * nh + j] = d;
                    h[j * nh + i] = d;
                }
            }
            for i in 0..np {
                for j in i + 1..np {
                    let d = pattern.dist(i, j);
                    p[i * np + j] = d;
                    p[j * np + i] = d;
                }
            }
            (h, p)
        };
        Keys {
            host: h,
            pattern: p,
            nh,
            np,
            tol: if exact { 0.0 } else { tol },
            exact,
        }
    }

    fn h(&self, a: usize, b: usize) -> f64 {
        self.host[a * self.nh + b]
    }

    fn p(&self, a: usize, b: usize) -> f64 {
        self.pattern[a * self.np + b]
    }

    fn close(&self, x: f64, y: f64) -> bool {
        (x - y).abs() <= self.tol
    }
}

/// Every value of `need` (sorted) can be matched to a distinct value of
/// `have` (sorted) within `tol`.
fn multiset_fits(need: &[f64], have: &[f64], tol: f64) -> bool {
    let mut k = 0;
    for &x in need {
        while k < have.len() && have[k] < x - tol {
            k += 1;
        }
        if k == have.len() || have[k] > x + tol {
            return false;
        }
        k += 1;
    }
    true
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    v
}

/// Copies of `pattern` inside `host`: injections preserving every pairwise
/// distance within `tol`, enumerated in lexicographic order of the
/// correspondence vector. Injections with the same image set describe the
/// same subconfiguration, so only the first one of each image is kept. At
/// most `limit` maps are returned.
///
/// With `tol == 0` and exact coordinates on both sides the comparison is
/// exact equality of squared distances.
pub fn find_copies(host: &PointConfig, pattern: &PointConfig, tol: f64, limit: usize) -> Vec<CongruenceMap> {
    let nh = host.len();
    let np = pattern.len();
    let mut out = Vec::new();
    if np > nh || limit == 0 {
        return out;
    }
    if np == 0 {
        out.push(CongruenceMap {
            correspondence: Vec::new(),
            max_residual: 0.0,
        });
        return out;
    }
    let keys = Keys::build(host, pattern, tol);

    let all_p = sorted((0..np).flat_map(|i| (i + 1..np).map(move |j| (i, j))).map(|(i, j)| keys.p(i, j)).collect());
    let all_h = sorted((0..nh).flat_map(|i| (i + 1..nh).map(move |j| (i, j))).map(|(i, j)| keys.h(i, j)).collect());
    if !multiset_fits(&all_p, &all_h, keys.tol) {
        return out;
    }

    let host_rows: Vec<Vec<f64>> = (0..nh)
        .map(|a| sorted((0..nh).filter(|&b| b != a).map(|b| keys.h(a, b)).collect()))
        .collect();
    let candidates: Vec<Vec<usize>> = (0..np)
        .map(|i| {
            let row = sorted((0..np).filter(|&j| j != i).map(|j| keys.p(i, j)).collect());
            (0..nh).filter(|&a| multiset_fits(&row, &host_rows[a], keys.tol)).collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return out;
    }

    let mut assign = vec![usize::MAX; np];
    let mut used = vec![false; nh];
    let mut cursor = vec![0usize; np];
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut level = 0usize;
    loop {
        let mut placed = false;
        while cursor[level] < candidates[level].len() {
            let a = candidates[level][cursor[level]];
            cursor[level] += 1;
            if used[a] {
                continue;
            }
            if (0..level).all(|j| keys.close(keys.h(a, assign[j]), keys.p(level, j))) {
                assign[level] = a;
                used[a] = true;
                placed = true;
                break;
            }
        }
        if placed {
            if level + 1 == np {
                let mut image = assign.clone();
                image.sort_unstable();
                if seen.insert(image) {
                    out.push(CongruenceMap {
                        correspondence: assign.clone(),
                        max_residual: residual(host, pattern, &assign, keys.exact),
                    });
                    if out.len() >= limit {
                        return out;
                    }
                }
                used[assign[level]] = false;
            } else {
                level += 1;
                cursor[level] = 0;
            }
        } else {
            if level == 0 {
                return out;
            }
            level -= 1;
            used[assign[level]] = false;
        }
    }
}

fn residual(host: &PointConfig, pattern: &PointConfig, assign: &[usize], exact: bool) -> f64 {
    if exact {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for i in 0..assign.len() {
        for j in i + 1..assign.len() {
            worst = worst.max((host.dist(assign[i], assign[j]) - pattern.dist(i, j)).abs());
        }
    }
    worst
}

/// A bijection from the points of `a` onto those of `b` preserving all
/// distances within `tol`, lexicographically first.
pub fn congruent(a: &PointConfig, b: &PointConfig, tol: f64) -> Result<Option<CongruenceMap>> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "congruence of configurations with {} and {} points",
            a.len(),
            b.len()
        )));
    }
    Ok(find_copies(b, a, tol, 1).into_iter().next())
}
