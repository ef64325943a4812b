//! Acceptance suite: one line per criterion, exit status 1 if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use pramsey::canonical_json;
use pramsey_core::combinatorics::{
    base_labels, monochromatic_copy_search, verify_triangle_free, weighted_independent_set, SearchMode, Verdict,
};
use pramsey_core::constructions::{all_pairs, segment_config_points, Pair, SegmentSpec};
use pramsey_core::geometry::{embed_distance_matrix, negative_type_slack};
use pramsey_core::pipeline::{
    brick_embed, density_sample, pramsey_certificate, realize_almost_regular, run_pipeline, step1_shrink,
    PipelineParams, PipelineTrace,
};
use pramsey_core::rational::{self, int, ratio, Rational};
use pramsey_core::{PointConfig, SquaredDistanceMatrix};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

struct Outcome {
    pass: bool,
    detail: String,
    report: Value,
}

fn outcome(pass: bool, detail: String, report: Value) -> Outcome {
    Outcome { pass, detail, report }
}

// ---- oracles -------------------------------------------------------------

fn adjacent(e: Pair, f: Pair) -> bool {
    e.1 == f.0 || f.1 == e.0
}

fn sq_rows(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| points.iter().map(|q| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()).collect())
        .collect()
}

fn max_gap(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest value of `sum_{i<j} m_ij l_i l_j` over unit `l` orthogonal to the
/// all-ones vector, through an explicit Helmert basis.
fn form_max(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let q = DMatrix::from_fn(n, n - 1, |i, k| {
        let k1 = (k + 1) as f64;
        let s = (k1 * (k1 + 1.0)).sqrt();
        match i.cmp(&(k + 1)) {
            std::cmp::Ordering::Less => 1.0 / s,
            std::cmp::Ordering::Equal => -k1 / s,
            std::cmp::Ordering::Greater => 0.0,
        }
    });
    let mm = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let a = q.transpose() * mm * q * 0.5;
    SymmetricEigen::new(a).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Circumradius of affinely independent points, from the Gram system of
/// edge vectors at the first point.
fn circumradius(points: &[Vec<f64>]) -> f64 {
    let d = points.len() - 1;
    let v: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let g = DMatrix::from_fn(d, d, |i, j| dot(&v[i], &v[j]));
    let rhs = nalgebra::DVector::from_fn(d, |i, _| 0.5 * g[(i, i)]);
    let x = g.clone().lu().solve(&rhs).expect("independent points");
    (x.transpose() * g * &x)[(0, 0)].sqrt()
}

/// Injections of the pattern into the host with all distances within `tol`.
fn injections(host: &[Vec<f64>], pattern: &[Vec<f64>], tol: f64) -> usize {
    fn extend(host: &[Vec<f64>], pattern: &[Vec<f64>], tol: f64, map: &mut Vec<usize>) -> usize {
        let k = map.len();
        if k == pattern.len() {
            return 1;
        }
        let mut count = 0;
        for h in 0..host.len() {
            if map.contains(&h) {
                continue;
            }
            if map.iter().enumerate().all(|(a, &ha)| (host[ha][h].sqrt() - pattern[a][k].sqrt()).abs() <= tol) {
                map.push(h);
                count += extend(host, pattern, tol, map);
                map.pop();
            }
        }
        count
    }
    extend(host, pattern, tol, &mut Vec::new())
}

fn float_matrix(rows: Vec<Vec<f64>>) -> SquaredDistanceMatrix {
    SquaredDistanceMatrix::from_float(rows).unwrap()
}

fn config_rows(c: &PointConfig) -> Vec<Vec<f64>> {
    sq_rows(&c.points)
}

// ---- criteria ------------------------------------------------------------

fn distance_set_law() -> Outcome {
    let a_vals = [ratio(1, 2), int(1), ratio(3, 2), int(2), ratio(7, 3)];
    let g_vals = [ratio(1, 3), ratio(1, 2), int(1), int(2), ratio(5, 2)];
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for a in &a_vals {
        for gamma in &g_vals {
            let spec = SegmentSpec::from_length(a.clone(), gamma.clone()).unwrap();
            let a_sq = a * a;
            let beta_sq = &a_sq / (int(2) * (int(1) + gamma + gamma * gamma));
            let four = [
                a_sq.clone(),
                int(2) * &beta_sq * (int(1) + gamma * gamma),
                int(2) * &beta_sq,
                int(2) * &beta_sq * gamma * gamma,
            ];
            for n in 2..=7 {
                let c = segment_config_points(&spec, &all_pairs(n)).unwrap();
                let labels = base_labels(&c).unwrap();
                for i in 0..c.len() {
                    for j in i + 1..c.len() {
                        let (e, f) = (labels[i], labels[j]);
                        // beta e_i - beta gamma e_j, in units of beta.
                        let mut diff: BTreeMap<usize, Rational> = BTreeMap::new();
                        for (pair, sign) in [(e, int(1)), (f, int(-1))] {
                            *diff.entry(pair.0).or_insert_with(rational::zero) += &sign;
                            *diff.entry(pair.1).or_insert_with(rational::zero) -= &sign * gamma;
                        }
                        let oracle: Rational = diff.values().map(|x| x * x).sum::<Rational>() * &beta_sq;
                        let got = c.exact_sq_dist(i, j).unwrap();
                        checked += 1;
                        let ok = got == oracle && four.contains(&oracle) && ((oracle == a_sq) == adjacent(e, f));
                        if !ok {
                            failures.push(json!({"a": rational::format(a), "gamma": rational::format(gamma), "e": e, "f": f}));
                        }
                    }
                }
            }
        }
    }
    let pass = failures.is_empty();
    outcome(
        pass,
        format!("{checked} pairs over 25 (a, gamma) and n <= 7, {} off the law", failures.len()),
        json!({"checked": checked, "failures": failures}),
    )
}

fn density_quarter() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut least: Option<Rational> = None;
    let mut bad = 0usize;
    let mut sizes = 0usize;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=25usize);
        let mut pairs = all_pairs(n);
        pairs.shuffle(&mut rng);
        pairs.truncate(rng.gen_range(1..=pairs.len().min(200)));
        sizes += pairs.len();
        let raw: Vec<i64> = pairs.iter().map(|_| rng.gen_range(1..=1000)).collect();
        let total: i64 = raw.iter().sum();
        let weights: Vec<Rational> = raw.iter().map(|&w| ratio(w, total)).collect();
        let set = weighted_independent_set(&pairs, &weights).unwrap();
        let weight: Rational = set.indices.iter().map(|&k| weights[k].clone()).sum();
        let independent = set
            .indices
            .iter()
            .all(|&x| set.indices.iter().all(|&y| !adjacent(pairs[x], pairs[y])));
        let consistent = set.indices.windows(2).all(|w| w[0] < w[1])
            && set.indices.iter().map(|&k| pairs[k]).eq(set.pairs.iter().copied())
            && weight == set.weight;
        if !(independent && consistent && weight >= ratio(1, 4)) {
            bad += 1;
        }
        if least.as_ref().map_or(true, |l| &weight < l) {
            least = Some(weight);
        }
    }
    let least = least.unwrap();
    outcome(
        bad == 0,
        format!("1000 weightings, {sizes} pairs in all, least weight {:.4}, {bad} bad", rational::to_f64(&least)),
        json!({"least": rational::format(&least), "bad": bad, "pairs": sizes}),
    )
}

fn triangle_free() -> Outcome {
    let mut rows = Vec::new();
    let mut pass = true;
    for n in 3..=12 {
        let pairs: Vec<Pair> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
        let mut triangles = 0usize;
        for x in 0..pairs.len() {
            for y in x + 1..pairs.len() {
                if !adjacent(pairs[x], pairs[y]) {
                    continue;
                }
                for z in y + 1..pairs.len() {
                    if adjacent(pairs[x], pairs[z]) && adjacent(pairs[y], pairs[z]) {
                        triangles += 1;
                    }
                }
            }
        }
        let lib = verify_triangle_free(n).unwrap();
        pass &= lib && triangles == 0;
        rows.push(json!({"n": n, "library": lib, "oracle_triangles": triangles}));
    }
    outcome(pass, "ground sizes 3..=12, library and oracle agree on no triangle".into(), json!(rows))
}

/// Triples of host points whose exact squared distances match the pattern's.
fn triangle_copies(host: &PointConfig, pattern: &PointConfig) -> Vec<[usize; 3]> {
    let mut want = vec![
        pattern.exact_sq_dist(0, 1).unwrap(),
        pattern.exact_sq_dist(0, 2).unwrap(),
        pattern.exact_sq_dist(1, 2).unwrap(),
    ];
    want.sort();
    let n = host.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut got = vec![
                    host.exact_sq_dist(i, j).unwrap(),
                    host.exact_sq_dist(i, k).unwrap(),
                    host.exact_sq_dist(j, k).unwrap(),
                ];
                got.sort();
                if got == want {
                    out.push([i, j, k]);
                }
            }
        }
    }
    out
}

fn mono(copies: &[[usize; 3]], colors: &[usize]) -> bool {
    copies.iter().any(|t| colors[t[0]] == colors[t[1]] && colors[t[1]] == colors[t[2]])
}

fn ramsey_desk_check() -> Outcome {
    let spec = SegmentSpec::from_length(int(1), int(2)).unwrap();
    let tri = segment_config_points(&spec, &all_pairs(3)).unwrap();
    let host6 = segment_config_points(&spec, &all_pairs(6)).unwrap();
    let host4 = segment_config_points(&spec, &all_pairs(4)).unwrap();

    let rep6 = monochromatic_copy_search(&host6, &tri, 2, 0.0, SearchMode::Exhaustive).unwrap();
    let copies6 = triangle_copies(&host6, &tri);
    let oracle_all = (0u32..1 << 15).all(|mask| {
        let colors: Vec<usize> = (0..15).map(|i| ((mask >> (14 - i)) & 1) as usize).collect();
        mono(&copies6, &colors)
    });
    let ok6 = rep6.verdict == Verdict::Certificate
        && rep6.colorings_checked == 1 << 15
        && rep6.pattern_copies == copies6.len()
        && oracle_all;

    let rep4 = monochromatic_copy_search(&host4, &tri, 2, 0.0, SearchMode::Exhaustive).unwrap();
    let copies4 = triangle_copies(&host4, &tri);
    let ok4 = rep4.verdict == Verdict::Counterexample
        && rep4.counterexample.as_ref().is_some_and(|c| !mono(&copies4, &c.colors));

    outcome(
        ok6 && ok4,
        format!(
            "[6]^(2): {} colorings, {} copies, all monochromatic: {}; [4]^(2) counterexample: {}",
            rep6.colorings_checked, copies6.len(), oracle_all, ok4
        ),
        json!({
            "six": {"colorings": rep6.colorings_checked, "copies": copies6.len(), "oracle_all": oracle_all},
            "four": {"counterexample": rep4.counterexample.map(|c| c.colors), "copies": copies4.len()},
        }),
    )
}

fn embedding_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let d = rng.gen_range(1..=6usize);
        let n = rng.gen_range(1..=10usize);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let m = sq_rows(&pts);
        let back = embed_distance_matrix(&float_matrix(m.clone()), 1e-9).unwrap();
        worst = worst.max(max_gap(&m, &config_rows(&back)));
    }
    let slack = |rows: Vec<Vec<f64>>| negative_type_slack(&float_matrix(rows)).unwrap().slack;
    let eq = slack(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]);
    let col = slack(vec![vec![0.0, 1.0, 4.0], vec![1.0, 0.0, 1.0], vec![4.0, 1.0, 0.0]]);
    let vio = slack(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 9.0], vec![1.0, 9.0, 0.0]]);
    let slacks_ok = (eq - 0.5).abs() <= 1e-9 && col.abs() <= 1e-9 && (vio + 5.0 / 6.0).abs() <= 1e-9;
    outcome(
        worst <= 1e-9 && slacks_ok,
        format!("500 matrices, worst entry error {worst:.2e}; slacks {eq:.12}, {:.12}, {vio:.12}", col + 0.0),
        json!({"worst": worst, "slacks": [eq, col + 0.0, vio]}),
    )
}

/// Squared distances whose square roots lie uniformly within `eps` of `beta`.
fn band_matrix(rng: &mut ChaCha8Rng, n: usize, beta: f64, eps: f64) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let b = beta + rng.gen_range(-eps..=eps);
            m[i][j] = b * b;
            m[j][i] = b * b;
        }
    }
    m
}

fn almost_regular() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst, mut worst_margin, mut bad) = (0.0f64, f64::NEG_INFINITY, 0usize);
    for _ in 0..200 {
        let d = rng.gen_range(1..=4usize);
        let beta = rng.gen_range(0.5..2.0);
        let eps = beta / (64.0 * (d * d) as f64) * rng.gen_range(0.05..0.99);
        let m = band_matrix(&mut rng, d + 1, beta, eps);
        let ar = match realize_almost_regular(&float_matrix(m.clone()), beta, eps, 1e-9) {
            Ok(ar) => ar,
            Err(_) => {
                bad += 1;
                continue;
            }
        };
        let err = max_gap(&m, &config_rows(&ar.config));
        let fmax = form_max(&m);
        worst = worst.max(err);
        // Margin by which the form value clears -beta^2/4, relative to beta^2.
        worst_margin = worst_margin.max((fmax + beta * beta / 4.0) / (beta * beta));
        if err > 1e-9 || fmax >= -beta * beta / 4.0 || (ar.form_value - fmax).abs() > 1e-9 || ar.config.dim != d {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("200 band matrices, worst error {worst:.2e}, form value + beta^2/4 <= {worst_margin:.3} beta^2, {bad} bad"),
        json!({"worst": worst, "worst_margin": worst_margin, "bad": bad}),
    )
}

fn binomial2(n: usize) -> usize {
    n * (n - 1) / 2
}

fn brick_system() -> Outcome {
    let beta = 1.3f64;
    let b2 = beta * beta;
    let reg = brick_embed(&float_matrix(vec![vec![0.0, b2, b2], vec![b2, 0.0, b2], vec![b2, b2, 0.0]]), 1e-9).unwrap();
    let regular_ok = reg.axes.len() == 3 && reg.axes.iter().all(|a| (a.side_sq - b2 / 2.0).abs() <= 1e-9);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst, mut bad) = (0.0f64, 0usize);
    for _ in 0..100 {
        let d = rng.gen_range(1..=4usize);
        let beta = rng.gen_range(0.5..2.0);
        let eps = beta / (64.0 * (d * d) as f64) * rng.gen_range(0.05..0.99);
        let n = d + 1;
        let m = band_matrix(&mut rng, n, beta, eps);
        let Ok(b) = brick_embed(&float_matrix(m.clone()), 1e-9) else {
            bad += 1;
            continue;
        };
        // Axis sums over the cuts separating each pair.
        let mut from_axes = vec![vec![0.0; n]; n];
        for a in &b.axes {
            for i in 0..n {
                for j in 0..n {
                    if a.subset.contains(&i) != a.subset.contains(&j) {
                        from_axes[i][j] += a.side_sq;
                    }
                }
            }
        }
        let err = max_gap(&m, &config_rows(&b.points)).max(max_gap(&m, &from_axes));
        worst = worst.max(err);
        if err > 1e-9 || b.axes.iter().any(|a| a.side_sq < 0.0) || b.axes.len() != binomial2(d + 1) {
            bad += 1;
        }
    }
    outcome(
        regular_ok && bad == 0,
        format!("regular triangle u = beta^2/2: {regular_ok}; 100 near-regular simplices, worst error {worst:.2e}, {bad} bad"),
        json!({"regular": regular_ok, "worst": worst, "bad": bad}),
    )
}

/// Uniform points in [-1,1]^d, redrawn until the shrink step accepts them.
fn random_simplex(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<f64>> {
    loop {
        let pts: Vec<Vec<f64>> = (0..=d).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        if step1_shrink(&float_matrix(sq_rows(&pts)), 1e-9).is_ok() {
            return pts;
        }
    }
}

fn check_trace(pts: &[Vec<f64>], trace: &PipelineTrace) -> (f64, f64, f64) {
    let f = trace.f().unwrap();
    let s = sq_rows(pts);
    let fs = config_rows(&f);
    let residual = s
        .iter()
        .flatten()
        .zip(fs.iter().flatten())
        .map(|(a, b)| (a.sqrt() - b.sqrt()).abs())
        .fold(0.0, f64::max);
    let c = trace.spread.spec().unwrap().c;
    let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    (residual, norm, circumradius(&f.points))
}

fn end_to_end() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut inputs = vec![vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]];
    for k in 0..20 {
        inputs.push(random_simplex(&mut rng, 2 + k % 2));
    }
    let mut rows = Vec::new();
    let mut bad = 0usize;
    let mut worst = 0.0f64;
    for (k, pts) in inputs.iter().enumerate() {
        let params = PipelineParams {
            seed: k as u64,
            ..PipelineParams::default()
        };
        match run_pipeline(&float_matrix(sq_rows(pts)), &params) {
            Ok(trace) => {
                let (residual, norm, rho_f) = check_trace(pts, &trace);
                let rho_s = circumradius(pts);
                worst = worst.max(residual);
                let ok = residual <= 1e-6 && norm < rho_f && (rho_f - rho_s).abs() <= 1e-6;
                bad += usize::from(!ok);
                rows.push(json!({"d": pts.len() - 1, "residual": residual, "spread_norm": norm, "rho_f": rho_f, "ok": ok}));
            }
            Err(e) => {
                bad += 1;
                rows.push(json!({"d": pts.len() - 1, "error": e.to_string()}));
            }
        }
    }
    outcome(
        bad == 0,
        format!("equilateral + 20 random simplices, worst distance residual {worst:.2e}, {bad} bad"),
        json!(rows),
    )
}

fn certificate_trials() -> Outcome {
    let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.4, 0.8]];
    let params = PipelineParams::default();
    let tol = params.tol;
    let trace = run_pipeline(&float_matrix(sq_rows(&pts)), &params).unwrap();
    let cert = pramsey_certificate(&trace, 20, 60, 9).unwrap();
    let pattern = trace.f_sq.to_float();
    let mut bad = 0usize;
    let mut rows = Vec::new();
    let mut copies_seen = 0usize;
    for (k, t) in cert.density_trials.iter().enumerate() {
        let v = density_sample(&trace, &cert, k).unwrap();
        let u = v.subset(&t.subset);
        let in_v = injections(&config_rows(&v), &pattern, tol);
        let in_u = injections(&config_rows(&u), &pattern, tol);
        copies_seen += in_v;
        let base = base_labels(&u).unwrap();
        let independent = base.iter().all(|&e| base.iter().all(|&f| !adjacent(e, f)));
        let ok = v.len() <= 60 && 4 * u.len() >= v.len() && in_u == 0 && t.copies_in_subset == 0 && independent && t.passed;
        bad += usize::from(!ok);
        rows.push(json!({"v": v.len(), "u": u.len(), "copies_in_v": in_v, "copies_in_u": in_u}));
    }
    let pass = bad == 0 && cert.density_trials.len() == 20 && cert.valid && copies_seen > 0;
    outcome(
        pass,
        format!(
            "{} trials, {copies_seen} F-injections in the samples, none in the extracted subsets, {bad} bad",
            cert.density_trials.len()
        ),
        json!({"trials": rows, "gamma": rational::format(&cert.segment.gamma)}),
    )
}

// ---- driver --------------------------------------------------------------

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 9] = [
        ("distance-set law", distance_set_law, Duration::from_secs(10)),
        ("density 1/4", density_quarter, Duration::from_secs(30)),
        ("triangle-freeness", triangle_free, Duration::from_secs(10)),
        ("Ramsey desk check", ramsey_desk_check, Duration::from_secs(120)),
        ("embedding round-trip", embedding_round_trip, Duration::from_secs(30)),
        ("almost-regular realization", almost_regular, Duration::from_secs(30)),
        ("brick system", brick_system, Duration::from_secs(30)),
        ("end-to-end pipeline", end_to_end, Duration::from_secs(300)),
        ("certificate trials", certificate_trials, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    let mut first = Vec::new();
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let pass = o.pass && took < *limit;
        failed += usize::from(!pass);
        println!(
            "criterion {}: {} {name} ({:.2}s, limit {}s): {}",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs(),
            o.detail
        );
        first.push(canonical_json(&o.report).unwrap());
    }

    let start = Instant::now();
    let differing: Vec<usize> = criteria
        .iter()
        .enumerate()
        .filter(|(k, (_, run, _))| canonical_json(&run().report).unwrap() != first[*k])
        .map(|(k, _)| k + 1)
        .collect();
    let pass = differing.is_empty();
    failed += usize::from(!pass);
    println!(
        "criterion 10: {} determinism ({:.2}s): reran 1-9, {} byte-identical reports{}",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        9 - differing.len(),
        if pass { String::new() } else { format!(", differing: {differing:?}") }
    );

    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
