//! Subcommand definitions and handlers.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pramsey_core::combinatorics::{
    base_labels, extract_dense_free_subset, monochromatic_copy_search, shift_adjacent, verify_triangle_free,
    weighted_independent_set, SearchMode, Verdict,
};
use pramsey_core::constructions::{
    all_pairs, brick_points, materialize, predicted_sq_distance, segment_config_points, spread_points, BrickSpec,
    ConfigDescriptor, Pair, SegmentSpec, SpreadSpec,
};
use pramsey_core::geometry::{congruent, diameter, find_copies, negative_type_slack};
use pramsey_core::pipeline::{pramsey_certificate, run_pipeline, PipelineParams};
use pramsey_core::rational::{self, Rational};
use pramsey_core::PointConfig;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::io::{canonical_json, read_distances, read_json, read_points, sibling, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "pramsey", version, about = "Segment, spread and brick configurations and the simplex pipeline")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Distance tolerance [default: 1e-9]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// RNG seed [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Search budget (spread refits, or sampled colorings)
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Output file, or output prefix for `pipeline run`
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Global {
    fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-9)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Materialize a configuration as PointConfig JSON.
    #[command(subcommand)]
    Construct(Construct),
    /// Run a check; exit 0 on pass, 1 on failure.
    #[command(subcommand)]
    Verify(Verify),
    #[command(subcommand)]
    Pipeline(PipelineCmd),
    /// Congruent copies of a pattern inside a host.
    Copies {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        /// Truncation for descriptor inputs.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = usize::MAX)]
        limit: usize,
    },
    /// Look for an r-coloring of the host with no monochromatic pattern copy.
    ColorSearch {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Sample this many colorings instead of enumerating all of them.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Dense subset of a labelled sample free of the chosen triangle.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        gamma: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    Segment {
        /// Segment length, as p/q or a decimal.
        #[arg(long)]
        a: String,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        n: usize,
    },
    Spread {
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<f64>,
        #[arg(long)]
        n: usize,
    },
    Brick {
        /// Side lengths, as p/q or decimals.
        #[arg(long, value_delimiter = ',', required = true)]
        sides: Vec<String>,
    },
    Product {
        /// ConfigDescriptor JSON files.
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    DistanceSet {
        #[arg(long)]
        a: String,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        n: usize,
    },
    TriangleFree {
        #[arg(long)]
        n: usize,
    },
    /// Input: {"pairs": [[i,j],...], "weights": ["p/q",...]}.
    IndependentSet {
        #[arg(long)]
        input: PathBuf,
    },
    /// Extraction on a labelled sample, optionally checked against a pattern.
    Density {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        pattern: Option<PathBuf>,
    },
    Congruence {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    NegativeType {
        /// Squared distance matrix or PointConfig JSON.
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum PipelineCmd {
    /// Writes trace, certificate and manifest next to --out.
    Run {
        /// Simplex as squared distance matrix or PointConfig JSON.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 60)]
        sample_size: usize,
    },
}

/// What a command produced: report JSON plus whether its check passed.
pub struct Outcome {
    pub passed: bool,
    pub message: String,
}

fn q(s: &str) -> CliResult<Rational> {
    Ok(rational::parse_lenient(s)?)
}

fn segment_spec(a: &str, gamma: &str) -> CliResult<SegmentSpec> {
    Ok(SegmentSpec::from_length(q(a)?, q(gamma)?)?)
}

/// A PointConfig, or a ConfigDescriptor truncated at `n`.
fn read_config(path: &Path, n: Option<usize>) -> CliResult<PointConfig> {
    let v: serde_json::Value = read_json(path)?;
    if v.get("type").is_some() {
        let d: ConfigDescriptor =
            serde_json::from_value(v).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        let n = n.ok_or_else(|| CliError::Invalid(format!("{}: descriptor input needs --n", path.display())))?;
        Ok(materialize(&d, n)?)
    } else {
        read_points(path)
    }
}

/// Writes to --out (with a manifest beside it) or to stdout.
fn emit<T: Serialize>(g: &Global, command: &str, inputs: &[&Path], params: serde_json::Value, value: &T) -> CliResult<()> {
    let text = canonical_json(value)?;
    match &g.out {
        Some(out) => {
            let mut m = RunManifest::new(command, inputs, params, g.seed());
            m.emit(out, &text)?;
            m.write(&sibling(out, "manifest"))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summary(c: &PointConfig, tol: f64) -> String {
    let mut vals: Vec<String> = Vec::new();
    if c.is_exact() {
        let mut set: Vec<Rational> = Vec::new();
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                set.push(c.exact_sq_dist(i, j).expect("exact"));
            }
        }
        set.sort();
        set.dedup();
        vals.extend(set.iter().map(rational::format));
    } else {
        let mut set: Vec<f64> = Vec::new();
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                set.push(c.sq_dist(i, j));
            }
        }
        set.sort_by(f64::total_cmp);
        set.dedup_by(|a, b| (*a - *b).abs() <= tol * b.abs().max(1.0));
        vals.extend(set.iter().map(|x| format!("{x}")));
    }
    format!(
        "{} points in dimension {}, diameter {}, squared distances {{{}}}",
        c.len(),
        c.dim,
        diameter(c),
        vals.join(", ")
    )
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Construct(c) => construct(g, c),
        Command::Verify(v) => verify(g, v),
        Command::Pipeline(PipelineCmd::Run {
            input,
            params,
            trials,
            sample_size,
        }) => pipeline(g, input, params.as_deref(), *trials, *sample_size),
        Command::Copies { host, pattern, n, limit } => {
            let h = read_config(host, *n)?;
            let p = read_config(pattern, *n)?;
            let maps = find_copies(&h, &p, g.tol(), *limit);
            let report = json!({"host_points": h.len(), "pattern_points": p.len(), "count": maps.len(), "copies": maps});
            emit(g, "copies", &[host, pattern], json!({"n": n, "limit": limit, "tol": g.tol()}), &report)?;
            Ok(Outcome {
                passed: true,
                message: format!("{} copies", maps.len()),
            })
        }
        Command::ColorSearch {
            host,
            pattern,
            n,
            r,
            samples,
        } => {
            let h = read_config(host, *n)?;
            let p = read_config(pattern, *n)?;
            let mode = match samples.or(g.budget.map(|b| b as u64)) {
                Some(samples) => SearchMode::Sampled { samples, seed: g.seed() },
                None => SearchMode::Exhaustive,
            };
            let report = monochromatic_copy_search(&h, &p, *r, g.tol(), mode)?;
            emit(g, "color-search", &[host, pattern], json!({"n": n, "r": r, "samples": samples, "tol": g.tol()}), &report)?;
            Ok(Outcome {
                passed: report.verdict != Verdict::Counterexample,
                message: format!("{:?} after {} colorings", report.verdict, report.colorings_checked),
            })
        }
        Command::Extract { input, a, gamma } => {
            let v = read_points(input)?;
            let spec = segment_spec(a, gamma)?;
            let ex = extract_dense_free_subset(&v, &base_labels(&v)?, &spec, g.tol())?;
            let passed = ex.ratio >= rational::ratio(1, 4);
            let report = json!({"extraction": ex, "subset": v.subset(&ex.subset)});
            emit(g, "extract", &[input], json!({"a": a, "gamma": gamma, "tol": g.tol()}), &report)?;
            Ok(Outcome {
                passed,
                message: format!("kept {} of {} points", ex.subset.len(), v.len()),
            })
        }
    }
}

fn construct(g: &Global, c: &Construct) -> CliResult<Outcome> {
    let (config, params, inputs): (PointConfig, serde_json::Value, Vec<&Path>) = match c {
        Construct::Segment { a, gamma, n } => {
            let spec = segment_spec(a, gamma)?;
            let pairs = all_pairs(*n);
            (segment_config_points(&spec, &pairs)?, json!({"kind": "segment", "a": a, "gamma": gamma, "n": n}), vec![])
        }
        Construct::Spread { c, n } => {
            let spec = SpreadSpec::new(c.clone())?;
            let ground: Vec<usize> = (1..=*n).collect();
            (spread_points(&spec, &ground)?, json!({"kind": "spread", "c": c, "n": n}), vec![])
        }
        Construct::Brick { sides } => {
            let sq = sides
                .iter()
                .map(|s| q(s).map(|x| &x * &x))
                .collect::<CliResult<Vec<Rational>>>()?;
            (brick_points(&BrickSpec::new(sq)?)?, json!({"kind": "brick", "sides": sides}), vec![])
        }
        Construct::Product { left, right, n } => {
            let l: ConfigDescriptor = read_json(left)?;
            let r: ConfigDescriptor = read_json(right)?;
            let d = ConfigDescriptor::product(l, r);
            (materialize(&d, *n)?, json!({"kind": "product", "n": n}), vec![left.as_path(), right.as_path()])
        }
    };
    let message = summary(&config, g.tol());
    emit(g, "construct", &inputs, params, &config)?;
    Ok(Outcome { passed: true, message })
}

#[derive(Debug, Deserialize)]
struct WeightedPairs {
    pairs: Vec<Pair>,
    weights: Vec<String>,
}

fn verify(g: &Global, v: &Verify) -> CliResult<Outcome> {
    let tol = g.tol();
    match v {
        Verify::DistanceSet { a, gamma, n } => {
            let spec = segment_spec(a, gamma)?;
            let allowed = spec.distance_set();
            let pairs = all_pairs(*n);
            let config = segment_config_points(&spec, &pairs)?;
            let mut violations = Vec::new();
            for i in 0..pairs.len() {
                for j in i + 1..pairs.len() {
                    let d = config.exact_sq_dist(i, j).expect("segment coordinates are exact");
                    let at_a = d == spec.a_sq;
                    let adjacent = shift_adjacent(pairs[i], pairs[j])?;
                    let predicted = predicted_sq_distance(pairs[i], pairs[j], &spec)?;
                    if !allowed.contains(&d) || at_a != adjacent || d != predicted {
                        violations.push(json!({"pair": [pairs[i], pairs[j]], "sq": rational::format(&d)}));
                    }
                }
            }
            let passed = violations.is_empty();
            let report = json!({
                "check": "distance-set",
                "points": pairs.len(),
                "allowed": rational::format_all(&allowed),
                "violations": violations,
                "passed": passed,
            });
            emit(g, "verify distance-set", &[], json!({"a": a, "gamma": gamma, "n": n}), &report)?;
            Ok(Outcome {
                passed,
                message: format!("{} points, {} violations", pairs.len(), report["violations"].as_array().map_or(0, |v| v.len())),
            })
        }
        Verify::TriangleFree { n } => {
            let passed = verify_triangle_free(*n)?;
            let report = json!({"check": "triangle-free", "n": n, "passed": passed});
            emit(g, "verify triangle-free", &[], json!({"n": n}), &report)?;
            Ok(Outcome {
                passed,
                message: format!("shift graph on [{n}] triangle-free: {passed}"),
            })
        }
        Verify::IndependentSet { input } => {
            let w: WeightedPairs = read_json(input)?;
            let weights = w.weights.iter().map(|s| q(s)).collect::<CliResult<Vec<_>>>()?;
            let set = weighted_independent_set(&w.pairs, &weights)?;
            let mut independent = true;
            for (k, &e) in set.pairs.iter().enumerate() {
                for &f in &set.pairs[k + 1..] {
                    independent &= !shift_adjacent(e, f)?;
                }
            }
            let dense = set.weight >= rational::ratio(1, 4);
            let passed = independent && dense;
            let report = json!({"check": "independent-set", "independent": independent, "dense": dense, "set": set, "passed": passed});
            emit(g, "verify independent-set", &[input], json!({}), &report)?;
            Ok(Outcome {
                passed,
                message: format!("weight {}", rational::format(&set.weight)),
            })
        }
        Verify::Density { input, a, gamma, pattern } => {
            let v = read_points(input)?;
            let spec = segment_spec(a, gamma)?;
            let ex = extract_dense_free_subset(&v, &base_labels(&v)?, &spec, tol)?;
            let dense = ex.ratio >= rational::ratio(1, 4);
            let mut inputs = vec![input.as_path()];
            let copies = match pattern {
                Some(p) => {
                    inputs.push(p);
                    let pat = read_points(p)?;
                    Some(find_copies(&v.subset(&ex.subset), &pat, tol, usize::MAX))
                }
                None => None,
            };
            let free = copies.as_ref().map_or(true, |c| c.is_empty());
            let passed = dense && free;
            let report = json!({"check": "density", "extraction": ex, "pattern_copies": copies, "passed": passed});
            emit(g, "verify density", &inputs, json!({"a": a, "gamma": gamma, "tol": tol}), &report)?;
            Ok(Outcome {
                passed,
                message: format!("ratio {}, pattern-free {free}", rational::format(&ex.ratio)),
            })
        }
        Verify::Congruence { a, b } => {
            let ca = read_points(a)?;
            let cb = read_points(b)?;
            let map = congruent(&ca, &cb, tol)?;
            let passed = map.is_some();
            let report = json!({"check": "congruence", "map": map, "passed": passed});
            emit(g, "verify congruence", &[a, b], json!({"tol": tol}), &report)?;
            Ok(Outcome {
                passed,
                message: match &map {
                    Some(m) => format!("congruent via {:?}", m.correspondence),
                    None => "not congruent".into(),
                },
            })
        }
        Verify::NegativeType { matrix } => {
            let m = read_distances(matrix)?;
            let r = negative_type_slack(&m)?;
            let verdict = if r.is_strict(tol) {
                "strictly negative type"
            } else if r.is_negative_type(tol) {
                "negative type, not strict"
            } else {
                "not negative type"
            };
            let passed = r.is_negative_type(tol);
            let report = json!({"check": "negative-type", "slack": r.slack + 0.0, "witness": r.witness_lambda, "verdict": verdict, "passed": passed});
            emit(g, "verify negative-type", &[matrix], json!({"tol": tol}), &report)?;
            Ok(Outcome {
                passed,
                message: format!("slack {:.12}, {verdict}", r.slack + 0.0),
            })
        }
    }
}

fn pipeline(g: &Global, input: &Path, params: Option<&Path>, trials: usize, sample_size: usize) -> CliResult<Outcome> {
    let out = g
        .out
        .as_ref()
        .ok_or_else(|| CliError::Invalid("pipeline run needs --out".into()))?;
    let m = read_distances(input)?;
    let mut p: PipelineParams = match params {
        Some(path) => read_json(path)?,
        None => PipelineParams::default(),
    };
    if let Some(t) = g.tol {
        p.tol = t;
    }
    if let Some(s) = g.seed {
        p.seed = s;
    }
    if let Some(b) = g.budget {
        p.search_budget = b;
    }
    p.validate()?;
    let mut inputs = vec![input];
    inputs.extend(params);
    let block = json!({"pipeline": p, "trials": trials, "sample_size": sample_size});
    let mut manifest = RunManifest::new("pipeline run", &inputs, block, p.seed);
    let result = run_pipeline(&m, &p).and_then(|trace| {
        let cert = pramsey_certificate(&trace, trials, sample_size, p.seed)?;
        Ok((trace, cert))
    });
    let (trace, cert) = match result {
        Ok(x) => x,
        Err(e) => {
            let err = CliError::from(e);
            let report = json!({"stage": err.stage(), "error": err.kind(), "message": err.to_string()});
            manifest.emit(&sibling(out, "error"), &canonical_json(&report)?)?;
            manifest.write(&sibling(out, "manifest"))?;
            return Err(err);
        }
    };
    let trace_path = match out.extension() {
        Some(e) if e == "json" => out.clone(),
        _ => sibling(out, "trace"),
    };
    manifest.emit(&trace_path, &canonical_json(&trace)?)?;
    manifest.emit(&sibling(out, "certificate"), &canonical_json(&cert)?)?;
    manifest.write(&sibling(out, "manifest"))?;
    let d = &trace.diagnostics;
    Ok(Outcome {
        passed: cert.valid,
        message: format!(
            "assembly residual {:e}, circumradius {} > spread norm {}, {} density and {} coloring trials, certificate {}",
            d.assembly_residual,
            d.circumradius,
            d.spread_norm,
            cert.density_trials.len(),
            cert.coloring_trials.len(),
            if cert.valid { "valid" } else { "invalid" }
        ),
    })
}
