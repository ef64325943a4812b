use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use super::{
    assemble_and_verify, assemble_spread, brick_embed, realize_almost_regular, spread_approximate, spread_config,
    step1_shrink, BrickEmbedding, PipelineParams, SpreadBlock, TupleRuns,
};
use crate::constructions::{ConfigDescriptor, SpreadSpec};
use crate::error::{Error, Result};
use crate::geometry::{squared_distance_matrix, PointConfig, SquaredDistanceMatrix};

/// Most rounds of tolerance halving before giving up.
pub const MAX_DELTA_ROUNDS: usize = 8;

/// The spread found in step 2, stored by its generating blocks; `c` and the
/// points are rebuilt with [`SpreadRecord::spec`] and [`SpreadRecord::points`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpreadRecord {
    /// `|c|`.
    pub radius: f64,
    pub k: usize,
    pub n: usize,
    pub tuples: Vec<TupleRuns>,
    pub residual: f64,
    pub lift: f64,
    pub renormalized: bool,
    pub refits: usize,
    pub block_len: usize,
    pub common: f64,
    pub blocks: Vec<SpreadBlock>,
    pub seed: u64,
}

impl SpreadRecord {
    pub fn spec(&self) -> Result<SpreadSpec> {
        Ok(assemble_spread(self.radius, self.common, &self.blocks, self.block_len)?.0)
    }

    pub fn points(&self) -> Result<PointConfig> {
        Ok(spread_config(&self.spec()?, &self.tuples, self.n))
    }
}

/// One attempt at steps 2 to the brick.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Round {
    pub delta: f64,
    pub epsilon: f64,
    /// `ok`, `band` (leftover outside `beta +- epsilon`) or `brick`.
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostics {
    /// Largest `|D_ij - beta|` of the leftover squared distances.
    pub band_deviation: f64,
    pub spread_residual: f64,
    pub brick_residual: f64,
    pub assembly_residual: f64,
    pub circumradius: f64,
    pub spread_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineTrace {
    pub params: PipelineParams,
    pub dimension: usize,
    pub input: SquaredDistanceMatrix,
    pub slack: f64,
    pub shrink_beta: f64,
    pub s1: PointConfig,
    pub rho: f64,
    pub rho_prime: f64,
    pub epsilon: f64,
    pub sphere_radius: f64,
    pub lift: f64,
    pub rounds: Vec<Round>,
    pub spread: SpreadRecord,
    /// Squared distances of the spread points `z_i`.
    pub s2_sq: SquaredDistanceMatrix,
    pub leftover: SquaredDistanceMatrix,
    pub s3: PointConfig,
    pub form_value: f64,
    pub brick: BrickEmbedding,
    /// Squared distances of the assembled `f_i = (w_i, z_i)`.
    pub f_sq: SquaredDistanceMatrix,
    pub diagnostics: Diagnostics,
}

impl PipelineTrace {
    pub fn s2(&self) -> Result<PointConfig> {
        self.spread.points()
    }

    /// The assembled simplex in `brick x spread` coordinates.
    pub fn f(&self) -> Result<PointConfig> {
        self.brick.points.concat_pointwise(&self.s2()?)
    }

    /// `brick x spread`, the configuration containing `f`.
    pub fn witness(&self) -> Result<ConfigDescriptor> {
        Ok(ConfigDescriptor::product(
            ConfigDescriptor::Brick(self.brick.spec.clone()),
            ConfigDescriptor::Spread(self.spread.spec()?),
        ))
    }
}

/// Realizes the simplex `m` inside `brick x spread`.
///
/// Errors carry the stage that failed: `step1`, `step2`, `step3`, `brick`
/// or `step4`.
pub fn run_pipeline(m: &SquaredDistanceMatrix, params: &PipelineParams) -> Result<PipelineTrace> {
    params.validate()?;
    m.validate()?;
    let tol = params.tol;
    let shrink = step1_shrink(m, tol).map_err(|e| e.at("step1"))?;
    let n = m.n;
    let d = (n - 1) as f64;
    let beta = shrink.beta;
    let (rho, rho_p) = (shrink.rho, shrink.rho_prime);
    let radius = (rho_p * rho_p + 0.75 * (rho * rho - rho_p * rho_p)).sqrt();
    let lift = (radius * radius - rho_p * rho_p).sqrt();
    let mut epsilon = params.epsilon.min(beta / (128.0 * d * d));
    let mut delta = params.delta.min(epsilon / (16.0 * rho_p + 4.0));

    let mut rounds = Vec::new();
    let mut failure = None;
    let mut found = None;
    for _ in 0..MAX_DELTA_ROUNDS {
        let approx = spread_approximate(&shrink.s1, radius, delta, params).map_err(|e| e.at("step2"))?;
        let mut rows = alloc::vec![alloc::vec![0.0; n]; n];
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                let v = m.float(i, j) - approx.s2.sq_dist(i, j);
                dev = dev.max((v - beta).abs());
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        let mut round = Round {
            delta,
            epsilon,
            outcome: "band".into(),
        };
        if dev > epsilon {
            failure = Some(
                Error::SearchFailure {
                    reason: format!("leftover distances stay {dev:e} away from the band"),
                    attempts: rounds.len() + 1,
                    best_residual: dev,
                }
                .at("step2"),
            );
            rounds.push(round);
            delta /= 2.0;
            continue;
        }
        let leftover = SquaredDistanceMatrix::from_float(rows).map_err(|e| e.at("step3"))?;
        let sb = beta.sqrt();
        let s3 = realize_almost_regular(&leftover, sb, epsilon / sb, tol).map_err(|e| e.at("step3"))?;
        match brick_embed(&squared_distance_matrix(&s3.config), tol) {
            Ok(brick) => {
                round.outcome = "ok".into();
                rounds.push(round);
                found = Some((approx, leftover, dev, s3, brick));
                break;
            }
            Err(e @ Error::NotEmbeddable { .. }) => {
                round.outcome = "brick".into();
                rounds.push(round);
                failure = Some(e.at("brick"));
                epsilon /= 2.0;
                delta = delta.min(epsilon / (16.0 * rho_p + 4.0));
            }
            Err(e) => return Err(e.at("brick")),
        }
    }
    let (approx, leftover, band_deviation, s3, brick) =
        found.ok_or_else(|| failure.unwrap_or_else(|| Error::Internal("no pipeline round ran".into())))?;
    let assembly =
        assemble_and_verify(m, &brick.points, &approx.s2, approx.spec.norm(), tol).map_err(|e| e.at("step4"))?;

    let diagnostics = Diagnostics {
        band_deviation,
        spread_residual: approx.residual,
        brick_residual: brick.residual,
        assembly_residual: assembly.max_residual,
        circumradius: assembly.radius,
        spread_norm: approx.spec.norm(),
    };
    Ok(PipelineTrace {
        params: params.clone(),
        dimension: n - 1,
        input: m.clone(),
        slack: shrink.slack,
        shrink_beta: beta,
        s1: shrink.s1,
        rho,
        rho_prime: rho_p,
        epsilon,
        sphere_radius: radius,
        lift,
        rounds,
        spread: SpreadRecord {
            radius: approx.radius,
            k: approx.spec.k(),
            n: approx.n,
            tuples: approx.tuples.clone(),
            residual: approx.residual,
            lift: approx.lift,
            renormalized: approx.renormalized,
            refits: approx.refits,
            block_len: approx.block_len,
            common: approx.common,
            blocks: approx.blocks,
            seed: approx.seed,
        },
        s2_sq: squared_distance_matrix(&approx.s2),
        leftover,
        s3: s3.config,
        form_value: s3.form_value,
        brick,
        f_sq: squared_distance_matrix(&assembly.f),
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_equilateral_end_to_end() {
        let m = SquaredDistanceMatrix::from_float(alloc::vec![
            alloc::vec![0.0, 1.0, 1.0],
            alloc::vec![1.0, 0.0, 1.0],
            alloc::vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let t = run_pipeline(&m, &PipelineParams::default()).unwrap();
        assert!((t.slack - 0.5).abs() < 1e-12);
        assert!((t.shrink_beta - 1.0 / 64.0).abs() < 1e-14);
        assert!(t.diagnostics.assembly_residual < 1e-6);
        assert!(t.rho_prime < t.diagnostics.circumradius);
        assert_eq!(t.brick.axes.len(), 3);
        let f = t.f().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((f.sq_dist(i, j) - m.float(i, j)).abs() < 1e-9);
            }
        }
        assert_eq!(t.s2().unwrap().points.len(), 3);
    }

    #[test]
    fn collinear_fails_at_step_one() {
        let m = SquaredDistanceMatrix::from_float(alloc::vec![
            alloc::vec![0.0, 1.0, 4.0],
            alloc::vec![1.0, 0.0, 1.0],
            alloc::vec![4.0, 1.0, 0.0],
        ])
        .unwrap();
        let e = run_pipeline(&m, &PipelineParams::default()).unwrap_err();
        assert_eq!(e.stage(), Some("step1"));
        assert!(matches!(e.root(), Error::NotASimplex(_)));
    }
}
