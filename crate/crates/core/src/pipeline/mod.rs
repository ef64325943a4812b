//! The simplex pipeline.
//!
//! Shrink the simplex, approximate the shrunk copy on a larger sphere by a
//! spread, realize the leftover almost-regular distances, embed those in a
//! brick, and glue brick and spread coordinates back into a congruent copy.

mod almost_regular;
mod assemble;
mod brick_embed;
mod certificate;
mod run;
mod spread_search;
mod step1;

pub use almost_regular::{realize_almost_regular, AlmostRegular};
pub use assemble::{assemble_and_verify, Assembly};
pub use brick_embed::{brick_embed, BrickAxis, BrickEmbedding, EmbedMethod};
pub use certificate::{brute_force_copy_count, density_sample, pramsey_certificate, Certificate, ColoringTrial, DensityTrial, RestPoint};
pub use run::{run_pipeline, Diagnostics, PipelineTrace, Round, SpreadRecord};
pub use spread_search::{assemble_spread, spread_approximate, spread_config, spread_point, SpreadApprox, SpreadBlock, TupleRuns};
pub use step1::{step1_shrink, Shrink};

/// Tunable inputs of the pipeline.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PipelineParams {
    /// Upper bound on the spread approximation error.
    pub delta: f64,
    /// Upper bound on the almost-regular band width (squared distances).
    pub epsilon: f64,
    /// Separation margin for the segment ratio in certificates.
    pub margin: f64,
    /// Number of weight refits the spread search may spend.
    pub search_budget: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            delta: 0.05,
            epsilon: 1e-3,
            margin: 1e-6,
            search_budget: 512,
            tol: 1e-9,
            seed: 0,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> crate::Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.delta) || !pos(self.epsilon) || !pos(self.margin) || !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(crate::Error::invalid("pipeline parameters must be positive and finite"));
        }
        if self.search_budget == 0 {
            return Err(crate::Error::invalid("search budget must be at least 1"));
        }
        Ok(())
    }
}
