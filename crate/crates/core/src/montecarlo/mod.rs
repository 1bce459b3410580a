//! Seeded sampling and the convergence experiments.

pub mod dist;
pub mod experiments;
pub mod rng;

pub use dist::{BetaSampler, DistributionSpec, Sampler, WeightSpec};
pub use experiments::{
    run_corner_match_experiment, run_dual_convergence_experiment, run_ratio_experiment,
    sample_profile, ExperimentConfig, ExperimentResults, ExperimentRow, ProfileSampler, SampleGame,
    SummaryRow,
};
pub use rng::SplitMix64;
