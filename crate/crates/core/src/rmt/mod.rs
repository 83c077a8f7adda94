//! Random-matrix samplers, empirical spectral statistics and reproducible
//! Monte Carlo experiments.

mod ensemble;
mod experiments;
mod stats;

pub use ensemble::{
    empirical_moments, haar_unitary, task_rng, EnsembleKind, EnsembleSpec, EntryLaw, SelfAdjoint, SpectralSample,
};
pub use experiments::{
    decay_pairs, default_band_model, run, run_experiment, symmetrized_product, DecayRow, Experiment,
    ExperimentConfig, ExperimentReport,
};
pub use stats::{freeness_defect, Histogram};
