//! Model A particle dynamics.

mod ensemble;
mod integrate;
mod meanfield;
mod run;

pub use ensemble::{sample_masses, sample_radii, sample_ring_ensemble, ParticleEnsemble};
pub use integrate::{
    radial_histogram, rebin_density, rebin_edges, step_ensemble, total_force, Bounds, ForceModel, StepLoss,
};
pub use meanfield::MeanField;
pub use run::{run_model_a, run_simulation, DensitySnapshot, RunDiagnostics, Simulation};
