//! Kinetic description of the ring: Maxwellian sampling, velocity moments,
//! inelastic collisions, moment-equation residuals and edge flux.

mod dsmc;
mod moments;
mod params;
mod run;
mod transport;

pub use dsmc::{
    binary_collision, collision_ledger_table, dsmc_collide, estimate_cooling_rate, stream_periodic, CollisionEvent,
    CollisionStats,
};
pub use moments::{compute_moments, sample_maxwellian, CellMoments, Frame, MomentField, RadialCells, Sym2};
pub use params::{CollisionParams, MassSpectrum};
pub use run::{run_model_b, KineticRun};
pub use transport::{edge_flux_diagnostic, moment_residuals, residual_bootstrap_floor, EdgeFlux, MomentResiduals};
