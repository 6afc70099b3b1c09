//! Model B driver: the Model A particle dynamics with a DSMC collision step
//! after every drift, and moment snapshots at a fixed stride.

use serde::Serialize;

use crate::config::{first_error, validate_config, ScenarioConfig, DEFAULT_SEED};
use crate::dynamics::{sample_ring_ensemble, Simulation};
use crate::error::{Error, Result};
use crate::model::Constants;

use super::dsmc::{dsmc_collide, estimate_cooling_rate, CollisionStats};
use super::moments::{compute_moments, Frame, MomentField, RadialCells};
use super::transport::{edge_flux_diagnostic, moment_residuals, EdgeFlux, MomentResiduals};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KineticRun {
    /// Polar-frame moments on the ring cells, uniformly spaced in time.
    pub snapshots: Vec<MomentField>,
    /// Per-step collision statistics with the event lists dropped.
    pub ledger: Vec<(f64, CollisionStats)>,
    /// Cooling rate per snapshot and cell; zero where undefined.
    pub zeta: Vec<Vec<f64>>,
    pub residuals: MomentResiduals,
    /// Edge flux of the final snapshot.
    pub edge_flux: Vec<EdgeFlux>,
}

/// Runs Model B. The initial dispersion is Maxwellian at the configured
/// kinetic temperature, on top of planet-only circular orbits.
pub fn run_model_b(config: &ScenarioConfig) -> Result<KineticRun> {
    first_error(&validate_config(config))?;
    let seed = config.seed.unwrap_or(DEFAULT_SEED);
    let kc = &config.kinetic;
    let model = &config.model;
    let dispersion = (Constants::KB * kc.temperature).sqrt();
    let ensemble =
        sample_ring_ensemble(model, config.ensemble.particles, dispersion, &config.collisions.mass_spectrum, seed)?;
    let mut sim = Simulation::from_ensemble(config, ensemble)?;
    let cells = RadialCells::uniform(model.inner_radius, model.outer_radius, kc.radial_cells)?;
    let dt = config.integrator.dt;
    let total = (config.integrator.duration / dt).round() as usize;
    let every = kc.snapshot_every.max(1);

    let snap = |sim: &Simulation| {
        let mut f = compute_moments(&sim.ensemble, &cells, Frame::Polar);
        f.time = sim.t;
        f
    };
    let mut run = KineticRun {
        snapshots: vec![snap(&sim)],
        ledger: Vec::new(),
        zeta: vec![vec![0.0; cells.len()]],
        residuals: MomentResiduals { continuity: 0.0, momentum_r: 0.0, momentum_phi: 0.0, heat: 0.0, points: 0 },
        edge_flux: Vec::new(),
    };
    while sim.steps < total {
        sim.advance()?;
        if 2 * sim.lost() > sim.n_initial {
            return Err(Error::Config(format!("{} of {} particles lost by t = {}", sim.lost(), sim.n_initial, sim.t)));
        }
        let mut stats = None;
        if config.features.collisions {
            let (next, s) = dsmc_collide(&sim.ensemble, &config.collisions, dt, seed, sim.steps as u64)?;
            sim.ensemble = next;
            stats = Some(s);
        }
        if sim.steps % every == 0 {
            let field = snap(&sim);
            let z = match &stats {
                Some(s) => estimate_cooling_rate(s, &field).into_iter().map(|z| z.unwrap_or(0.0)).collect(),
                None => vec![0.0; cells.len()],
            };
            run.zeta.push(z);
            run.snapshots.push(field);
        }
        if let Some(mut s) = stats {
            s.events = Vec::new();
            run.ledger.push((sim.t, s));
        }
    }
    if run.snapshots.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "residuals need three snapshots; the run produced {}",
            run.snapshots.len()
        )));
    }
    let planet = model.saturn_mass;
    let field = sim.forces.field.clone();
    let force = move |r: f64| -Constants::G * planet / (r * r) + field.force(r);
    let zeta = config.features.collisions.then_some(run.zeta.as_slice());
    run.residuals = moment_residuals(&run.snapshots, &force, zeta)?;
    let deltas: Vec<f64> = kc.delta_fractions.iter().map(|f| f * model.width()).collect();
    run.edge_flux = edge_flux_diagnostic(run.snapshots.last().expect("three snapshots"), model, &deltas)?;
    Ok(run)
}
