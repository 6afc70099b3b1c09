//! Model A driver: collision-free particles in the planet, mean-field ring
//! and moon fields, with periodic rebinning of the ring density.

use rand::Rng;
use serde::Serialize;

use crate::config::{first_error, validate_config, ScenarioConfig, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::table::Table;

use super::ensemble::{sample_ring_ensemble, ParticleEnsemble};
use super::integrate::{radial_histogram, rebin_density, rebin_edges, step_ensemble, Bounds, ForceModel, StepLoss};
use super::meanfield::MeanField;

/// Radial surface-density histogram at one record time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySnapshot {
    pub t: f64,
    pub r_center: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Area of each bin, so `Σ σ·area` is the binned mass.
    pub area: Vec<f64>,
}

impl DensitySnapshot {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["R_center", "sigma"]);
        for (r, s) in self.r_center.iter().zip(&self.sigma) {
            t.push(vec![(*r).into(), (*s).into()]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct RunDiagnostics {
    pub times: Vec<f64>,
    /// 1% radial quantile.
    pub r1: Vec<f64>,
    /// 99% radial quantile.
    pub r2: Vec<f64>,
    /// Bootstrap standard errors of the quantiles; NaN when not requested.
    pub r1_se: Vec<f64>,
    pub r2_se: Vec<f64>,
    pub energy: Vec<f64>,
    pub angular_momentum: Vec<f64>,
    pub n_present: Vec<usize>,
    pub n_fallen: Vec<usize>,
    pub n_escaped: Vec<usize>,
    /// Stable libration radius of the current mean field, when one exists.
    pub libration_b: Vec<Option<f64>>,
    pub histograms: Vec<DensitySnapshot>,
}

impl RunDiagnostics {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["t", "R1", "R2", "E", "L", "n_fallen", "n_escaped"]);
        for i in 0..self.times.len() {
            t.push(vec![
                self.times[i].into(),
                self.r1[i].into(),
                self.r2[i].into(),
                self.energy[i].into(),
                self.angular_momentum[i].into(),
                self.n_fallen[i].into(),
                self.n_escaped[i].into(),
            ]);
        }
        t
    }
}

/// Linear-interpolation quantile by selection; reorders `buf`.
fn select_quantile(buf: &mut [f64], p: f64) -> f64 {
    let h = p * (buf.len() - 1) as f64;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    let (_, a, upper) = buf.select_nth_unstable_by(i, f64::total_cmp);
    let a = *a;
    if frac == 0.0 || upper.is_empty() {
        return a;
    }
    let b = upper.iter().cloned().fold(f64::INFINITY, f64::min);
    a + frac * (b - a)
}

pub struct Simulation {
    pub config: ScenarioConfig,
    pub ensemble: ParticleEnsemble,
    pub forces: ForceModel,
    pub t: f64,
    pub steps: usize,
    pub n_initial: usize,
    pub fallen: usize,
    pub escaped: usize,
    pub seed: u64,
    bounds: Bounds,
}

impl Simulation {
    /// Validates `config` and samples the initial ring.
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        first_error(&validate_config(config))?;
        let seed = config.seed.unwrap_or(DEFAULT_SEED);
        let e = sample_ring_ensemble(
            &config.model,
            config.ensemble.particles,
            config.ensemble.velocity_dispersion,
            &config.collisions.mass_spectrum,
            seed,
        )?;
        Self::from_ensemble(config, e)
    }

    pub fn from_ensemble(config: &ScenarioConfig, ensemble: ParticleEnsemble) -> Result<Self> {
        ensemble.validate()?;
        let seed = config.seed.unwrap_or(DEFAULT_SEED);
        let mut sim = Self {
            config: config.clone(),
            n_initial: ensemble.len(),
            ensemble,
            forces: ForceModel::new(&config.model, MeanField::zero(), config.features.moons),
            t: 0.0,
            steps: 0,
            fallen: 0,
            escaped: 0,
            seed,
            bounds: Bounds { absorb: config.absorb_radius(), escape: config.escape_radius() },
        };
        sim.refresh_field()?;
        Ok(sim)
    }

    fn rebinning(&self) -> bool {
        self.config.features.self_gravity && !self.config.integrator.frozen_density
    }

    /// Rebuilds the ring field from the current particles (or the model
    /// density when frozen).
    pub fn refresh_field(&mut self) -> Result<()> {
        let tol = self.config.profile.tolerance;
        self.forces.field = if !self.config.features.self_gravity {
            MeanField::zero()
        } else if self.config.integrator.frozen_density {
            MeanField::from_density(&self.config.model.density, tol)?
        } else {
            match rebin_edges(&self.ensemble, self.config.integrator.rebin_bins) {
                Some(edges) => MeanField::from_density(&rebin_density(&self.ensemble, &edges)?, tol)?,
                None => MeanField::zero(),
            }
        };
        Ok(())
    }

    pub fn advance(&mut self) -> Result<StepLoss> {
        let integ = &self.config.integrator;
        let (next, loss) = step_ensemble(&self.ensemble, &self.forces, self.t, integ.dt, integ.scheme, self.bounds)?;
        self.ensemble = next;
        self.steps += 1;
        self.t = self.steps as f64 * integ.dt;
        self.fallen += loss.fallen;
        self.escaped += loss.escaped;
        if self.rebinning() && self.steps.is_multiple_of(self.config.integrator.rebin_every) {
            self.refresh_field()?;
        }
        Ok(loss)
    }

    /// Total energy; the ring self-energy counts once when the field is the
    /// particles' own.
    pub fn energy(&self) -> f64 {
        let ring_weight = if self.rebinning() { 0.5 } else { 1.0 };
        let e = &self.ensemble;
        (0..e.len())
            .map(|i| {
                let x = e.positions[i];
                let r = x.norm();
                let phi = self.forces.planet_potential(r)
                    + ring_weight * self.forces.field.potential(r)
                    + self.forces.moon_potential(self.t, x);
                e.masses[i] * (0.5 * e.velocities[i].norm_sq() + phi)
            })
            .sum()
    }

    pub fn record(&self, diag: &mut RunDiagnostics) -> Result<()> {
        let mut radii = self.ensemble.radii();
        if radii.is_empty() {
            return Err(Error::InsufficientData("no particles left to record".into()));
        }
        let r1 = select_quantile(&mut radii, 0.01);
        let r2 = select_quantile(&mut radii, 0.99);
        let resamples = self.config.integrator.envelope_resamples;
        let (se1, se2) = if resamples >= 2 {
            let mut rng = stream(self.seed, &[0x454e_5645, self.steps as u64]);
            let n = radii.len();
            let mut buf = vec![0.0; n];
            let (mut q1, mut q2) = (Vec::with_capacity(resamples), Vec::with_capacity(resamples));
            for _ in 0..resamples {
                for b in buf.iter_mut() {
                    *b = radii[rng.random_range(0..n)];
                }
                q1.push(select_quantile(&mut buf, 0.01));
                q2.push(select_quantile(&mut buf, 0.99));
            }
            (crate::stats::variance(&q1).sqrt(), crate::stats::variance(&q2).sqrt())
        } else {
            (f64::NAN, f64::NAN)
        };
        diag.times.push(self.t);
        diag.r1.push(r1);
        diag.r2.push(r2);
        diag.r1_se.push(se1);
        diag.r2_se.push(se2);
        diag.energy.push(self.energy());
        diag.angular_momentum.push(self.ensemble.angular_momentum());
        diag.n_present.push(self.ensemble.len());
        diag.n_fallen.push(self.fallen);
        diag.n_escaped.push(self.escaped);
        diag.libration_b.push(self.forces.field.stable_libration(self.config.model.saturn_mass));
        if let Some(edges) = rebin_edges(&self.ensemble, self.config.integrator.rebin_bins) {
            let (r_center, sigma, _) = radial_histogram(&self.ensemble, &edges)?;
            let area = edges.windows(2).map(|w| std::f64::consts::PI * (w[1] * w[1] - w[0] * w[0])).collect();
            diag.histograms.push(DensitySnapshot { t: self.t, r_center, sigma, area });
        }
        Ok(())
    }

    pub fn lost(&self) -> usize {
        self.fallen + self.escaped
    }
}

/// Runs Model A for the configured duration, recording diagnostics every
/// `record_every` steps and at the end.
pub fn run_model_a(config: &ScenarioConfig) -> Result<RunDiagnostics> {
    if config.features.collisions {
        return Err(Error::Config("model A is collision-free; disable the collisions feature".into()));
    }
    let mut sim = Simulation::new(config)?;
    run_simulation(&mut sim)
}

/// Drives an existing simulation to the configured duration.
pub fn run_simulation(sim: &mut Simulation) -> Result<RunDiagnostics> {
    let mut diag = RunDiagnostics::default();
    let integ = sim.config.integrator.clone();
    let total = (integ.duration / integ.dt).round() as usize;
    sim.record(&mut diag)?;
    while sim.steps < total {
        sim.advance()?;
        if 2 * sim.lost() > sim.n_initial {
            let reason = format!("{} of {} particles lost", sim.lost(), sim.n_initial);
            if !sim.ensemble.is_empty() {
                sim.record(&mut diag)?;
            }
            return Err(Error::RunAborted { time: sim.t, reason, diagnostics: Box::new(diag) });
        }
        if sim.steps.is_multiple_of(integ.record_every) || sim.steps == total {
            sim.record(&mut diag)?;
        }
    }
    Ok(diag)
}
