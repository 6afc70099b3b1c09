//! Fixtures shared by the criterion benchmarks under `benches/`.

use ringlab_core::dynamics::ParticleEnsemble;
use ringlab_core::kinetic::sample_maxwellian;
use ringlab_core::{RingModel, Vec2};

/// Uniform test ring: unit planet, annulus `[1, 2]`, ring mass 0.02.
pub fn test_ring() -> RingModel {
    RingModel::uniform(1.0, 1.0, 2.0, 0.02).expect("valid model")
}

/// `n` particles on a golden-angle spiral with uniform surface density over
/// `[1, 2]`, on circular planet-only orbits plus a Maxwellian dispersion.
pub fn spiral_ring(n: usize, temperature: f64, seed: u64) -> ParticleEnsemble {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let positions: Vec<Vec2> =
        (0..n).map(|i| Vec2::from_polar((1.0 + 3.0 * (i as f64 + 0.5) / n as f64).sqrt(), golden * i as f64)).collect();
    let thermal = sample_maxwellian(Vec2::ZERO, temperature, n, seed).expect("non-negative temperature");
    let velocities = positions.iter().zip(&thermal).map(|(x, dv)| x.perp() * x.norm().powf(-1.5) + *dv).collect();
    ParticleEnsemble::new(positions, velocities, vec![0.02 / n as f64; n], seed).expect("consistent ensemble")
}
