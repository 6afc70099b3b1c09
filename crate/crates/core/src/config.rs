//! Scenario files: JSON schema, parsing with unknown-key detection, and
//! validation into structured diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::CollisionParams;
use crate::model::RingModel;

/// Default seed when neither the command line, the environment nor the
/// scenario provides one.
pub const DEFAULT_SEED: u64 = 42;

/// Ring-to-planet mass ratio above which a warning is raised.
pub const MAXWELL_MASS_RATIO: f64 = 1.0 / 300.0;

/// Human-readable unit names. Ignored by every computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    #[serde(default)]
    pub length: String,
    #[serde(default)]
    pub mass: String,
    #[serde(default)]
    pub time: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub particles: usize,
    /// Standard deviation of the isotropic Gaussian added to circular velocities.
    #[serde(default)]
    pub velocity_dispersion: f64,
    /// Defaults to `0.1 R1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub absorb_radius: Option<f64>,
    /// Defaults to `10 R2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escape_radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Second-order kick-drift-kick.
    #[default]
    Leapfrog,
    /// Fourth-order triple-jump composition of kick-drift-kick steps.
    Yoshida4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub duration: f64,
    #[serde(default = "default_rebin_every")]
    pub rebin_every: usize,
    #[serde(default = "default_rebin_bins")]
    pub rebin_bins: usize,
    #[serde(default)]
    pub scheme: Scheme,
    /// Keep the ring field of the model density instead of rebinning.
    #[serde(default)]
    pub frozen_density: bool,
    /// Steps between diagnostic records.
    #[serde(default = "default_rebin_every")]
    pub record_every: usize,
    /// Bootstrap resamples for the envelope standard errors; 0 disables them.
    #[serde(default)]
    pub envelope_resamples: usize,
}

fn default_rebin_every() -> usize {
    10
}

fn default_rebin_bins() -> usize {
    64
}

impl IntegratorConfig {
    pub fn new(dt: f64, duration: f64) -> Self {
        Self {
            dt,
            duration,
            rebin_every: default_rebin_every(),
            rebin_bins: default_rebin_bins(),
            scheme: Scheme::Leapfrog,
            frozen_density: false,
            record_every: default_rebin_every(),
            envelope_resamples: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Features {
    #[serde(default = "yes")]
    pub self_gravity: bool,
    #[serde(default)]
    pub collisions: bool,
    #[serde(default)]
    pub moons: bool,
}

fn yes() -> bool {
    true
}

impl Default for Features {
    fn default() -> Self {
        Self { self_gravity: true, collisions: false, moons: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

fn default_out_dir() -> String {
    "out".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_out_dir() }
    }
}

/// Radial grid for the tabulated force profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    /// Defaults to `0.25 R1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    /// Defaults to `2 R2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default = "default_profile_points")]
    pub points: usize,
    #[serde(default = "default_quad_tol")]
    pub tolerance: f64,
}

fn default_profile_points() -> usize {
    200
}

fn default_quad_tol() -> f64 {
    1e-10
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self { r_min: None, r_max: None, points: default_profile_points(), tolerance: default_quad_tol() }
    }
}

impl ProfileConfig {
    /// Evenly spaced grid over the configured range.
    pub fn grid(&self, model: &RingModel) -> Vec<f64> {
        let lo = self.r_min.unwrap_or(0.25 * model.inner_radius);
        let hi = self.r_max.unwrap_or(2.0 * model.outer_radius);
        let n = self.points.max(2);
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeSide {
    Inner,
    Outer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFitConfig {
    #[serde(default = "default_edge")]
    pub edge: EdgeSide,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
}

fn default_edge() -> EdgeSide {
    EdgeSide::Inner
}

fn default_epsilons() -> Vec<f64> {
    (0..7).map(|i| 10f64.powf(-6.0 + 0.5 * i as f64)).collect()
}

impl Default for EdgeFitConfig {
    fn default() -> Self {
        Self { edge: default_edge(), epsilons: default_epsilons() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LibrationConfig {
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
}

fn default_refine_tol() -> f64 {
    1e-10
}

impl Default for LibrationConfig {
    fn default() -> Self {
        Self { refine_tol: default_refine_tol() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KineticConfig {
    /// Initial kinetic temperature of the Maxwellian dispersion.
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    /// Number of radial moment cells spanning `[R1, R2]`.
    #[serde(default = "default_radial_cells")]
    pub radial_cells: usize,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    /// Edge offsets as fractions of the ring width.
    #[serde(default = "default_delta_fractions")]
    pub delta_fractions: Vec<f64>,
}

fn default_temperature() -> f64 {
    1e-5
}

fn default_radial_cells() -> usize {
    40
}

fn default_snapshot_every() -> usize {
    5
}

fn default_delta_fractions() -> Vec<f64> {
    vec![0.025, 0.05, 0.1, 0.2]
}

impl Default for KineticConfig {
    fn default() -> Self {
        Self {
            temperature: default_temperature(),
            radial_cells: default_radial_cells(),
            snapshot_every: default_snapshot_every(),
            delta_fractions: default_delta_fractions(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullerConfig {
    #[serde(default = "one")]
    pub x0: f64,
    #[serde(default)]
    pub y0: f64,
    #[serde(default = "default_stop_radius")]
    pub stop_radius: f64,
    #[serde(default = "default_time_budget")]
    pub time_budget: f64,
    #[serde(default = "default_fuller_tol")]
    pub tolerance: f64,
}

fn one() -> f64 {
    1.0
}

fn default_stop_radius() -> f64 {
    1e-6
}

fn default_time_budget() -> f64 {
    100.0
}

fn default_fuller_tol() -> f64 {
    1e-12
}

impl Default for FullerConfig {
    fn default() -> Self {
        Self {
            x0: 1.0,
            y0: 0.0,
            stop_radius: default_stop_radius(),
            time_budget: default_time_budget(),
            tolerance: default_fuller_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Units>,
    pub model: RingModel,
    pub ensemble: EnsembleConfig,
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub collisions: CollisionParams,
    #[serde(default)]
    pub features: Features,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub profile: ProfileConfig,
    #[serde(default)]
    pub edge_fit: EdgeFitConfig,
    #[serde(default)]
    pub librations: LibrationConfig,
    #[serde(default)]
    pub kinetic: KineticConfig,
    #[serde(default)]
    pub fuller: FullerConfig,
}

impl ScenarioConfig {
    /// Scenario with every optional section at its default.
    pub fn new(name: &str, model: RingModel, particles: usize, integrator: IntegratorConfig) -> Self {
        Self {
            name: name.into(),
            units: None,
            model,
            ensemble: EnsembleConfig { particles, velocity_dispersion: 0.0, absorb_radius: None, escape_radius: None },
            integrator,
            collisions: CollisionParams::default(),
            features: Features::default(),
            seed: None,
            output: OutputConfig::default(),
            profile: ProfileConfig::default(),
            edge_fit: EdgeFitConfig::default(),
            librations: LibrationConfig::default(),
            kinetic: KineticConfig::default(),
            fuller: FullerConfig::default(),
        }
    }

    /// Parses a scenario file. Unknown keys anywhere in the document are
    /// rejected with the closest valid key as a suggestion.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            match parse_unknown_field(&msg) {
                Some((key, expected)) => {
                    let suggestion = expected
                        .iter()
                        .map(|cand| (strsim::levenshtein(&key, cand), cand))
                        .min_by_key(|(d, _)| *d)
                        .map(|(_, c)| c.to_string());
                    Error::UnknownKey { key, suggestion }
                }
                None => Error::Parse(msg),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn absorb_radius(&self) -> f64 {
        self.ensemble.absorb_radius.unwrap_or(0.1 * self.model.inner_radius)
    }

    pub fn escape_radius(&self) -> f64 {
        self.ensemble.escape_radius.unwrap_or(10.0 * self.model.outer_radius)
    }
}

/// Pulls the key and candidate list out of serde's unknown-field message:
/// ``unknown field `densty`, expected one of `a`, `b` at line 3 column 9``.
fn parse_unknown_field(msg: &str) -> Option<(String, Vec<String>)> {
    let rest = msg.strip_prefix("unknown field `")?;
    let end = rest.find('`')?;
    let key = rest[..end].to_string();
    let tail = &rest[end + 1..];
    let tail = tail.split(" at line ").next().unwrap_or(tail);
    let expected = tail.split('`').skip(1).step_by(2).map(str::to_string).collect();
    Some((key, expected))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
}

impl Diagnostic {
    fn error(code: &'static str, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, code, message: message.into() }
    }

    fn warning(code: &'static str, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, code, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// Checks every invariant of a parsed scenario. Errors and warnings are
/// reported together; nothing is short-circuited.
pub fn validate_config(config: &ScenarioConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let m = &config.model;

    if !(m.inner_radius > 0.0 && m.inner_radius.is_finite()) {
        out.push(Diagnostic::error("geometry", format!("inner radius must be positive, got {}", m.inner_radius)));
    }
    if !(m.inner_radius < m.outer_radius) || !m.outer_radius.is_finite() {
        out.push(Diagnostic::error(
            "geometry",
            format!("inner radius {} must be strictly below outer radius {}", m.inner_radius, m.outer_radius),
        ));
    }
    if !(m.saturn_mass > 0.0 && m.saturn_mass.is_finite()) {
        out.push(Diagnostic::error("mass", format!("central mass must be positive, got {}", m.saturn_mass)));
    }
    match m.density.validate() {
        Err(e) => out.push(Diagnostic::error("density", e.to_string())),
        Ok(()) => {
            if let Some((lo, hi)) = m.density.support() {
                let slack = 1e-12 * (m.outer_radius - m.inner_radius).abs();
                if lo < m.inner_radius - slack || hi > m.outer_radius + slack {
                    out.push(Diagnostic::error(
                        "density",
                        format!(
                            "density support [{lo}, {hi}] leaves the annulus [{}, {}]",
                            m.inner_radius, m.outer_radius
                        ),
                    ));
                }
            }
        }
    }
    for (i, moon) in m.moons.iter().enumerate() {
        if !(moon.mass > 0.0) {
            out.push(Diagnostic::error("moon", format!("moon {i} mass must be positive, got {}", moon.mass)));
        }
        if !(moon.orbit_radius > 0.0) {
            out.push(Diagnostic::error(
                "moon",
                format!("moon {i} orbit radius must be positive, got {}", moon.orbit_radius),
            ));
        }
    }

    if config.ensemble.particles == 0 {
        out.push(Diagnostic::error("ensemble", "ensemble needs at least one particle"));
    }
    if !(config.ensemble.velocity_dispersion >= 0.0) {
        out.push(Diagnostic::error("ensemble", "velocity dispersion must be non-negative"));
    }
    if !(config.absorb_radius() >= 0.0 && config.absorb_radius() < config.escape_radius()) {
        out.push(Diagnostic::error("ensemble", "absorb radius must be non-negative and below the escape radius"));
    }

    let integ = &config.integrator;
    if !(integ.dt > 0.0 && integ.dt.is_finite()) {
        out.push(Diagnostic::error("integrator", format!("dt must be positive, got {}", integ.dt)));
    }
    if !(integ.duration >= 0.0 && integ.duration.is_finite()) {
        out.push(Diagnostic::error("integrator", format!("duration must be non-negative, got {}", integ.duration)));
    }
    if integ.rebin_every == 0 || integ.rebin_bins == 0 || integ.record_every == 0 {
        out.push(Diagnostic::error("integrator", "rebin_every, rebin_bins and record_every must be at least 1"));
    }

    if let Err(e) = config.collisions.validate() {
        out.push(Diagnostic::error("collisions", e.to_string()));
    }

    let p = &config.profile;
    if p.points < 2 || !(p.tolerance > 0.0) {
        out.push(Diagnostic::error("profile", "profile needs at least 2 points and a positive tolerance"));
    }
    if let (Some(lo), Some(hi)) = (p.r_min, p.r_max) {
        if !(lo >= 0.0 && lo < hi) {
            out.push(Diagnostic::error("profile", format!("profile range [{lo}, {hi}] is empty")));
        }
    }
    let eps = &config.edge_fit.epsilons;
    if eps.iter().any(|e| !(*e > 0.0)) || eps.windows(2).any(|w| w[1] <= w[0]) {
        out.push(Diagnostic::error("edge_fit", "epsilons must be positive and strictly ascending"));
    }
    if !(config.librations.refine_tol > 0.0) {
        out.push(Diagnostic::error("librations", "refine_tol must be positive"));
    }
    let k = &config.kinetic;
    if !(k.temperature >= 0.0) || k.radial_cells == 0 || k.snapshot_every == 0 {
        out.push(Diagnostic::error("kinetic", "temperature must be >= 0, radial_cells and snapshot_every >= 1"));
    }
    if k.delta_fractions.iter().any(|d| !(*d > 0.0 && *d < 0.25)) {
        out.push(Diagnostic::error("kinetic", "delta fractions must lie in (0, 0.25)"));
    }
    // Edge-flux circles must lie between the first and last cell centres.
    let smallest = k.delta_fractions.iter().copied().fold(f64::INFINITY, f64::min);
    if k.radial_cells > 0 && smallest.is_finite() && 2.0 * smallest * (k.radial_cells as f64) < 1.0 {
        out.push(Diagnostic::error(
            "kinetic",
            format!(
                "delta fraction {smallest} is inside the edge half-cell; use at least {} radial cells",
                (0.5 / smallest).ceil()
            ),
        ));
    }
    let f = &config.fuller;
    if !(f.stop_radius > 0.0) || !(f.time_budget > 0.0) || !(f.tolerance > 0.0) {
        out.push(Diagnostic::error("fuller", "stop_radius, time_budget and tolerance must be positive"));
    }

    // Physics-suspect settings only make sense on a sound geometry.
    if out.iter().any(|d| d.code == "geometry" || d.code == "mass" || d.code == "density") {
        return out;
    }
    let ratio = m.ring_mass() / m.saturn_mass;
    if ratio > MAXWELL_MASS_RATIO {
        out.push(Diagnostic::warning(
            "maxwell_limit",
            format!("ring-to-planet mass ratio {ratio:.4e} exceeds the Maxwell stability limit 1/300"),
        ));
    }
    let inner_period = m.kepler_period(m.inner_radius);
    if integ.dt > inner_period / 50.0 {
        out.push(Diagnostic::warning(
            "step_size",
            format!("dt = {} exceeds 1/50 of the innermost circular period ({inner_period:.4e})", integ.dt),
        ));
    }
    if config.features.moons && m.moons.is_empty() {
        out.push(Diagnostic::warning("moons", "moon forcing enabled but no moons"));
    }
    out
}

/// Turns the first error diagnostic into an [`Error`].
pub fn first_error(diags: &[Diagnostic]) -> Result<()> {
    match diags.iter().find(|d| d.is_error()) {
        None => Ok(()),
        Some(d) => Err(match d.code {
            "geometry" => Error::Geometry(d.message.clone()),
            "density" => Error::Density(d.message.clone()),
            _ => Error::Config(d.message.clone()),
        }),
    }
}
