//! Scenario runner: loads a JSON scenario, runs one pipeline and writes its
//! CSV tables, gnuplot scripts and a manifest into an output directory.
//!
//! Outputs are staged in a sibling directory and renamed into place only
//! after every file has been written, so a failed run leaves nothing behind.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use ringlab_core::config::{validate_config, Severity, DEFAULT_SEED};
use ringlab_core::dynamics::run_model_a;
use ringlab_core::fuller::{simulate_fuller, FullerSynthesis};
use ringlab_core::gravity::{edge_asymptotics_fit, find_librations, net_radial_profile};
use ringlab_core::kinetic::{collision_ledger_table, run_model_b};
use ringlab_core::table::Table;
use ringlab_core::ScenarioConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SEED_ENV: &str = "RINGLAB_SEED";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    ForceProfile,
    EdgeFit,
    Librations,
    Simulate,
    Kinetic,
    Fuller,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ForceProfile => "force-profile",
            Command::EdgeFit => "edge-fit",
            Command::Librations => "librations",
            Command::Simulate => "simulate",
            Command::Kinetic => "kinetic",
            Command::Fuller => "fuller",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    /// Data rows for CSV files, lines for plot scripts.
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub command: String,
    /// SHA-256 of the canonical re-serialisation of the parsed config.
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    /// Every file in the output directory except the manifest itself.
    pub files: Vec<FileEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    /// Overrides `output.dir` of the config.
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub quiet: bool,
}

/// Parses and validates a scenario. Errors list every failed check.
pub fn load_config(path: &Path) -> Result<(ScenarioConfig, Vec<String>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = ScenarioConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    let diags = validate_config(&config);
    let errors: Vec<String> = diags
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| format!("  [{}] {}", d.code, d.message))
        .collect();
    if !errors.is_empty() {
        bail!("{} failed validation:\n{}", path.display(), errors.join("\n"));
    }
    let warnings = diags
        .iter()
        .filter(|d| d.severity == Severity::Warning)
        .map(|d| format!("[{}] {}", d.code, d.message))
        .collect();
    Ok((config, warnings))
}

pub fn config_hash(config: &ScenarioConfig) -> String {
    hex::encode(Sha256::digest(config.to_json().as_bytes()))
}

/// Seed precedence: flag, then the environment, then the config, then 42.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, config: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(v) = env {
        return v.trim().parse().with_context(|| format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer"));
    }
    Ok(config.unwrap_or(DEFAULT_SEED))
}

/// Named tables produced by one pipeline, plus an optional summary line.
pub struct Outputs {
    pub tables: Vec<(String, Table)>,
    pub summary: Option<String>,
}

fn with_time(t: f64, table: &Table, out: &mut Table) {
    for row in &table.rows {
        let mut r = vec![t.into()];
        r.extend(row.iter().cloned());
        out.push(r);
    }
}

fn time_header(table: &Table) -> Vec<String> {
    std::iter::once("t".to_string()).chain(table.header.iter().cloned()).collect()
}

/// Runs the pipeline of `command` and returns its tables without touching
/// the file system.
pub fn compute(command: Command, config: &ScenarioConfig) -> Result<Outputs> {
    let model = &config.model;
    let tol = config.profile.tolerance;
    let mut tables = Vec::new();
    let mut summary = None;
    match command {
        Command::ForceProfile => {
            let p = net_radial_profile(model, &config.profile.grid(model), tol)?;
            tables.push(("force_profile".into(), p.to_table()));
            tables.push(("librations".into(), p.librations_table()));
        }
        Command::Librations => {
            let mut p = net_radial_profile(model, &config.profile.grid(model), tol)?;
            p.roots = find_librations(&p, config.librations.refine_tol)?;
            tables.push(("librations".into(), p.librations_table()));
        }
        Command::EdgeFit => {
            let fit = edge_asymptotics_fit(&model.density, config.edge_fit.edge, &config.edge_fit.epsilons, tol)?;
            summary = Some(format!("slope = {:.15e}, r2 = {:.15}", fit.slope, fit.r_squared));
            tables.push(("edge_fit".into(), fit.to_table()));
        }
        Command::Simulate => {
            let d = run_model_a(config)?;
            tables.push(("diagnostics".into(), d.to_table()));
            let mut hist = Table::new(&["t", "R_center", "sigma"]);
            for h in &d.histograms {
                with_time(h.t, &h.to_table(), &mut hist);
            }
            tables.push(("histograms".into(), hist));
        }
        Command::Kinetic => {
            let run = run_model_b(config)?;
            let first = run.snapshots[0].to_table();
            let mut moments = Table { header: time_header(&first), rows: Vec::new() };
            for s in &run.snapshots {
                with_time(s.time, &s.to_table(), &mut moments);
            }
            tables.push(("moments".into(), moments));
            tables.push(("collisions".into(), collision_ledger_table(&run.ledger)));
            let r = &run.residuals;
            let mut res = Table::new(&["continuity", "momentum_r", "momentum_phi", "heat", "points"]);
            res.push(vec![
                r.continuity.into(),
                r.momentum_r.into(),
                r.momentum_phi.into(),
                r.heat.into(),
                r.points.into(),
            ]);
            tables.push(("residuals".into(), res));
            let mut flux = Table::new(&["delta", "inner", "outer", "net"]);
            for f in &run.edge_flux {
                flux.push(vec![f.delta.into(), f.inner.into(), f.outer.into(), f.net.into()]);
            }
            tables.push(("edge_flux".into(), flux));
        }
        Command::Fuller => {
            let fc = &config.fuller;
            let syn = FullerSynthesis::calibrated(fc.tolerance)?;
            let traj = simulate_fuller(fc.x0, fc.y0, &syn, fc.stop_radius, fc.time_budget)?;
            summary = Some(traj.summary_line());
            tables.push(("fuller_switches".into(), traj.to_table()));
        }
    }
    Ok(Outputs { tables, summary })
}

fn stage_name(out: &Path, tag: &str) -> PathBuf {
    let base = out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!(".{base}.{tag}-{}", std::process::id()))
}

fn write_outputs(dir: &Path, outputs: &Outputs, mut manifest: RunManifest) -> Result<RunManifest> {
    let mut files = Vec::new();
    for (name, table) in &outputs.tables {
        let csv = format!("{name}.csv");
        fs::write(dir.join(&csv), table.to_csv())?;
        files.push(FileEntry { name: csv.clone(), rows: table.len() });
        let script = table.gnuplot_script(&csv, name);
        fs::write(dir.join(format!("{name}.gp")), &script)?;
        files.push(FileEntry { name: format!("{name}.gp"), rows: script.lines().count() });
    }
    files.sort_by(|a, b| a.name.cmp(&b.name));
    manifest.files = files;
    let json = serde_json::to_string_pretty(&manifest)? + "\n";
    fs::write(dir.join(MANIFEST), json)?;
    Ok(manifest)
}

/// Writes `outputs` to `out` atomically, replacing any previous contents.
pub fn publish(out: &Path, outputs: &Outputs, manifest: RunManifest) -> Result<RunManifest> {
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let staging = stage_name(out, "staging");
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir(&staging).with_context(|| format!("creating {}", staging.display()))?;
    let written = match write_outputs(&staging, outputs, manifest) {
        Ok(m) => m,
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            return Err(e);
        }
    };
    let retired = stage_name(out, "old");
    if out.exists() {
        fs::rename(out, &retired).with_context(|| format!("moving aside {}", out.display()))?;
    }
    fs::rename(&staging, out).with_context(|| format!("publishing {}", out.display()))?;
    if retired.exists() {
        fs::remove_dir_all(&retired)?;
    }
    Ok(written)
}

/// Loads, validates and runs one scenario, publishing its outputs.
pub fn run_scenario(config_path: &Path, command: Command, opts: &RunOptions) -> Result<RunManifest> {
    let (mut config, warnings) = load_config(config_path)?;
    if !opts.quiet {
        for w in &warnings {
            eprintln!("warning: {w}");
        }
    }
    let hash = config_hash(&config);
    let env = std::env::var(SEED_ENV).ok();
    let seed = resolve_seed(opts.seed, env.as_deref(), config.seed)?;
    config.seed = Some(seed);
    let out = opts.out.clone().unwrap_or_else(|| PathBuf::from(&config.output.dir));

    let outputs = match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| compute(command, &config))?
        }
        None => compute(command, &config)?,
    };
    let manifest = RunManifest {
        scenario: config.name.clone(),
        command: command.name().into(),
        config_hash: hash,
        seed,
        version: env!("CARGO_PKG_VERSION").into(),
        files: Vec::new(),
        summary: outputs.summary.clone(),
    };
    let manifest = publish(&out, &outputs, manifest)?;
    if !opts.quiet {
        if let Some(s) = &manifest.summary {
            println!("{s}");
        }
        println!("{} files written to {}", manifest.files.len() + 1, out.display());
    }
    Ok(manifest)
}
