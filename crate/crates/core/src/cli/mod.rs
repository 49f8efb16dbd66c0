//! The `rydberg` batch front-end.
//!
//! Each subcommand reads a [`RunConfig`], writes CSVs into one output
//! directory and finishes with `manifest.toml`, which can be passed back to
//! `--config` to reproduce the run.

mod config;
mod manifest;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use config::{
    BasisChoice, CloudConfig, ExactConfig, FitConfig, ManifestFile, ManifestInfo, MethodChoice, PhysicsConfig,
    RunConfig, ScalingConfig, TimeConfig,
};
pub use manifest::{sha256_hex, write_atomic, Recorder};

use crate::analysis::{fit_saturation, scaling_experiment, SaturationFit, ScalingSetup};
use crate::cloud::{partition_superatoms, sample_positions, BlockadeModel};
use crate::error::{Error, Result};
use crate::exact::{
    build_hamiltonian_with_caps, evolve_with, AtomPositions, BasisCaps, BasisKind, EvolveOptions, HamiltonianSpec,
    PropagatorKind, QuantumState, Trajectory,
};
use crate::physics::{blockade_radius_simple, hz_to_angular};
use crate::superatom::{simulate_cloud, ExcitationCurve};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "RYDBERG_OUT";

#[derive(Debug, Parser)]
#[command(name = "rydberg", version, about = "Collective Rydberg excitation: exact few-atom dynamics, superatom clouds and scaling fits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact dynamics of a few atoms; writes trajectory.csv.
    Exact(CommonArgs),
    /// Superatom model of a Gaussian cloud; writes curve.csv, ensemble.csv and fit.csv.
    Cloud(CommonArgs),
    /// Density × Rabi-frequency sweep; writes sweep.csv and exponents.csv.
    Scaling(CommonArgs),
    /// Saturation fit of a `t_s,n_rydberg` CSV; writes fit.csv.
    Fit {
        curve: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Run configuration or a previous manifest.toml.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub model: Option<BlockadeModel>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workflow {
    Exact,
    Cloud,
    Scaling,
    Fit,
}

impl Workflow {
    pub fn name(self) -> &'static str {
        match self {
            Workflow::Exact => "exact",
            Workflow::Cloud => "cloud",
            Workflow::Scaling => "scaling",
            Workflow::Fit => "fit",
        }
    }
}

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub manifest: PathBuf,
    /// Output file names, in write order.
    pub outputs: Vec<String>,
    pub messages: Vec<String>,
}

/// Load the config (if any), then apply command-line overrides.
pub fn resolve_config(args: &CommonArgs, workflow: Workflow) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(model) = args.model {
        cfg.model = model;
    }
    if let Some(threads) = args.threads {
        cfg.threads = threads;
    }
    let out = match (&args.out, &cfg.out) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => o.clone(),
        (None, None) => {
            let root = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("rydberg-out"));
            root.join(workflow.name())
        }
    };
    cfg.out = Some(std::path::absolute(&out).unwrap_or(out));
    cfg.validate()?;
    Ok(cfg)
}

/// Run one workflow with a fully resolved config.
pub fn run(workflow: Workflow, cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    if cfg.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::invalid("threads", e.to_string()))?;
        pool.install(|| run_inner(workflow, cfg))
    } else {
        run_inner(workflow, cfg)
    }
}

fn run_inner(workflow: Workflow, cfg: &RunConfig) -> Result<RunOutcome> {
    let out_dir = cfg.out.clone().ok_or_else(|| Error::Config {
        key: "out".into(),
        msg: "no output directory".into(),
    })?;
    let mut rec = Recorder::new(&out_dir, workflow.name())?;
    let started = Instant::now();
    let result = match workflow {
        Workflow::Exact => cmd_exact(cfg, &mut rec),
        Workflow::Cloud => cmd_cloud(cfg, &mut rec),
        Workflow::Scaling => cmd_scaling(cfg, &mut rec),
        Workflow::Fit => cmd_fit(cfg, &mut rec),
    };
    // Non-convergence still leaves a complete, manifested output directory.
    let deferred = match result {
        Ok(()) => None,
        Err(e @ Error::NonConvergence { .. }) => Some(e),
        Err(e) => return Err(e),
    };
    let manifest = rec.finish(cfg, started.elapsed().as_secs_f64())?;
    if let Some(e) = deferred {
        return Err(e);
    }
    Ok(RunOutcome {
        out_dir,
        manifest,
        outputs: rec.output_names(),
        messages: rec.messages.clone(),
    })
}

fn exact_positions(cfg: &RunConfig, rec: &mut Recorder) -> Result<AtomPositions> {
    match (&cfg.exact.positions, cfg.exact.count) {
        (Some(path), _) => {
            rec.input(path)?;
            AtomPositions::from_file(path)
        }
        (None, Some(count)) => {
            let positions = sample_positions(&cfg.cloud_spec()?, count, cfg.seed)?;
            rec.output("positions.txt", positions.to_table().as_bytes())?;
            Ok(positions)
        }
        (None, None) => Err(Error::Config {
            key: "exact.positions".into(),
            msg: "set exact.positions or exact.count".into(),
        }),
    }
}

fn cmd_exact(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let params = cfg.params()?;
    let grid = cfg.time_grid()?;
    let positions = exact_positions(cfg, rec)?;
    let e = &cfg.exact;
    let kind = match e.basis {
        BasisChoice::Full => BasisKind::Full,
        BasisChoice::Restricted => BasisKind::Restricted {
            radius: e.restricted_radius_m.unwrap_or_else(|| blockade_radius_simple(&params)),
        },
    };
    let caps = BasisCaps {
        full: e.max_full_atoms,
        restricted: e.max_restricted_atoms,
    };
    let mut spec = HamiltonianSpec::new(positions, params.omega0, params.c6);
    spec.detuning = hz_to_angular(e.detuning_hz);
    let h = build_hamiltonian_with_caps(&spec, kind, caps)?;
    let opts = EvolveOptions {
        method: match e.method {
            MethodChoice::Auto => PropagatorKind::Auto,
            MethodChoice::Eigen => PropagatorKind::Eigen,
            MethodChoice::Krylov => PropagatorKind::Krylov,
        },
        ..EvolveOptions::default()
    };
    let states = evolve_with(&h, &QuantumState::ground(h.basis()), &grid, &opts)?;
    let traj = Trajectory::from_states(&grid, &states)?;
    rec.output("trajectory.csv", traj.to_csv().as_bytes())?;
    rec.note(format!("{} atoms, basis dimension {}", spec.positions.len(), h.dim()));
    Ok(())
}

/// `n_sat,n_sat_err,R_per_s,R_err,residual_rms,converged,n_sat_identifiable,iterations`.
pub fn fit_csv(fit: &SaturationFit) -> String {
    format!(
        "n_sat,n_sat_err,R_per_s,R_err,residual_rms,converged,n_sat_identifiable,iterations\n{},{},{},{},{},{},{},{}\n",
        fit.n_sat,
        fit.n_sat_err,
        fit.rate,
        fit.rate_err,
        fit.residual_rms,
        fit.converged,
        fit.n_sat_identifiable,
        fit.iterations
    )
}

fn fit_summary(fit: &SaturationFit) -> String {
    let mut s = format!(
        "N_sat = {:.6e} ± {:.2e}, R = {:.6e} ± {:.2e} 1/s, rms residual {:.3e}, converged: {}",
        fit.n_sat, fit.n_sat_err, fit.rate, fit.rate_err, fit.residual_rms, fit.converged
    );
    if !fit.n_sat_identifiable {
        s.push_str(" (warning: N_sat poorly constrained by the data)");
    }
    s
}

fn record_fit(curve: &ExcitationCurve, rec: &mut Recorder) -> Result<()> {
    match fit_saturation(curve) {
        Ok(fit) => {
            rec.output("fit.csv", fit_csv(&fit).as_bytes())?;
            rec.note(fit_summary(&fit));
            if !fit.converged {
                return Err(Error::NonConvergence { count: 1 });
            }
            Ok(())
        }
        Err(Error::DegenerateData(msg)) => {
            rec.note(format!("no saturation fit: {msg}"));
            Ok(())
        }
        Err(e) => Err(e),
    }
}

fn cmd_cloud(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let params = cfg.params()?;
    let cloud = cfg.cloud_spec()?;
    let grid = cfg.time_grid()?;
    let ensemble = partition_superatoms(&cloud, &params, cfg.model, &cfg.partition_options()?)?;
    let curve = simulate_cloud(&ensemble, &params, &grid)?;
    rec.output("curve.csv", curve.to_csv().as_bytes())?;
    rec.output("ensemble.csv", ensemble.to_csv().as_bytes())?;
    rec.note(format!(
        "{} entries, {:.6e} superatoms covering {:.6e} of {:.6e} atoms",
        ensemble.entries.len(),
        ensemble.superatom_count(),
        ensemble.total_atoms_covered,
        ensemble.cloud_atoms
    ));
    record_fit(&curve, rec)
}

fn cmd_scaling(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let params = cfg.params()?;
    let cloud = cfg.cloud_spec()?;
    let (densities, omegas) = cfg.sweep_grids()?;
    let setup = ScalingSetup {
        densities,
        omegas,
        model: cfg.model,
        time_grid: cfg.time_grid()?,
        partition: cfg.partition_options()?,
    };
    let report = scaling_experiment(&cloud, &params, &setup)?;
    rec.output("sweep.csv", report.sweep_csv().as_bytes())?;
    rec.output("exponents.csv", report.exponents.to_csv().as_bytes())?;
    for w in &report.warnings {
        rec.note(format!("warning: {w}"));
    }
    for (name, e) in report.exponents.named() {
        rec.note(match e {
            Ok(x) => format!("{name} = {:.4} ± {:.4} ({} points)", x.value, x.std_error, x.n_points),
            Err(msg) => format!("{name}: rank error: {msg}"),
        });
    }
    match report.non_converged() {
        0 => Ok(()),
        count => Err(Error::NonConvergence { count }),
    }
}

fn cmd_fit(cfg: &RunConfig, rec: &mut Recorder) -> Result<()> {
    let path = cfg.fit.curve.as_deref().ok_or_else(|| Error::Config {
        key: "fit.curve".into(),
        msg: "no curve file given".into(),
    })?;
    rec.input(path)?;
    let text = std::fs::read_to_string(path)?;
    let curve = ExcitationCurve::from_csv(&text)?;
    let fit = fit_saturation(&curve)?;
    rec.output("fit.csv", fit_csv(&fit).as_bytes())?;
    rec.note(fit_summary(&fit));
    if !fit.converged {
        return Err(Error::NonConvergence { count: 1 });
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<RunOutcome> {
    let (workflow, args, curve) = match cli.command {
        Command::Exact(a) => (Workflow::Exact, a, None),
        Command::Cloud(a) => (Workflow::Cloud, a, None),
        Command::Scaling(a) => (Workflow::Scaling, a, None),
        Command::Fit { curve, common } => (Workflow::Fit, common, curve),
    };
    let mut cfg = resolve_config(&args, workflow)?;
    if let Some(curve) = curve {
        cfg.fit.curve = Some(std::path::absolute(&curve).unwrap_or(curve));
    }
    run(workflow, &cfg)
}

fn exit_with(e: &Error) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    main_from(std::env::args_os())
}

pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(outcome) => {
            println!("wrote {}", outcome.manifest.display());
            0
        }
        Err(e) => exit_with(&e),
    }
}

/// Where a workflow writes its manifest.
pub fn manifest_path(out_dir: &Path) -> PathBuf {
    out_dir.join(manifest::MANIFEST_NAME)
}
