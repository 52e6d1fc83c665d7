//! `h2o-vqe`: exact diagonalization, VQE, warm-start search, PES scans and
//! surface fits from the command line.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use h2o_vqe::chem_io::{load_manifest_file, ActiveSpaceSpec};
use h2o_vqe::format::{round_json, sig12};
use h2o_vqe::optimizer::SPSAConfig;
use h2o_vqe::pes::{
    emit_pes, exact_energy, fit_json, fit_surface, minimize_surface, parse_pes_csv, scan, with_suffix, EnergyColumn,
    QubitProblem, ScanOptions,
};
use h2o_vqe::rng::derive_seed;
use h2o_vqe::vqe_engine::{random_start, vqe_energy, warm_start_search, ProbabilityDiagnostics};

use config::{ConfigFile, IndexList, Range};

/// Master seed used when neither `--seed` nor the config file sets one.
pub const DEFAULT_SEED: u64 = 20_240_607;
const DEFAULT_FREEZE: &[usize] = &[0, 1, 2];
const DEFAULT_REMOVE: &[usize] = &[6];
const SHOTS_STREAM: u64 = 0x5407_5000;

#[derive(Parser, Debug)]
#[command(name = "h2o-vqe", version, about = "VQE and exact diagonalization for small molecules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the exact ground-state energy of the active-space Hamiltonian.
    Ed {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: FcidumpInput,
        #[command(flatten)]
        space: Space,
    },
    /// Run one VQE optimization from a params file or a seeded random start.
    Vqe {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: FcidumpInput,
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        spsa: Spsa,
        /// JSON file with starting angles (`best_params`, `params` or a bare array).
        #[arg(long)]
        params: Option<PathBuf>,
        /// Estimate the output diagnostics from this many sampled shots.
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Random-restart VQE at one geometry; writes best_params to <out>.json.
    Warmstart {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        input: FcidumpInput,
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        spsa: Spsa,
        /// Number of random restarts [default: 10].
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// VQE and exact energies at every manifest geometry from warm-start angles.
    Scan {
        #[command(flatten)]
        common: Common,
        /// Scan manifest listing `angle length path` per line.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        spsa: Spsa,
        /// Warm-start JSON written by `warmstart`.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Record failing entries and continue; exits nonzero afterwards.
        #[arg(long)]
        keep_going: bool,
    },
    /// Fit the inverse-power surface to a PES CSV and minimize it.
    Fit {
        #[command(flatten)]
        common: Common,
        /// PES CSV written by `scan`.
        #[arg(long)]
        pes: Option<PathBuf>,
        /// Energy column to fit [default: exact].
        #[arg(long, value_enum)]
        energy: Option<EnergyArg>,
        /// Angle search interval `lo,hi` in degrees [default: data range].
        #[arg(long)]
        angle_range: Option<Range>,
        /// Length search interval `lo,hi` in Angstrom [default: data range].
        #[arg(long)]
        length_range: Option<Range>,
    },
}

#[derive(Args, Debug, Default)]
struct Common {
    /// `key = value` file; keys are long flag names, flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output prefix; files are written as <prefix>.csv and <prefix>.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct FcidumpInput {
    /// FCIDUMP integral file.
    #[arg(long)]
    fcidump: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct Space {
    /// Frozen doubly occupied orbitals, 0-based [default: 0,1,2].
    #[arg(long)]
    freeze: Option<IndexList>,
    /// Discarded virtual orbitals, 0-based [default: 6].
    #[arg(long)]
    remove: Option<IndexList>,
    /// Restrict exact diagonalization to this electron count.
    #[arg(long)]
    sector: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct Spsa {
    /// Ansatz entangling layers [default: 2].
    #[arg(long)]
    layers: Option<usize>,
    /// SPSA iterations [default: 300].
    #[arg(long)]
    max_iter: Option<usize>,
    /// SPSA step scale a [default: calibrated].
    #[arg(long = "spsa-a")]
    spsa_a: Option<f64>,
    /// SPSA perturbation scale c [default: 0.1].
    #[arg(long = "spsa-c")]
    spsa_c: Option<f64>,
    /// SPSA stability constant A [default: 0.1 * max-iter].
    #[arg(long = "spsa-A")]
    spsa_stability: Option<f64>,
    /// Step gain decay exponent [default: 0.602].
    #[arg(long)]
    alpha: Option<f64>,
    /// Perturbation gain decay exponent [default: 0.101].
    #[arg(long)]
    gamma: Option<f64>,
    /// First-step size targeted by calibration [default: 0.1].
    #[arg(long)]
    target_step: Option<f64>,
    /// Master seed [default: 20240607].
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnergyArg {
    Exact,
    Vqe,
}

impl std::str::FromStr for EnergyArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CommandKind {
    Ed,
    Vqe,
    Warmstart,
    Scan,
    Fit,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
struct RunConfig {
    command: CommandKind,
    fcidump: Option<PathBuf>,
    manifest: Option<PathBuf>,
    params: Option<PathBuf>,
    pes: Option<PathBuf>,
    freeze: Option<Vec<usize>>,
    remove: Option<Vec<usize>>,
    sector: Option<usize>,
    layers: usize,
    spsa: SPSAConfig,
    restarts: usize,
    shots: Option<u64>,
    keep_going: bool,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    energy: EnergyColumn,
    angle_range: Option<Range>,
    length_range: Option<Range>,
}

impl RunConfig {
    fn resolve(command: Command) -> Result<Self> {
        let mut params = None;
        let mut shots = None;
        let mut restarts = None;
        let mut manifest = None;
        let mut keep_going = false;
        let mut pes = None;
        let mut energy = None;
        let mut angle_range = None;
        let mut length_range = None;
        let (kind, common, input, space, spsa) = match command {
            Command::Ed { common, input, space } => (CommandKind::Ed, common, input, space, Spsa::default()),
            Command::Vqe {
                common,
                input,
                space,
                spsa,
                params: p,
                shots: s,
            } => {
                params = p;
                shots = s;
                (CommandKind::Vqe, common, input, space, spsa)
            }
            Command::Warmstart {
                common,
                input,
                space,
                spsa,
                restarts: r,
            } => {
                restarts = r;
                (CommandKind::Warmstart, common, input, space, spsa)
            }
            Command::Scan {
                common,
                manifest: m,
                space,
                spsa,
                params: p,
                keep_going: k,
            } => {
                manifest = m;
                params = p;
                keep_going = k;
                (CommandKind::Scan, common, FcidumpInput::default(), space, spsa)
            }
            Command::Fit {
                common,
                pes: p,
                energy: e,
                angle_range: a,
                length_range: l,
            } => {
                pes = p;
                energy = e;
                angle_range = a;
                length_range = l;
                (CommandKind::Fit, common, FcidumpInput::default(), Space::default(), Spsa::default())
            }
        };

        let cfg = ConfigFile::load(common.config.as_deref())?;
        let defaults = SPSAConfig::default();
        let spsa_config = SPSAConfig {
            max_iter: cfg.pick_or(spsa.max_iter, "max-iter", defaults.max_iter)?,
            a: cfg.pick(spsa.spsa_a, "spsa-a")?,
            c: cfg.pick_or(spsa.spsa_c, "spsa-c", defaults.c)?,
            stability: cfg.pick(spsa.spsa_stability, "spsa-A")?,
            alpha: cfg.pick_or(spsa.alpha, "alpha", defaults.alpha)?,
            gamma: cfg.pick_or(spsa.gamma, "gamma", defaults.gamma)?,
            seed: cfg.pick_or(spsa.seed, "seed", DEFAULT_SEED)?,
            target_step: cfg.pick_or(spsa.target_step, "target-step", defaults.target_step)?,
            record_iterates: false,
        };
        let energy = match cfg.pick(energy, "energy")?.unwrap_or(EnergyArg::Exact) {
            EnergyArg::Exact => EnergyColumn::Exact,
            EnergyArg::Vqe => EnergyColumn::Vqe,
        };
        let config = Self {
            command: kind,
            fcidump: cfg.pick(input.fcidump, "fcidump")?,
            manifest: cfg.pick(manifest, "manifest")?,
            params: cfg.pick(params, "params")?,
            pes: cfg.pick(pes, "pes")?,
            freeze: cfg.pick(space.freeze, "freeze")?.map(|l| l.0),
            remove: cfg.pick(space.remove, "remove")?.map(|l| l.0),
            sector: cfg.pick(space.sector, "sector")?,
            layers: cfg.pick_or(spsa.layers, "layers", 2)?,
            spsa: spsa_config,
            restarts: cfg.pick_or(restarts, "restarts", 10)?,
            shots: cfg.pick(shots, "shots")?,
            keep_going: cfg.switch(keep_going, "keep-going")?,
            out: cfg.pick(common.out, "out")?,
            jobs: cfg.pick(common.jobs, "jobs")?,
            energy,
            angle_range: cfg.pick(angle_range, "angle-range")?,
            length_range: cfg.pick(length_range, "length-range")?,
        };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<()> {
        let need = |v: &Option<PathBuf>, flag: &str| match v {
            Some(_) => Ok(()),
            None => Err(anyhow!("missing required --{flag}")),
        };
        match self.command {
            CommandKind::Ed | CommandKind::Vqe | CommandKind::Warmstart => need(&self.fcidump, "fcidump")?,
            CommandKind::Scan => {
                need(&self.manifest, "manifest")?;
                need(&self.params, "params")?;
            }
            CommandKind::Fit => need(&self.pes, "pes")?,
        }
        if self.jobs == Some(0) {
            bail!("--jobs must be positive");
        }
        if self.shots == Some(0) {
            bail!("--shots must be positive");
        }
        self.spsa.validate()?;
        Ok(())
    }

    /// Flags and config first, then `fallback` (manifest metadata), then the
    /// built-in default.
    fn active_space(&self, fallback: Option<&ActiveSpaceSpec>) -> ActiveSpaceSpec {
        let freeze = self
            .freeze
            .clone()
            .or_else(|| fallback.map(|s| s.frozen.clone()))
            .unwrap_or_else(|| DEFAULT_FREEZE.to_vec());
        let remove = self
            .remove
            .clone()
            .or_else(|| fallback.map(|s| s.removed.clone()))
            .unwrap_or_else(|| DEFAULT_REMOVE.to_vec());
        ActiveSpaceSpec::new(freeze, remove)
    }

    fn out_or(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    std::fs::write(path, text).with_context(|| path.display().to_string())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| path.display().to_string())
}

fn load_problem(config: &RunConfig) -> Result<QubitProblem> {
    let path = config.fcidump.as_ref().expect("checked");
    Ok(QubitProblem::from_fcidump(path, &config.active_space(None))?)
}

/// Reads angles from `best_params`, `params`, `final_params` or a bare array.
fn read_params(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON", path.display()))?;
    let array = match &value {
        serde_json::Value::Array(_) => Some(&value),
        serde_json::Value::Object(map) => ["best_params", "params", "final_params"]
            .iter()
            .find_map(|k| map.get(*k)),
        _ => None,
    }
    .ok_or_else(|| anyhow!("{}: no parameter array found", path.display()))?;
    serde_json::from_value(array.clone()).with_context(|| format!("{}: parameters must be numbers", path.display()))
}

fn run_ed(config: &RunConfig) -> Result<()> {
    let problem = load_problem(config)?;
    let exact = exact_energy(&problem, config.sector)?;
    println!("ground_energy {}", sig12(exact.ground_energy));
    if let Some(out) = &config.out {
        write_json(
            &with_suffix(out, "json"),
            &round_json(serde_json::json!({
                "ground_energy": exact.ground_energy,
                "n_qubits": problem.n_qubits(),
                "n_electrons": problem.n_electrons(),
                "sector": config.sector,
            })),
        )?;
    }
    Ok(())
}

fn run_vqe(config: &RunConfig) -> Result<()> {
    let problem = load_problem(config)?;
    let circuit = problem.ansatz(config.layers)?;
    let x0 = match &config.params {
        Some(p) => read_params(p)?,
        None => random_start(config.spsa.seed, 0, circuit.n_params()),
    };
    let run = vqe_energy(&problem.hamiltonian, &circuit, &x0, &config.spsa)?;
    let diagnostics = match config.shots {
        None => run.diagnostics,
        Some(shots) => {
            let state = circuit.prepare_state(&run.params)?;
            let counts = state.sample_counts(shots, derive_seed(config.spsa.seed, SHOTS_STREAM));
            ProbabilityDiagnostics::from_counts(&counts, 1 << problem.n_qubits())
        }
    };
    println!("vqe_energy {}", sig12(run.energy));
    if let Some(out) = &config.out {
        write_text(&with_suffix(out, "csv"), &run.trace.to_csv())?;
        write_json(
            &with_suffix(out, "json"),
            &round_json(serde_json::json!({
                "energy": run.energy,
                "initial_params": run.initial_params,
                "params": run.params,
                "diagnostics": diagnostics,
                "shots": config.shots,
                "layers": config.layers,
                "trace": run.trace.summary_json(),
            })),
        )?;
    }
    Ok(())
}

fn run_warmstart(config: &RunConfig) -> Result<()> {
    let problem = load_problem(config)?;
    let circuit = problem.ansatz(config.layers)?;
    let reference = exact_energy(&problem, config.sector)?.ground_energy;
    let result = warm_start_search(&problem.hamiltonian, &circuit, config.restarts, &config.spsa, reference)?;
    let out = config.out_or("warmstart");
    write_text(&with_suffix(&out, "csv"), &result.to_csv())?;
    let mut json = result.to_json(&config.spsa);
    json["layers"] = config.layers.into();
    write_json(&with_suffix(&out, "json"), &json)?;
    println!("reference_energy {}", sig12(reference));
    println!(
        "best_energy {} delta {}",
        sig12(result.runs[result.best_run_index].energy),
        sig12(result.deltas[result.best_run_index])
    );
    Ok(())
}

/// Returns the number of failed entries.
fn run_scan(config: &RunConfig) -> Result<usize> {
    let manifest_path = config.manifest.as_ref().expect("checked");
    let manifest = load_manifest_file(manifest_path)?;
    let spec = config.active_space(manifest.active_space.as_ref());
    let params = read_params(config.params.as_ref().expect("checked"))?;
    let options = ScanOptions {
        layers: config.layers,
        sector: config.sector,
        keep_going: config.keep_going,
    };
    let outcome = scan(&manifest, &spec, &params, &config.spsa, &options)?;
    let out = config.out_or("pes");
    emit_pes(&outcome.records, None, &out)?;
    for f in &outcome.failures {
        eprintln!(
            "warning: scan entry ({}) {}: {}",
            f.geometry,
            f.path.display(),
            one_line(&f.error.to_string())
        );
    }
    let max_delta = outcome.records.iter().map(|r| r.delta).fold(0.0, f64::max);
    println!("records {} max_delta {}", outcome.records.len(), sig12(max_delta));
    Ok(outcome.failures.len())
}

fn run_fit(config: &RunConfig) -> Result<()> {
    let path = config.pes.as_ref().expect("checked");
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let points = parse_pes_csv(&text, config.energy).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    let fit = fit_surface(&points)?;
    let x = config.angle_range.map_or(fit.angle_domain, |r| (r.0, r.1));
    let y = config.length_range.map_or(fit.length_domain, |r| (r.0, r.1));
    let minimum = minimize_surface(&fit, x, y)?;
    let out = config.out_or("fit");
    write_json(&with_suffix(&out, "json"), &fit_json(&fit, Some(&minimum)))?;
    println!(
        "angle_star {} length_star {} energy_star {}{}",
        sig12(minimum.angle_star),
        sig12(minimum.length_star),
        sig12(minimum.energy_star),
        if minimum.at_boundary() { " boundary" } else { "" }
    );
    Ok(())
}

fn run(config: &RunConfig) -> Result<()> {
    if let Some(n) = config.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match config.command {
        CommandKind::Ed => run_ed(config),
        CommandKind::Vqe => run_vqe(config),
        CommandKind::Warmstart => run_warmstart(config),
        CommandKind::Scan => match run_scan(config)? {
            0 => Ok(()),
            n => bail!("{n} scan entries failed"),
        },
        CommandKind::Fit => run_fit(config),
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match RunConfig::resolve(cli.command).and_then(|c| run(&c)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.chain().map(|c| c.to_string()).collect::<Vec<_>>();
            // library errors already embed their sources
            eprintln!("error: {}", one_line(&dedup_chain(&msg)));
            ExitCode::FAILURE
        }
    }
}

/// Joins an error chain, skipping causes already contained in their parent.
fn dedup_chain(chain: &[String]) -> String {
    let mut out = String::new();
    for (i, part) in chain.iter().enumerate() {
        if i > 0 && out.contains(part.as_str()) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(part);
    }
    out
}
