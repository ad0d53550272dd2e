//! `adpass`: run adiabatic-passage scans and fits from JSON configurations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adpass_core::experiment::{adiabaticity_grid, run_fit, run_scan, Preset, RunConfig, ScanKind, ScanSpec};
use adpass_core::{Error, ScanResult};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adpass", version, about = "Adiabatic passage scans for trapped two-level atoms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transfer versus central detuning (kHz).
    Spectrum(Common),
    /// Transfer versus atom offset in the field gradient (um).
    Spatial(Common),
    /// Transport-induced transfer versus 1/tau (1/ms).
    Transport(Common),
    /// Adiabaticity parameter across the pulse (ms).
    Adiabaticity(Common),
    /// Fit the light-shift broadening to a measured spectrum; writes JSON.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Spectrum CSV in the `abscissa,kHz,p1,stderr` layout.
        #[arg(long)]
        data: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run configuration (kHz, ms, um; unknown keys rejected).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in parameter set.
    #[arg(long, value_parser = ["fig2", "fig3", "fig4b"])]
    preset: Option<String>,
    /// Output file; `.json` writes JSON, anything else CSV. Standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the configuration's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel scan points (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Log progress to standard error.
    #[arg(short, long)]
    verbose: bool,
}

enum Failure {
    Config(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numeric(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match (&common.config, &common.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        (None, Some(name)) => name.parse::<Preset>()?.config(),
        (None, None) => return Err(Failure::Config("either --config or --preset is required".into())),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn set_kind(cfg: &mut RunConfig, kind: ScanKind) -> Result<(), Failure> {
    if cfg.scan.kind == kind {
        return Ok(());
    }
    match (kind, &cfg.pulse) {
        // Any configuration with a pulse has a natural profile grid.
        (ScanKind::Adiabaticity, Some(pulse)) => {
            cfg.scan = ScanSpec { kind, grid: adiabaticity_grid(pulse) };
            Ok(())
        }
        _ => Err(Failure::Config(format!(
            "configuration describes a {:?} scan, not {kind:?}",
            cfg.scan.kind
        ))),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn is_json(path: Option<&Path>) -> bool {
    path.and_then(|p| p.extension()).is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn setup(common: &Common) -> Result<(), Failure> {
    let level = if common.verbose { "info" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .try_init();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("cannot start thread pool: {e}")))?;
    }
    Ok(())
}

fn scan(common: &Common, kind: ScanKind) -> Result<(), Failure> {
    setup(common)?;
    let mut cfg = load_config(common)?;
    set_kind(&mut cfg, kind)?;
    log::info!("running {kind:?} scan, seed {}", cfg.seed);
    let result = run_scan(&cfg)?;
    log::info!("{} points", result.len());
    let out = common.out.as_deref();
    let text = if is_json(out) { to_json(&result)? } else { result.to_csv() };
    write_output(out, &text)
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Failure::Numeric(e.to_string()))
}

fn fit(common: &Common, data: &Path) -> Result<(), Failure> {
    setup(common)?;
    let cfg = load_config(common)?;
    let text = fs::read_to_string(data).map_err(|e| Failure::Config(format!("cannot read {}: {e}", data.display())))?;
    let spectrum = ScanResult::from_csv(&text)?;
    let result = run_fit(&cfg, &spectrum)?;
    if !result.converged {
        log::warn!("fit stopped after {} iterations without converging", result.n_iterations);
    }
    write_output(common.out.as_deref(), &to_json(&result)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Spectrum(c) => scan(c, ScanKind::Spectrum),
        Command::Spatial(c) => scan(c, ScanKind::Spatial),
        Command::Transport(c) => scan(c, ScanKind::Transport),
        Command::Adiabaticity(c) => scan(c, ScanKind::Adiabaticity),
        Command::Fit { common, data } => fit(common, data),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("adpass: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
