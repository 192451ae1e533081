//! `fdl`: build saturating functions, verify the lemmas behind them and
//! estimate divergence spectra from the command line.
//!
//! Every run writes `manifest.json` into `--out-dir`; `fdl --manifest
//! path` replays it. Exit status is 0 on success, 2 when a verification
//! flag is false (outputs are still written) and 1 on usage or IO errors.

mod commands;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "fdl", version, about = "Fourier partial-sum divergence laboratory")]
struct Cli {
    /// Directory receiving outputs and manifest.json.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replay the run recorded in a manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Saturating L^p function as TrigPoly JSON.
    BuildLp(BuildLpArgs),
    /// Kahane-Katznelson block as JSON (spec, resolved n, margin, P).
    BuildCt(BuildCtArgs),
    /// Run one of the verification sweeps.
    Verify(VerifyArgs),
    /// Divergence profile of a polynomial at one point.
    Profile(ProfileArgs),
    /// Empirical divergence spectrum on a grid.
    Spectrum(SpectrumArgs),
    /// Export an arc family as CSV.
    Geom(GeomArgs),
    /// Render a spectrum JSON document as SVG.
    Plot(PlotArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BuildLpArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub jmax: u32,
    #[arg(long, default_value = "g.json")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BuildCtArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub delta: f64,
    /// Smallest k tried; k doubles until the bound holds on every arc.
    #[arg(long, default_value_t = 64)]
    pub k_min: u64,
    /// Largest k tried.
    #[arg(long, default_value_t = 4096)]
    pub k_max: u64,
    #[arg(long, default_value_t = 16)]
    pub per_arc: usize,
    #[arg(long, default_value = "block.json")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub check: Check,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum Check {
    /// Fejér localisation on random admissible θ.
    Fejer(FejerArgs),
    /// Jump witnesses of the L^p lemma for g_j.
    LpJumps(LpJumpsArgs),
    /// log|S_nP| ≥ (1−δ)β log log n on the arcs of a block.
    CtBound(CtBoundArgs),
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FejerArgs {
    #[arg(long)]
    pub n: u64,
    /// 1 selects EQ1, 2 selects EQ2.
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 16)]
    pub trials: usize,
    #[arg(long, default_value = "fejer.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct LpJumpsArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub j: u32,
    #[arg(long, default_value_t = 32)]
    pub samples_per_arc: usize,
    #[arg(long, default_value = "lp_jumps.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CtBoundArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub per_arc: usize,
    #[arg(long, default_value = "ct_bound.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ProfileArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Evaluation point; defaults to point_with_exponent(--alpha, --depth).
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Largest partial sum, or `max` for the degree.
    #[arg(long = "N", default_value = "max")]
    pub n_max: String,
    #[arg(long, default_value = "profile.csv")]
    pub out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Lp,
    Ct,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Exponent for `--mode lp`.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 16384)]
    pub grid: usize,
    #[arg(long = "N", default_value = "max")]
    pub n_max: String,
    /// Also render the table as SVG.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// CSV table; the JSON document goes next to it.
    #[arg(long, default_value = "spectrum.csv")]
    pub out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// 𝐈_{J,j} (or 𝐈'_{J,j} with --primed).
    Ijj,
    /// All dyadic intervals of level j.
    Dyadic,
    /// Dyadic intervals of level j blown up to radius 2^{−αj}.
    BlownUp,
    /// I_k^β around the k-th roots of unity.
    Ikbeta,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct GeomArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long = "J")]
    pub big_j: Option<u32>,
    #[arg(long)]
    pub j: Option<u32>,
    #[arg(long)]
    pub primed: bool,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value = "family.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PlotArgs {
    /// Spectrum JSON document.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "spectrum.svg")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Versions {
    pub fdl: String,
    pub fdl_core: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
}

/// Everything needed to replay a run.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub config: Command,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub threads: usize,
    pub versions: Versions,
    pub outputs: Vec<PathBuf>,
    pub timings: Timings,
    pub exit_code: u8,
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    BoundFailed,
}

/// Shared state of one run.
pub struct Run {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub outputs: Vec<PathBuf>,
}

impl Run {
    /// `path` under the output directory unless absolute.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.out_dir.join(path)
        }
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<PathBuf> {
        let p = self.resolve(path);
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        std::fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
        self.outputs.push(p.clone());
        Ok(p)
    }
}

fn configure_threads() -> Result<usize> {
    if let Ok(v) = std::env::var("FDL_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("FDL_THREADS={v:?} is not a thread count"))?;
        if n == 0 {
            anyhow::bail!("FDL_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(rayon::current_num_threads())
}

fn execute(config: Command, seed: u64, out_dir: PathBuf) -> Result<Status> {
    let threads = configure_threads()?;
    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let start = Instant::now();
    let mut run = Run { out_dir: out_dir.clone(), seed, outputs: Vec::new() };
    let result = commands::dispatch(&config, &mut run);
    let exit_code = match &result {
        Ok(Status::Ok) => 0,
        Ok(Status::BoundFailed) => 2,
        Err(_) => 1,
    };
    let manifest = Manifest {
        config,
        seed,
        out_dir,
        threads,
        versions: Versions { fdl: env!("CARGO_PKG_VERSION").into(), fdl_core: fdl_core::VERSION.into() },
        outputs: run.outputs.clone(),
        timings: Timings { total_seconds: start.elapsed().as_secs_f64() },
        exit_code,
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(run.out_dir.join("manifest.json"), text).context("writing manifest.json")?;
    result
}

/// Marker for errors clap has already reported.
#[derive(Debug)]
struct UsageError;

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("invalid usage")
    }
}

impl std::error::Error for UsageError {}

fn run_cli() -> Result<Status> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Status::Ok),
                _ => Err(UsageError.into()),
            };
        }
    };
    match (cli.manifest, cli.command) {
        (Some(_), Some(_)) => {
            eprintln!("error: --manifest replaces the subcommand; give one or the other");
            Err(UsageError.into())
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let m: Manifest = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            execute(m.config, cli.seed.unwrap_or(m.seed), cli.out_dir.unwrap_or(m.out_dir))
        }
        (None, Some(cmd)) => execute(cmd, cli.seed.unwrap_or(0), cli.out_dir.unwrap_or_else(|| PathBuf::from("."))),
        (None, None) => anyhow::bail!("no command given (try --help)"),
    }
}

fn main() -> ExitCode {
    match run_cli() {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::BoundFailed) => ExitCode::from(2),
        Err(e) => {
            if !e.is::<UsageError>() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(1)
        }
    }
}
