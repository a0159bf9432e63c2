//! `gldpc`: design, analyze and simulate partially doped GLDPC codes.

mod commands;
mod error;
mod files;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::CliError;
use crate::files::{parse_json, read_bytes, sha256_hex, Io};
use crate::manifest::{FileDigest, RunManifest, Seeds, MANIFEST_FORMAT, MANIFEST_NAME};

#[derive(Parser, Debug)]
#[command(name = "gldpc", version, about = "Partially doped GLDPC codes on the binary erasure channel")]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "GLDPC_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Design a code and write its protograph, parity-check matrix and doping sidecar.
    Construct(ConstructArgs),
    /// Reload a code and report structural properties.
    Check(CheckArgs),
    /// Asymptotic erasure threshold of a protograph or ensemble.
    Threshold(ThresholdArgs),
    /// Optimize an irregular ensemble by differential evolution.
    Optimize(OptimizeArgs),
    /// Monte Carlo block error rate over a list of erasure probabilities.
    Simulate(SimulateArgs),
    /// Realize an ensemble and sweep the number of doped bulks.
    Sweep(SweepArgs),
    /// Rerun a manifest into a new directory and compare outputs.
    Replay(ReplayArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructMode {
    Regular,
    Irregular,
    Conventional,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    Pd,
    Conventional,
    Ldpc,
    /// Density evolution on an edge-perspective ensemble.
    De,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoder {
    Gldpc,
    Peeling,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub mode: ConstructMode,
    /// Design rate as a fraction, e.g. 1/2 [default: 1/2].
    #[arg(long)]
    pub rate: Option<String>,
    /// Protograph variable nodes [default: 400].
    #[arg(long)]
    pub nv: Option<usize>,
    /// Hamming redundancy m of the (2^m - 1, 2^m - 1 - m) component code.
    #[arg(long, default_value_t = 4)]
    pub component: usize,
    /// Lifting factor, a multiple of the component length.
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Regular: variable node degree.
    #[arg(long)]
    pub wr: Option<usize>,
    /// Regular: inclusive y range as lo:hi.
    #[arg(long, value_parser = parse_y_range)]
    pub y_range: Option<(usize, usize)>,
    /// Irregular: maximum number of doped bulks.
    #[arg(long)]
    pub ymax: Option<usize>,
    /// Irregular: largest variable degree.
    #[arg(long)]
    pub l: Option<usize>,
    /// Irregular: largest check degree.
    #[arg(long)]
    pub r: Option<usize>,
    /// Irregular: use this ensemble instead of optimizing one.
    #[arg(long)]
    pub ensemble: Option<PathBuf>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
    /// Conventional: base matrix JSON.
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Conventional: check replaced by the component code.
    #[arg(long)]
    pub check_idx: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CheckArgs {
    /// alist or binary parity-check matrix.
    #[arg(long)]
    pub pcm: PathBuf,
    #[arg(long)]
    pub sidecar: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ThresholdArgs {
    /// Doping sidecar; supplies base, component and doped nodes.
    #[arg(long, conflicts_with_all = ["base", "ensemble"])]
    pub sidecar: Option<PathBuf>,
    /// Plain base matrix JSON, analyzed as LDPC.
    #[arg(long, conflicts_with = "ensemble")]
    pub base: Option<PathBuf>,
    /// Ensemble JSON for density evolution.
    #[arg(long)]
    pub ensemble: Option<PathBuf>,
    /// Defaults to the doping kind of the sidecar.
    #[arg(long, value_enum)]
    pub mode: Option<ThresholdMode>,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub ymax: usize,
    #[arg(long, default_value_t = 20)]
    pub l: usize,
    #[arg(long, default_value_t = 9)]
    pub r: usize,
    #[arg(long, default_value = "1/2")]
    pub rate: String,
    #[arg(long, default_value_t = 400)]
    pub nv: usize,
    #[arg(long, default_value_t = 4)]
    pub component: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 300)]
    pub generations: usize,
    #[arg(long, default_value_t = 50)]
    pub population: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub pcm: PathBuf,
    #[arg(long)]
    pub sidecar: PathBuf,
    /// Comma-separated list or inclusive range start:stop:step.
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value = "100", value_parser = parse_count)]
    pub target_errors: u64,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    pub max_blocks: u64,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = Decoder::Gldpc)]
    pub decoder: Decoder,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    /// Ensemble JSON to realize.
    #[arg(long, required_unless_present = "counts", conflicts_with = "counts")]
    pub ensemble: Option<PathBuf>,
    /// Integer degree counts as degree:count pairs, e.g. 2:165,3:134.
    #[arg(long)]
    pub counts: Option<String>,
    #[arg(long)]
    pub ymax: usize,
    #[arg(long, default_value = "1/2")]
    pub rate: String,
    #[arg(long, default_value_t = 400)]
    pub nv: usize,
    #[arg(long, default_value_t = 4)]
    pub component: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Directory for the rerun outputs.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_y_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// Accepts plain integers and integral floats such as `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("{s:?} is not a count"))?;
    if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 {
        Ok(f as u64)
    } else {
        Err(format!("{s:?} is not a non-negative integer"))
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Construct(_) => "construct",
            Command::Check(_) => "check",
            Command::Threshold(_) => "threshold",
            Command::Optimize(_) => "optimize",
            Command::Simulate(_) => "simulate",
            Command::Sweep(_) => "sweep",
            Command::Replay(_) => "replay",
        }
    }

    fn out(&self) -> &Path {
        match self {
            Command::Construct(a) => &a.out,
            Command::Check(a) => &a.out,
            Command::Threshold(a) => &a.out,
            Command::Optimize(a) => &a.out,
            Command::Simulate(a) => &a.out,
            Command::Sweep(a) => &a.out,
            Command::Replay(a) => &a.out,
        }
    }

    fn out_mut(&mut self) -> &mut PathBuf {
        match self {
            Command::Construct(a) => &mut a.out,
            Command::Check(a) => &mut a.out,
            Command::Threshold(a) => &mut a.out,
            Command::Optimize(a) => &mut a.out,
            Command::Simulate(a) => &mut a.out,
            Command::Sweep(a) => &mut a.out,
            Command::Replay(a) => &mut a.out,
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Construct(a) => Some(a.seed),
            Command::Optimize(a) => Some(a.seed),
            Command::Simulate(a) => Some(a.seed),
            Command::Sweep(a) => Some(a.seed),
            _ => None,
        }
    }

    fn params(&self) -> serde_json::Value {
        let v = match self {
            Command::Construct(a) => serde_json::to_value(a),
            Command::Check(a) => serde_json::to_value(a),
            Command::Threshold(a) => serde_json::to_value(a),
            Command::Optimize(a) => serde_json::to_value(a),
            Command::Simulate(a) => serde_json::to_value(a),
            Command::Sweep(a) => serde_json::to_value(a),
            Command::Replay(_) => Ok(serde_json::Value::Null),
        };
        v.unwrap_or(serde_json::Value::Null)
    }
}

/// Runs one design or analysis command and writes its manifest.
fn execute(cmd: &Command, args: Vec<String>, workers: usize) -> Result<RunManifest, CliError> {
    let started = Instant::now();
    let started_unix_s = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    if matches!(cmd, Command::Replay(_)) {
        return Err(CliError::Usage("replay cannot be nested".into()));
    }
    let out = cmd.out().to_path_buf();
    let mut io = Io::new(&out)?;
    let result = match cmd {
        Command::Construct(a) => commands::construct(a, &mut io),
        Command::Check(a) => commands::check(a, &mut io),
        Command::Threshold(a) => commands::threshold(a, &mut io),
        Command::Optimize(a) => commands::optimize(a, &mut io),
        Command::Simulate(a) => commands::simulate(a, workers, &mut io),
        Command::Sweep(a) => commands::sweep(a, &mut io),
        Command::Replay(_) => unreachable!("rejected above"),
    };
    let manifest = RunManifest {
        format: MANIFEST_FORMAT.into(),
        command: cmd.name().into(),
        args,
        cwd: std::env::current_dir().unwrap_or_default(),
        params: cmd.params(),
        seeds: cmd.seed().map(Seeds::from_master),
        version: env!("CARGO_PKG_VERSION").into(),
        inputs: io.inputs.iter().map(|(p, h)| FileDigest { path: p.clone(), sha256: h.clone() }).collect(),
        outputs: io.outputs.iter().map(|(p, h)| FileDigest { path: p.into(), sha256: h.clone() }).collect(),
        started_unix_s,
        wall_clock_s: started.elapsed().as_secs_f64(),
    };
    // a failed check still records what it produced
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Numerical(e.to_string()))?;
    std::fs::write(io.out_dir().join(MANIFEST_NAME), text + "\n")
        .map_err(|e| CliError::Usage(format!("cannot write manifest: {e}")))?;
    result.map(|()| manifest)
}

fn absolute(p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        std::env::current_dir().unwrap_or_default().join(p)
    }
}

fn replay(r: &ReplayArgs, workers: usize) -> Result<(), CliError> {
    let bytes = read_bytes(&r.manifest)?;
    let m: RunManifest = parse_json(&r.manifest, &bytes)?;
    if m.format != MANIFEST_FORMAT {
        return Err(CliError::Usage(format!("unknown manifest format {:?}", m.format)));
    }
    if m.version != env!("CARGO_PKG_VERSION") {
        log::warn!("manifest written by version {}, replaying with {}", m.version, env!("CARGO_PKG_VERSION"));
    }
    let out = absolute(&r.out);
    std::env::set_current_dir(&m.cwd)
        .map_err(|e| CliError::Usage(format!("cannot enter recorded directory {}: {e}", m.cwd.display())))?;
    for input in &m.inputs {
        let now = sha256_hex(&read_bytes(&input.path)?);
        if now != input.sha256 {
            return Err(CliError::Usage(format!("input {} changed since the recorded run", input.path.display())));
        }
    }
    let argv = std::iter::once("gldpc".to_string()).chain(m.args.iter().cloned());
    let mut cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(format!("recorded arguments: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Usage("a replay manifest cannot itself be replayed".into()));
    }
    *cli.command.out_mut() = out.clone();
    let fresh = execute(&cli.command, m.args.clone(), workers)?;
    let mut identical = true;
    for old in &m.outputs {
        let new = fresh.outputs.iter().find(|f| f.path == old.path);
        let same = new.is_some_and(|f| f.sha256 == old.sha256);
        identical &= same;
        println!("{} {}", if same { "identical" } else { "DIFFERS" }, old.path.display());
    }
    if fresh.outputs.len() != m.outputs.len() {
        identical = false;
        println!("DIFFERS output file count {} vs {}", fresh.outputs.len(), m.outputs.len());
    }
    if identical {
        Ok(())
    } else {
        Err(CliError::Numerical("replay outputs differ from the recorded run".into()))
    }
}

fn run() -> Result<(), CliError> {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Ok(()),
                _ => Err(CliError::Usage("invalid arguments".into())),
            };
        }
    };
    let workers = match cli.workers {
        Some(0) => return Err(CliError::Usage("--workers must be positive".into())),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    match &cli.command {
        Command::Replay(r) => replay(r, workers),
        cmd => execute(cmd, argv[1..].to_vec(), workers).map(|_| ()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gldpc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
