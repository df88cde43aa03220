//! Command-line front end: `construct`, `prune`, `decode` and `simulate`.
//!
//! Exit codes are 0 on success, 2 for bad input and 3 when an internal
//! consistency check fails.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::crc::{concatenated_pcm, CrcSpec};
use crate::decoder::{write_trace, ChannelOutput, DecodeMode, DecodeStats, Decoder, DecoderConfig, SelectorPolicy};
use crate::error::{ensure, Error, Result};
use crate::factor_graph::{read_pruned, write_pruned, PrunedMeta, PrunedPcm};
use crate::polar::PolarCode;
use crate::scheme::{CodeFile, Scheme};
use crate::sim::{run_trials, write_csv, write_json, SimConfig};

/// Environment variable naming the default PCM cache directory.
pub const CACHE_ENV: &str = "POLAR_BEC_CACHE";

/// Bumped whenever pruning or CRC reduction can produce a different matrix.
pub const PRUNING_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "polar-bec", version, about = "ML erasure decoding of polar codes over the BEC")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the code description (information set) as JSON.
    Construct(ConstructArgs),
    /// Prune the factor graph and write the PCM file and its metadata.
    Prune(PruneArgs),
    /// Decode one received word over {0,1,?}.
    Decode(DecodeArgs),
    /// Monte-Carlo simulation over an erasure-probability grid.
    Simulate(SimulateArgs),
}

#[derive(Clone, Debug, Args)]
pub struct CodeArgs {
    /// Blocklength, a power of two.
    #[arg(long = "N", value_name = "N", required_unless_present = "code")]
    pub len: Option<usize>,
    /// Polar dimension, CRC bits included.
    #[arg(long = "K", value_name = "K", conflicts_with = "rate", required_unless_present_any = ["rate", "code"])]
    pub k: Option<usize>,
    /// Total rate; K = round(rate * N) + CRC degree.
    #[arg(long)]
    pub rate: Option<f64>,
    /// CRC degree, 0 for none.
    #[arg(long, default_value_t = 0)]
    pub crc: usize,
    /// CRC polynomial in hex, leading term omitted.
    #[arg(long)]
    pub crc_poly: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub design_eps: f64,
    /// JSON code file written by `construct`, instead of the flags above.
    #[arg(long, conflicts_with_all = ["len", "k", "rate", "crc_poly"])]
    pub code: Option<PathBuf>,
}

impl CodeArgs {
    pub fn resolve(&self) -> Result<(PolarCode, Option<CrcSpec>)> {
        if let Some(path) = &self.code {
            let file: CodeFile = serde_json::from_reader(BufReader::new(open(path)?))?;
            return Ok((file.code()?, file.crc()?));
        }
        let len = self
            .len
            .ok_or_else(|| Error::InvalidInput("--N is required".into()))?;
        let crc = match (self.crc, &self.crc_poly) {
            (0, None) => None,
            (0, Some(_)) => return Err(Error::InvalidInput("--crc-poly needs --crc".into())),
            (m, None) => Some(CrcSpec::with_degree(m)?),
            (m, Some(p)) => Some(CrcSpec::new(m, CrcSpec::parse_poly(p)?)?),
        };
        let k = match (self.k, self.rate) {
            (Some(k), None) => k,
            (None, Some(rate)) => {
                ensure!(rate > 0.0 && rate <= 1.0, InvalidInput, "rate {rate} is outside (0, 1]");
                (rate * len as f64).round() as usize + self.crc
            }
            _ => return Err(Error::InvalidInput("give exactly one of --K and --rate".into())),
        };
        ensure!(k <= len, InvalidInput, "K = {k} exceeds N = {len}");
        Ok((PolarCode::construct(len, k, self.design_eps)?, crc))
    }
}

#[derive(Clone, Debug, Args)]
pub struct PcmArgs {
    /// Load the pruned PCM from this file instead of building it.
    #[arg(long)]
    pub pcm: Option<PathBuf>,
    /// PCM cache directory; defaults to $POLAR_BEC_CACHE when set.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Random,
    MinResidual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Baseline,
    Structured,
}

#[derive(Clone, Debug, Args)]
pub struct DecoderArgs {
    #[arg(long, value_enum, default_value_t = PolicyArg::MinResidual)]
    pub policy: PolicyArg,
    /// References added per selection round.
    #[arg(long, default_value_t = 1)]
    pub nr_batch: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Baseline)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl DecoderArgs {
    fn config(&self) -> Result<DecoderConfig> {
        ensure!(self.nr_batch >= 1, InvalidInput, "--nr-batch must be at least 1");
        Ok(DecoderConfig {
            policy: match self.policy {
                PolicyArg::Random => SelectorPolicy::RandomCvn { seed: self.seed },
                PolicyArg::MinResidual => SelectorPolicy::MinResidualCheck,
            },
            batch: self.nr_batch,
            mode: match self.mode {
                ModeArg::Baseline => DecodeMode::Baseline,
                ModeArg::Structured => DecodeMode::Structured,
            },
            ..Default::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Matrix file; metadata goes next to it with a `.meta.json` suffix.
    /// Without it the matrix goes to stdout and the metadata to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub pcm: PcmArgs,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    /// Write the per-stage trace as JSON lines.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Received word file, `-` for stdin.
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub pcm: PcmArgs,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    /// `start:stop:step` (inclusive), or a comma-separated list.
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also report peeling alone on the same erasure patterns.
    #[arg(long)]
    pub bp_baseline: bool,
    /// Output prefix: writes `<out>.csv` and `<out>.json`. CSV to stdout
    /// when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What `decode` prints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub codeword: String,
    pub status: String,
    pub nullity: usize,
    pub stats: DecodeStats,
}

/// Parses `start:stop:step` (inclusive) or `a,b,c`. Grid points are rounded
/// to 9 decimals so that `0.30:0.44:0.02` gives exactly 8 points.
pub fn parse_eps_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad erasure probability `{t}`")))?;
        ensure!((0.0..=1.0).contains(&v), InvalidInput, "erasure probability {v} is outside [0, 1]");
        Ok(v)
    };
    let round = |v: f64| (v * 1e9).round() / 1e9;
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (a, b) = (num(start)?, num(stop)?);
            let step: f64 = step
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad step `{step}`")))?;
            ensure!(step > 0.0, InvalidInput, "step must be positive");
            ensure!(a <= b, InvalidInput, "grid start {a} is above stop {b}");
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| round(a + i as f64 * step)).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(Error::InvalidInput(format!("bad grid `{s}`"))),
    }
}

/// Cache file stem for a code and CRC: a 64-bit FNV-1a digest of every
/// parameter that determines the pruned matrix.
pub fn cache_key(code: &PolarCode, crc: Option<&CrcSpec>) -> String {
    let desc = cache_description(code, crc);
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in desc.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("pcm-{h:016x}")
}

fn cache_description(code: &PolarCode, crc: Option<&CrcSpec>) -> String {
    let info: Vec<String> = code.info_set().iter().map(usize::to_string).collect();
    format!(
        "v{PRUNING_VERSION} N={} K={} design_eps={:016x} crc={} info={}",
        code.len(),
        code.k(),
        code.design_eps().to_bits(),
        crc.map_or("none".into(), |c| format!("{}:{}", c.degree, c.poly_hex())),
        info.join(",")
    )
}

/// Loads the pruned PCM from `--pcm`, from the cache, or builds it (and
/// fills the cache when one is configured).
pub fn load_scheme(code: PolarCode, crc: Option<CrcSpec>, args: &PcmArgs) -> Result<Scheme> {
    if let Some(path) = &args.pcm {
        let pcm = read_pruned(BufReader::new(open(path)?))?;
        return Scheme::from_parts(code, crc, pcm);
    }
    let dir = args
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
    let Some(dir) = dir else {
        return Scheme::build(code, crc);
    };
    let stem = cache_key(&code, crc.as_ref());
    let desc = cache_description(&code, crc.as_ref());
    let (pcm_path, key_path) = (dir.join(format!("{stem}.pcm")), dir.join(format!("{stem}.key")));
    if pcm_path.exists() && fs::read_to_string(&key_path).is_ok_and(|k| k.trim() == desc) {
        let pcm = read_pruned(BufReader::new(open(&pcm_path)?))?;
        return Scheme::from_parts(code, crc, pcm);
    }
    let scheme = Scheme::build(code, crc)?;
    fs::create_dir_all(&dir)?;
    let mut w = BufWriter::new(File::create(&pcm_path)?);
    write_pruned(&scheme.pcm, &mut w)?;
    w.flush()?;
    fs::write(&key_path, format!("{desc}\n"))?;
    Ok(scheme)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))
}

fn bits_string(bits: &crate::gf2::BitVec) -> String {
    bits.iter().map(|b| if b { '1' } else { '0' }).collect()
}

fn full_rank(pcm: &PrunedPcm) -> bool {
    pcm.matrix.rank() == pcm.matrix.rows()
}

pub fn cmd_construct(args: &ConstructArgs, stdout: &mut dyn Write) -> Result<()> {
    let (code, crc) = args.code.resolve()?;
    let file = CodeFile::describe(&code, crc.as_ref());
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            serde_json::to_writer_pretty(&mut w, &file)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => {
            serde_json::to_writer_pretty(&mut *stdout, &file)?;
            writeln!(stdout)?;
        }
    }
    Ok(())
}

pub fn cmd_prune(args: &PruneArgs, stdout: &mut dyn Write) -> Result<PrunedMeta> {
    let (code, crc) = args.code.resolve()?;
    let pcm = concatenated_pcm(&code, crc.as_ref())?;
    let meta = PrunedMeta::describe(&pcm, crc.map_or(0, |c| c.degree), full_rank(&pcm));
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_pruned(&pcm, &mut w)?;
            w.flush()?;
            let mut meta_path = path.clone().into_os_string();
            meta_path.push(".meta.json");
            fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
        }
        None => {
            write_pruned(&pcm, stdout)?;
            eprintln!("{}", serde_json::to_string(&meta)?);
        }
    }
    ensure!(meta.rank_ok, Internal, "pruned PCM is not full row rank");
    Ok(meta)
}

pub fn cmd_decode(args: &DecodeArgs, stdout: &mut dyn Write) -> Result<DecodeReport> {
    let (code, crc) = args.code.resolve()?;
    let mut text = String::new();
    if args.input.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        open(&args.input)?.read_to_string(&mut text)?;
    }
    let y = ChannelOutput::parse(&text)?;
    ensure!(
        y.len() == code.len(),
        InvalidInput,
        "received word has {} symbols, expected N = {}",
        y.len(),
        code.len()
    );
    let scheme = load_scheme(code, crc, &args.pcm)?;
    let config = DecoderConfig {
        trace: args.trace.is_some(),
        ..args.decoder.config()?
    };
    let out = Decoder::new(&scheme.pcm).decode(&y, &config)?;
    if let Some(path) = &args.trace {
        let mut w = BufWriter::new(File::create(path)?);
        write_trace(&out.trace, &mut w)?;
        w.flush()?;
    }
    let status = match out.status {
        crate::decoder::DecodeStatus::BpSuccess => "BpSuccess",
        crate::decoder::DecodeStatus::MlUnique => "MlUnique",
        crate::decoder::DecodeStatus::MlAmbiguous { .. } => "MlAmbiguous",
    };
    let report = DecodeReport {
        codeword: bits_string(&out.codeword),
        status: status.into(),
        nullity: out.status.nullity(),
        stats: out.stats,
    };
    serde_json::to_writer(&mut *stdout, &report)?;
    writeln!(stdout)?;
    Ok(report)
}

pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let (code, crc) = args.code.resolve()?;
    let eps = parse_eps_grid(&args.eps)?;
    if let Some(w) = args.workers {
        ensure!(w >= 1, InvalidInput, "--workers must be at least 1");
    }
    let scheme = load_scheme(code, crc, &args.pcm)?;
    let cfg = SimConfig {
        eps,
        trials: args.trials,
        seed: args.decoder.seed,
        decoder: args.decoder.config()?,
        workers: args.workers,
        bp_baseline: args.bp_baseline,
    };
    let rows = run_trials(&scheme, &cfg)?;
    match &args.out {
        Some(prefix) => {
            let with = |ext: &str| {
                let mut p = prefix.clone().into_os_string();
                p.push(ext);
                PathBuf::from(p)
            };
            write_csv(&rows, BufWriter::new(File::create(with(".csv"))?))?;
            let mut j = BufWriter::new(File::create(with(".json"))?);
            write_json(&rows, &mut j)?;
            writeln!(j)?;
            j.flush()?;
        }
        None => write_csv(&rows, &mut *stdout)?,
    }
    Ok(())
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Construct(a) => cmd_construct(a, stdout),
        Command::Prune(a) => cmd_prune(a, stdout).map(|_| ()),
        Command::Decode(a) => cmd_decode(a, stdout).map(|_| ()),
        Command::Simulate(a) => cmd_simulate(a, stdout).map(|_| ()),
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Internal(_) => 3,
        _ => 2,
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out).and_then(|()| out.flush().map_err(Error::from)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
