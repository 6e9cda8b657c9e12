//! Command-line grammar. Every subcommand's arguments serialize to JSON so
//! an output file's header can reproduce the run.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use haa::linear_code::CodeToken;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "haa",
    version,
    about = "Weight enumerators, distance growth rates and iterative decoding of Hamming-accumulate-accumulate code ensembles",
    after_help = "Outer codes are named hamming:<m>, ehamming:<m>, rep:<n> or custom:<generator file>.\n\
Rates accept fractions (26/31) or decimals. Relative --output paths are resolved against\n\
$HAA_OUTPUT_DIR when it is set."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output file (stdout when absent)
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Weight spectrum of an outer block code
    CodeWe(CodeWeArgs),
    /// Ensemble-average weight enumerator, ln Ā_h for h = 0..=max_h
    EnsembleWe(EnsembleWeArgs),
    /// Probabilistic minimum-distance bound d* over block lengths
    DminBound(DminBoundArgs),
    /// Asymptotic spectral shape r(δ) with the random-code reference
    SpectralShape(SpectralShapeArgs),
    /// Normalized minimum-distance growth rate δ_min
    DeltaMin(DeltaMinArgs),
    /// Gilbert–Varshamov distance δ_GV for a rate
    Gvb(RateArgs),
    /// Encode one message and show the intermediate words
    Encode(EncodeArgs),
    /// Monte-Carlo bit and frame error rates over BPSK/AWGN
    Ber(BerArgs),
    /// Outer and inner EXIT curves at one Eb/N0
    Exit(ExitArgs),
    /// Iterative convergence threshold from the EXIT tunnel
    Threshold(ThresholdArgs),
    /// Eb/N0 at which BPSK-constrained capacity equals the rate
    Capacity(RateArgs),
    /// Re-run the configuration recorded in an output file's header
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CodeWe(_) => "code-we",
            Command::EnsembleWe(_) => "ensemble-we",
            Command::DminBound(_) => "dmin-bound",
            Command::SpectralShape(_) => "spectral-shape",
            Command::DeltaMin(_) => "delta-min",
            Command::Gvb(_) => "gvb",
            Command::Encode(_) => "encode",
            Command::Ber(_) => "ber",
            Command::Exit(_) => "exit",
            Command::Threshold(_) => "threshold",
            Command::Capacity(_) => "capacity",
            Command::Replay(_) => "replay",
        }
    }

    /// Master seed of Monte-Carlo and interleaver-drawing commands.
    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Encode(a) => Some(a.seed),
            Command::Ber(a) => Some(a.mc.seed),
            Command::Exit(a) => Some(a.mc.seed),
            Command::Threshold(a) => Some(a.mc.seed),
            _ => None,
        }
    }

    pub fn format_mut(&mut self) -> Option<&mut Option<Format>> {
        Some(match self {
            Command::CodeWe(a) => &mut a.format,
            Command::EnsembleWe(a) => &mut a.format,
            Command::DminBound(a) => &mut a.format,
            Command::SpectralShape(a) => &mut a.format,
            Command::DeltaMin(a) => &mut a.format,
            Command::Gvb(a) => &mut a.format,
            Command::Encode(a) => &mut a.format,
            Command::Ber(a) => &mut a.format,
            Command::Exit(a) => &mut a.format,
            Command::Threshold(a) => &mut a.format,
            Command::Capacity(a) => &mut a.format,
            Command::Replay(_) => return None,
        })
    }

    /// Scalar results default to JSON, tables to CSV.
    pub fn default_format(&self) -> Format {
        match self {
            Command::DeltaMin(_)
            | Command::Gvb(_)
            | Command::Threshold(_)
            | Command::Capacity(_) => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Auto,
    ClosedForm,
    BruteForce,
}

fn parse_token(s: &str) -> Result<String, String> {
    let token: CodeToken = s.parse().map_err(|e: haa::Error| e.to_string())?;
    token.build().map_err(|e| format!("{token}: {e}"))?;
    Ok(token.to_string())
}

/// `a/b` or a decimal in `(0, 1)`.
pub fn parse_rate(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in '{s}'"))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in '{s}'"))?;
            a / b
        }
        None => s
            .trim()
            .parse()
            .map_err(|_| format!("'{s}' is not a rate; expected k/n or a decimal"))?,
    };
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(format!("rate {s} must lie in (0, 1)"))
    }
}

fn parse_rate_token(s: &str) -> Result<String, String> {
    parse_rate(s).map(|_| s.trim().to_string())
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CodeWeArgs {
    /// Outer code token
    #[arg(long, value_parser = parse_token)]
    pub outer: String,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Outer code, accumulator depth and size of the concatenation.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EnsembleArgs {
    /// Outer code token
    #[arg(long, value_parser = parse_token)]
    pub outer: String,
    /// Number of accumulators (1 or 2)
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub stages: u8,
    /// Outer codewords per frame
    #[arg(long = "length", visible_alias = "L", conflicts_with = "block_length")]
    pub length: Option<usize>,
    /// Frame length N, a multiple of the outer n
    #[arg(long)]
    pub block_length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EnsembleWeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    /// Largest output weight (defaults to N)
    #[arg(long)]
    pub max_h: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DminBoundArgs {
    #[arg(long, value_parser = parse_token)]
    pub outer: String,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub stages: u8,
    /// Comma-separated frame lengths
    #[arg(long, value_delimiter = ',', required = true)]
    pub block_lengths: Vec<usize>,
    /// Probability target of the bound
    #[arg(long, default_value_t = 0.5)]
    pub target: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SpectralShapeArgs {
    #[arg(long, value_parser = parse_token)]
    pub outer: String,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub stages: u8,
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub to: f64,
    /// Evenly spaced δ values including both ends
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Grid intervals per axis of the inner maximization
    #[arg(long, default_value_t = 400)]
    pub grid_steps: usize,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DeltaMinArgs {
    #[arg(long, value_parser = parse_token)]
    pub outer: String,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub stages: u8,
    /// Detection threshold on r(δ), nats
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub resolution: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub scan_step: f64,
    #[arg(long, default_value_t = 400)]
    pub grid_steps: usize,
    /// Skip the epsilon/10, epsilon*10 sensitivity runs
    #[arg(long)]
    pub no_sensitivity: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RateArgs {
    /// Code rate, e.g. 26/31
    #[arg(long, value_parser = parse_rate_token)]
    pub rate: String,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EncodeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    /// Interleaver seed; also draws the message when none is given
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Message as a string of 0/1 characters
    #[arg(long)]
    pub message: Option<String>,
    /// Write the interleaver permutations as JSON to this file
    #[arg(long)]
    #[serde(skip)]
    pub dump_perm: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MonteCarloArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (0 = all cores); results do not depend on it
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BerArgs {
    /// Outer code token (omit with --uncoded)
    #[arg(long, value_parser = parse_token, required_unless_present = "uncoded")]
    pub outer: Option<String>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub stages: u8,
    #[arg(long = "length", visible_alias = "L", conflicts_with = "block_length")]
    pub length: Option<usize>,
    /// Frame length N (defaults to the largest multiple of n not above 8184)
    #[arg(long)]
    pub block_length: Option<usize>,
    /// Comma-separated Eb/N0 values in dB
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    pub ebn0: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub min_frame_errors: u64,
    #[arg(long, default_value_t = 100_000)]
    pub max_frames: u64,
    #[arg(long, default_value_t = 30)]
    pub max_iterations: usize,
    /// Simulate uncoded BPSK instead of a code
    #[arg(long, conflicts_with = "outer")]
    pub uncoded: bool,
    /// Bits per uncoded frame
    #[arg(long, default_value_t = 8184)]
    pub frame_bits: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: MonteCarloArgs,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ExitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub ebn0: f64,
    /// Comma-separated a-priori MI grid in [0, 1)
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 4)]
    pub frames_per_point: usize,
    /// Inner↔middle accumulator exchanges per inner-curve point
    #[arg(long, default_value_t = 10)]
    pub activations: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: MonteCarloArgs,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ThresholdArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    /// Search window `lo,hi` in dB (defaults to capacity .. capacity + 3 dB)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub window: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Comma-separated a-priori MI grid in [0, 1)
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 4)]
    pub frames_per_point: usize,
    #[arg(long, default_value_t = 10)]
    pub activations: usize,
    /// Skip the 5- and 20-activation sensitivity searches
    #[arg(long)]
    pub no_sensitivity: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: MonteCarloArgs,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    /// CSV or JSON file written by this tool
    pub file: PathBuf,
}
