use clap::{Args, Parser, Subcommand, ValueEnum};

/// Batch experiment driver: spectra, SINR campaigns, window dumps and
/// consistency checks, all emitted as plain CSV with `#` header comments.
#[derive(Debug, Parser)]
#[command(name = "scfdma", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytical and Welch-estimated power spectral density
    Psd(PsdArgs),
    /// Analytical and Monte Carlo SINR over an Es/N0 grid
    Sinr(SinrArgs),
    /// Transmit window magnitude per frequency bin
    Window(WindowArgs),
    /// Cross-module consistency suite (nonzero exit on any failure)
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 5 MHz grid: N = 512, CP = 31, M defaults to 10
    Lte5,
    /// Small fast grid: M = 4, N = 8, CP = 2
    Toy,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    /// Parameter preset providing defaults for M, N and the CP length
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// User subcarriers per block (precoding transform size)
    #[arg(long)]
    pub m: Option<usize>,
    /// Total subcarrier count (main transform size)
    #[arg(long)]
    pub n: Option<usize>,
    /// Cyclic prefix length in samples
    #[arg(long)]
    pub ng: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapingKind {
    /// Rectangular mapping window (block 0)
    Rect,
    /// Root-raised-cosine shaping (block 1)
    Rrc,
}

#[derive(Debug, Args)]
pub struct ShapingArgs {
    /// Transmit window kind
    #[arg(long, value_enum, default_value = "rect")]
    pub shaping: ShapingKind,
    /// Roll-off factor for rrc shaping
    #[arg(long, default_value_t = 0.35)]
    pub rolloff: f64,
    /// Which block of M subcarriers the user occupies
    /// (defaults: 0 for rect, 1 for rrc)
    #[arg(long)]
    pub block: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelKind {
    /// Block-fading simplified pedestrian profile (taps at 0/130.2/390.6 ns)
    PedestrianA,
    /// Deterministic all-pass channel, C_k = 1
    Flat,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Built-in channel model
    #[arg(long, value_enum, default_value = "pedestrian-a")]
    pub channel: ChannelKind,
    /// Tap profile file with `delay_ns,power_db` rows (overrides --channel)
    #[arg(long)]
    pub profile: Option<std::path::PathBuf>,
    /// Sample duration in ns used to quantize profile delays
    #[arg(long, default_value_t = 130.2)]
    pub sample_ns: f64,
    /// Keep the profile's absolute tap powers instead of normalizing the
    /// average channel energy to one
    #[arg(long)]
    pub no_normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EqualizerArg {
    Zf,
    Mmse,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WelchWindowArg {
    Rect,
    Hann,
}

#[derive(Debug, Args)]
pub struct PsdArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub shaping: ShapingArgs,
    /// Number of simulated blocks feeding the Welch estimate
    #[arg(long, default_value_t = 4000)]
    pub frames: usize,
    /// Welch segment length (default 4 * N_t)
    #[arg(long)]
    pub segment_len: Option<usize>,
    /// Welch segment overlap fraction
    #[arg(long, default_value_t = 0.5)]
    pub overlap: f64,
    /// Welch segment window
    #[arg(long, value_enum, default_value = "rect")]
    pub welch_window: WelchWindowArg,
    /// Symbol variance
    #[arg(long, default_value_t = 1.0)]
    pub sigma_x2: f64,
    /// Master seed
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct SinrArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub shaping: ShapingArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Equalizer(s) to run
    #[arg(long, value_enum, default_value = "both")]
    pub equalizer: EqualizerArg,
    /// Es/N0 grid in dB as `start:step:stop` (or a single value)
    #[arg(long, default_value = "0:5:30")]
    pub esn0: String,
    /// Block-fading channel realizations
    #[arg(long, default_value_t = 2000)]
    pub realizations: usize,
    /// Symbol blocks simulated per realization
    #[arg(long, default_value_t = 10)]
    pub frames: usize,
    /// Symbol variance
    #[arg(long, default_value_t = 1.0)]
    pub sigma_x2: f64,
    /// Master seed
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub shaping: ShapingArgs,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Master seed
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}
