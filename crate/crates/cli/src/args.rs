use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "wheelsense", version, about = "Obstacle ranging and spoken-command recognition for a guided wheelchair")]
pub struct Cli {
    /// Emit machine-readable JSON instead of text lines.
    #[arg(long, global = true)]
    pub json: bool,
    /// TOML file of parameter defaults; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory for outputs and the run manifest [default: .]
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment obstacles in a left frame; writes mask.pgm.
    Detect {
        #[arg(long, value_name = "PPM")]
        left: PathBuf,
        #[command(flatten)]
        vision: VisionOpts,
    },
    /// Disparity over the navigation region; writes disparity.pgm and mask.pgm.
    Disparity {
        #[arg(long, value_name = "PPM")]
        left: PathBuf,
        #[arg(long, value_name = "PPM")]
        right: PathBuf,
        /// Use this obstacle mask instead of detecting one.
        #[arg(long, value_name = "PGM")]
        mask: Option<PathBuf>,
        #[command(flatten)]
        vision: VisionOpts,
        #[command(flatten)]
        stereo: StereoOpts,
    },
    /// Full loop on one stereo pair; prints `D=<mm> action=<name> code=<int>`.
    Navigate {
        #[arg(long, value_name = "PPM")]
        left: PathBuf,
        #[arg(long, value_name = "PPM")]
        right: PathBuf,
        #[arg(long, value_name = "FILE")]
        calib: Option<PathBuf>,
        #[command(flatten)]
        vision: VisionOpts,
        #[command(flatten)]
        stereo: StereoOpts,
    },
    /// Feature matrix of one utterance.
    Features {
        #[command(flatten)]
        audio: AudioInput,
        /// Output template file [default: <out-dir>/features.melmat]
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
        #[command(flatten)]
        front_end: FrontEndOpts,
    },
    /// Build one template per word into a template directory.
    Train {
        /// `LABEL=PATH`; `.wav` files are read as PCM, anything else as raw text samples.
        #[arg(long = "word", value_name = "LABEL=PATH", required = true, value_parser = parse_word)]
        words: Vec<(String, PathBuf)>,
        /// Template directory [default: <out-dir>]
        #[arg(long, value_name = "DIR")]
        templates: Option<PathBuf>,
        #[command(flatten)]
        front_end: FrontEndOpts,
    },
    /// Classify an utterance against a template directory.
    Recognize {
        #[command(flatten)]
        audio: AudioInput,
        /// Template directory (required, from the flag or the config file)
        #[arg(long, value_name = "DIR")]
        templates: Option<PathBuf>,
        /// DTW recurrence [default: symmetric]
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[command(flatten)]
        front_end: FrontEndOpts,
    },
    /// Synthetic inputs with known ground truth.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Run navigate over numbered pairs `left<N>.ppm` / `right<N>.ppm` in a directory.
    Pipeline {
        #[arg(long, value_name = "DIR")]
        frames: PathBuf,
        #[arg(long, value_name = "FILE")]
        calib: Option<PathBuf>,
        #[command(flatten)]
        vision: VisionOpts,
        #[command(flatten)]
        stereo: StereoOpts,
    },
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// Writes left.ppm, right.ppm, truth.pgm and calib.txt.
    Scene {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `depth=<mm>|d=<px>,top=,left=,width=,height=[,color=R:G:B]`
        #[arg(long = "obstacle", value_name = "SPEC")]
        obstacles: Vec<String>,
        /// Add this many random obstacles (seeded).
        #[arg(long, value_name = "N", conflicts_with = "obstacles")]
        random: Option<usize>,
        /// Gain on right-image intensities before quantization.
        #[arg(long)]
        right_gain: Option<f64>,
        #[arg(long)]
        d_max: Option<usize>,
        #[arg(long, value_name = "FILE")]
        calib: Option<PathBuf>,
    },
    /// Writes `<label>.txt` (one sample per line) and optionally `<label>.wav`.
    Word {
        #[arg(long)]
        label: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write 16-bit PCM WAV.
        #[arg(long)]
        wav: bool,
        #[arg(long)]
        sample_rate: Option<u32>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct AudioInput {
    #[arg(long, value_name = "FILE")]
    pub wav: Option<PathBuf>,
    /// Text file, one sample per line.
    #[arg(long, value_name = "FILE")]
    pub raw: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct VisionOpts {
    /// Floor reference area: `rect:ROW0,ROW1,COL0,COL1` or `trap:TOP,BOTTOM,COL0,COL1`.
    #[arg(long)]
    pub region: Option<String>,
    /// Odd side of the square majority filter applied to the mask [default: 9]
    #[arg(long)]
    pub median_window: Option<usize>,
    /// A bin is floor when its count exceeds max/DIVISOR [default: 50]
    #[arg(long)]
    pub threshold_divisor: Option<f64>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct StereoOpts {
    /// Window similarity measure [default: ncc]
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    /// Matching window is (2h+1)x(2h+1) [default: 4]
    #[arg(long)]
    pub window_half: Option<usize>,
    /// [default: 0]
    #[arg(long)]
    pub d_min: Option<usize>,
    /// [default: 25]
    #[arg(long)]
    pub d_max: Option<usize>,
    /// `ROW0,ROW1,COL0,COL1[,WIDEN]`
    #[arg(long)]
    pub nav_region: Option<String>,
    /// Pixels a disparity needs to count [default: 3 * d-max]
    #[arg(long)]
    pub support_threshold: Option<usize>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct FrontEndOpts {
    /// Hz; overrides the rate in the input file
    #[arg(long)]
    pub sample_rate: Option<u32>,
    /// Frame length, a power of two [default: 256]
    #[arg(long)]
    pub fft_len: Option<usize>,
    /// Hop in samples [default: 80]
    #[arg(long)]
    pub frame_shift: Option<usize>,
    /// [default: 22]
    #[arg(long)]
    pub mel_channels: Option<usize>,
    /// [default: 1e-4]
    #[arg(long)]
    pub log_floor: Option<f64>,
    /// [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub preemphasis: Option<bool>,
    /// [default: 0.97]
    #[arg(long)]
    pub preemphasis_coeff: Option<f64>,
    /// [default: 13]
    #[arg(long)]
    pub mfcc_count: Option<usize>,
    /// [default: logmel]
    #[arg(long, value_enum)]
    pub features: Option<KindArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricArg {
    Ncc,
    Sad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Symmetric,
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Logmel,
    Mfcc,
}

fn parse_word(s: &str) -> Result<(String, PathBuf), String> {
    let (label, path) = s.split_once('=').ok_or("expected LABEL=PATH")?;
    if label.is_empty() || path.is_empty() {
        return Err("expected LABEL=PATH".into());
    }
    Ok((label.to_string(), PathBuf::from(path)))
}
