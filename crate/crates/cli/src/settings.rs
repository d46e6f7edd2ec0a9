//! Parameter resolution: explicit flag, then config file, then built-in default.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wheelsense::dtw::DtwMode;
use wheelsense::features::{FeatureKind, FrontEndConfig};
use wheelsense::media_io::{read_calibration, CameraRig};
use wheelsense::obstacle::{DetectConfig, RegionSpec};
use wheelsense::pipeline::NavigateConfig;
use wheelsense::stereo::{MatchParams, Metric, NavRegion};

use crate::args::{FrontEndOpts, KindArg, MetricArg, ModeArg, StereoOpts, VisionOpts};
use crate::errors::{InputError, UsageError};

/// Contents of a `--config` file. Keys match the long flag names with
/// underscores.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub out_dir: Option<PathBuf>,
    pub calib: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub region: Option<String>,
    pub median_window: Option<usize>,
    pub threshold_divisor: Option<f64>,
    pub metric: Option<MetricArg>,
    pub window_half: Option<usize>,
    pub d_min: Option<usize>,
    pub d_max: Option<usize>,
    pub nav_region: Option<String>,
    pub support_threshold: Option<usize>,
    pub sample_rate: Option<u32>,
    pub fft_len: Option<usize>,
    pub frame_shift: Option<usize>,
    pub mel_channels: Option<usize>,
    pub log_floor: Option<f64>,
    pub preemphasis: Option<bool>,
    pub preemphasis_coeff: Option<f64>,
    pub mfcc_count: Option<usize>,
    pub features: Option<KindArg>,
    pub mode: Option<ModeArg>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())).into())
    }
}

/// Parses `rect:ROW0,ROW1,COL0,COL1` or `trap:TOP,BOTTOM,COL0,COL1`.
pub fn parse_region(s: &str) -> Result<RegionSpec, String> {
    let (kind, rest) = s.split_once(':').ok_or("expected rect:... or trap:...")?;
    let v = parse_usizes(rest, 4, 4)?;
    match kind {
        "rect" => Ok(RegionSpec::Rectangle { row0: v[0], row1: v[1], col0: v[2], col1: v[3] }),
        "trap" => Ok(RegionSpec::Trapezoid { top_row: v[0], bottom_row: v[1], top_col0: v[2], top_col1: v[3] }),
        other => Err(format!("unknown region kind '{other}'")),
    }
}

/// Parses `ROW0,ROW1,COL0,COL1[,WIDEN]`.
pub fn parse_nav_region(s: &str) -> Result<NavRegion, String> {
    let v = parse_usizes(s, 4, 5)?;
    Ok(NavRegion { row0: v[0], row1: v[1], col0: v[2], col1: v[3], widen: v.get(4).copied().unwrap_or(1) })
}

fn parse_usizes(s: &str, min: usize, max: usize) -> Result<Vec<usize>, String> {
    let v = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("'{p}' is not a non-negative integer")))
        .collect::<Result<Vec<_>, _>>()?;
    if v.len() < min || v.len() > max {
        return Err(format!("expected {min}..={max} comma-separated values, got {}", v.len()));
    }
    Ok(v)
}

/// A flag value wins over the config file; a malformed flag is a usage
/// error, a malformed config value an input error.
fn resolve_parsed<T>(
    flag: &Option<String>,
    config: &Option<String>,
    name: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> anyhow::Result<Option<T>> {
    if let Some(s) = flag {
        return parse(s).map(Some).map_err(|e| UsageError(format!("--{name}: {e}")).into());
    }
    if let Some(s) = config {
        return parse(s).map(Some).map_err(|e| InputError(format!("config {name}: {e}")).into());
    }
    Ok(None)
}

pub fn navigate_config(vision: &VisionOpts, stereo: &StereoOpts, cfg: &Settings) -> anyhow::Result<NavigateConfig> {
    let d = NavigateConfig::default();
    let metric = match stereo.metric.or(cfg.metric) {
        Some(MetricArg::Sad) => Metric::Sad,
        Some(MetricArg::Ncc) => Metric::Ncc,
        None => d.matching.metric,
    };
    Ok(NavigateConfig {
        region: resolve_parsed(&vision.region, &cfg.region, "region", parse_region)?.unwrap_or(d.region),
        detect: DetectConfig {
            median_window: vision.median_window.or(cfg.median_window).unwrap_or(d.detect.median_window),
            threshold_divisor: vision
                .threshold_divisor
                .or(cfg.threshold_divisor)
                .unwrap_or(d.detect.threshold_divisor),
        },
        nav_region: resolve_parsed(&stereo.nav_region, &cfg.nav_region, "nav-region", parse_nav_region)?
            .unwrap_or(d.nav_region),
        matching: MatchParams {
            window_half: stereo.window_half.or(cfg.window_half).unwrap_or(d.matching.window_half),
            d_min: stereo.d_min.or(cfg.d_min).unwrap_or(d.matching.d_min),
            d_max: stereo.d_max.or(cfg.d_max).unwrap_or(d.matching.d_max),
            metric,
        },
        support_threshold: stereo.support_threshold.or(cfg.support_threshold),
    })
}

pub fn front_end(opts: &FrontEndOpts, cfg: &Settings) -> FrontEndConfig {
    let d = FrontEndConfig::default();
    FrontEndConfig {
        sample_rate: opts.sample_rate.or(cfg.sample_rate).unwrap_or(d.sample_rate),
        fft_len: opts.fft_len.or(cfg.fft_len).unwrap_or(d.fft_len),
        frame_shift: opts.frame_shift.or(cfg.frame_shift).unwrap_or(d.frame_shift),
        mel_channels: opts.mel_channels.or(cfg.mel_channels).unwrap_or(d.mel_channels),
        log_floor: opts.log_floor.or(cfg.log_floor).unwrap_or(d.log_floor),
        preemphasis: opts.preemphasis.or(cfg.preemphasis).unwrap_or(d.preemphasis),
        preemphasis_coeff: opts.preemphasis_coeff.or(cfg.preemphasis_coeff).unwrap_or(d.preemphasis_coeff),
        mfcc_count: opts.mfcc_count.or(cfg.mfcc_count).unwrap_or(d.mfcc_count),
        kind: match opts.features.or(cfg.features) {
            Some(KindArg::Mfcc) => FeatureKind::Mfcc,
            Some(KindArg::Logmel) => FeatureKind::LogMel,
            None => d.kind,
        },
    }
}

pub fn dtw_mode(flag: Option<ModeArg>, cfg: &Settings) -> DtwMode {
    match flag.or(cfg.mode) {
        Some(ModeArg::Asymmetric) => DtwMode::Asymmetric,
        Some(ModeArg::Symmetric) => DtwMode::Symmetric,
        None => DtwMode::default(),
    }
}

/// Calibration from the flag or config path, else the built-in 320x240 rig.
pub fn rig(flag: &Option<PathBuf>, cfg: &Settings) -> anyhow::Result<(CameraRig, Option<PathBuf>)> {
    match flag.as_ref().or(cfg.calib.as_ref()) {
        Some(path) => Ok((read_calibration(path)?, Some(path.clone()))),
        None => Ok((CameraRig::default(), None)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_strings() {
        assert_eq!(
            parse_region("rect:180,239,20,299").unwrap(),
            RegionSpec::Rectangle { row0: 180, row1: 239, col0: 20, col1: 299 }
        );
        assert!(matches!(parse_region("trap:150,239,100,200").unwrap(), RegionSpec::Trapezoid { top_row: 150, .. }));
        assert!(parse_region("circle:1,2,3,4").is_err());
        assert!(parse_region("rect:1,2,3").is_err());
        assert_eq!(parse_nav_region("120,210,100,200").unwrap(), NavRegion::default());
        assert_eq!(parse_nav_region("120,210,100,200,2").unwrap().widen, 2);
    }

    #[test]
    fn flags_beat_config() {
        let cfg: Settings = toml::from_str("d_max = 20\nmetric = \"sad\"\nregion = \"rect:200,239,0,319\"\n").unwrap();
        let stereo = StereoOpts { d_max: Some(30), ..Default::default() };
        let nc = navigate_config(&VisionOpts::default(), &stereo, &cfg).unwrap();
        assert_eq!(nc.matching.d_max, 30);
        assert_eq!(nc.matching.metric, Metric::Sad);
        assert_eq!(nc.region, RegionSpec::Rectangle { row0: 200, row1: 239, col0: 0, col1: 319 });
    }

    #[test]
    fn unknown_config_key_rejected() {
        assert!(toml::from_str::<Settings>("dmax = 3\n").is_err());
    }
}
