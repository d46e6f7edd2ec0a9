//! The vision loop end to end: detect → disparity → nearest distance → decide.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::media_io::CameraRig;
use crate::nav::{decide, CommandCode, NavDecision};
use crate::obstacle::{detect_obstacles, DetectConfig, ObstacleMask, RegionSpec};
use crate::stereo::{compute_disparity, nearest_obstacle_distance, DisparityMap, MatchParams, NavRegion};

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct NavigateConfig {
    pub region: RegionSpec,
    pub detect: DetectConfig,
    pub nav_region: NavRegion,
    pub matching: MatchParams,
    /// Pixel count a disparity needs to count as an obstacle; `None` means
    /// `3 * d_max`.
    pub support_threshold: Option<usize>,
}

impl NavigateConfig {
    pub fn support(&self) -> usize {
        self.support_threshold.unwrap_or_else(|| self.matching.default_support())
    }
}

#[derive(Debug, Clone)]
pub struct NavigateOutput {
    pub mask: ObstacleMask,
    pub disparity: DisparityMap,
    pub distance_mm: f64,
    pub decision: NavDecision,
}

impl NavigateOutput {
    pub fn code(&self) -> CommandCode {
        self.decision.code()
    }

    /// `D=<mm> action=<name> code=<int>`
    pub fn summary_line(&self) -> String {
        format!(
            "D={} action={} code={}",
            format_mm(self.distance_mm),
            self.decision.action,
            self.code()
        )
    }
}

/// Millimetres with at most two decimals and no trailing zeros.
pub fn format_mm(mm: f64) -> String {
    let s = format!("{mm:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// Runs one stereo pair through the whole loop. The mask is computed on the
/// left frame; matching uses luma of both frames.
pub fn navigate(left: &RgbImage, right: &RgbImage, rig: &CameraRig, config: &NavigateConfig) -> Result<NavigateOutput> {
    rig.validate()?;
    if (left.width(), left.height()) != (right.width(), right.height()) {
        return Err(Error::mismatch(
            format!("right image {}x{}", left.width(), left.height()),
            format!("{}x{}", right.width(), right.height()),
        ));
    }
    let mask = detect_obstacles(left, &config.region, &config.detect)?;
    let disparity = compute_disparity(&left.to_gray(), &right.to_gray(), &mask, &config.nav_region, &config.matching)?;
    let distance_mm = nearest_obstacle_distance(&disparity, rig, config.support());
    let decision = decide(distance_mm, &mask);
    Ok(NavigateOutput { mask, disparity, distance_mm, decision })
}
