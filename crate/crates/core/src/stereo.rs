//! Window-based stereo correspondence, triangulation and nearest-obstacle
//! ranging.
//!
//! Inputs are assumed rectified: a left-image point on row `i` has its match
//! on row `i` of the right image, shifted left by the disparity `d`. The left
//! image is the base; for each base pixel the candidate window is taken at
//! `(i, j - d)` in the right image.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::media_io::CameraRig;
use crate::obstacle::ObstacleMask;

/// Distance reported when no disparity has enough support.
pub const NO_OBSTACLE_DISTANCE_MM: f64 = 5000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Normalized cross correlation, maximized.
    #[default]
    Ncc,
    /// Sum of absolute differences, minimized.
    Sad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchParams {
    /// Window is `(2 * window_half + 1)` pixels square.
    pub window_half: usize,
    pub d_min: usize,
    pub d_max: usize,
    pub metric: Metric,
}

impl Default for MatchParams {
    fn default() -> Self {
        Self {
            window_half: 4,
            d_min: 0,
            d_max: 25,
            metric: Metric::Ncc,
        }
    }
}

impl MatchParams {
    pub fn validate(&self) -> Result<()> {
        if self.window_half < 1 {
            return Err(Error::invalid("window half-size must be at least 1"));
        }
        if self.d_min > self.d_max {
            return Err(Error::invalid(format!(
                "disparity range {}..={} is empty",
                self.d_min, self.d_max
            )));
        }
        if self.d_max > u8::MAX as usize {
            return Err(Error::invalid("maximum disparity must fit in 8 bits"));
        }
        Ok(())
    }

    /// Default support threshold for [`nearest_obstacle_distance`]: `3 * d_max`.
    pub fn default_support(&self) -> usize {
        3 * self.d_max
    }
}

/// Trapezoidal band in front of the chair where disparity is evaluated:
/// rows `row0..=row1`; row `row0 + k` covers columns
/// `col0 - k * widen ..= col1 + k * widen`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NavRegion {
    pub row0: usize,
    pub row1: usize,
    pub col0: usize,
    pub col1: usize,
    pub widen: usize,
}

impl Default for NavRegion {
    fn default() -> Self {
        Self {
            row0: 120,
            row1: 210,
            col0: 100,
            col1: 200,
            widen: 1,
        }
    }
}

impl NavRegion {
    /// `(row, first_col, last_col)` per row, clipped so every window of
    /// half-size `window_half` lies inside a `width x height` image.
    pub fn spans(&self, width: usize, height: usize, window_half: usize) -> Vec<(usize, usize, usize)> {
        if width <= 2 * window_half || height <= 2 * window_half {
            return Vec::new();
        }
        let last_row = height - 1 - window_half;
        let last_col = width - 1 - window_half;
        (self.row0.max(window_half)..=self.row1.min(last_row))
            .filter_map(|row| {
                let k = (row - self.row0) * self.widen;
                let c0 = self.col0.saturating_sub(k).max(window_half);
                let c1 = (self.col1 + k).min(last_col);
                (c0 <= c1).then_some((row, c0, c1))
            })
            .collect()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        if !(self.row0..=self.row1).contains(&row) {
            return false;
        }
        let k = (row - self.row0) * self.widen;
        col + k >= self.col0 && col <= self.col1 + k
    }
}

/// Per-pixel integer disparity; 0 means not evaluated or no match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    d_max: usize,
    data: Vec<u8>,
}

impl DisparityMap {
    pub fn zeros(width: usize, height: usize, d_max: usize) -> Self {
        Self {
            width,
            height,
            d_max,
            data: vec![0; width * height],
        }
    }

    pub fn from_values(width: usize, height: usize, d_max: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::mismatch(width * height, data.len()));
        }
        if let Some(v) = data.iter().find(|&&v| v as usize > d_max) {
            return Err(Error::invalid(format!("disparity {v} exceeds maximum {d_max}")));
        }
        Ok(Self { width, height, d_max, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> usize {
        self.data[row * self.width + col] as usize
    }

    pub fn set(&mut self, row: usize, col: usize, d: usize) {
        assert!(d <= self.d_max, "disparity {d} exceeds maximum {}", self.d_max);
        self.data[row * self.width + col] = d as u8;
    }

    pub fn values(&self) -> &[u8] {
        &self.data
    }

    /// Pixel counts per disparity, index `0..=d_max`.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.d_max + 1];
        for &v in &self.data {
            h[v as usize] += 1;
        }
        h
    }

    /// Gray image scaled by `255 / d_max`, so nearer is brighter.
    pub fn to_gray(&self) -> GrayImage {
        let scale = if self.d_max == 0 { 0.0 } else { 255.0 / self.d_max as f64 };
        GrayImage::new(
            self.width,
            self.height,
            self.data.iter().map(|&d| (d as f64 * scale).round() as u8).collect(),
        )
        .expect("map dimensions are valid")
    }
}

/// Pinhole projection `(f X / Z + x0, f Y / Z + y0)`; distortion is ignored.
pub fn project_point(rig: &CameraRig, point_mm: (f64, f64, f64)) -> Result<(f64, f64)> {
    let (x, y, z) = point_mm;
    if !(z > 0.0) {
        return Err(Error::BehindCamera(z));
    }
    let f = rig.focal_px;
    Ok((f * x / z + rig.principal.0, f * y / z + rig.principal.1))
}

/// `Z = f T / d`.
pub fn disparity_to_depth(d: usize, rig: &CameraRig) -> Result<f64> {
    if d == 0 {
        return Err(Error::InfiniteDepth);
    }
    Ok(rig.focal_baseline() / d as f64)
}

fn check_window(img: &GrayImage, row: usize, col: isize, half: usize, which: &str) -> Result<()> {
    let h = half as isize;
    let r = row as isize;
    if r - h < 0 || r + h >= img.height() as isize || col - h < 0 || col + h >= img.width() as isize {
        return Err(Error::invalid(format!(
            "{which} window centered at ({row}, {col}) leaves the {}x{} image",
            img.width(),
            img.height()
        )));
    }
    Ok(())
}

fn check_pair(base: &GrayImage, cand: &GrayImage, center: (usize, usize), d: usize, half: usize) -> Result<()> {
    check_window(base, center.0, center.1 as isize, half, "base")?;
    check_window(cand, center.0, center.1 as isize - d as isize, half, "candidate")
}

/// Exact integer sums `(sum b*c, sum b^2, sum c^2)` over the window pair.
#[inline]
fn ncc_sums(base: &GrayImage, cand: &GrayImage, row: usize, col: usize, d: usize, half: usize) -> (u64, u64, u64) {
    let (mut bc, mut bb, mut cc) = (0u64, 0u64, 0u64);
    let w = base.width();
    let (bd, cd) = (base.as_bytes(), cand.as_bytes());
    for r in row - half..=row + half {
        let b_row = &bd[r * w + col - half..=r * w + col + half];
        let c_row = &cd[r * w + col - d - half..=r * w + col - d + half];
        for (&b, &c) in b_row.iter().zip(c_row) {
            let (b, c) = (b as u64, c as u64);
            bc += b * c;
            bb += b * b;
            cc += c * c;
        }
    }
    (bc, bb, cc)
}

#[inline]
fn ncc_from_sums(bc: u64, bb: u64, cc: u64) -> f64 {
    if bb == 0 || cc == 0 {
        0.0
    } else {
        bc as f64 / ((bb as f64) * (cc as f64)).sqrt()
    }
}

#[inline]
fn sad_sum(base: &GrayImage, cand: &GrayImage, row: usize, col: usize, d: usize, half: usize) -> u64 {
    let w = base.width();
    let (bd, cd) = (base.as_bytes(), cand.as_bytes());
    let mut acc = 0u64;
    for r in row - half..=row + half {
        let b_row = &bd[r * w + col - half..=r * w + col + half];
        let c_row = &cd[r * w + col - d - half..=r * w + col - d + half];
        acc += b_row.iter().zip(c_row).map(|(&b, &c)| b.abs_diff(c) as u64).sum::<u64>();
    }
    acc
}

/// Normalized cross correlation between the base window at `center` and the
/// candidate window at `(row, col - d)`; 0 if either window is all zero.
pub fn ncc_score(base: &GrayImage, cand: &GrayImage, center: (usize, usize), d: usize, window_half: usize) -> Result<f64> {
    check_pair(base, cand, center, d, window_half)?;
    let (bc, bb, cc) = ncc_sums(base, cand, center.0, center.1, d, window_half);
    Ok(ncc_from_sums(bc, bb, cc))
}

/// Sum of absolute differences between the same window pair as [`ncc_score`].
pub fn sad_score(base: &GrayImage, cand: &GrayImage, center: (usize, usize), d: usize, window_half: usize) -> Result<f64> {
    check_pair(base, cand, center, d, window_half)?;
    Ok(sad_sum(base, cand, center.0, center.1, d, window_half) as f64)
}

/// Best disparity at one base pixel; `None` if the search range is empty.
fn best_disparity(left: &GrayImage, right: &GrayImage, row: usize, col: usize, p: &MatchParams) -> Option<usize> {
    let hi = p.d_max.min(col - p.window_half);
    if hi < p.d_min {
        return None;
    }
    let h = p.window_half;
    match p.metric {
        Metric::Ncc => {
            let mut best = (f64::NEG_INFINITY, p.d_min);
            for d in p.d_min..=hi {
                let (bc, bb, cc) = ncc_sums(left, right, row, col, d, h);
                let score = ncc_from_sums(bc, bb, cc);
                if score > best.0 {
                    best = (score, d);
                }
            }
            Some(best.1)
        }
        Metric::Sad => {
            let mut best = (u64::MAX, p.d_min);
            for d in p.d_min..=hi {
                let score = sad_sum(left, right, row, col, d, h);
                if score < best.0 {
                    best = (score, d);
                }
            }
            Some(best.1)
        }
    }
}

/// Disparity at every navigation-region pixel marked as obstacle, followed by
/// a 5x5 median (zero padded) evaluated at those same pixels. All other
/// pixels stay 0. Rows are processed in parallel; output does not depend on
/// the schedule.
pub fn compute_disparity(
    left: &GrayImage,
    right: &GrayImage,
    mask: &ObstacleMask,
    region: &NavRegion,
    params: &MatchParams,
) -> Result<DisparityMap> {
    params.validate()?;
    let (w, h) = (left.width(), left.height());
    if (right.width(), right.height()) != (w, h) {
        return Err(Error::mismatch(
            format!("right image {w}x{h}"),
            format!("{}x{}", right.width(), right.height()),
        ));
    }
    if (mask.width(), mask.height()) != (w, h) {
        return Err(Error::mismatch(
            format!("mask {w}x{h}"),
            format!("{}x{}", mask.width(), mask.height()),
        ));
    }

    let spans = region.spans(w, h, params.window_half);
    let rows: Vec<(usize, Vec<(usize, usize)>)> = spans
        .par_iter()
        .map(|&(row, c0, c1)| {
            let found = (c0..=c1)
                .filter(|&c| mask.get(row, c))
                .filter_map(|c| best_disparity(left, right, row, c, params).map(|d| (c, d)))
                .collect();
            (row, found)
        })
        .collect();

    let mut raw = vec![0u8; w * h];
    let mut evaluated = Vec::new();
    for (row, found) in rows {
        for (c, d) in found {
            raw[row * w + c] = d as u8;
            evaluated.push((row, c));
        }
    }

    let mut out = DisparityMap::zeros(w, h, params.d_max);
    for (row, col) in evaluated {
        out.data[row * w + col] = median5(&raw, w, h, row, col);
    }
    Ok(out)
}

fn median5(raw: &[u8], w: usize, h: usize, row: usize, col: usize) -> u8 {
    let mut vals = [0u8; 25];
    let mut n = 0;
    for r in row as isize - 2..=row as isize + 2 {
        for c in col as isize - 2..=col as isize + 2 {
            vals[n] = if r >= 0 && c >= 0 && (r as usize) < h && (c as usize) < w {
                raw[r as usize * w + c as usize]
            } else {
                0
            };
            n += 1;
        }
    }
    vals.sort_unstable();
    vals[12]
}

/// Depth of the largest disparity whose pixel count exceeds
/// `support_threshold`, or [`NO_OBSTACLE_DISTANCE_MM`] if none does.
pub fn nearest_obstacle_distance(map: &DisparityMap, rig: &CameraRig, support_threshold: usize) -> f64 {
    let hist = map.histogram();
    (1..=map.d_max())
        .rev()
        .find(|&d| hist[d] > support_threshold)
        .map(|d| rig.focal_baseline() / d as f64)
        .unwrap_or(NO_OBSTACLE_DISTANCE_MM)
}
