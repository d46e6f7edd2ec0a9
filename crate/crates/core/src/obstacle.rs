//! Appearance-based ground/obstacle segmentation of a single color frame.
//!
//! The area just in front of the chair is assumed to be free floor. Hue and
//! value histograms of that reference area describe what "ground" looks
//! like; every pixel whose hue or value falls into a bin that is rare in the
//! reference area is labelled an obstacle.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::{GrayImage, RgbImage};

/// Number of histogram bins for hue and value.
pub const BINS: usize = 5;

/// Lower bin edges; the top bin is closed at 1.0.
pub const BIN_EDGES: [f64; BINS] = [0.0, 0.2001, 0.4001, 0.6001, 0.8001];

/// Hue value marking a pixel whose hue is undefined (too dark or too gray).
pub const HUE_INVALID: f64 = 2.0;

const MIN_VALUE: f64 = 0.05;
const MIN_SATURATION: f64 = 0.1;

/// Per-pixel hue, saturation and value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HsvImage {
    width: usize,
    height: usize,
    hue: Vec<f64>,
    sat: Vec<f64>,
    val: Vec<f64>,
}

impl HsvImage {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `(h, s, v)`; `h == HUE_INVALID` when the hue is not usable.
    pub fn pixel(&self, row: usize, col: usize) -> (f64, f64, f64) {
        let i = row * self.width + col;
        (self.hue[i], self.sat[i], self.val[i])
    }
}

/// Binary mask, `true` = obstacle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstacleMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl ObstacleMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::mismatch(width * height, bits.len()));
        }
        Ok(Self { width, height, bits })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: bool) {
        self.bits[row * self.width + col] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Obstacle pixels as 255, ground as 0.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage::new(
            self.width,
            self.height,
            self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        )
        .expect("mask dimensions are valid")
    }

    /// Inverse of [`to_gray`](Self::to_gray); any non-zero byte is an obstacle.
    pub fn from_gray(image: &GrayImage) -> Self {
        Self {
            width: image.width(),
            height: image.height(),
            bits: image.as_bytes().iter().map(|&v| v != 0).collect(),
        }
    }

    /// Left-right mirror.
    pub fn mirrored(&self) -> Self {
        let mut out = Self::zeros(self.width, self.height);
        for r in 0..self.height {
            for c in 0..self.width {
                out.set(r, self.width - 1 - c, self.get(r, c));
            }
        }
        out
    }
}

/// Reference area assumed to contain only floor. Rows and columns are
/// inclusive, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RegionSpec {
    Rectangle {
        row0: usize,
        row1: usize,
        col0: usize,
        col1: usize,
    },
    /// Widens by one column on each side per row below `top_row`.
    Trapezoid {
        top_row: usize,
        bottom_row: usize,
        top_col0: usize,
        top_col1: usize,
    },
}

impl Default for RegionSpec {
    /// Bottom band of a 320x240 frame: rows 180..=239, columns 20..=299.
    fn default() -> Self {
        RegionSpec::Rectangle {
            row0: 180,
            row1: 239,
            col0: 20,
            col1: 299,
        }
    }
}

impl RegionSpec {
    /// Inclusive column span of `row`, or `None` if the row is outside.
    pub fn row_span(&self, row: usize) -> Option<(usize, usize)> {
        match *self {
            RegionSpec::Rectangle { row0, row1, col0, col1 } => {
                (row0..=row1).contains(&row).then_some((col0, col1))
            }
            RegionSpec::Trapezoid { top_row, bottom_row, top_col0, top_col1 } => {
                if !(top_row..=bottom_row).contains(&row) {
                    return None;
                }
                let k = row - top_row;
                Some((top_col0.checked_sub(k)?, top_col1 + k))
            }
        }
    }

    fn rows(&self) -> (usize, usize) {
        match *self {
            RegionSpec::Rectangle { row0, row1, .. } => (row0, row1),
            RegionSpec::Trapezoid { top_row, bottom_row, .. } => (top_row, bottom_row),
        }
    }

    /// Checks the region is non-empty and inside a `width x height` frame.
    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        let (r0, r1) = self.rows();
        if r0 > r1 {
            return Err(Error::invalid(format!("empty region: rows {r0}..={r1}")));
        }
        if r1 >= height {
            return Err(Error::invalid(format!(
                "region rows {r0}..={r1} exceed image height {height}"
            )));
        }
        for row in r0..=r1 {
            let (c0, c1) = self.row_span(row).ok_or_else(|| {
                Error::invalid(format!("region row {row} extends past the left edge"))
            })?;
            if c0 > c1 {
                return Err(Error::invalid(format!("empty region: columns {c0}..={c1}")));
            }
            if c1 >= width {
                return Err(Error::invalid(format!(
                    "region columns {c0}..={c1} exceed image width {width}"
                )));
            }
        }
        Ok(())
    }

    /// All `(row, col)` inside the region, row-major.
    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (r0, r1) = self.rows();
        (r0..=r1).flat_map(move |r| {
            let (c0, c1) = self.row_span(r).unwrap_or((1, 0));
            (c0..=c1).map(move |c| (r, c))
        })
    }
}

/// Hue and value histograms of the reference area.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramPair {
    /// Raw counts of valid-hue pixels per hue bin.
    pub hue_counts: [u32; BINS],
    /// Raw counts of all region pixels per value bin.
    pub val_counts: [u32; BINS],
    /// Smoothed hue histogram.
    pub hue_bins: [f64; BINS],
    /// Smoothed value histogram.
    pub val_bins: [f64; BINS],
    pub hue_threshold: f64,
    pub val_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectConfig {
    /// Odd side of the median window applied to the raw mask.
    pub median_window: usize,
    /// A bin is "rare" below `max(bins) / threshold_divisor`.
    pub threshold_divisor: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            median_window: 9,
            threshold_divisor: 50.0,
        }
    }
}

/// 5x5 binomial blur (outer product of `[1 4 6 4 1] / 16`) per channel,
/// edge-replicated borders, rounded half up.
pub fn gaussian5x5(image: &RgbImage) -> Result<RgbImage> {
    const K: [u32; 5] = [1, 4, 6, 4, 1];
    let (w, h) = (image.width(), image.height());
    if w < 5 || h < 5 {
        return Err(Error::invalid(format!(
            "image {w}x{h} is smaller than the 5x5 kernel"
        )));
    }
    let src = image.as_bytes();
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    // horizontal pass, weights sum to 16
    let mut tmp = vec![0u32; w * h * 3];
    tmp.par_chunks_mut(w * 3).enumerate().for_each(|(r, out)| {
        for c in 0..w {
            for ch in 0..3 {
                let mut acc = 0;
                for (t, k) in K.iter().enumerate() {
                    let cc = clamp(c as isize + t as isize - 2, w);
                    acc += k * src[(r * w + cc) * 3 + ch] as u32;
                }
                out[c * 3 + ch] = acc;
            }
        }
    });
    // vertical pass, total weight 256
    let mut out = vec![0u8; w * h * 3];
    out.par_chunks_mut(w * 3).enumerate().for_each(|(r, row)| {
        for i in 0..w * 3 {
            let mut acc = 0;
            for (t, k) in K.iter().enumerate() {
                let rr = clamp(r as isize + t as isize - 2, h);
                acc += k * tmp[rr * w * 3 + i];
            }
            row[i] = ((acc + 128) / 256) as u8;
        }
    });
    RgbImage::new(w, h, out)
}

/// Hexcone HSV for one pixel, hue scaled to `[0, 1)`, with the invalid-hue
/// rule applied.
pub fn hsv_pixel([r, g, b]: [u8; 3]) -> (f64, f64, f64) {
    let (r, g, b) = (r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        let h = (g - b) / delta / 6.0;
        if h < 0.0 {
            h + 1.0
        } else {
            h
        }
    } else if max == g {
        (2.0 + (b - r) / delta) / 6.0
    } else {
        (4.0 + (r - g) / delta) / 6.0
    };
    let h = if v <= MIN_VALUE || s <= MIN_SATURATION {
        HUE_INVALID
    } else {
        h
    };
    (h, s, v)
}

pub fn rgb_to_hsv(image: &RgbImage) -> HsvImage {
    let n = image.width() * image.height();
    let mut hue = Vec::with_capacity(n);
    let mut sat = Vec::with_capacity(n);
    let mut val = Vec::with_capacity(n);
    for p in image.pixels() {
        let (h, s, v) = hsv_pixel(p);
        hue.push(h);
        sat.push(s);
        val.push(v);
    }
    HsvImage {
        width: image.width(),
        height: image.height(),
        hue,
        sat,
        val,
    }
}

/// Zero-based bin of `x` in `[0, 1]`.
pub fn bin_index(x: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("bin input {x} outside [0, 1]")));
    }
    Ok(bin_of(x))
}

#[inline]
fn bin_of(x: f64) -> usize {
    BIN_EDGES.iter().rposition(|&e| x >= e).unwrap_or(0)
}

/// Centered 3-tap mean; the end bins average their two available taps.
fn smooth(counts: &[u32; BINS]) -> [f64; BINS] {
    let mut out = [0.0; BINS];
    for (i, o) in out.iter_mut().enumerate() {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(BINS - 1);
        let sum: u32 = counts[lo..=hi].iter().sum();
        *o = sum as f64 / (hi - lo + 1) as f64;
    }
    out
}

fn max_of(bins: &[f64; BINS]) -> f64 {
    bins.iter().copied().fold(0.0, f64::max)
}

pub fn build_reference_histograms(
    hsv: &HsvImage,
    region: &RegionSpec,
    threshold_divisor: f64,
) -> Result<HistogramPair> {
    region.validate(hsv.width, hsv.height)?;
    let mut hue_counts = [0u32; BINS];
    let mut val_counts = [0u32; BINS];
    for (r, c) in region.pixels() {
        let (h, _, v) = hsv.pixel(r, c);
        val_counts[bin_of(v)] += 1;
        if h != HUE_INVALID {
            hue_counts[bin_of(h)] += 1;
        }
    }
    let hue_bins = smooth(&hue_counts);
    let val_bins = smooth(&val_counts);
    Ok(HistogramPair {
        hue_counts,
        val_counts,
        hue_threshold: max_of(&hue_bins) / threshold_divisor,
        val_threshold: max_of(&val_bins) / threshold_divisor,
        hue_bins,
        val_bins,
    })
}

/// Obstacle if the value bin is rare, or the hue is valid and its bin rare.
#[inline]
pub fn is_obstacle(h: f64, v: f64, hist: &HistogramPair) -> bool {
    hist.val_bins[bin_of(v)] < hist.val_threshold
        || (h != HUE_INVALID && hist.hue_bins[bin_of(h)] < hist.hue_threshold)
}

pub fn classify_pixels(hsv: &HsvImage, hist: &HistogramPair) -> ObstacleMask {
    let bits = hsv
        .hue
        .par_iter()
        .zip(hsv.val.par_iter())
        .map(|(&h, &v)| is_obstacle(h, v, hist))
        .collect();
    ObstacleMask {
        width: hsv.width,
        height: hsv.height,
        bits,
    }
}

/// Binary median (majority vote) over a `k x k` window, zero padding.
pub fn median_filter(mask: &ObstacleMask, k: usize) -> Result<ObstacleMask> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::invalid(format!("median window must be odd, got {k}")));
    }
    let (w, h) = (mask.width, mask.height);
    // summed-area table with a zero border row/column
    let mut sat = vec![0u32; (w + 1) * (h + 1)];
    for r in 0..h {
        let mut row_sum = 0;
        for c in 0..w {
            row_sum += mask.get(r, c) as u32;
            sat[(r + 1) * (w + 1) + c + 1] = sat[r * (w + 1) + c + 1] + row_sum;
        }
    }
    let half = k / 2;
    let majority = (k * k / 2) as u32;
    let mut bits = vec![false; w * h];
    bits.par_chunks_mut(w).enumerate().for_each(|(r, row)| {
        let r0 = r.saturating_sub(half);
        let r1 = (r + half + 1).min(h);
        for (c, bit) in row.iter_mut().enumerate() {
            let c0 = c.saturating_sub(half);
            let c1 = (c + half + 1).min(w);
            let ones = sat[r1 * (w + 1) + c1] + sat[r0 * (w + 1) + c0]
                - sat[r0 * (w + 1) + c1]
                - sat[r1 * (w + 1) + c0];
            *bit = ones > majority;
        }
    });
    Ok(ObstacleMask { width: w, height: h, bits })
}

/// Blur, convert to HSV, histogram the reference area, classify and clean up.
pub fn detect_obstacles(image: &RgbImage, region: &RegionSpec, config: &DetectConfig) -> Result<ObstacleMask> {
    region.validate(image.width(), image.height())?;
    let blurred = gaussian5x5(image)?;
    let hsv = rgb_to_hsv(&blurred);
    let hist = build_reference_histograms(&hsv, region, config.threshold_divisor)?;
    let raw = classify_pixels(&hsv, &hist);
    median_filter(&raw, config.median_window)
}
