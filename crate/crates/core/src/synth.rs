//! Synthetic inputs with exact ground truth: rectified stereo scenes of
//! fronto-parallel obstacles on a textured floor, and formant-like word
//! utterances.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::FrontEndConfig;
use crate::image::{GrayImage, RgbImage};
use crate::media_io::{AudioSignal, CameraRig};
use crate::obstacle::ObstacleMask;

/// Words the recognizer is trained on, in template order.
pub const VOCABULARY: [&str; 6] = ["front", "back", "right", "left", "reverse", "stop"];

/// Utterance length in seconds.
pub const WORD_SECONDS: f64 = 1.5;

/// Saturated obstacle colors whose value stays in a different histogram bin
/// from the default floor even after texture and blur.
pub const PALETTE: [[u8; 3]; 6] = [
    [128, 26, 26],
    [26, 38, 128],
    [26, 128, 38],
    [128, 120, 26],
    [128, 26, 120],
    [26, 120, 128],
];

/// Fronto-parallel rectangle seen by the left camera at `(top, left)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObstacleSpec {
    pub color: [u8; 3],
    pub depth_mm: f64,
    pub top: usize,
    pub left: usize,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneSpec {
    pub rig: CameraRig,
    pub width: usize,
    pub height: usize,
    /// Gray level of the floor before texture.
    pub floor_level: f64,
    /// Floor texture is uniform in `±floor_texture`, equal on all channels.
    pub floor_texture: f64,
    /// Obstacle texture multiplies the color by `1 ± obstacle_texture`.
    pub obstacle_texture: f64,
    pub seed: u64,
    pub obstacles: Vec<ObstacleSpec>,
    /// Largest disparity the scene may contain.
    pub d_max: usize,
    /// Gain applied to right-image intensities before quantization.
    pub right_gain: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            rig: CameraRig::default(),
            width: 320,
            height: 240,
            floor_level: 30.0,
            floor_texture: 8.0,
            obstacle_texture: 0.15,
            seed: 0,
            obstacles: Vec::new(),
            d_max: 25,
            right_gain: 1.0,
        }
    }
}

impl SceneSpec {
    /// Integer disparity `round(f T / Z)` at which an obstacle is rendered.
    pub fn disparity_of(&self, obstacle: &ObstacleSpec) -> usize {
        (self.rig.focal_baseline() / obstacle.depth_mm).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.rig.validate()?;
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("scene dimensions must be positive"));
        }
        if !(self.right_gain > 0.0) {
            return Err(Error::invalid("right gain must be positive"));
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if !(o.depth_mm > 0.0) || !o.depth_mm.is_finite() {
                return Err(Error::invalid(format!("obstacle {i}: depth must be positive")));
            }
            if o.width == 0 || o.height == 0 || o.left + o.width > self.width || o.top + o.height > self.height {
                return Err(Error::invalid(format!("obstacle {i} does not fit in the frame")));
            }
            let d = self.disparity_of(o);
            if d > self.d_max {
                return Err(Error::DisparityOutOfRange { disparity: d, max: self.d_max });
            }
        }
        Ok(())
    }
}

/// Per-pixel truth in left-image coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    width: usize,
    height: usize,
    d_max: usize,
    depth: Vec<Option<f64>>,
    disparity: Vec<u8>,
}

impl GroundTruth {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// `None` on the floor.
    pub fn depth(&self, row: usize, col: usize) -> Option<f64> {
        self.depth[row * self.width + col]
    }

    /// 0 on the floor.
    pub fn disparity(&self, row: usize, col: usize) -> usize {
        self.disparity[row * self.width + col] as usize
    }

    pub fn is_obstacle(&self, row: usize, col: usize) -> bool {
        self.depth(row, col).is_some()
    }

    pub fn obstacle_mask(&self) -> ObstacleMask {
        ObstacleMask::new(self.width, self.height, self.depth.iter().map(Option::is_some).collect())
            .expect("truth dimensions are valid")
    }

    /// True if some pixel within Chebyshev distance `band` has a different
    /// obstacle/floor label.
    pub fn near_boundary(&self, row: usize, col: usize, band: usize) -> bool {
        let here = self.is_obstacle(row, col);
        let (r0, r1) = (row.saturating_sub(band), (row + band).min(self.height - 1));
        let (c0, c1) = (col.saturating_sub(band), (col + band).min(self.width - 1));
        (r0..=r1).any(|r| (c0..=c1).any(|c| self.is_obstacle(r, c) != here))
    }

    /// Disparity scaled by `255 / d_max`.
    pub fn to_gray(&self) -> GrayImage {
        let scale = if self.d_max == 0 { 0.0 } else { 255.0 / self.d_max as f64 };
        GrayImage::new(
            self.width,
            self.height,
            self.disparity.iter().map(|&d| (d as f64 * scale).round() as u8).collect(),
        )
        .expect("truth dimensions are valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StereoScene {
    pub left: RgbImage,
    pub right: RgbImage,
    pub truth: GroundTruth,
}

fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

fn obstacle_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Renders the left view and a right view in which every obstacle is moved
/// left by its disparity. Obstacles are painted far to near, so nearer ones
/// occlude farther ones in both views. The floor is at infinity (zero
/// disparity) and identical in both views.
pub fn render_stereo_scene(spec: &SceneSpec) -> Result<StereoScene> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let floor: Vec<f64> = (0..w * h)
        .map(|_| spec.floor_level + rng.random_range(-spec.floor_texture..=spec.floor_texture))
        .collect();
    let mut left: Vec<[f64; 3]> = floor.iter().map(|&v| [v; 3]).collect();
    let mut right = left.clone();
    let mut depth = vec![None; w * h];
    let mut disparity = vec![0u8; w * h];

    let mut order: Vec<usize> = (0..spec.obstacles.len()).collect();
    order.sort_by(|&a, &b| spec.obstacles[b].depth_mm.total_cmp(&spec.obstacles[a].depth_mm));
    for i in order {
        let o = &spec.obstacles[i];
        let d = spec.disparity_of(o);
        let mut rng = obstacle_rng(spec.seed, i);
        for r in o.top..o.top + o.height {
            for c in o.left..o.left + o.width {
                let k = 1.0 + rng.random_range(-spec.obstacle_texture..=spec.obstacle_texture);
                let px = o.color.map(|ch| ch as f64 * k);
                left[r * w + c] = px;
                depth[r * w + c] = Some(o.depth_mm);
                disparity[r * w + c] = d as u8;
                if c >= d {
                    right[r * w + c - d] = px;
                }
            }
        }
    }

    let to_rgb = |px: &[[f64; 3]], gain: f64| {
        let bytes = px.iter().flat_map(|p| p.map(|v| quantize(v * gain))).collect();
        RgbImage::new(w, h, bytes)
    };
    Ok(StereoScene {
        left: to_rgb(&left, 1.0)?,
        right: to_rgb(&right, spec.right_gain)?,
        truth: GroundTruth { width: w, height: h, d_max: spec.d_max, depth, disparity },
    })
}

/// A 320x240 scene with `count` non-overlapping obstacles in the band above
/// the default floor reference area and inside the navigation region, at
/// random depths with disparity in `5..=25`.
pub fn random_scene(seed: u64, count: usize) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = SceneSpec { seed, ..Default::default() };
    let mut placed: Vec<ObstacleSpec> = Vec::new();
    let mut attempts = 0;
    while placed.len() < count && attempts < 1000 {
        attempts += 1;
        let width = rng.random_range(30..=60);
        let height = rng.random_range(25..=40);
        let top = rng.random_range(125..=170 - height);
        let left = rng.random_range(80..=240 - width);
        let d = rng.random_range(5..=25);
        let color = PALETTE[rng.random_range(0..PALETTE.len())];
        let o = ObstacleSpec {
            color,
            depth_mm: spec.rig.focal_baseline() / d as f64,
            top,
            left,
            width,
            height,
        };
        // keep a floor gap wide enough that borders never merge
        let gap = 12;
        let clear = placed.iter().all(|p| {
            o.left + o.width + gap <= p.left
                || p.left + p.width + gap <= o.left
                || o.top + o.height + gap <= p.top
                || p.top + p.height + gap <= o.top
        });
        if clear {
            placed.push(o);
        }
    }
    spec.obstacles = placed;
    spec
}

/// Two formant triples per word (first and second syllable), in Hz.
fn formants(label: &str) -> Option<[[f64; 3]; 2]> {
    Some(match label {
        "front" => [[310.0, 1020.0, 2250.0], [640.0, 1190.0, 2390.0]],
        "back" => [[720.0, 1240.0, 2480.0], [450.0, 1750.0, 2900.0]],
        "right" => [[520.0, 1380.0, 1690.0], [300.0, 2200.0, 3000.0]],
        "left" => [[400.0, 1900.0, 2550.0], [650.0, 1550.0, 2700.0]],
        "reverse" => [[350.0, 2100.0, 2800.0], [600.0, 900.0, 2300.0]],
        "stop" => [[500.0, 880.0, 2600.0], [380.0, 1100.0, 3200.0]],
        _ => return None,
    })
}

/// Deterministic 1.5 s utterance of a vocabulary word: two syllables of three
/// sinusoidal formants under smooth envelopes over a low noise bed. The seed
/// jitters formant frequencies by up to ±1 %, the phases, and the noise.
pub fn synth_word(label: &str, seed: u64, config: &FrontEndConfig) -> Result<AudioSignal> {
    let triples = formants(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
    let fs = config.sample_rate as f64;
    if 2.0 * triples.iter().flatten().fold(0.0f64, |a, &b| a.max(b)) * 1.01 >= fs {
        return Err(Error::invalid(format!(
            "sample rate {} Hz too low for the synthetic formants",
            config.sample_rate
        )));
    }
    let n = (WORD_SECONDS * fs).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tones = Vec::new();
    for (syllable, triple) in triples.iter().enumerate() {
        for (k, &f) in triple.iter().enumerate() {
            let f = f * (1.0 + rng.random_range(-0.01..=0.01));
            let phase = rng.random_range(0.0..2.0 * PI);
            // first formant strongest
            let amp = [0.3, 0.18, 0.1][k];
            tones.push((syllable, f, phase, amp));
        }
    }
    // syllable windows in seconds
    let windows = [(0.15, 0.70), (0.80, 1.35)];
    let envelope = |t: f64, (a, b): (f64, f64)| -> f64 {
        if t <= a || t >= b {
            0.0
        } else {
            (PI * (t - a) / (b - a)).sin().powi(2)
        }
    };
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            let voiced: f64 = tones
                .iter()
                .map(|&(s, f, ph, a)| a * envelope(t, windows[s]) * (2.0 * PI * f * t + ph).sin())
                .sum();
            voiced + rng.random_range(-0.002..=0.002)
        })
        .collect();
    AudioSignal::new(config.sample_rate, samples)
}
