use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::FrontEndConfig;
use crate::error::{Error, Result};

/// `s'(0) = s(0)`, `s'(k) = s(k) - coeff * s(k-1)`.
pub fn pre_emphasis(samples: &[f64], coeff: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    if let Some(&first) = samples.first() {
        out.push(first);
    }
    out.extend(samples.windows(2).map(|w| w[1] - coeff * w[0]));
    out
}

/// `N`-point Hamming window, `0.54 - 0.46 cos(2 pi n / (N - 1))`.
pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let denom = (n - 1) as f64;
    (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / denom).cos())
        .collect()
}

/// Sum of squares of a frame.
pub fn frame_energy(frame: &[f64]) -> f64 {
    frame.iter().map(|s| s * s).sum()
}

/// Frames that fit in `len` samples: `floor((len - N) / shift) + 1`, or 0.
pub fn frame_count(len: usize, fft_len: usize, shift: usize) -> usize {
    if len < fft_len {
        0
    } else {
        (len - fft_len) / shift + 1
    }
}

/// Short-term power spectra, one row of `N/2` bins per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrumFrames {
    bins: usize,
    data: Vec<f64>,
    energy: Vec<f64>,
}

impl PowerSpectrumFrames {
    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn frames(&self) -> usize {
        self.energy.len()
    }

    pub fn frame(&self, k: usize) -> &[f64] {
        &self.data[k * self.bins..(k + 1) * self.bins]
    }

    /// Per-frame energy: the row sum of the windowed power spectrum.
    pub fn energy(&self) -> &[f64] {
        &self.energy
    }
}

/// Hamming-windowed `|DFT|^2` of every frame, bins `0..N/2`.
pub fn frame_power_spectrum(samples: &[f64], config: &FrontEndConfig) -> Result<PowerSpectrumFrames> {
    config.validate()?;
    let n = config.fft_len;
    let frames = frame_count(samples.len(), n, config.frame_shift);
    if frames == 0 {
        return Err(Error::invalid(format!(
            "signal of {} samples is shorter than one {n}-sample frame",
            samples.len()
        )));
    }
    let window = hamming(n);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let bins = n / 2;
    let mut data = Vec::with_capacity(frames * bins);
    let mut energy = Vec::with_capacity(frames);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for k in 0..frames {
        let start = k * config.frame_shift;
        for (slot, (s, w)) in buf
            .iter_mut()
            .zip(samples[start..start + n].iter().zip(&window))
        {
            *slot = Complex::new(s * w, 0.0);
        }
        fft.process(&mut buf);
        let row_start = data.len();
        data.extend(buf[..bins].iter().map(|c| c.norm_sqr()));
        energy.push(data[row_start..].iter().sum());
    }
    Ok(PowerSpectrumFrames { bins, data, energy })
}
