use super::spectrum::{frame_power_spectrum, pre_emphasis};
use super::{FrontEndConfig, MelMatrix};
use crate::error::{Error, Result};
use crate::media_io::AudioSignal;

/// `2595 log10(1 + f / 700)`.
pub fn mel_of_freq(hz: f64) -> Result<f64> {
    if !(hz >= 0.0) {
        return Err(Error::invalid(format!("frequency must be non-negative, got {hz}")));
    }
    Ok(2595.0 * (1.0 + hz / 700.0).log10())
}

/// Inverse of [`mel_of_freq`]: `700 (10^(m / 2595) - 1)`.
pub fn freq_of_mel(mel: f64) -> Result<f64> {
    if !(mel >= 0.0) {
        return Err(Error::invalid(format!("mel value must be non-negative, got {mel}")));
    }
    Ok(700.0 * (10f64.powf(mel / 2595.0) - 1.0))
}

/// `K x N/2` matrix of triangular weights, each row normalized to unit sum.
///
/// Column `n` is DFT bin `n`. Channel centers are equally spaced on the mel
/// axis at `c * mel(fs/2) / (K + 1)`, `c = 1..=K`, rounded to the nearest
/// bin; each triangle spans from the previous center (bin 1 for the first
/// channel) to the next center (bin `N/2` for the last).
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterBank {
    channels: usize,
    bins: usize,
    centers: Vec<usize>,
    weights: Vec<f64>,
}

impl MelFilterBank {
    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Center bin of each channel.
    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn row(&self, channel: usize) -> &[f64] {
        &self.weights[channel * self.bins..(channel + 1) * self.bins]
    }

    /// `G(k) = sum_n w(k, n) * power(n)`.
    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        debug_assert_eq!(power.len(), self.bins);
        (0..self.channels)
            .map(|c| self.row(c).iter().zip(power).map(|(w, p)| w * p).sum())
            .collect()
    }
}

pub fn mel_filter_matrix(config: &FrontEndConfig) -> Result<MelFilterBank> {
    config.validate()?;
    let k = config.mel_channels;
    let bins = config.fft_len / 2;
    let df = config.sample_rate as f64 / config.fft_len as f64;
    let mel_inc = mel_of_freq(config.sample_rate as f64 / 2.0)? / (k + 1) as f64;
    let centers = (1..=k)
        .map(|c| freq_of_mel(c as f64 * mel_inc).map(|f| (f / df).round() as usize))
        .collect::<Result<Vec<_>>>()?;

    let mut weights = vec![0.0; k * bins];
    for c in 0..k {
        let start = if c == 0 { 1 } else { centers[c - 1] };
        let center = centers[c];
        let stop = if c + 1 == k { bins } else { centers[c + 1] };
        if !(start < center && center < stop) {
            return Err(Error::invalid(format!(
                "{k} mel channels too many for a {}-point DFT: channel {} spans bins {start}..{center}..{stop}",
                config.fft_len,
                c + 1
            )));
        }
        let row = &mut weights[c * bins..(c + 1) * bins];
        let rise = (center - start) as f64;
        for (i, w) in row.iter_mut().enumerate().take(center + 1).skip(start) {
            *w = (i - start) as f64 / rise;
        }
        let fall = (stop - center) as f64;
        for (i, w) in row.iter_mut().enumerate().take(stop).skip(center) {
            *w = 1.0 - (i - center) as f64 / fall;
        }
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|w| *w /= sum);
    }
    Ok(MelFilterBank {
        channels: k,
        bins,
        centers,
        weights,
    })
}

/// Energy-normalized log-mel matrix (`K x frames`).
///
/// Each frame's mel energies are divided by the frame energy (floored at
/// the log floor) and mapped through `ln(max(x, floor))`.
pub fn mel_spectrogram(signal: &AudioSignal, config: &FrontEndConfig) -> Result<MelMatrix> {
    config.validate()?;
    if signal.sample_rate() != config.sample_rate {
        return Err(Error::invalid(format!(
            "signal sampled at {} Hz, front end configured for {} Hz",
            signal.sample_rate(),
            config.sample_rate
        )));
    }
    let bank = mel_filter_matrix(config)?;
    let emphasized;
    let samples = if config.preemphasis {
        emphasized = pre_emphasis(signal.samples(), config.preemphasis_coeff);
        &emphasized[..]
    } else {
        signal.samples()
    };
    let spectra = frame_power_spectrum(samples, config)?;
    let floor = config.log_floor;
    let frames = (0..spectra.frames())
        .map(|k| {
            let e = spectra.energy()[k].max(floor);
            bank.apply(spectra.frame(k))
                .into_iter()
                .map(|g| (g / e).max(floor).ln())
                .collect()
        })
        .collect();
    MelMatrix::from_frames(config.mel_channels, frames)
}

/// Cosine transform of each log-mel column:
/// `c(q) = sum_k L(k) cos(pi q (2k + 1) / 2K)`, `q = 0..count`.
pub fn mfcc(log_mel: &MelMatrix, count: usize) -> Result<MelMatrix> {
    let k = log_mel.channels();
    if count == 0 || count > k {
        return Err(Error::invalid(format!(
            "cepstral count must be in 1..={k}, got {count}"
        )));
    }
    let basis: Vec<Vec<f64>> = (0..count)
        .map(|q| {
            (0..k)
                .map(|ch| {
                    (std::f64::consts::PI * (q * (2 * ch + 1)) as f64 / (2 * k) as f64).cos()
                })
                .collect()
        })
        .collect();
    let frames = log_mel
        .iter_frames()
        .map(|col| {
            basis
                .iter()
                .map(|b| b.iter().zip(col).map(|(w, v)| w * v).sum())
                .collect()
        })
        .collect();
    MelMatrix::from_frames(count, frames)
}
