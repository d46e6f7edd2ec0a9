//! Acoustic front end: framing, Hamming-windowed power spectra, mel
//! filterbank pooling, energy-normalized log-mel matrices, MFCC and
//! cepstral smoothing.

mod cepstrum;
mod matrix;
mod mel;
mod spectrum;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::media_io::AudioSignal;

pub use cepstrum::{cepstral_smooth, cepstrum, cepstrum_cosine};
pub use matrix::MelMatrix;
pub use mel::{freq_of_mel, mel_filter_matrix, mel_of_freq, mel_spectrogram, mfcc, MelFilterBank};
pub use spectrum::{
    frame_count, frame_energy, frame_power_spectrum, hamming, pre_emphasis, PowerSpectrumFrames,
};

/// Which matrix the recognizer consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    /// Energy-normalized log mel channel values (`K x frames`).
    #[default]
    LogMel,
    /// Cosine transform of the log-mel columns (`Q x frames`).
    Mfcc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontEndConfig {
    pub sample_rate: u32,
    /// DFT length `N`; must be a power of two.
    pub fft_len: usize,
    /// Hop between frame starts, in samples.
    pub frame_shift: usize,
    /// Number of mel channels `K`.
    pub mel_channels: usize,
    /// Floor for the energy divisor and for the log argument.
    pub log_floor: f64,
    pub preemphasis: bool,
    pub preemphasis_coeff: f64,
    /// Number of cepstral coefficients `Q` kept by [`mfcc`].
    pub mfcc_count: usize,
    pub kind: FeatureKind,
}

impl Default for FrontEndConfig {
    fn default() -> Self {
        Self {
            sample_rate: 8000,
            fft_len: 256,
            frame_shift: 80,
            mel_channels: 22,
            log_floor: 1e-4,
            preemphasis: false,
            preemphasis_coeff: 0.97,
            mfcc_count: 13,
            kind: FeatureKind::LogMel,
        }
    }
}

impl FrontEndConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if !self.fft_len.is_power_of_two() || self.fft_len < 4 {
            return Err(Error::invalid(format!(
                "fft length must be a power of two >= 4, got {}",
                self.fft_len
            )));
        }
        if self.frame_shift == 0 {
            return Err(Error::invalid("frame shift must be at least 1"));
        }
        if self.mel_channels < 2 {
            return Err(Error::invalid("need at least 2 mel channels"));
        }
        if !(self.log_floor > 0.0) {
            return Err(Error::invalid("log floor must be positive"));
        }
        if self.mfcc_count == 0 || self.mfcc_count > self.mel_channels {
            return Err(Error::invalid(format!(
                "mfcc count must be in 1..={}, got {}",
                self.mel_channels, self.mfcc_count
            )));
        }
        Ok(())
    }

    /// Feature rows produced by [`extract_features`].
    pub fn feature_rows(&self) -> usize {
        match self.kind {
            FeatureKind::LogMel => self.mel_channels,
            FeatureKind::Mfcc => self.mfcc_count,
        }
    }
}

/// Runs the configured front end on an utterance.
pub fn extract_features(signal: &AudioSignal, config: &FrontEndConfig) -> Result<MelMatrix> {
    let log_mel = mel_spectrogram(signal, config)?;
    match config.kind {
        FeatureKind::LogMel => Ok(log_mel),
        FeatureKind::Mfcc => mfcc(&log_mel, config.mfcc_count),
    }
}
