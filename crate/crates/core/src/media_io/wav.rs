//! 16-bit PCM mono WAV input, plus a plain-text sample format used for
//! synthesized utterances.

use std::io::Cursor;
use std::path::Path;

use super::{read_file, write_file};
use crate::error::{Error, Result};

/// Mono audio with samples normalized to `[-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    sample_rate: u32,
    samples: Vec<f64>,
}

impl AudioSignal {
    pub fn new(sample_rate: u32, samples: Vec<f64>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if let Some((i, s)) = samples
            .iter()
            .enumerate()
            .find(|(_, s)| !(-1.0..1.0).contains(*s))
        {
            return Err(Error::invalid(format!(
                "sample {i} = {s} outside [-1, 1)"
            )));
        }
        Ok(Self {
            sample_rate,
            samples,
        })
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Multiplies every sample by `gain`; fails if the result leaves `[-1, 1)`.
    pub fn scaled(&self, gain: f64) -> Result<Self> {
        Self::new(
            self.sample_rate,
            self.samples.iter().map(|s| s * gain).collect(),
        )
    }
}

pub fn decode_wav(bytes: &[u8]) -> Result<AudioSignal> {
    let reader = hound::WavReader::new(Cursor::new(bytes))
        .map_err(|e| Error::Wav(format!("not a readable RIFF/WAVE PCM file: {e}")))?;
    let spec = reader.spec();
    if spec.sample_format != hound::SampleFormat::Int {
        return Err(Error::Wav("non-PCM format; 16-bit integer PCM required".into()));
    }
    if spec.channels != 1 {
        return Err(Error::Wav(format!(
            "mono required, file has {} channels",
            spec.channels
        )));
    }
    if spec.bits_per_sample != 16 {
        return Err(Error::Wav(format!(
            "16-bit samples required, file has {} bits",
            spec.bits_per_sample
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| v as f64 / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Wav(format!("corrupt sample data: {e}")))?;
    AudioSignal::new(spec.sample_rate, samples)
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioSignal> {
    decode_wav(&read_file(path.as_ref())?)
}

/// 16-bit mono PCM encoding; samples are rounded to the nearest step of
/// 1/32768, so [`decode_wav`] returns them within half a step.
pub fn encode_wav(signal: &AudioSignal) -> Result<Vec<u8>> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate(),
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut cursor = Cursor::new(Vec::new());
    let wav_err = |e: hound::Error| Error::Wav(e.to_string());
    let mut writer = hound::WavWriter::new(&mut cursor, spec).map_err(wav_err)?;
    for &s in signal.samples() {
        let q = (s * 32768.0).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        writer.write_sample(q).map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)?;
    Ok(cursor.into_inner())
}

pub fn write_wav(path: impl AsRef<Path>, signal: &AudioSignal) -> Result<()> {
    write_file(path.as_ref(), &encode_wav(signal)?)
}

/// Reads a text file with one sample per line. An optional first line
/// `# sample_rate <hz>` overrides `default_rate`; other `#` lines are ignored.
pub fn read_raw_samples(path: impl AsRef<Path>, default_rate: u32) -> Result<AudioSignal> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::Wav(format!("{}: raw sample file is not UTF-8", path.display())))?;
    let mut rate = default_rate;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("sample_rate") {
                rate = v.trim().parse().map_err(|_| {
                    Error::Wav(format!("line {}: bad sample rate '{}'", lineno + 1, v.trim()))
                })?;
            }
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::Wav(format!("line {}: not a number: '{line}'", lineno + 1)))?;
        samples.push(v);
    }
    AudioSignal::new(rate, samples).map_err(|e| Error::Wav(e.to_string()))
}

/// Canonical text form read back by [`read_raw_samples`].
pub fn encode_raw_samples(signal: &AudioSignal) -> String {
    let mut out = format!("# sample_rate {}\n", signal.sample_rate());
    for s in signal.samples() {
        out.push_str(&format!("{s}\n"));
    }
    out
}
