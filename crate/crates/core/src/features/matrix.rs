use crate::error::{Error, Result};

/// Feature matrix with `channels` rows and `frames` columns.
///
/// Storage is frame-major so that each column (one frame's feature vector)
/// is a contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct MelMatrix {
    channels: usize,
    frames: usize,
    data: Vec<f64>,
}

impl MelMatrix {
    pub fn from_frames(channels: usize, frames: Vec<Vec<f64>>) -> Result<Self> {
        if channels == 0 || frames.is_empty() {
            return Err(Error::invalid("feature matrix needs at least one channel and one frame"));
        }
        let n = frames.len();
        let mut data = Vec::with_capacity(channels * n);
        for (k, f) in frames.into_iter().enumerate() {
            if f.len() != channels {
                return Err(Error::mismatch(
                    format!("{channels} values per frame"),
                    format!("{} in frame {k}", f.len()),
                ));
            }
            data.extend(f);
        }
        Self::check_finite(&data)?;
        Ok(Self {
            channels,
            frames: n,
            data,
        })
    }

    /// Builds from `channels` rows of equal length.
    pub fn from_channel_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let channels = rows.len();
        let frames = rows.first().map_or(0, Vec::len);
        if channels == 0 || frames == 0 {
            return Err(Error::invalid("feature matrix needs at least one channel and one frame"));
        }
        if let Some((c, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != frames) {
            return Err(Error::mismatch(
                format!("{frames} frames"),
                format!("{} in channel {c}", r.len()),
            ));
        }
        let mut data = vec![0.0; channels * frames];
        for (c, row) in rows.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                data[k * channels + c] = *v;
            }
        }
        Self::check_finite(&data)?;
        Ok(Self {
            channels,
            frames,
            data,
        })
    }

    fn check_finite(data: &[f64]) -> Result<()> {
        if data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("feature matrix entries must be finite"))
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    #[inline]
    pub fn get(&self, channel: usize, frame: usize) -> f64 {
        self.data[frame * self.channels + channel]
    }

    /// Feature vector of one frame.
    #[inline]
    pub fn frame(&self, k: usize) -> &[f64] {
        &self.data[k * self.channels..(k + 1) * self.channels]
    }

    pub fn iter_frames(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.channels)
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// Applies `f` to every entry.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let data: Vec<f64> = self.data.iter().map(|&v| f(v)).collect();
        Self::check_finite(&data)?;
        Ok(Self {
            channels: self.channels,
            frames: self.frames,
            data,
        })
    }
}
