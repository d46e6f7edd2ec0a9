//! Stereo rig calibration as a `key = value` text file.
//!
//! Required keys: `focal_px`, `baseline_mm`, `cx`, `cy`. Optional lens
//! distortion keys `k1`, `k2`, `p1`, `p2` default to zero; they are stored
//! but not applied anywhere. Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::{read_file, write_file};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CameraRig {
    /// Focal length in pixels.
    pub focal_px: f64,
    /// Distance between the two optical centers in millimetres.
    pub baseline_mm: f64,
    /// Principal point `(x0, y0)` in pixels.
    pub principal: (f64, f64),
    /// Radial `k1, k2` and tangential `p1, p2` coefficients.
    pub distortion: [f64; 4],
}

impl CameraRig {
    pub fn new(focal_px: f64, baseline_mm: f64, principal: (f64, f64)) -> Result<Self> {
        let rig = Self {
            focal_px,
            baseline_mm,
            principal,
            distortion: [0.0; 4],
        };
        rig.validate()?;
        Ok(rig)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.focal_px > 0.0 && self.focal_px.is_finite()) {
            return Err(Error::Calibration(format!(
                "focal length must be positive, got {}",
                self.focal_px
            )));
        }
        if !(self.baseline_mm > 0.0 && self.baseline_mm.is_finite()) {
            return Err(Error::Calibration(format!(
                "baseline must be positive, got {}",
                self.baseline_mm
            )));
        }
        Ok(())
    }

    /// `f * T`, the numerator of depth-from-disparity.
    pub fn focal_baseline(&self) -> f64 {
        self.focal_px * self.baseline_mm
    }
}

impl Default for CameraRig {
    /// 320x240 rig: 300 px focal length, 40.85 mm baseline.
    fn default() -> Self {
        Self {
            focal_px: 300.0,
            baseline_mm: 40.85,
            principal: (160.0, 120.0),
            distortion: [0.0; 4],
        }
    }
}

pub fn parse_calibration(text: &str) -> Result<CameraRig> {
    let mut values = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Calibration(format!("line {}: expected 'key = value'", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let parsed: f64 = value.parse().map_err(|_| {
            Error::Calibration(format!(
                "line {}: non-numeric value '{value}' for {key}",
                lineno + 1
            ))
        })?;
        values.insert(key.to_string(), parsed);
    }
    let required = |key: &str| {
        values
            .get(key)
            .copied()
            .ok_or_else(|| Error::Calibration(format!("missing required key '{key}'")))
    };
    let optional = |key: &str| values.get(key).copied().unwrap_or(0.0);
    let rig = CameraRig {
        focal_px: required("focal_px")?,
        baseline_mm: required("baseline_mm")?,
        principal: (required("cx")?, required("cy")?),
        distortion: [optional("k1"), optional("k2"), optional("p1"), optional("p2")],
    };
    rig.validate().map_err(|e| Error::Calibration(e.to_string()))?;
    Ok(rig)
}

/// Text form read back by [`parse_calibration`].
pub fn encode_calibration(rig: &CameraRig) -> String {
    let [k1, k2, p1, p2] = rig.distortion;
    format!(
        "focal_px = {}\nbaseline_mm = {}\ncx = {}\ncy = {}\nk1 = {k1}\nk2 = {k2}\np1 = {p1}\np2 = {p2}\n",
        rig.focal_px, rig.baseline_mm, rig.principal.0, rig.principal.1
    )
}

pub fn write_calibration(path: impl AsRef<Path>, rig: &CameraRig) -> Result<()> {
    write_file(path.as_ref(), encode_calibration(rig).as_bytes())
}

pub fn read_calibration(path: impl AsRef<Path>) -> Result<CameraRig> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::Calibration(format!("{} is not UTF-8", path.display())))?;
    parse_calibration(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_round_trip() {
        let rig = CameraRig { distortion: [-0.3, 0.1, 0.0, 0.002], ..CameraRig::default() };
        assert_eq!(parse_calibration(&encode_calibration(&rig)).unwrap(), rig);
    }

    #[test]
    fn measured_rig() {
        let rig = parse_calibration(
            "# left camera\nfocal_px = 300\nbaseline_mm = 40.85\ncx = 160\ncy = 120\nk1 = -0.3\n",
        )
        .unwrap();
        assert_eq!(rig.focal_px, 300.0);
        assert_eq!(rig.baseline_mm, 40.85);
        assert_eq!(rig.principal, (160.0, 120.0));
        assert_eq!(rig.distortion, [-0.3, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn distortion_defaults_to_zero() {
        let rig = parse_calibration("focal_px=296.0\nbaseline_mm=50\ncx=1\ncy=2").unwrap();
        assert_eq!(rig.distortion, [0.0; 4]);
    }

    #[test]
    fn negative_baseline() {
        let e = parse_calibration("focal_px=300\nbaseline_mm=-1\ncx=0\ncy=0").unwrap_err();
        assert!(e.to_string().contains("baseline must be positive"), "{e}");
    }

    #[test]
    fn missing_key() {
        let e = parse_calibration("focal_px=300\nbaseline_mm=40\ncx=0").unwrap_err();
        assert!(e.to_string().contains("'cy'"), "{e}");
    }

    #[test]
    fn non_numeric() {
        let e = parse_calibration("focal_px=abc\nbaseline_mm=40\ncx=0\ncy=0").unwrap_err();
        assert!(e.to_string().contains("non-numeric"), "{e}");
    }
}
