//! Readers and writers for every on-disk artifact: binary PPM/PGM rasters,
//! 16-bit PCM WAV audio, camera calibration files and word templates.

mod calibration;
mod netpbm;
mod template;
mod wav;

use std::path::Path;

use crate::error::{Error, Result};

pub use calibration::{
    encode_calibration, parse_calibration, read_calibration, write_calibration, CameraRig,
};
pub use netpbm::{
    decode_pgm, decode_ppm, encode_pgm, encode_ppm, read_pgm, read_ppm, write_pgm, write_ppm,
};
pub use template::{
    decode_template, encode_template, read_template, read_template_library, write_template,
    write_template_library, TemplateLibrary, TEMPLATE_EXTENSION, TEMPLATE_INDEX,
};
pub use wav::{
    decode_wav, encode_raw_samples, encode_wav, read_raw_samples, read_wav, write_wav, AudioSignal,
};

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
