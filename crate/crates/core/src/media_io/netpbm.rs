//! Binary Netpbm (`P6` color, `P5` gray) with maxval 255.
//!
//! The writer always emits the canonical header `P<n>\n<w> <h>\n255\n`.
//! The reader additionally tolerates arbitrary whitespace and `#` comments
//! in the header, but rejects trailing bytes after the payload.

use std::path::Path;

use super::{read_file, write_file};
use crate::error::{Error, Result};
use crate::image::{GrayImage, RgbImage};

struct Header {
    width: usize,
    height: usize,
    payload_offset: usize,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Netpbm {
        offset,
        message: message.into(),
    }
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(err(start, format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(start, format!("{what} out of range")))
    }
}

fn parse_header(bytes: &[u8], magic: &[u8; 2]) -> Result<Header> {
    if bytes.len() < 2 {
        return Err(err(0, "file too short for magic number"));
    }
    if &bytes[..2] != magic {
        return Err(err(
            0,
            format!(
                "wrong magic: expected {}, found {}",
                String::from_utf8_lossy(magic),
                String::from_utf8_lossy(&bytes[..2])
            ),
        ));
    }
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(err(2, "expected whitespace after magic"));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    cur.skip_whitespace_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(err(maxval_at, format!("zero dimension {width}x{height}")));
    }
    if maxval != 255 {
        return Err(err(maxval_at, format!("maxval must be 255, found {maxval}")));
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => {}
        _ => return Err(err(cur.pos, "expected single whitespace before payload")),
    }
    Ok(Header {
        width,
        height,
        payload_offset: cur.pos + 1,
    })
}

fn payload<'a>(bytes: &'a [u8], header: &Header, channels: usize) -> Result<&'a [u8]> {
    let expected = header.width * header.height * channels;
    let actual = bytes.len() - header.payload_offset;
    if actual < expected {
        return Err(err(
            bytes.len(),
            format!("truncated payload: expected {expected} bytes, got {actual}"),
        ));
    }
    if actual > expected {
        return Err(err(
            header.payload_offset + expected,
            format!("trailing data: expected {expected} payload bytes, got {actual}"),
        ));
    }
    Ok(&bytes[header.payload_offset..])
}

pub fn decode_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let header = parse_header(bytes, b"P6")?;
    let data = payload(bytes, &header, 3)?.to_vec();
    RgbImage::new(header.width, header.height, data)
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let header = parse_header(bytes, b"P5")?;
    let data = payload(bytes, &header, 1)?.to_vec();
    GrayImage::new(header.width, header.height, data)
}

fn encode(magic: &str, width: usize, height: usize, data: &[u8]) -> Vec<u8> {
    let mut out = format!("{magic}\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(data);
    out
}

pub fn encode_ppm(image: &RgbImage) -> Vec<u8> {
    encode("P6", image.width(), image.height(), image.as_bytes())
}

pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    encode("P5", image.width(), image.height(), image.as_bytes())
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<RgbImage> {
    decode_ppm(&read_file(path.as_ref())?)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    decode_pgm(&read_file(path.as_ref())?)
}

pub fn write_ppm(path: impl AsRef<Path>, image: &RgbImage) -> Result<()> {
    write_file(path.as_ref(), &encode_ppm(image))
}

pub fn write_pgm(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    write_file(path.as_ref(), &encode_pgm(image))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_red_pixel() {
        let img = decode_ppm(b"P6\n1 1\n255\n\xff\x00\x00").unwrap();
        assert_eq!((img.width(), img.height()), (1, 1));
        assert_eq!(img.pixel(0, 0), [255, 0, 0]);
    }

    #[test]
    fn two_pixel_gray() {
        let img = decode_pgm(b"P5\n2 1\n255\n\x00\xff").unwrap();
        assert_eq!(img.as_bytes(), &[0, 255]);
    }

    #[test]
    fn wrong_magic() {
        let e = decode_ppm(b"P5\n1 1\n255\n\x00").unwrap_err();
        assert!(e.to_string().contains("wrong magic"), "{e}");
        assert!(matches!(e, Error::Netpbm { offset: 0, .. }));
    }

    #[test]
    fn truncated_payload_reports_counts() {
        let e = decode_pgm(b"P5\n2 2\n255\n\x00\x01\x02").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("expected 4 bytes, got 3"), "{msg}");
        assert!(matches!(e, Error::Netpbm { offset: 14, .. }));
    }

    #[test]
    fn maxval_must_be_255() {
        let e = decode_pgm(b"P5\n1 1\n65535\n\x00\x00").unwrap_err();
        assert!(matches!(e, Error::Netpbm { offset: 7, .. }), "{e}");
    }

    #[test]
    fn malformed_header() {
        assert!(decode_ppm(b"P6\nx 1\n255\n").is_err());
        assert!(decode_ppm(b"P6").is_err());
        assert!(decode_ppm(b"P6\n0 1\n255\n").is_err());
    }

    #[test]
    fn comments_in_header() {
        let img = decode_pgm(b"P5 # made by hand\n1 1\n255\n\x07").unwrap();
        assert_eq!(img.get(0, 0), 7);
    }

    #[test]
    fn trailing_bytes_rejected() {
        assert!(decode_pgm(b"P5\n1 1\n255\n\x07\x08").is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.ppm");
        let img = RgbImage::new(2, 1, vec![1, 2, 3, 4, 5, 6]).unwrap();
        write_ppm(&path, &img).unwrap();
        assert_eq!(read_ppm(&path).unwrap(), img);
        let missing = read_ppm(dir.path().join("nope.ppm")).unwrap_err();
        assert!(missing.to_string().contains("nope.ppm"));
    }

    proptest! {
        #[test]
        fn ppm_bytes_round_trip(w in 1usize..8, h in 1usize..8, seed in any::<u64>()) {
            let data: Vec<u8> = (0..w * h * 3).map(|i| (seed.wrapping_mul(i as u64 + 7) >> 13) as u8).collect();
            let bytes = encode("P6", w, h, &data);
            let img = decode_ppm(&bytes).unwrap();
            prop_assert_eq!(encode_ppm(&img), bytes);
        }

        #[test]
        fn pgm_bytes_round_trip(w in 1usize..8, h in 1usize..8, data in proptest::collection::vec(any::<u8>(), 64)) {
            let bytes = encode("P5", w, h, &data[..w * h]);
            let img = decode_pgm(&bytes).unwrap();
            prop_assert_eq!(encode_pgm(&img), bytes);
        }
    }
}
