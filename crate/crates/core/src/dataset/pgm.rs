//! Portable graymap decoding (plain `P2` and raw `P5`).

use std::path::Path;

use super::{DatasetError, GrayImage, Result};

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.data.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
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

    fn number(&mut self, what: &str) -> std::result::Result<u32, String> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected {what}"));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("{what} out of range"))
    }
}

/// Decodes a graymap, rescaling samples to `0..=255`.
pub fn decode_pgm(data: &[u8]) -> std::result::Result<GrayImage, String> {
    let raw = match data.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err("not a P2/P5 graymap".into()),
    };
    let mut cur = Cursor { data, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err("zero-sized image".into());
    }
    if maxval == 0 || maxval > 65535 {
        return Err(format!("maxval {maxval} outside 1..=65535"));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| "image too large".to_string())?;
    let scale = |v: u32| -> std::result::Result<u8, String> {
        if v > maxval {
            return Err(format!("sample {v} exceeds maxval {maxval}"));
        }
        Ok(((u64::from(v) * 255 + u64::from(maxval) / 2) / u64::from(maxval)) as u8)
    };
    let mut pixels = Vec::with_capacity(count);
    if raw {
        // exactly one whitespace byte separates the header from the raster
        cur.pos += 1;
        let bytes = if maxval > 255 { 2 } else { 1 };
        let body = data
            .get(cur.pos..cur.pos + count * bytes)
            .ok_or_else(|| "truncated raster".to_string())?;
        for chunk in body.chunks_exact(bytes) {
            let v = if bytes == 2 {
                u32::from(u16::from_be_bytes([chunk[0], chunk[1]]))
            } else {
                u32::from(chunk[0])
            };
            pixels.push(scale(v)?);
        }
    } else {
        for _ in 0..count {
            pixels.push(scale(cur.number("sample")?)?);
        }
    }
    GrayImage::new(width, height, pixels).map_err(|e| e.to_string())
}

pub fn load_pgm(path: &Path) -> Result<GrayImage> {
    let data = std::fs::read(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_pgm(&data).map_err(|message| DatasetError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message,
    })
}

/// Encodes as raw `P5` with maxval 255.
pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend_from_slice(image.pixels());
    out
}
