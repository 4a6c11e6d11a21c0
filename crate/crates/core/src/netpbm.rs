//! Binary Netpbm (P5 graymap, P6 pixmap) with maxval 255.
//! https://netpbm.sourceforge.net/doc/ppm.html

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnmKind {
    /// P5, one byte per pixel.
    Gray,
    /// P6, three bytes per pixel.
    Rgb,
}

impl PnmKind {
    pub fn channels(self) -> usize {
        match self {
            PnmKind::Gray => 1,
            PnmKind::Rgb => 3,
        }
    }

    fn magic(self) -> &'static [u8] {
        match self {
            PnmKind::Gray => b"P5",
            PnmKind::Rgb => b"P6",
        }
    }
}

/// Decoded image; `data` is row-major, interleaved when `kind` is `Rgb`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnmImage {
    pub kind: PnmKind,
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl PnmImage {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.data.len() + 20);
        out.extend_from_slice(self.kind.magic());
        out.extend_from_slice(format!("\n{} {}\n255\n", self.width, self.height).as_bytes());
        out.extend_from_slice(&self.data);
        out
    }

    pub fn decode(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut cursor = HeaderCursor { bytes, pos: 0 };
        let magic = cursor.token().ok_or("missing magic number")?;
        let kind = match magic {
            b"P5" => PnmKind::Gray,
            b"P6" => PnmKind::Rgb,
            other => {
                return Err(format!(
                    "unsupported magic {:?}; expected binary P5 or P6",
                    String::from_utf8_lossy(other)
                ))
            }
        };
        let width = cursor.number("width")?;
        let height = cursor.number("height")?;
        let maxval = cursor.number("maxval")?;
        if maxval != 255 {
            return Err(format!("unsupported maxval {maxval}; only 255 is accepted"));
        }
        // exactly one whitespace byte separates the header from the raster
        match bytes.get(cursor.pos) {
            Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
            _ => return Err("missing whitespace after maxval".into()),
        }
        let expected = width * height * kind.channels();
        let raster = &bytes[cursor.pos..];
        if raster.len() != expected {
            return Err(format!(
                "raster has {} bytes, expected {expected} for {width}x{height}",
                raster.len()
            ));
        }
        Ok(PnmImage { kind, width, height, data: raster.to_vec() })
    }
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn token(&mut self) -> Option<&'a [u8]> {
        loop {
            match self.bytes.get(self.pos)? {
                b'#' => {
                    while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
            self.pos += 1;
        }
        Some(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> std::result::Result<usize, String> {
        let tok = self.token().ok_or_else(|| format!("missing {what}"))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("bad {what} {:?}", String::from_utf8_lossy(tok)))
    }
}

pub fn read_pnm(path: &Path) -> Result<PnmImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    PnmImage::decode(&bytes).map_err(|m| Error::format(path, m))
}

pub fn write_pnm(path: &Path, image: &PnmImage) -> Result<()> {
    std::fs::write(path, image.encode()).map_err(|e| Error::io(path, e))
}
