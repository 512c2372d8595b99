//! Binary PGM (P5) reading and writing, 8-bit only. Binary PPM (P6) input is
//! accepted through [`load_luma`].
//!
//! Files written by [`save_pgm`] use the canonical header `P5\n<w> <h>\n255\n`,
//! so any file in that form survives a load/save cycle byte for byte.

use thiserror::Error;

use crate::image::Image;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PgmError {
    #[error("malformed PNM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0} (only 255 is supported)")]
    UnsupportedDepth(u32),
    #[error("truncated payload: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
}

/// Parsed PNM header and the offset where the raster starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PnmHeader {
    /// The digit after `P` (5 for graymap, 6 for pixmap).
    pub kind: u8,
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    pub data_offset: usize,
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, PgmError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PgmError::MalformedHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PgmError::MalformedHeader(format!("{what} out of range")))
    }
}

/// Parses the header of a binary `P5`/`P6` file.
pub fn parse_header(bytes: &[u8]) -> Result<PnmHeader, PgmError> {
    let kind = match bytes {
        [b'P', d @ (b'5' | b'6'), ..] => d - b'0',
        _ => return Err(PgmError::MalformedHeader("expected P5 or P6 magic".into())),
    };
    let mut cur = HeaderCursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(PgmError::MalformedHeader("no separator after magic".into()));
    }
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::MalformedHeader(format!("zero dimension {width}x{height}")));
    }
    // exactly one whitespace byte separates maxval from the raster
    match cur.bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        Some(_) => return Err(PgmError::MalformedHeader("junk after maxval".into())),
        None => {
            return Err(PgmError::Truncated {
                expected: width * height,
                actual: 0,
            })
        }
    }
    if maxval != 255 {
        return Err(PgmError::UnsupportedDepth(maxval));
    }
    Ok(PnmHeader {
        kind,
        width,
        height,
        maxval,
        data_offset: cur.pos,
    })
}

/// Decodes a binary PGM. Samples equal the file bytes exactly.
pub fn load_pgm(bytes: &[u8]) -> Result<Image, PgmError> {
    let header = parse_header(bytes)?;
    if header.kind != 5 {
        return Err(PgmError::MalformedHeader(format!("P{} is not a graymap", header.kind)));
    }
    let expected = header.width * header.height;
    let payload = &bytes[header.data_offset..];
    if payload.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            actual: payload.len(),
        });
    }
    Ok(Image::from_bytes(header.width, header.height, &payload[..expected]).expect("dimensions validated by header"))
}

/// BT.601 luma of one 8-bit RGB triple, rounded half up.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    // weights scaled by 1000 keep the rounding exact
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

/// Decodes a binary PGM, or a binary PPM converted to luma with [`luma`].
pub fn load_luma(bytes: &[u8]) -> Result<Image, PgmError> {
    let header = parse_header(bytes)?;
    if header.kind == 5 {
        return load_pgm(bytes);
    }
    let expected = 3 * header.width * header.height;
    let payload = &bytes[header.data_offset..];
    if payload.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            actual: payload.len(),
        });
    }
    let grey: Vec<u8> = payload[..expected]
        .chunks_exact(3)
        .map(|p| luma(p[0], p[1], p[2]))
        .collect();
    Ok(Image::from_bytes(header.width, header.height, &grey).expect("dimensions validated by header"))
}

/// Encodes an image as canonical binary PGM. Samples go through the storage
/// rounding rule, so this never fails.
pub fn save_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.to_bytes());
    out
}
