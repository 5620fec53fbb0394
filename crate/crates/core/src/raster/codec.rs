//! Image loading and saving. Binary PGM (P5, maxval 255) is always
//! available; 8-bit gray/RGB PNG decoding sits behind the `png` feature.

use std::path::Path;

use super::{BinaryImage, GrayImage};
use crate::{Error, Result};

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Reads an image file and reduces it to 8-bit luminance.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Decodes PGM or (with the `png` feature) PNG bytes, sniffing the format.
pub fn decode(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.starts_with(b"P5") {
        decode_pgm(bytes)
    } else if bytes.starts_with(PNG_SIGNATURE) {
        decode_png(bytes)
    } else {
        Err(Error::UnsupportedFormat(
            "expected binary PGM (P5) or PNG data".into(),
        ))
    }
}

#[cfg(feature = "png")]
fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    use image::DynamicImage;

    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::UnsupportedFormat(format!("png: {e}")))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data = match img {
        DynamicImage::ImageLuma8(g) => g.into_raw(),
        DynamicImage::ImageRgb8(rgb) => rgb
            .pixels()
            .map(|p| super::luminance(p[0], p[1], p[2]))
            .collect(),
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "png color type {:?}; only 8-bit gray and RGB are supported",
                other.color()
            )))
        }
    };
    GrayImage::from_vec(w, h, data)
}

#[cfg(not(feature = "png"))]
fn decode_png(_bytes: &[u8]) -> Result<GrayImage> {
    Err(Error::UnsupportedFormat(
        "png support is disabled (build with the `png` feature)".into(),
    ))
}

/// Parses a binary PGM with maxval 255. Header comments are skipped.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0usize;
    let bad = |msg: &str| Error::Parse {
        context: "pgm header".into(),
        message: msg.into(),
    };
    if !bytes.starts_with(b"P5") {
        return Err(bad("missing P5 magic"));
    }
    pos += 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(bad("truncated header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(bad("expected a decimal number"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("number out of range"))?;
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(bad("missing whitespace after maxval"));
    }
    pos += 1;

    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!(
            "pgm maxval {maxval}; only 255 is supported"
        )));
    }
    let len = width
        .checked_mul(height)
        .ok_or_else(|| bad("dimensions overflow"))?;
    let raster = bytes
        .get(pos..pos + len)
        .ok_or_else(|| Error::Parse {
            context: "pgm raster".into(),
            message: format!("expected {len} bytes, found {}", bytes.len() - pos),
        })?;
    GrayImage::from_vec(width, height, raster.to_vec())
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

pub fn save_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_pgm(img)).map_err(|e| Error::io(path, e))
}

/// Writes `0` as black and `1` as white.
pub fn save_binary_pgm(path: impl AsRef<Path>, img: &BinaryImage) -> Result<()> {
    save_pgm(path, &img.to_gray())
}
