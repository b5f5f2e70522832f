//! Binary PGM (P5) serialization for partition masks.
//!
//! The CU size covering each pixel is stored literally as the gray value
//! (8, 16, 32, or 64), so masks stay inspectable with ordinary image
//! viewers.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::CoreError;
use crate::partition::PartitionMask;

fn format_err(offset: usize, message: impl Into<String>) -> CoreError {
    CoreError::Format {
        offset,
        message: message.into(),
    }
}

/// Reads one whitespace-delimited ASCII token, skipping `#` comments.
fn next_token(bytes: &[u8], pos: &mut usize) -> Result<usize, CoreError> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(format_err(start, "unexpected end of PGM header"));
    }
    let token = std::str::from_utf8(&bytes[start..*pos])
        .map_err(|_| format_err(start, "PGM header is not ASCII"))?;
    token
        .parse::<usize>()
        .map_err(|_| format_err(start, format!("expected number, got '{token}'")))
}

/// Parses a binary PGM mask (magic P5, maxval 255).
pub fn read_mask_pgm_bytes(bytes: &[u8]) -> Result<PartitionMask, CoreError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(format_err(0, "not a binary PGM (magic P5)"));
    }
    let mut pos = 2;
    let width = next_token(bytes, &mut pos)?;
    let height = next_token(bytes, &mut pos)?;
    let maxval = next_token(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(CoreError::Unsupported(format!(
            "PGM maxval {maxval} (masks use 255)"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(format_err(pos, "missing separator before PGM raster"));
    }
    pos += 1;
    let expected = width * height;
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(CoreError::Truncated {
            frame_index: 0,
            expected,
            got: raster.len(),
        });
    }
    PartitionMask::from_raw(width, height, raster[..expected].to_vec())
}

pub fn read_mask_pgm_file(path: impl AsRef<Path>) -> Result<PartitionMask, CoreError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
    read_mask_pgm_bytes(&bytes)
}

/// Serializes a mask as binary PGM.
pub fn write_mask_pgm<W: Write>(mask: &PartitionMask, mut out: W) -> Result<(), CoreError> {
    let write = |out: &mut W| -> std::io::Result<()> {
        write!(out, "P5\n{} {}\n255\n", mask.width(), mask.height())?;
        out.write_all(mask.values())
    };
    write(&mut out).map_err(|e| CoreError::io("<pgm stream>", e))
}

pub fn write_mask_pgm_file(mask: &PartitionMask, path: impl AsRef<Path>) -> Result<(), CoreError> {
    let path = path.as_ref();
    let mut file =
        fs::File::create(path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
    let result = write!(file, "P5\n{} {}\n255\n", mask.width(), mask.height())
        .and_then(|_| file.write_all(mask.values()));
    result.map_err(|e| CoreError::io(path.display().to_string(), e))
}
