//! YUV4MPEG2 (Y4M) reader and writer.
//!
//! Supported streams are 8-bit progressive, either 4:2:0 (C420, C420jpeg,
//! C420mpeg2, C420paldv — all share the same plane geometry) or Cmono.
//! The writer always emits `Ip A1:1` and either `C420jpeg` or `Cmono`, so
//! a read/write round trip is byte-identical for streams already in that
//! shape and value-identical otherwise.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::CoreError;
use crate::frame::{Frame, Sequence};

const MAGIC: &[u8] = b"YUV4MPEG2";

/// Stream parameters from a Y4M header line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Y4mHeader {
    pub width: usize,
    pub height: usize,
    pub fps_num: u32,
    pub fps_den: u32,
    pub has_chroma: bool,
}

impl Y4mHeader {
    fn frame_payload_len(&self) -> usize {
        let luma = self.width * self.height;
        if self.has_chroma {
            luma + 2 * ((self.width / 2) * (self.height / 2))
        } else {
            luma
        }
    }
}

fn format_err(offset: usize, message: impl Into<String>) -> CoreError {
    CoreError::Format {
        offset,
        message: message.into(),
    }
}

/// Parses the header line. Returns the header and the offset of the first
/// byte after its terminating newline.
fn parse_header(bytes: &[u8]) -> Result<(Y4mHeader, usize), CoreError> {
    for (i, &m) in MAGIC.iter().enumerate() {
        if bytes.get(i).copied() != Some(m) {
            return Err(format_err(i, "stream does not begin with YUV4MPEG2"));
        }
    }
    let line_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| format_err(bytes.len(), "unterminated header line"))?;
    let line = std::str::from_utf8(&bytes[..line_end])
        .map_err(|e| format_err(e.valid_up_to(), "header is not valid UTF-8"))?;

    let mut width = None;
    let mut height = None;
    let mut fps = None;
    let mut colorspace: Option<String> = None;

    for token in line.split(' ').skip(1).filter(|t| !t.is_empty()) {
        let (tag, value) = token.split_at(1);
        match tag {
            "W" => {
                width = Some(value.parse::<usize>().map_err(|_| {
                    format_err(0, format!("invalid width token '{token}'"))
                })?)
            }
            "H" => {
                height = Some(value.parse::<usize>().map_err(|_| {
                    format_err(0, format!("invalid height token '{token}'"))
                })?)
            }
            "F" => {
                let (n, d) = value.split_once(':').ok_or_else(|| {
                    format_err(0, format!("invalid frame-rate token '{token}'"))
                })?;
                let n: u32 = n
                    .parse()
                    .map_err(|_| format_err(0, format!("invalid frame-rate token '{token}'")))?;
                let d: u32 = d
                    .parse()
                    .map_err(|_| format_err(0, format!("invalid frame-rate token '{token}'")))?;
                if n == 0 || d == 0 {
                    return Err(format_err(0, format!("frame rate must be positive: '{token}'")));
                }
                fps = Some((n, d));
            }
            "I" => {
                // Progressive-only scope.
                if value != "p" {
                    return Err(CoreError::Unsupported(format!(
                        "interlacing mode 'I{value}' (only Ip is supported)"
                    )));
                }
            }
            "C" => colorspace = Some(value.to_string()),
            // Aspect ratio and X comments do not affect plane geometry.
            "A" | "X" => {}
            _ => {}
        }
    }

    let has_chroma = match colorspace.as_deref() {
        None | Some("420") | Some("420jpeg") | Some("420mpeg2") | Some("420paldv") => true,
        Some("mono") => false,
        Some(other) => {
            return Err(CoreError::Unsupported(format!("colorspace 'C{other}'")));
        }
    };

    let width = width.ok_or_else(|| format_err(0, "header missing W tag"))?;
    let height = height.ok_or_else(|| format_err(0, "header missing H tag"))?;
    if width == 0 || height == 0 {
        return Err(format_err(0, format!("degenerate dimensions {width}x{height}")));
    }
    let (fps_num, fps_den) = fps.unwrap_or((30, 1));

    Ok((
        Y4mHeader {
            width,
            height,
            fps_num,
            fps_den,
            has_chroma,
        },
        line_end + 1,
    ))
}

/// Scans one FRAME marker line starting at `pos`; returns the offset of the
/// first payload byte.
fn parse_frame_marker(bytes: &[u8], pos: usize, frame_index: usize) -> Result<usize, CoreError> {
    const MARKER: &[u8] = b"FRAME";
    for (i, &m) in MARKER.iter().enumerate() {
        if bytes.get(pos + i).copied() != Some(m) {
            return Err(format_err(
                pos + i,
                format!("expected FRAME marker before frame {frame_index}"),
            ));
        }
    }
    let mut p = pos + MARKER.len();
    // Optional frame parameters run to the newline.
    loop {
        match bytes.get(p) {
            Some(b'\n') => return Ok(p + 1),
            Some(_) => p += 1,
            None => {
                return Err(format_err(
                    p,
                    format!("unterminated FRAME marker line for frame {frame_index}"),
                ))
            }
        }
    }
}

/// Parses a complete Y4M byte stream.
pub fn read_y4m_bytes(bytes: &[u8]) -> Result<Sequence, CoreError> {
    let (header, mut pos) = parse_header(bytes)?;
    let payload_len = header.frame_payload_len();
    let luma_len = header.width * header.height;
    let chroma_len = (header.width / 2) * (header.height / 2);

    let mut frames = Vec::new();
    while pos < bytes.len() {
        let frame_index = frames.len();
        let payload_start = parse_frame_marker(bytes, pos, frame_index)?;
        let available = bytes.len().saturating_sub(payload_start);
        if available < payload_len {
            return Err(CoreError::Truncated {
                frame_index,
                expected: payload_len,
                got: available,
            });
        }
        let payload = &bytes[payload_start..payload_start + payload_len];
        let luma = payload[..luma_len].to_vec();
        let frame = if header.has_chroma {
            let cb = payload[luma_len..luma_len + chroma_len].to_vec();
            let cr = payload[luma_len + chroma_len..].to_vec();
            Frame::yuv420(header.width, header.height, luma, cb, cr)?
        } else {
            Frame::mono(header.width, header.height, luma)?
        };
        frames.push(frame);
        pos = payload_start + payload_len;
    }

    if frames.is_empty() {
        return Err(format_err(pos, "stream contains no frames"));
    }
    Sequence::new(frames, header.fps_num, header.fps_den)
}

/// Reads a Y4M stream to the end and parses it.
pub fn read_y4m<R: Read>(mut reader: R) -> Result<Sequence, CoreError> {
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| CoreError::io("<y4m stream>", e))?;
    read_y4m_bytes(&bytes)
}

pub fn read_y4m_file(path: impl AsRef<Path>) -> Result<Sequence, CoreError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
    read_y4m_bytes(&bytes)
}

/// Header-and-marker scan without retaining pixel data. Useful for rate
/// math (frame count and fps) on large files.
pub fn probe_y4m_bytes(bytes: &[u8]) -> Result<(Y4mHeader, usize), CoreError> {
    let (header, mut pos) = parse_header(bytes)?;
    let payload_len = header.frame_payload_len();
    let mut frames = 0usize;
    while pos < bytes.len() {
        let payload_start = parse_frame_marker(bytes, pos, frames)?;
        let available = bytes.len().saturating_sub(payload_start);
        if available < payload_len {
            return Err(CoreError::Truncated {
                frame_index: frames,
                expected: payload_len,
                got: available,
            });
        }
        frames += 1;
        pos = payload_start + payload_len;
    }
    Ok((header, frames))
}

pub fn probe_y4m_file(path: impl AsRef<Path>) -> Result<(Y4mHeader, usize), CoreError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
    probe_y4m_bytes(&bytes)
}

fn write_inner<W: Write>(seq: &Sequence, out: &mut W) -> std::io::Result<()> {
    let colorspace = if seq.frames[0].has_chroma() {
        "C420jpeg"
    } else {
        "Cmono"
    };
    write!(
        out,
        "YUV4MPEG2 W{} H{} F{}:{} Ip A1:1 {}\n",
        seq.width(),
        seq.height(),
        seq.fps_num,
        seq.fps_den,
        colorspace
    )?;
    for frame in &seq.frames {
        out.write_all(b"FRAME\n")?;
        out.write_all(frame.luma())?;
        if let Some(c) = frame.chroma() {
            out.write_all(&c.cb)?;
            out.write_all(&c.cr)?;
        }
    }
    Ok(())
}

/// Serializes the sequence as Y4M.
pub fn write_y4m<W: Write>(seq: &Sequence, mut out: W) -> Result<(), CoreError> {
    seq.validate()?;
    write_inner(seq, &mut out).map_err(|e| CoreError::io("<y4m stream>", e))
}

pub fn write_y4m_file(seq: &Sequence, path: impl AsRef<Path>) -> Result<(), CoreError> {
    let path = path.as_ref();
    seq.validate()?;
    let mut file = fs::File::create(path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
    write_inner(seq, &mut file).map_err(|e| CoreError::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono_fixture() -> Vec<u8> {
        let mut s = b"YUV4MPEG2 W4 H4 F30:1 Ip A1:1 Cmono\n".to_vec();
        s.extend_from_slice(b"FRAME\n");
        s.extend((0u8..16).collect::<Vec<_>>());
        s
    }

    #[test]
    fn parses_420jpeg_fixture() {
        let mut s = b"YUV4MPEG2 W4 H4 F25:1 C420jpeg\n".to_vec();
        s.extend_from_slice(b"FRAME\n");
        s.extend(std::iter::repeat(7u8).take(16 + 4 + 4));
        let seq = read_y4m_bytes(&s).unwrap();
        assert_eq!(seq.frames.len(), 1);
        assert_eq!((seq.width(), seq.height()), (4, 4));
        assert_eq!((seq.fps_num, seq.fps_den), (25, 1));
        assert!(seq.frames[0].has_chroma());
    }

    #[test]
    fn colorspace_defaults_to_420_and_fps_to_30() {
        let mut s = b"YUV4MPEG2 W2 H2\n".to_vec();
        s.extend_from_slice(b"FRAME\n");
        s.extend_from_slice(&[1, 2, 3, 4, 5, 6]);
        let seq = read_y4m_bytes(&s).unwrap();
        assert_eq!((seq.fps_num, seq.fps_den), (30, 1));
        assert!(seq.frames[0].has_chroma());
    }

    #[test]
    fn mono_round_trip_is_byte_identical() {
        let s = mono_fixture();
        let seq = read_y4m_bytes(&s).unwrap();
        let mut out = Vec::new();
        write_y4m(&seq, &mut out).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn bad_magic_names_offset() {
        let err = read_y4m_bytes(b"YUV4MPEG3 W4 H4\n").unwrap_err();
        match err {
            CoreError::Format { offset, .. } => assert_eq!(offset, 8),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn truncated_frame_names_index() {
        let mut s = mono_fixture();
        s.extend_from_slice(b"FRAME\n");
        s.extend_from_slice(&[0u8; 10]); // second frame short by 6 bytes
        let err = read_y4m_bytes(&s).unwrap_err();
        match err {
            CoreError::Truncated {
                frame_index,
                expected,
                got,
            } => {
                assert_eq!(frame_index, 1);
                assert_eq!(expected, 16);
                assert_eq!(got, 10);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unsupported_colorspace_rejected() {
        let s = b"YUV4MPEG2 W4 H4 C444\nFRAME\n".to_vec();
        assert!(matches!(
            read_y4m_bytes(&s).unwrap_err(),
            CoreError::Unsupported(_)
        ));
    }

    #[test]
    fn interlaced_streams_rejected() {
        let s = b"YUV4MPEG2 W4 H4 It Cmono\nFRAME\n".to_vec();
        assert!(matches!(
            read_y4m_bytes(&s).unwrap_err(),
            CoreError::Unsupported(_)
        ));
    }

    #[test]
    fn empty_sequence_write_is_precondition_error() {
        let seq = Sequence {
            frames: vec![],
            fps_num: 30,
            fps_den: 1,
        };
        assert!(matches!(
            write_y4m(&seq, Vec::new()).unwrap_err(),
            CoreError::Precondition(_)
        ));
    }

    #[test]
    fn probe_counts_frames_without_decoding() {
        let mut s = mono_fixture();
        s.extend_from_slice(b"FRAME\n");
        s.extend((16u8..32).collect::<Vec<_>>());
        let (header, frames) = probe_y4m_bytes(&s).unwrap();
        assert_eq!(frames, 2);
        assert!(!header.has_chroma);
    }
}
