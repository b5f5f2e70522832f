//! In-memory frame, sequence, and float-plane representations.
//!
//! `Frame` holds 8-bit planar luma plus optional 4:2:0 chroma. Invariants
//! are checked on construction, so downstream operations never see a frame
//! with mismatched plane lengths. All intermediate arithmetic runs on
//! [`FloatPlane`] in f64; conversion back to 8 bits rounds half away from
//! zero and clamps to [0, 255].

use crate::error::CoreError;

/// One 8-bit planar frame. Chroma, when present, is 4:2:0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    luma: Vec<u8>,
    chroma: Option<ChromaPlanes>,
}

/// Cb/Cr planes at half resolution in each dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChromaPlanes {
    pub cb: Vec<u8>,
    pub cr: Vec<u8>,
}

impl Frame {
    /// Luma-only frame.
    pub fn mono(width: usize, height: usize, luma: Vec<u8>) -> Result<Self, CoreError> {
        Self::build(width, height, luma, None)
    }

    /// 4:2:0 frame; width and height must be even.
    pub fn yuv420(
        width: usize,
        height: usize,
        luma: Vec<u8>,
        cb: Vec<u8>,
        cr: Vec<u8>,
    ) -> Result<Self, CoreError> {
        Self::build(width, height, luma, Some(ChromaPlanes { cb, cr }))
    }

    fn build(
        width: usize,
        height: usize,
        luma: Vec<u8>,
        chroma: Option<ChromaPlanes>,
    ) -> Result<Self, CoreError> {
        if width == 0 || height == 0 {
            return Err(CoreError::Precondition(format!(
                "frame dimensions must be positive, got {width}x{height}"
            )));
        }
        if luma.len() != width * height {
            return Err(CoreError::Precondition(format!(
                "luma plane has {} samples, expected {}",
                luma.len(),
                width * height
            )));
        }
        if let Some(c) = &chroma {
            if width % 2 != 0 || height % 2 != 0 {
                return Err(CoreError::Precondition(format!(
                    "4:2:0 frames need even dimensions, got {width}x{height}"
                )));
            }
            let expected = (width / 2) * (height / 2);
            if c.cb.len() != expected || c.cr.len() != expected {
                return Err(CoreError::Precondition(format!(
                    "chroma planes have {}/{} samples, expected {}",
                    c.cb.len(),
                    c.cr.len(),
                    expected
                )));
            }
        }
        Ok(Frame {
            width,
            height,
            luma,
            chroma,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn luma(&self) -> &[u8] {
        &self.luma
    }

    pub fn chroma(&self) -> Option<&ChromaPlanes> {
        self.chroma.as_ref()
    }

    pub fn has_chroma(&self) -> bool {
        self.chroma.is_some()
    }

    /// Copy of the luma plane widened to f64.
    pub fn luma_plane(&self) -> FloatPlane {
        FloatPlane {
            width: self.width,
            height: self.height,
            values: self.luma.iter().map(|&v| v as f64).collect(),
        }
    }

    /// Same frame with the luma plane replaced by `plane`, quantized to
    /// 8 bits (round half away from zero, clamp to [0, 255]). Chroma is
    /// carried through untouched.
    pub fn with_luma_plane(&self, plane: &FloatPlane) -> Result<Self, CoreError> {
        if plane.width != self.width || plane.height != self.height {
            return Err(CoreError::DimensionMismatch {
                expected_width: self.width,
                expected_height: self.height,
                got_width: plane.width,
                got_height: plane.height,
            });
        }
        Ok(Frame {
            width: self.width,
            height: self.height,
            luma: plane.values.iter().map(|&v| quantize_u8(v)).collect(),
            chroma: self.chroma.clone(),
        })
    }
}

/// Round half away from zero, clamp to the 8-bit sample range.
pub fn quantize_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Ordered frames with a frame rate. All frames share dimensions and
/// chroma presence.
#[derive(Debug, Clone)]
pub struct Sequence {
    pub frames: Vec<Frame>,
    pub fps_num: u32,
    pub fps_den: u32,
}

impl Sequence {
    pub fn new(frames: Vec<Frame>, fps_num: u32, fps_den: u32) -> Result<Self, CoreError> {
        let seq = Sequence {
            frames,
            fps_num,
            fps_den,
        };
        seq.validate()?;
        Ok(seq)
    }

    /// Re-checks the sequence invariants. Used by writers so that a
    /// hand-assembled sequence cannot smuggle inconsistent frames out.
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.frames.is_empty() {
            return Err(CoreError::Precondition("sequence is empty".into()));
        }
        if self.fps_num == 0 || self.fps_den == 0 {
            return Err(CoreError::Precondition(format!(
                "frame rate must be positive, got {}:{}",
                self.fps_num, self.fps_den
            )));
        }
        let first = &self.frames[0];
        for (i, f) in self.frames.iter().enumerate() {
            if f.width() != first.width() || f.height() != first.height() {
                return Err(CoreError::Precondition(format!(
                    "frame {i} is {}x{}, expected {}x{}",
                    f.width(),
                    f.height(),
                    first.width(),
                    first.height()
                )));
            }
            if f.has_chroma() != first.has_chroma() {
                return Err(CoreError::Precondition(format!(
                    "frame {i} chroma presence differs from frame 0"
                )));
            }
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.frames[0].width()
    }

    pub fn height(&self) -> usize {
        self.frames[0].height()
    }

    /// Wall-clock duration in seconds: frames / fps.
    pub fn duration_seconds(&self) -> f64 {
        self.frames.len() as f64 * self.fps_den as f64 / self.fps_num as f64
    }
}

/// Row-major plane of f64 samples; the substrate for all filter math.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPlane {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl FloatPlane {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, CoreError> {
        if width == 0 || height == 0 {
            return Err(CoreError::Precondition(format!(
                "plane dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(CoreError::Precondition(format!(
                "plane has {} samples, expected {}",
                values.len(),
                width * height
            )));
        }
        Ok(FloatPlane {
            width,
            height,
            values,
        })
    }

    /// Constant-valued plane.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        FloatPlane {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * self.width + x] = v;
    }

    pub fn same_size(&self, other: &FloatPlane) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest absolute pixel difference against `other`.
    pub fn max_abs_diff(&self, other: &FloatPlane) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn dimension_error(
    expected: (usize, usize),
    got: (usize, usize),
) -> CoreError {
    CoreError::DimensionMismatch {
        expected_width: expected.0,
        expected_height: expected.1,
        got_width: got.0,
        got_height: got.1,
    }
}
