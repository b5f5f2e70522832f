//! Per-CU-size sharpening strengths and per-pixel strength maps.
//!
//! The table maps each CU size to a strength alpha. Flat regions (64x64
//! CUs) and dense texture (8x8 CUs) get the low value so sharpening does
//! not amplify noise or overshoot; moderately textured regions get the
//! high value. The hard per-pixel map is a pixelwise table lookup over the
//! partition mask; the smoothed map feathers CU boundaries so that the
//! strength does not jump across block edges.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::blur::gaussian_smooth;
use crate::error::CoreError;
use crate::frame::FloatPlane;
use crate::partition::PartitionMask;

/// CU-size -> sharpening/degradation strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaTable {
    #[serde(rename = "8")]
    pub size_8: f64,
    #[serde(rename = "16")]
    pub size_16: f64,
    #[serde(rename = "32")]
    pub size_32: f64,
    #[serde(rename = "64")]
    pub size_64: f64,
}

impl Default for AlphaTable {
    fn default() -> Self {
        AlphaTable {
            size_8: 1.5,
            size_16: 3.0,
            size_32: 3.0,
            size_64: 1.5,
        }
    }
}

impl AlphaTable {
    pub fn uniform(alpha: f64) -> Self {
        AlphaTable {
            size_8: alpha,
            size_16: alpha,
            size_32: alpha,
            size_64: alpha,
        }
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        for (size, v) in self.entries() {
            if !v.is_finite() || v < 0.0 {
                return Err(CoreError::Precondition(format!(
                    "alpha for CU size {size} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> [(u8, f64); 4] {
        [
            (8, self.size_8),
            (16, self.size_16),
            (32, self.size_32),
            (64, self.size_64),
        ]
    }

    #[inline]
    pub fn alpha_for(&self, cu_size: u8) -> f64 {
        match cu_size {
            8 => self.size_8,
            16 => self.size_16,
            32 => self.size_32,
            64 => self.size_64,
            other => unreachable!("mask guarantees CU sizes in {{8,16,32,64}}, got {other}"),
        }
    }

    pub fn min_alpha(&self) -> f64 {
        self.entries().iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min)
    }

    pub fn max_alpha(&self) -> f64 {
        self.entries()
            .iter()
            .map(|&(_, v)| v)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl fmt::Display for AlphaTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "8:{},16:{},32:{},64:{}",
            self.size_8, self.size_16, self.size_32, self.size_64
        )
    }
}

impl FromStr for AlphaTable {
    type Err = CoreError;

    /// Parses the CLI syntax "8:1.5,16:3.0,32:3.0,64:1.5". Every size must
    /// appear exactly once.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut seen: [Option<f64>; 4] = [None; 4];
        for part in s.split(',') {
            let (size, value) = part.split_once(':').ok_or_else(|| {
                CoreError::Precondition(format!("alpha-table entry '{part}' is not SIZE:ALPHA"))
            })?;
            let size: u8 = size.trim().parse().map_err(|_| {
                CoreError::Precondition(format!("invalid CU size '{size}' in alpha table"))
            })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                CoreError::Precondition(format!("invalid alpha '{value}' in alpha table"))
            })?;
            let slot = match size {
                8 => 0,
                16 => 1,
                32 => 2,
                64 => 3,
                other => {
                    return Err(CoreError::Precondition(format!(
                        "CU size {other} is not one of 8,16,32,64"
                    )))
                }
            };
            if seen[slot].replace(value).is_some() {
                return Err(CoreError::Precondition(format!(
                    "CU size {size} listed twice in alpha table"
                )));
            }
        }
        match seen {
            [Some(size_8), Some(size_16), Some(size_32), Some(size_64)] => {
                let table = AlphaTable {
                    size_8,
                    size_16,
                    size_32,
                    size_64,
                };
                table.validate()?;
                Ok(table)
            }
            _ => Err(CoreError::Precondition(
                "alpha table must map all of 8,16,32,64".into(),
            )),
        }
    }
}

/// Per-pixel sharpening strength.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMap {
    plane: FloatPlane,
}

impl AlphaMap {
    pub fn from_plane(plane: FloatPlane) -> Result<Self, CoreError> {
        for (i, &v) in plane.values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(CoreError::Precondition(format!(
                    "alpha map value {v} at pixel ({}, {}) must be finite and >= 0",
                    i % plane.width,
                    i / plane.width
                )));
            }
        }
        Ok(AlphaMap { plane })
    }

    pub fn constant(width: usize, height: usize, alpha: f64) -> Result<Self, CoreError> {
        Self::from_plane(FloatPlane::filled(width, height, alpha))
    }

    pub fn width(&self) -> usize {
        self.plane.width
    }

    pub fn height(&self) -> usize {
        self.plane.height
    }

    pub fn plane(&self) -> &FloatPlane {
        &self.plane
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.plane.get(x, y)
    }

    pub fn mean(&self) -> f64 {
        self.plane.values.iter().sum::<f64>() / self.plane.values.len() as f64
    }
}

/// Pixelwise lookup of the mask through the table: alpha(x,y) = table[mask(x,y)].
pub fn build_hard_alpha_map(mask: &PartitionMask, table: &AlphaTable) -> Result<FloatPlane, CoreError> {
    table.validate()?;
    let values = mask.values().iter().map(|&s| table.alpha_for(s)).collect();
    FloatPlane::new(mask.width(), mask.height(), values)
}

/// Hard lookup map, optionally feathered with a Gaussian of standard
/// deviation `smooth_sigma`. Smoothing keeps values inside the table's
/// [min, max] range (the map is clamped there to shed float dust).
pub fn build_alpha_map(
    mask: &PartitionMask,
    table: &AlphaTable,
    smooth_sigma: f64,
) -> Result<AlphaMap, CoreError> {
    if !smooth_sigma.is_finite() || smooth_sigma < 0.0 {
        return Err(CoreError::Precondition(format!(
            "smooth sigma must be finite and >= 0, got {smooth_sigma}"
        )));
    }
    let hard = build_hard_alpha_map(mask, table)?;
    if smooth_sigma == 0.0 {
        return AlphaMap::from_plane(hard);
    }
    let mut smoothed = gaussian_smooth(&hard, smooth_sigma);
    let (lo, hi) = (table.min_alpha(), table.max_alpha());
    for v in &mut smoothed.values {
        *v = v.clamp(lo, hi);
    }
    AlphaMap::from_plane(smoothed)
}
