//! printf-style frame-index patterns for per-frame files.
//!
//! Mask files are stored one per frame under a pattern like
//! `masks/frame%05d.pgm`; the single `%d` / `%0<N>d` directive is replaced
//! with the (optionally zero-padded) frame index.

use std::path::PathBuf;

/// A parsed pattern: text around one integer directive.
#[derive(Debug, Clone)]
pub struct FramePattern {
    prefix: String,
    pad_width: usize,
    suffix: String,
}

impl FramePattern {
    /// Parses a pattern containing exactly one `%d` or `%0<N>d`.
    pub fn parse(pattern: &str) -> Result<FramePattern, String> {
        let Some(start) = pattern.find('%') else {
            return Err(format!(
                "pattern '{pattern}' has no frame-index directive (expected %d or e.g. %05d)"
            ));
        };
        let rest = &pattern[start + 1..];
        let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
        let after = &rest[digits.len()..];
        if !after.starts_with('d') {
            return Err(format!(
                "pattern '{pattern}' has a malformed directive (expected %d or e.g. %05d)"
            ));
        }
        let suffix = &after[1..];
        if suffix.contains('%') {
            return Err(format!(
                "pattern '{pattern}' has more than one directive (want exactly one)"
            ));
        }
        let pad_width = if digits.is_empty() {
            0
        } else if !digits.starts_with('0') {
            return Err(format!(
                "pattern '{pattern}' uses space padding; only zero padding (%0<N>d) is supported"
            ));
        } else {
            digits
                .parse()
                .map_err(|_| format!("pattern '{pattern}' has an oversized pad width"))?
        };
        Ok(FramePattern {
            prefix: pattern[..start].to_string(),
            pad_width,
            suffix: suffix.to_string(),
        })
    }

    /// The path for one frame index.
    pub fn path(&self, index: usize) -> PathBuf {
        PathBuf::from(format!(
            "{}{:0width$}{}",
            self.prefix,
            index,
            self.suffix,
            width = self.pad_width
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_padded_directive_expands() {
        let p = FramePattern::parse("masks/frame%05d.pgm").unwrap();
        assert_eq!(p.path(12), PathBuf::from("masks/frame00012.pgm"));
        assert_eq!(p.path(123456), PathBuf::from("masks/frame123456.pgm"));
    }

    #[test]
    fn bare_directive_uses_no_padding() {
        let p = FramePattern::parse("m%d.pgm").unwrap();
        assert_eq!(p.path(7), PathBuf::from("m7.pgm"));
    }

    #[test]
    fn malformed_patterns_are_rejected() {
        for bad in [
            "no-directive.pgm",
            "two%d-%d.pgm",
            "%x.pgm",
            "%5d.pgm",
            "trailing%",
        ] {
            assert!(FramePattern::parse(bad).is_err(), "accepted '{bad}'");
        }
    }
}
