//! Encoder/decoder command templates.
//!
//! Templates are whitespace-separated command lines with placeholders:
//! the encode template takes `{input}`, `{output}`, `{crf}`, `{preset}`,
//! the decode template `{input}` and `{output}`, each exactly once.
//! Substitution happens after splitting, so substituted values (paths in
//! particular) land in single argv slots and never re-tokenize.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

/// Environment variable holding extra directories (PATH syntax) searched
/// ahead of PATH when resolving encoder/decoder binaries.
pub const ENCODER_PATH_VAR: &str = "ADASHARP_ENCODER_PATH";

fn default_preset() -> String {
    "medium".to_string()
}

/// How to drive one external encoder/decoder pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderSpec {
    /// Label used in manifests and reports (e.g. "h264").
    pub name: String,
    /// Command template producing a bitstream from a Y4M file.
    pub encode_template: String,
    /// Command template decoding a bitstream back to Y4M.
    pub decode_template: String,
    /// Value substituted for `{preset}`.
    #[serde(default = "default_preset")]
    pub preset: String,
}

fn check_placeholders(
    template: &str,
    role: &str,
    required: &[&str],
) -> Result<(), HarnessError> {
    for ph in required {
        match template.matches(ph).count() {
            1 => {}
            0 => {
                return Err(HarnessError::Template(format!(
                    "{role} template is missing {ph}: '{template}'"
                )))
            }
            n => {
                return Err(HarnessError::Template(format!(
                    "{role} template contains {ph} {n} times (want exactly once): '{template}'"
                )))
            }
        }
    }
    Ok(())
}

fn substitute(template: &str, pairs: &[(&str, &str)]) -> Vec<String> {
    template
        .split_whitespace()
        .map(|token| {
            let mut token = token.to_string();
            for (ph, value) in pairs {
                token = token.replace(ph, value);
            }
            token
        })
        .collect()
}

impl EncoderSpec {
    /// Builds a spec with the default "medium" preset, validating both
    /// templates.
    pub fn new(
        name: impl Into<String>,
        encode_template: impl Into<String>,
        decode_template: impl Into<String>,
    ) -> Result<Self, HarnessError> {
        let spec = EncoderSpec {
            name: name.into(),
            encode_template: encode_template.into(),
            decode_template: decode_template.into(),
            preset: default_preset(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the placeholder contract on both templates. Deserialized
    /// specs must be validated before use.
    pub fn validate(&self) -> Result<(), HarnessError> {
        check_placeholders(
            &self.encode_template,
            "encode",
            &["{input}", "{output}", "{crf}", "{preset}"],
        )?;
        check_placeholders(&self.decode_template, "decode", &["{input}", "{output}"])?;
        if self.name.is_empty() {
            return Err(HarnessError::Template("encoder name is empty".into()));
        }
        Ok(())
    }

    /// Encode argv for one rung.
    pub fn encode_argv(&self, input: &Path, output: &Path, crf: u32) -> Vec<String> {
        substitute(
            &self.encode_template,
            &[
                ("{input}", &input.to_string_lossy()),
                ("{output}", &output.to_string_lossy()),
                ("{crf}", &crf.to_string()),
                ("{preset}", &self.preset),
            ],
        )
    }

    /// Decode argv for one bitstream.
    pub fn decode_argv(&self, input: &Path, output: &Path) -> Vec<String> {
        substitute(
            &self.decode_template,
            &[
                ("{input}", &input.to_string_lossy()),
                ("{output}", &output.to_string_lossy()),
            ],
        )
    }
}

fn search_dirs() -> Vec<PathBuf> {
    let mut dirs = Vec::new();
    for var in [ENCODER_PATH_VAR, "PATH"] {
        if let Some(value) = std::env::var_os(var) {
            dirs.extend(std::env::split_paths(&value));
        }
    }
    dirs
}

fn resolve_in(command: &str, dirs: &[PathBuf]) -> Option<PathBuf> {
    if command.contains(std::path::MAIN_SEPARATOR) {
        let p = PathBuf::from(command);
        return p.is_file().then_some(p);
    }
    dirs.iter()
        .map(|d| d.join(command))
        .find(|candidate| candidate.is_file())
}

/// Locates a template's program: explicit paths are taken literally,
/// bare names are searched on ADASHARP_ENCODER_PATH and then PATH.
pub fn resolve_binary(command: &str) -> Result<PathBuf, HarnessError> {
    resolve_in(command, &search_dirs()).ok_or_else(|| HarnessError::MissingBinary {
        command: command.to_string(),
    })
}
