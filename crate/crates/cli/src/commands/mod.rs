//! One module per subcommand.

pub mod bdrate;
pub mod degrade;
pub mod metrics;
pub mod partition;
pub mod pipeline;
pub mod sharpen;
pub mod sweep;

use std::path::Path;

use crate::fail::Fail;

/// Creates the directory a file will land in, if any.
pub fn ensure_parent(path: &Path) -> Result<(), Fail> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Fail::io(format!("{}: {e}", parent.display())))?;
        }
    }
    Ok(())
}

/// Shared RDO flags for commands that partition in-process.
#[derive(Debug, clap::Args)]
pub struct RdoFlags {
    /// Lagrange multiplier of the partition cost (distortion units per bit).
    #[arg(long, default_value_t = adasharp_core::RdoParams::default().lambda_rdo)]
    pub lambda: f64,
    /// Header-bit cost charged per leaf CU.
    #[arg(long = "leaf-bits", default_value_t = adasharp_core::RdoParams::default().leaf_bits)]
    pub leaf_bits: f64,
    /// Bit cost per split flag.
    #[arg(long = "split-bits", default_value_t = adasharp_core::RdoParams::default().split_bits)]
    pub split_bits: f64,
}

impl RdoFlags {
    /// Validated cost-model constants; violations are flag errors.
    pub fn params(&self) -> Result<adasharp_core::RdoParams, Fail> {
        let params = adasharp_core::RdoParams {
            lambda_rdo: self.lambda,
            leaf_bits: self.leaf_bits,
            split_bits: self.split_bits,
        };
        params.validate().map_err(|e| Fail::usage(e.to_string()))?;
        Ok(params)
    }
}

/// Mask sourcing shared by degrade and sharpen: explicit files when
/// `--masks` is given, otherwise an in-process partition per frame.
pub fn mask_source(
    masks: &Option<String>,
    rdo: &RdoFlags,
) -> Result<crate::frames::MaskSource, Fail> {
    match masks {
        Some(pattern) => Ok(crate::frames::MaskSource::Files(
            crate::pattern::FramePattern::parse(pattern).map_err(Fail::usage)?,
        )),
        None => Ok(crate::frames::MaskSource::Internal(rdo.params()?)),
    }
}
