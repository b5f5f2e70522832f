//! Flag-value parsers shared by several subcommands.

use adasharp_core::AlphaTable;

/// Parses a strength table given as `8:1.5,16:3,32:3,64:1.5`. All four CU
/// sizes must appear exactly once, in any order.
pub fn parse_alpha_table(s: &str) -> Result<AlphaTable, String> {
    let mut table = AlphaTable::default();
    let mut seen = [false; 4];
    for entry in s.split(',') {
        let (size, value) = entry
            .split_once(':')
            .ok_or_else(|| format!("entry '{entry}' is not of the form <cu-size>:<alpha>"))?;
        let alpha: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("entry '{entry}': '{value}' is not a number"))?;
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(format!("entry '{entry}': alpha must be finite and >= 0"));
        }
        let slot = match size.trim() {
            "8" => {
                table.size_8 = alpha;
                0
            }
            "16" => {
                table.size_16 = alpha;
                1
            }
            "32" => {
                table.size_32 = alpha;
                2
            }
            "64" => {
                table.size_64 = alpha;
                3
            }
            other => return Err(format!("unknown CU size '{other}' (expected 8, 16, 32, 64)")),
        };
        if seen[slot] {
            return Err(format!("CU size {} given more than once", size.trim()));
        }
        seen[slot] = true;
    }
    if seen != [true; 4] {
        let missing: Vec<&str> = [(0, "8"), (1, "16"), (2, "32"), (3, "64")]
            .iter()
            .filter(|(i, _)| !seen[*i])
            .map(|(_, n)| *n)
            .collect();
        return Err(format!("table is missing CU sizes {}", missing.join(", ")));
    }
    Ok(table)
}
