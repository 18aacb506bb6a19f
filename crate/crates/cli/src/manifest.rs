//! Run manifests: the replay record every command leaves next to its
//! outputs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliResult;

pub const MANIFEST_FORMAT: u32 = 1;

/// Everything needed to reproduce a run: the exact argument vector, plus
/// bookkeeping about what was written.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub format: u32,
    /// Arguments as passed on the command line (binary name excluded).
    pub argv: Vec<String>,
    /// Files the run wrote, relative to the manifest's directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(argv: &[String], outputs: &[&str]) -> Self {
        Self {
            tool: "z2sync".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            format: MANIFEST_FORMAT,
            argv: argv.to_vec(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Writes `manifest.json` into the output directory.
    pub fn write(&self, out_dir: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(out_dir.join("manifest.json"), text + "\n")?;
        Ok(())
    }
}

/// Creates the output directory and writes a file into it.
pub fn write_output(out_dir: &Path, name: &str, content: &str) -> CliResult<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join(name), content)?;
    Ok(())
}
