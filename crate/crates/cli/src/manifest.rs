//! Run manifest: what a command produced, written last so its presence
//! marks a complete run.

use std::path::Path;

use serde::Serialize;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: String,
    pub output_dir: String,
    pub emitted_files: Vec<String>,
    pub wall_time_seconds: f64,
    pub tool_version: String,
    pub base_seed: u64,
    pub config_sha256: String,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join("run_manifest.json"), body)?;
        Ok(())
    }
}
