use std::path::Path;

use serde::Serialize;

use super::Config;
use crate::error::Result;

/// Record of one command-line run.
///
/// The manifest file also carries the wall-clock duration, which is left
/// out of CSV headers so that reruns produce identical data files.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
    pub config: Config,
}

impl RunManifest {
    pub fn new(command: &str, config: &Config) -> Self {
        Self {
            command: command.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed: config.seed,
            outputs: Vec::new(),
            wall_clock_seconds: 0.0,
            config: config.clone(),
        }
    }

    /// Register an output file name and return the `# key=value` header
    /// for it. Extra entries are appended after the manifest fields.
    pub fn header(&mut self, file: &str, extra: &[(&str, String)]) -> Vec<(String, String)> {
        if !self.outputs.iter().any(|f| f == file) {
            self.outputs.push(file.to_owned());
        }
        let mut meta = vec![
            ("command".to_owned(), self.command.clone()),
            ("version".to_owned(), self.version.clone()),
            ("seed".to_owned(), self.seed.to_string()),
            ("file".to_owned(), file.to_owned()),
        ];
        meta.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
        meta.push(("config".to_owned(), self.config.to_toml()));
        meta
    }

    pub fn file_name(&self) -> String {
        format!("{}.manifest.toml", self.command)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = toml::to_string(self).expect("manifest is representable as TOML");
        std::fs::write(dir.join(self.file_name()), text)?;
        Ok(())
    }
}
