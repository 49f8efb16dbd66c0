//! Output bookkeeping: atomic writes, SHA-256 digests and the run manifest.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::config::{ManifestFile, ManifestInfo, RunConfig};
use crate::error::Result;

pub const MANIFEST_NAME: &str = "manifest.toml";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write through a temporary sibling and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Collects inputs and outputs of one run, then writes the manifest.
#[derive(Debug)]
pub struct Recorder {
    out_dir: PathBuf,
    command: String,
    inputs: BTreeMap<String, String>,
    outputs: Vec<(String, String)>,
    pub messages: Vec<String>,
}

impl Recorder {
    pub fn new(out_dir: &Path, command: &str) -> Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        Ok(Recorder {
            out_dir: out_dir.to_path_buf(),
            command: command.to_string(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            messages: Vec::new(),
        })
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn output(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.out_dir.join(name), bytes)?;
        self.outputs.retain(|(n, _)| n != name);
        self.outputs.push((name.to_string(), sha256_hex(bytes)));
        Ok(())
    }

    /// Progress line, echoed to stderr.
    pub fn note(&mut self, msg: String) {
        eprintln!("{msg}");
        self.messages.push(msg);
    }

    pub fn output_names(&self) -> Vec<String> {
        self.outputs.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn finish(&self, cfg: &RunConfig, duration_s: f64) -> Result<PathBuf> {
        let file = ManifestFile {
            manifest: ManifestInfo {
                tool: "rydberg".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: self.command.clone(),
                duration_s,
            },
            inputs: self.inputs.clone(),
            outputs: self.outputs.iter().cloned().collect(),
            config: cfg.clone(),
        };
        let text = toml::to_string(&file).expect("manifest serialises");
        let path = self.out_dir.join(MANIFEST_NAME);
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}
