//! Output staging and run manifests.
//!
//! Files are written to temporaries next to their destination and only
//! renamed into place once the whole command has succeeded, so a failed run
//! leaves no partial outputs behind.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use tempfile::NamedTempFile;

enum Target {
    File(PathBuf, NamedTempFile),
    Stdout(String),
}

#[derive(Default)]
pub struct Outputs {
    staged: Vec<Target>,
}

impl Outputs {
    /// Stages `content` for `path`, or for standard output when `None`.
    pub fn put(&mut self, path: Option<&Path>, content: String) -> Result<()> {
        let target = match path {
            None => Target::Stdout(content),
            Some(p) => {
                let dir = match p.parent() {
                    Some(d) if !d.as_os_str().is_empty() => d,
                    _ => Path::new("."),
                };
                let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("staging {}", p.display()))?;
                tmp.write_all(content.as_bytes())
                    .with_context(|| format!("writing {}", p.display()))?;
                Target::File(p.to_path_buf(), tmp)
            }
        };
        self.staged.push(target);
        Ok(())
    }

    pub fn paths(&self) -> Vec<PathBuf> {
        self.staged
            .iter()
            .filter_map(|t| match t {
                Target::File(p, _) => Some(p.clone()),
                Target::Stdout(_) => None,
            })
            .collect()
    }

    pub fn commit(self) -> Result<()> {
        let mut stdout = std::io::stdout().lock();
        for t in self.staged {
            match t {
                Target::File(p, tmp) => {
                    tmp.persist(&p)
                        .with_context(|| format!("moving output into {}", p.display()))?;
                }
                Target::Stdout(s) => stdout.write_all(s.as_bytes())?,
            }
        }
        stdout.flush()?;
        Ok(())
    }
}

/// Everything needed to replay a run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub version: &'static str,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Subcommand options with defaults filled in.
    pub config: serde_json::Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    /// Headline results of the run.
    pub summary: serde_json::Value,
}

pub const DEFAULT_MANIFEST: &str = "diffcorrect-run.manifest.json";

pub fn manifest_path(explicit: Option<&Path>, outputs: &[PathBuf]) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match outputs.first() {
        Some(o) => {
            let mut name = o.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        }
        None => PathBuf::from(DEFAULT_MANIFEST),
    }
}
