use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Identifies the run that produced a file.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub command: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

pub struct OutputDir {
    root: PathBuf,
    provenance: Provenance,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path, provenance: Provenance) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            provenance,
            written: Vec::new(),
        })
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn write(&mut self, name: &str, contents: String) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// Comment lines carrying the provenance, for CSV and TOML files.
    pub fn comment_header(&self) -> String {
        format!(
            "# command={}\n# config_sha256={}\n# seed={}\n",
            self.provenance.command, self.provenance.config_sha256, self.provenance.seed
        )
    }

    pub fn csv<I>(&mut self, name: &str, header: &str, rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = String>,
    {
        let mut text = self.comment_header();
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(&row);
            text.push('\n');
        }
        self.write(name, text)
    }

    /// Pretty JSON object with a leading `provenance` member; `body` must
    /// serialize as an object.
    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<(), CliError> {
        let stamped = Stamped {
            provenance: &self.provenance,
            body,
        };
        let mut text = serde_json::to_string_pretty(&stamped)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        text.push('\n');
        self.write(name, text)
    }

    pub fn text(&mut self, name: &str, body: String) -> Result<(), CliError> {
        self.write(name, body)
    }
}
