use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

/// Writes reports under one directory, stamping each with the config hash.
pub struct Reporter {
    dir: PathBuf,
    hash: String,
    command: &'static str,
    pub written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    config_hash: &'a str,
    report: &'a T,
}

impl Reporter {
    pub fn new(dir: &Path, hash: String, command: &'static str) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            hash,
            command,
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> anyhow::Result<()> {
        let env = Envelope {
            command: self.command,
            config_hash: &self.hash,
            report,
        };
        let mut text = serde_json::to_string_pretty(&env)?;
        text.push('\n');
        self.write(name, text)
    }

    /// CSV preceded by a `# config-hash:` comment line.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?;
        self.raw_csv(name, &body)
    }

    pub fn raw_csv(&mut self, name: &str, body: &str) -> anyhow::Result<()> {
        self.write(name, format!("# config-hash: {}\n{body}", self.hash))
    }

    fn write(&mut self, name: &str, text: String) -> anyhow::Result<()> {
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }
}
