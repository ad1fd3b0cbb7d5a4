//! Artifact files. Data files are deterministic; wall-clock facts go to a
//! `.meta.json` sidecar.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone)]
pub struct Output {
    pub dir: PathBuf,
    pub format: Format,
    pub svg: bool,
}

impl Output {
    pub fn new(dir: impl AsRef<Path>, format: Format, svg: bool) -> Result<Self, CliError> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self {
            dir: dir.as_ref().to_path_buf(),
            format,
            svg,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv<R: Serialize>(&self, stem: &str, rows: &[R]) -> Result<(), CliError> {
        if self.format == Format::Json {
            return Ok(());
        }
        let mut w = csv::Writer::from_path(self.path(&format!("{stem}.csv")))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize>(&self, stem: &str, value: &T) -> Result<(), CliError> {
        if self.format == Format::Csv {
            return Ok(());
        }
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.path(&format!("{stem}.json")), text)?;
        Ok(())
    }

    pub fn svg(&self, stem: &str, doc: impl FnOnce() -> String) -> Result<(), CliError> {
        if self.svg {
            fs::write(self.path(&format!("{stem}.svg")), doc())?;
        }
        Ok(())
    }

    pub fn sidecar<T: Serialize>(
        &self,
        stem: &str,
        config: &T,
        threads: usize,
    ) -> Result<(), CliError> {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let meta = serde_json::json!({
            "command": stem,
            "timestamp_unix": secs,
            "version": env!("CARGO_PKG_VERSION"),
            "threads": threads,
            "config": config,
        });
        fs::write(
            self.path(&format!("{stem}.meta.json")),
            serde_json::to_string_pretty(&meta)? + "\n",
        )?;
        Ok(())
    }
}
