//! Single-writer output: JSON documents and CSV tables with a provenance preamble.

use std::io::Write;
use std::path::PathBuf;

use hyperbergman::config::RunConfig;
use hyperbergman::{Error, Result};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

pub struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    pub fn new(path: Option<PathBuf>) -> Self {
        Self { path }
    }

    fn emit(&self, bytes: &[u8]) -> Result<()> {
        match &self.path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| Error::Config(format!("stdout: {e}")))
            }
        }
    }

    /// `{"schema_version", "command", "config", "result"}`.
    pub fn json<T: Serialize>(&self, command: &str, cfg: &RunConfig, result: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            schema_version: u32,
            command: &'a str,
            config: &'a RunConfig,
            result: &'a T,
        }
        let doc = Doc { schema_version: SCHEMA_VERSION, command, config: cfg, result };
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.emit(text.as_bytes())
    }

    /// CSV preceded by `# schema_version=..`, `# command=..` and `# config=..` lines.
    pub fn csv<R: Serialize>(&self, command: &str, cfg: &RunConfig, rows: &[R]) -> Result<()> {
        let mut buf = format!(
            "# schema_version={SCHEMA_VERSION}\n# command={command}\n# config={}\n",
            serde_json::to_string(cfg)?
        )
        .into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in rows {
                w.serialize(r).map_err(|e| Error::Config(format!("csv: {e}")))?;
            }
            w.flush().map_err(|e| Error::Config(format!("csv: {e}")))?;
        }
        self.emit(&buf)
    }
}
