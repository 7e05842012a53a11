// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;
use crate::error::CliError;

/// One produced artifact.
pub struct Artifact {
    pub name: String,
    pub body: String,
}

pub struct Sink {
    pub out_dir: Option<PathBuf>,
    pub format: Format,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Writes rows with a header, prefixed by `#` comment lines.
pub fn to_csv<T: Serialize>(comments: &[String], rows: &[T]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv"));
    out
}

/// Comment line carrying the resolved configuration.
pub fn config_comment(config: &Value) -> String {
    format!("config: {}", serde_json::to_string(config).expect("config serializes"))
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

impl Sink {
    /// Prints the first artifact to stdout, or writes all of them plus a
    /// `<command>.meta.json` sidecar into the output directory.
    pub fn emit(&self, command: &str, artifacts: &[Artifact]) -> Result<(), CliError> {
        let Some(dir) = &self.out_dir else {
            let mut out = std::io::stdout().lock();
            for (i, a) in artifacts.iter().enumerate() {
                if i > 0 {
                    writeln!(out).ok();
                }
                out.write_all(a.body.as_bytes()).map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    reason: e.to_string(),
                })?;
            }
            return Ok(());
        };
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.display().to_string(),
            reason: e.to_string(),
        })?;
        for a in artifacts {
            write_file(&dir.join(&a.name), &a.body)?;
        }
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let meta = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "arguments": std::env::args().skip(1).collect::<Vec<_>>(),
            "created_unix_s": created,
            "files": artifacts.iter().map(|a| a.name.as_str()).collect::<Vec<_>>(),
        });
        write_file(&dir.join(format!("{command}.meta.json")), &to_json(&meta))
    }

    pub fn file_name(&self, stem: &str) -> String {
        format!("{stem}.{}", self.format.extension())
    }
}
