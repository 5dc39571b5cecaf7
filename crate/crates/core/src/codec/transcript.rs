//! JSON-lines transcripts: one labelled, base64-encoded record per line.
//!
//! ```text
//! {"label":"X","kind":"element","data":"RVBNMQEAAQIAAgEBAgM="}
//! ```

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::wire::{deserialize, serialize, Record};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Line {
    label: String,
    kind: String,
    data: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub label: String,
    pub record: Record,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn push(&mut self, label: impl Into<String>, record: Record) {
        self.entries.push(TranscriptEntry {
            label: label.into(),
            record,
        });
    }

    pub fn get(&self, label: &str) -> Option<&Record> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| &e.record)
    }

    /// Like [`Transcript::get`], failing with `Malformed` when absent.
    pub fn require(&self, label: &str) -> Result<&Record> {
        self.get(label)
            .ok_or_else(|| Error::Malformed(format!("transcript has no `{label}` entry")))
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let line = Line {
                label: e.label.clone(),
                kind: e.record.kind().name().to_string(),
                data: STANDARD.encode(serialize(&e.record)),
            };
            out.push_str(&serde_json::to_string(&line).expect("plain struct"));
            out.push('\n');
        }
        out
    }

    pub fn from_json_lines(text: &str) -> Result<Self> {
        let mut t = Transcript::default();
        for (n, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let line: Line = serde_json::from_str(raw)
                .map_err(|e| Error::Malformed(format!("line {}: {e}", n + 1)))?;
            let bytes = STANDARD
                .decode(line.data.as_bytes())
                .map_err(|e| Error::Malformed(format!("line {}: {e}", n + 1)))?;
            let record = deserialize(&bytes)?;
            if record.kind().name() != line.kind {
                return Err(Error::KindMismatch {
                    expected: line.kind,
                    found: record.kind().name().into(),
                });
            }
            t.push(line.label, record);
        }
        Ok(t)
    }
}
