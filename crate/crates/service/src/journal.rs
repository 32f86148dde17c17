//! Append-only JSON-lines event log holding accounts and login attempts.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use passguess_core::NormalizedPhrase;
use serde::{Deserialize, Serialize};

use crate::ServiceError;

pub const JOURNAL_FILE: &str = "accounts.jsonl";

const WARNING: &str = "RESEARCH USE ONLY. This file stores passphrases in plaintext so that \
logins can be checked with edit-distance tolerance. Do not use it for real accounts.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AccountRecord {
    pub username: String,
    pub raw_passphrase: String,
    pub normalized: NormalizedPhrase,
    pub cue: String,
    pub created_at: DateTime<Utc>,
    pub reset_count: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LoginAttempt {
    pub username: String,
    pub attempt_text: String,
    pub accepted: bool,
    pub edit_distance: usize,
    pub relative: f64,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum Event {
    Header { warning: String },
    Account(AccountRecord),
    Login(LoginAttempt),
}

pub struct Journal {
    path: PathBuf,
    file: File,
}

impl Journal {
    /// Opens (creating if needed) the journal in `dir` and returns it along
    /// with every event already recorded.
    pub fn open(dir: &Path) -> Result<(Journal, Vec<Event>), ServiceError> {
        std::fs::create_dir_all(dir).map_err(|e| ServiceError::io(dir, e))?;
        let path = dir.join(JOURNAL_FILE);
        let events = if path.exists() {
            read_events(&path)?
        } else {
            Vec::new()
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| ServiceError::io(&path, e))?;
        let mut journal = Journal { path, file };
        if events.is_empty() {
            journal.append(&Event::Header {
                warning: WARNING.to_owned(),
            })?;
        }
        Ok((journal, events))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes one event and flushes it to disk before returning.
    pub fn append(&mut self, event: &Event) -> Result<(), ServiceError> {
        let mut line = serde_json::to_string(event).expect("events always serialize");
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.sync_data())
            .map_err(|e| ServiceError::io(&self.path, e))
    }
}

/// Parses a journal file, skipping blank lines.
pub fn read_events(path: &Path) -> Result<Vec<Event>, ServiceError> {
    let file = File::open(path).map_err(|e| ServiceError::io(path, e))?;
    let mut events = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| ServiceError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let event = serde_json::from_str(&line).map_err(|e| ServiceError::Journal {
            path: path.to_owned(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        events.push(event);
    }
    Ok(events)
}
