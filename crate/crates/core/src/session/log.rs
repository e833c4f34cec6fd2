//! JSONL persistence: one event record per line, append only.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde_json::Value;

use super::event::EventRecord;
use super::state::ReplayError;

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

/// Parse a JSONL log. Blank lines are skipped.
///
/// A line that is valid JSON but not a known event is reported against its
/// sequence number; anything unreadable is reported against its line.
pub fn parse_log(text: &str) -> Result<Vec<EventRecord>, ReplayError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line).map_err(|e| ReplayError::Malformed {
            line: i + 1,
            reason: e.to_string(),
        })?;
        let seq = value.get("seq").and_then(Value::as_u64);
        let rec: EventRecord = serde_json::from_value(value).map_err(|e| match seq {
            Some(seq) => ReplayError::Corrupt {
                seq,
                reason: e.to_string(),
            },
            None => ReplayError::Malformed {
                line: i + 1,
                reason: e.to_string(),
            },
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn to_jsonl(records: &[EventRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("event records serialize"));
        s.push('\n');
    }
    s
}

pub fn read_log(path: &Path) -> Result<Vec<EventRecord>, LogError> {
    let mut text = String::new();
    for line in BufReader::new(File::open(path)?).lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    Ok(parse_log(&text)?)
}

/// Append records and flush them to disk before returning.
pub fn append_log(path: &Path, records: &[EventRecord]) -> io::Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(to_jsonl(records).as_bytes())?;
    f.sync_data()
}
