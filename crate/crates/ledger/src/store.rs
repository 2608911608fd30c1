//! JSON-lines persistence and migration of legacy conversation logs.
//!
//! A legacy log is any file whose lines carry no hash fields: either bare
//! JSON strings or objects with at least a `message`. Such files are sealed
//! into a fresh chain behind a genesis block, one block per line.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::block::{Block, Kind, Payload, Salt, Timestamp};
use crate::chain::{Ledger, Verdict};
use crate::error::{LedgerError, Result};

/// Agent id given to migrated lines that name none.
pub const LEGACY_AGENT: &str = "legacy";

/// One JSON object per line, in block order, with a trailing newline.
pub fn to_jsonl(ledger: &Ledger) -> String {
    let mut out = String::new();
    for block in ledger.blocks() {
        out.push_str(&serde_json::to_string(block).expect("blocks always serialize"));
        out.push('\n');
    }
    out
}

pub fn save(ledger: &Ledger, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(to_jsonl(ledger).as_bytes())?;
    f.sync_all()?;
    Ok(())
}

/// Loads and verifies. The returned ledger is usable even when tampered so
/// callers can inspect it.
pub fn load(path: &Path, salt: Salt) -> Result<(Ledger, Verdict)> {
    let text = fs::read_to_string(path)?;
    from_jsonl(&text, salt, Timestamp::epoch())
}

#[derive(Deserialize)]
struct LegacyRecord {
    #[serde(default)]
    agent: Option<String>,
    #[serde(default)]
    kind: Option<Kind>,
    message: String,
    #[serde(default)]
    timestamp: Option<String>,
}

enum Line {
    Sealed(Block),
    Legacy(Payload),
}

fn parse_line(line_no: usize, raw: &str, genesis: &Timestamp) -> Result<Line> {
    let err = |message: String| LedgerError::Parse { line: line_no, message };
    let value: Value = serde_json::from_str(raw).map_err(|e| err(e.to_string()))?;
    let sealed = value
        .as_object()
        .is_some_and(|o| o.contains_key("content_hash") || o.contains_key("chain_hash"));
    if sealed {
        let block: Block = serde_json::from_value(value).map_err(|e| err(e.to_string()))?;
        return Ok(Line::Sealed(block));
    }
    let record = match value {
        Value::String(message) => LegacyRecord {
            agent: None,
            kind: None,
            message,
            timestamp: None,
        },
        other => serde_json::from_value(other).map_err(|e| err(e.to_string()))?,
    };
    if record.message.is_empty() {
        return Err(err("empty message".into()));
    }
    let timestamp = match record.timestamp {
        Some(t) => Timestamp::parse(&t).map_err(|e| err(e.to_string()))?,
        None => genesis.clone(),
    };
    Ok(Line::Legacy(Payload {
        agent: record.agent.unwrap_or_else(|| LEGACY_AGENT.to_owned()),
        kind: record.kind.unwrap_or(Kind::Initial),
        message: record.message,
        timestamp,
    }))
}

/// Parses JSON lines. `genesis` is the fixed instant used when a legacy log
/// has to be migrated.
pub fn from_jsonl(text: &str, salt: Salt, genesis: Timestamp) -> Result<(Ledger, Verdict)> {
    let mut sealed = Vec::new();
    let mut legacy = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        match parse_line(line_no, raw, &genesis)? {
            Line::Sealed(b) if legacy.is_empty() => sealed.push(b),
            Line::Legacy(p) if sealed.is_empty() => legacy.push(p),
            _ => {
                return Err(LedgerError::Parse {
                    line: line_no,
                    message: "mixes hashed blocks and legacy records".into(),
                })
            }
        }
    }
    if sealed.is_empty() && legacy.is_empty() {
        return Err(LedgerError::Parse {
            line: 0,
            message: "ledger file is empty".into(),
        });
    }
    let ledger = if legacy.is_empty() {
        Ledger::from_blocks(salt, sealed)
    } else {
        Ledger::seal_migrated(salt, genesis, legacy)
    };
    let verdict = ledger.verify();
    Ok((ledger, verdict))
}
