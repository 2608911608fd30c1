//! Blocks, payloads and the two hash preimages.
//!
//! ```text
//! content_hash = SHA256(message 0x0A timestamp 0x0A salt)
//! chain_hash   = SHA256(hex(content_hash) 0x0A (hex(prev chain_hash) | "GENESIS") 0x0A salt)
//! ```
//!
//! Agent id and interaction kind are metadata and stay out of both preimages.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, TimeZone, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as _, Sha256};

use crate::error::{LedgerError, Result};

/// Token standing in for the previous chain hash at index 0.
pub const GENESIS_TOKEN: &str = "GENESIS";

/// 32-byte SHA-256 digest, rendered as lowercase hex.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for Digest {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out).map_err(|e| format!("bad digest {s:?}: {e}"))?;
        Ok(Self(out))
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Deployment secret mixed into every preimage. Never serialized.
#[derive(Clone, PartialEq, Eq)]
pub struct Salt(Vec<u8>);

impl Salt {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(LedgerError::EmptySalt);
        }
        Ok(Self(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for Salt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Salt(<redacted>)")
    }
}

/// UTC instant in canonical `YYYY-MM-DDTHH:MM:SS.mmmZ` form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(String);

impl Timestamp {
    /// Default fixed genesis instant.
    pub const EPOCH: &'static str = "1970-01-01T00:00:00.000Z";

    /// Parses any RFC 3339 instant and canonicalizes it to UTC milliseconds.
    pub fn parse(s: &str) -> Result<Self> {
        let dt = DateTime::parse_from_rfc3339(s)
            .map_err(|_| LedgerError::InvalidTimestamp(s.to_owned()))?;
        Ok(Self::from_datetime(dt.with_timezone(&Utc)))
    }

    pub fn from_millis(ms: i64) -> Result<Self> {
        let dt = Utc
            .timestamp_millis_opt(ms)
            .single()
            .ok_or_else(|| LedgerError::InvalidTimestamp(ms.to_string()))?;
        Ok(Self::from_datetime(dt))
    }

    pub fn now() -> Self {
        Self::from_datetime(Utc::now())
    }

    pub fn epoch() -> Self {
        Self(Self::EPOCH.to_owned())
    }

    fn from_datetime(dt: DateTime<Utc>) -> Self {
        Self(dt.to_rfc3339_opts(SecondsFormat::Millis, true))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn millis(&self) -> i64 {
        DateTime::parse_from_rfc3339(&self.0)
            .map(|d| d.timestamp_millis())
            .unwrap_or_default()
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Interaction type recorded with each block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Genesis,
    Initial,
    Critique,
    Harmonization,
    Revision,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Genesis => "genesis",
            Kind::Initial => "initial",
            Kind::Critique => "critique",
            Kind::Harmonization => "harmonization",
            Kind::Revision => "revision",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Payload {
    pub agent: String,
    pub kind: Kind,
    pub message: String,
    pub timestamp: Timestamp,
}

impl Payload {
    pub fn new(
        agent: impl Into<String>,
        kind: Kind,
        message: impl Into<String>,
        timestamp: Timestamp,
    ) -> Self {
        Self {
            agent: agent.into(),
            kind,
            message: message.into(),
            timestamp,
        }
    }
}

/// One ledger entry. Field order matches the on-disk JSON line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub index: u64,
    pub agent: String,
    pub kind: Kind,
    pub message: String,
    /// Kept verbatim so a hand-edited timestamp shows up as a hash mismatch.
    pub timestamp: String,
    pub content_hash: Digest,
    pub chain_hash: Digest,
    /// Set on blocks produced by migrating a legacy log.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub migrated: bool,
}

fn sha256(parts: &[&[u8]]) -> Digest {
    let mut h = Sha256::new();
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            h.update(b"\n");
        }
        h.update(part);
    }
    Digest(h.finalize().into())
}

pub fn content_hash(message: &str, timestamp: &str, salt: &Salt) -> Digest {
    sha256(&[message.as_bytes(), timestamp.as_bytes(), salt.as_bytes()])
}

/// `prev` is `None` for the block at index 0.
pub fn chain_hash(content: &Digest, prev: Option<&Digest>, salt: &Salt) -> Digest {
    let prev = prev.map_or_else(|| GENESIS_TOKEN.to_owned(), Digest::to_hex);
    sha256(&[content.to_hex().as_bytes(), prev.as_bytes(), salt.as_bytes()])
}

impl Block {
    pub(crate) fn seal(index: u64, payload: Payload, prev: Option<&Digest>, salt: &Salt) -> Self {
        let content = content_hash(&payload.message, payload.timestamp.as_str(), salt);
        Self {
            index,
            agent: payload.agent,
            kind: payload.kind,
            message: payload.message,
            timestamp: payload.timestamp.0,
            content_hash: content,
            chain_hash: chain_hash(&content, prev, salt),
            migrated: false,
        }
    }

    /// Payload view of this block. Fails if the stored timestamp is not RFC 3339.
    pub fn payload(&self) -> Result<Payload> {
        Ok(Payload {
            agent: self.agent.clone(),
            kind: self.kind,
            message: self.message.clone(),
            timestamp: Timestamp::parse(&self.timestamp)?,
        })
    }
}
