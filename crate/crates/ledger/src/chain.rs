use std::fmt;

use crate::block::{chain_hash, content_hash, Block, Digest, Kind, Payload, Salt, Timestamp};
use crate::error::{LedgerError, Result};

/// Agent id and message of the genesis block.
pub const GENESIS_AGENT: &str = "ledger";
pub const GENESIS_MESSAGE: &str = "GENESIS";

/// Line surfaced to users whenever verification fails.
pub const TAMPER_BANNER: &str = "LOG TAMPERED. TRUST HAS BEEN BREACHED. BLOCKCHAIN FAILS.";

/// Outcome of an integrity check. Tampering is a verdict, not an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    ContentMismatch(u64),
    ChainMismatch(u64),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }

    pub fn failing_index(&self) -> Option<u64> {
        match *self {
            Verdict::Verified => None,
            Verdict::ContentMismatch(i) | Verdict::ChainMismatch(i) => Some(i),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Verified => f.write_str("VERIFIED: Blockchain integrity intact"),
            Verdict::ContentMismatch(i) => write!(f, "TAMPERED: Content hash mismatch at block {i}"),
            Verdict::ChainMismatch(i) => write!(f, "TAMPERED: Chain hash mismatch at block {i}"),
        }
    }
}

/// Salted hash chain. Always starts with a genesis block when built through
/// [`Ledger::genesis`]; loaded ledgers may hold anything and must be verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ledger {
    salt: Salt,
    blocks: Vec<Block>,
}

impl Ledger {
    /// Deterministic in `(salt, timestamp)`.
    pub fn genesis(salt: Salt, timestamp: Timestamp) -> Self {
        let payload = Payload::new(GENESIS_AGENT, Kind::Genesis, GENESIS_MESSAGE, timestamp);
        let block = Block::seal(0, payload, None, &salt);
        Self {
            salt,
            blocks: vec![block],
        }
    }

    /// Wraps already-sealed blocks without checking them.
    pub fn from_blocks(salt: Salt, blocks: Vec<Block>) -> Self {
        Self { salt, blocks }
    }

    pub fn salt(&self) -> &Salt {
        &self.salt
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Mutable access for callers simulating tampering.
    pub fn blocks_mut(&mut self) -> &mut Vec<Block> {
        &mut self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn head(&self) -> Option<&Digest> {
        self.blocks.last().map(|b| &b.chain_hash)
    }

    pub fn append(&mut self, payload: Payload) -> Result<&Block> {
        if payload.message.is_empty() {
            return Err(LedgerError::EmptyMessage);
        }
        let index = self.blocks.len();
        let prev = self.blocks.last().map(|b| b.chain_hash);
        let block = Block::seal(index as u64, payload, prev.as_ref(), &self.salt);
        self.blocks.push(block);
        Ok(&self.blocks[index])
    }

    /// Recomputes every hash in order and reports the first failure. The
    /// content hash of a block is checked before its position and link.
    pub fn verify(&self) -> Verdict {
        if self.blocks.is_empty() {
            return Verdict::ChainMismatch(0);
        }
        for (i, block) in self.blocks.iter().enumerate() {
            let i = i as u64;
            if content_hash(&block.message, &block.timestamp, &self.salt) != block.content_hash {
                return Verdict::ContentMismatch(i);
            }
            let prev = (i > 0).then(|| &self.blocks[i as usize - 1].chain_hash);
            if block.index != i || chain_hash(&block.content_hash, prev, &self.salt) != block.chain_hash
            {
                return Verdict::ChainMismatch(i);
            }
        }
        Verdict::Verified
    }

    /// [`Ledger::verify`] plus a check against an externally recorded length
    /// and head hash, which catches truncation of trailing blocks.
    pub fn verify_against_head(&self, expected_len: usize, expected_head: &Digest) -> Verdict {
        let verdict = self.verify();
        if !verdict.is_verified() {
            return verdict;
        }
        let len = self.blocks.len();
        if len != expected_len {
            return Verdict::ChainMismatch(len.min(expected_len) as u64);
        }
        if self.head() != Some(expected_head) {
            return Verdict::ChainMismatch(len as u64 - 1);
        }
        Verdict::Verified
    }

    pub fn payloads(&self) -> Result<Vec<Payload>> {
        self.blocks.iter().map(Block::payload).collect()
    }

    /// Legitimate edit: keeps blocks `..index` and re-seals `payloads` in
    /// sequence from `index` onward. The result always verifies when the
    /// kept prefix did.
    pub fn rebuild_from(&self, index: usize, payloads: Vec<Payload>) -> Result<Ledger> {
        if index >= self.blocks.len() {
            return Err(LedgerError::IndexOutOfRange {
                index,
                len: self.blocks.len(),
            });
        }
        if payloads.iter().any(|p| p.message.is_empty()) {
            return Err(LedgerError::EmptyMessage);
        }
        let mut out = Ledger {
            salt: self.salt.clone(),
            blocks: self.blocks[..index].to_vec(),
        };
        for payload in payloads {
            let i = out.blocks.len();
            let prev = out.blocks.last().map(|b| b.chain_hash);
            out.blocks.push(Block::seal(i as u64, payload, prev.as_ref(), &out.salt));
        }
        Ok(out)
    }

    /// Re-seals every block under the current salt and marks it migrated.
    pub(crate) fn seal_migrated(salt: Salt, genesis: Timestamp, payloads: Vec<Payload>) -> Self {
        let mut ledger = Ledger::genesis(salt, genesis);
        for payload in payloads {
            let i = ledger.blocks.len();
            let prev = ledger.blocks.last().map(|b| b.chain_hash);
            let mut block = Block::seal(i as u64, payload, prev.as_ref(), &ledger.salt);
            block.migrated = true;
            ledger.blocks.push(block);
        }
        ledger
    }
}
