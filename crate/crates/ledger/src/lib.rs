//! Tamper-evident, salted SHA-256 hash chain for agent interaction logs.
//!
//! ```
//! use discursive_ledger::{Kind, Ledger, Payload, Salt, Timestamp};
//!
//! let mut ledger = Ledger::genesis(Salt::new("deployment-secret")?, Timestamp::epoch());
//! ledger.append(Payload::new("a1", Kind::Initial, "claim 0: holds.", Timestamp::from_millis(1)?))?;
//! assert_eq!(ledger.verify().to_string(), "VERIFIED: Blockchain integrity intact");
//! # Ok::<(), discursive_ledger::LedgerError>(())
//! ```

mod block;
mod chain;
mod error;
mod store;

pub use block::{chain_hash, content_hash, Block, Digest, Kind, Payload, Salt, Timestamp, GENESIS_TOKEN};
pub use chain::{Ledger, Verdict, GENESIS_AGENT, GENESIS_MESSAGE, TAMPER_BANNER};
pub use error::{LedgerError, Result};
pub use store::{from_jsonl, load, save, to_jsonl, LEGACY_AGENT};
