use discursive_ledger::Timestamp;

/// Source of block timestamps.
pub trait Clock: Send {
    fn now(&mut self) -> Timestamp;
}

/// Wall-clock time.
#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&mut self) -> Timestamp {
        Timestamp::now()
    }
}

/// Deterministic clock advancing one millisecond per reading, so mock runs
/// produce byte-identical ledgers.
#[derive(Debug, Clone)]
pub struct LogicalClock {
    next_ms: i64,
}

impl LogicalClock {
    /// First reading is one millisecond after `after`.
    pub fn after(after: &Timestamp) -> Self {
        Self { next_ms: after.millis() + 1 }
    }
}

impl Clock for LogicalClock {
    fn now(&mut self) -> Timestamp {
        let t = Timestamp::from_millis(self.next_ms).unwrap_or_else(|_| Timestamp::epoch());
        self.next_ms += 1;
        t
    }
}
