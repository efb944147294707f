use thiserror::Error;

/// Default node allowance for every exact search.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("search budget of {limit} nodes exhausted")]
pub struct Exhausted {
    pub limit: u64,
}

/// Counts search nodes against a fixed allowance.
///
/// One budget is threaded through nested searches so that, for example, the
/// chromatic-number calls made while testing peripherality draw from the
/// same allowance as the hole enumeration that requested them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    #[inline]
    pub fn tick(&mut self) -> Result<(), Exhausted> {
        self.charge(1)
    }

    #[inline]
    pub fn charge(&mut self, nodes: u64) -> Result<(), Exhausted> {
        self.used = self.used.saturating_add(nodes);
        if self.used > self.limit {
            Err(Exhausted { limit: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn remaining(&self) -> u64 {
        self.limit.saturating_sub(self.used)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_NODE_BUDGET)
    }
}
