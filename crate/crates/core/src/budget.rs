use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the scalar operations an exhaustive job may perform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget(u128);

impl Budget {
    pub const DEFAULT_OPS: u128 = 10_000_000_000;

    pub fn new(max_ops: u128) -> Result<Self> {
        if max_ops == 0 {
            return Err(Error::InvalidArgument("budget must be positive".into()));
        }
        Ok(Self(max_ops))
    }

    pub fn unlimited() -> Self {
        Self(u128::MAX)
    }

    pub fn max_ops(self) -> u128 {
        self.0
    }

    /// Refuses a job whose operation count exceeds the budget.
    pub fn check(self, required: u128) -> Result<()> {
        if required > self.0 {
            Err(Error::BudgetExceeded {
                required,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self(Self::DEFAULT_OPS)
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub(crate) fn saturating_pow(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}
