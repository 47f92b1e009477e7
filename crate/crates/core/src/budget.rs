//! Enumeration ceilings. Every exhaustive routine computes the size of its
//! search space up front and refuses to start above the ceiling.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

pub const DEFAULT_CEILING: u128 = 1_000_000_000;
pub const FORCED_CEILING: u128 = 100_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub ceiling: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { ceiling: DEFAULT_CEILING }
    }
}

impl Budget {
    pub fn new(ceiling: u128) -> Self {
        Budget { ceiling }
    }

    pub fn forced() -> Self {
        Budget { ceiling: FORCED_CEILING }
    }

    pub fn unlimited() -> Self {
        Budget { ceiling: u128::MAX }
    }

    /// Fails with `BudgetExceeded` if `required` is above the ceiling.
    pub fn check(&self, what: &str, required: &BigUint) -> Result<()> {
        let fits = required.to_u128().map(|r| r <= self.ceiling).unwrap_or(false);
        if fits {
            Ok(())
        } else {
            Err(Error::BudgetExceeded {
                what: what.to_string(),
                required: required.clone(),
                ceiling: self.ceiling,
            })
        }
    }

    /// Checks `p^exp * factor`.
    pub fn check_pow(&self, what: &str, p: u32, exp: usize, factor: u64) -> Result<()> {
        let mut req = pow_big(p, exp);
        req *= BigUint::from(factor.max(1));
        self.check(what, &req)
    }
}

pub fn pow_big(p: u32, exp: usize) -> BigUint {
    let mut r = BigUint::one();
    let b = BigUint::from(p);
    for _ in 0..exp {
        r *= &b;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceiling_is_inclusive() {
        let b = Budget::new(27);
        assert!(b.check_pow("x", 3, 3, 1).is_ok());
        assert!(b.check_pow("x", 3, 3, 2).is_err());
    }

    #[test]
    fn huge_requirement_is_refused() {
        let b = Budget::default();
        let e = b.check_pow("count", 7, 60, 1).unwrap_err();
        assert!(matches!(e, Error::BudgetExceeded { .. }));
    }
}
