//! Work budgets for brute-force evaluators.

use crate::error::{Error, Result};

/// Default number of elementary evaluations a single call may spend.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "FFCIRCLE_BUDGET";

/// Budget from `FFCIRCLE_BUDGET`, falling back to the default when the
/// variable is unset or unparsable.
pub fn default_budget() -> u128 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v > 0.0)
        .map(|v| v as u128)
        .unwrap_or(DEFAULT_BUDGET)
}

/// Fails with [`Error::Budget`] when `needed` exceeds `budget`.
pub fn check(what: &str, needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        return Err(Error::Budget {
            what: what.to_string(),
            needed,
            budget,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_reports_overrun() {
        assert!(check("x", 10, 10).is_ok());
        match check("cells", 11, 10) {
            Err(Error::Budget { needed, budget, .. }) => assert_eq!((needed, budget), (11, 10)),
            other => panic!("{other:?}"),
        }
    }
}
