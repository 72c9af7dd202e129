use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Three-valued outcome of an effect predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Neutral,
    Positive,
}

/// Relative tolerance under which two compared ratios are considered equal.
pub const RATIO_TOLERANCE: f64 = 1e-12;

impl Sign {
    /// Sign of `lhs - rhs`, neutral when they agree to `rel_tol` relative to their magnitude.
    pub fn compare<T: Scalar>(lhs: T, rhs: T, rel_tol: f64) -> Sign {
        let (a, b) = (lhs.to_f64_lossy(), rhs.to_f64_lossy());
        let scale = a.abs().max(b.abs());
        if (a - b).abs() <= rel_tol * scale {
            Sign::Neutral
        } else if a > b {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Neutral
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Neutral => 0.0,
            Sign::Positive => 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_with_tolerance() {
        assert_eq!(Sign::compare(1.0, 1.0 + 1e-14, RATIO_TOLERANCE), Sign::Neutral);
        assert_eq!(Sign::compare(1.0, 0.9, RATIO_TOLERANCE), Sign::Positive);
        assert_eq!(Sign::compare(0.0, 0.0, RATIO_TOLERANCE), Sign::Neutral);
        assert_eq!(Sign::compare(-2.0, 1.0, RATIO_TOLERANCE), Sign::Negative);
    }
}
