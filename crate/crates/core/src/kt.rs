//! Exact values of the form `bits + log2(1 + steps)`.
//!
//! Plain complexities are the special case `steps = 0`. Comparisons reduce to
//! `2^bits * (1 + steps)` in integer arithmetic, so no floating point enters
//! any ordering, cutoff or tie decision.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Equality is value equality: `(4, 63)` equals `(10, 0)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KtValue {
    pub bits: u64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub steps: u64,
}

fn is_zero(v: &u64) -> bool {
    *v == 0
}

impl KtValue {
    /// Steps are capped below 2^63 so that `1 + steps` fits comfortably.
    pub const MAX_STEPS: u64 = (1 << 63) - 1;

    pub fn bits(bits: u64) -> Self {
        Self { bits, steps: 0 }
    }

    pub fn timed(bits: u64, steps: u64) -> Self {
        assert!(steps <= Self::MAX_STEPS, "step count out of range");
        Self { bits, steps }
    }

    /// `floor(bits + log2(1 + steps))`.
    pub fn floor(&self) -> u64 {
        self.bits + (63 - (self.steps + 1).leading_zeros() as u64)
    }

    /// Whether the value is a whole number of bits.
    pub fn is_integral(&self) -> bool {
        (self.steps + 1).is_power_of_two()
    }

    /// Approximate real value for display only.
    pub fn as_f64(&self) -> f64 {
        self.bits as f64 + (1.0 + self.steps as f64).log2()
    }

    /// `self <= limit` for an integer `limit`, exactly.
    pub fn le_bits(&self, limit: u64) -> bool {
        *self <= KtValue::bits(limit)
    }
}

impl Ord for KtValue {
    fn cmp(&self, other: &Self) -> Ordering {
        // compare 2^a (1+s) with 2^b (1+t)
        let (a, s) = (self.bits, self.steps as u128 + 1);
        let (b, t) = (other.bits, other.steps as u128 + 1);
        if a >= b {
            let d = a - b;
            if d >= 64 {
                Ordering::Greater
            } else {
                (s << d).cmp(&t)
            }
        } else {
            let d = b - a;
            if d >= 64 {
                Ordering::Less
            } else {
                s.cmp(&(t << d))
            }
        }
    }
}

impl PartialEq for KtValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for KtValue {}

impl PartialOrd for KtValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for KtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps == 0 {
            write!(f, "{}", self.bits)
        } else {
            write!(f, "{}+log2(1+{})", self.bits, self.steps)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn keep_and_discard_examples() {
        // |w| = 4, tau = 63: 4 + log2(64) = 10
        assert_eq!(KtValue::timed(4, 63), KtValue::bits(10));
        assert!(KtValue::timed(4, 63).le_bits(10));
        assert!(!KtValue::timed(4, 64).le_bits(10));
    }

    #[test]
    fn floor_and_integral() {
        assert_eq!(KtValue::timed(3, 0).floor(), 3);
        assert_eq!(KtValue::timed(3, 1).floor(), 4);
        assert_eq!(KtValue::timed(3, 2).floor(), 4);
        assert!(KtValue::timed(3, 3).is_integral());
        assert!(!KtValue::timed(3, 2).is_integral());
    }

    proptest! {
        #[test]
        fn order_agrees_with_big_integer_oracle(a in 0u64..90, s in 0u64..1_000_000, b in 0u64..90, t in 0u64..1_000_000) {
            use num_bigint::BigUint;
            let lhs = (BigUint::from(1u8) << a) * (s + 1);
            let rhs = (BigUint::from(1u8) << b) * (t + 1);
            prop_assert_eq!(KtValue::timed(a, s).cmp(&KtValue::timed(b, t)), lhs.cmp(&rhs));
        }
    }
}
