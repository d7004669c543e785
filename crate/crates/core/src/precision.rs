//! Working precision and the derived acceptance tolerance.

use serde::{Deserialize, Serialize};

/// Default working precision in bits.
pub const DEFAULT_BITS: usize = 128;

/// Precision budget for every numerical step.
///
/// `tolerance` defaults to `2^(-working_bits/2)`; it is stored as a base-2
/// exponent so that it survives serialization without binary-float noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub working_bits: usize,
    /// The tolerance is `2^(-tolerance_exp)`.
    pub tolerance_exp: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self::with_bits(DEFAULT_BITS)
    }
}

impl PrecisionPolicy {
    /// Policy at `bits` of working precision with the default tolerance.
    ///
    /// Values below 16 bits are raised to 16 so that the tolerance stays
    /// meaningfully below 1.
    pub fn with_bits(bits: usize) -> Self {
        let bits = bits.max(16);
        Self {
            working_bits: bits,
            tolerance_exp: (bits / 2) as u32,
        }
    }

    pub fn tolerance(&self) -> f64 {
        2f64.powi(-(self.tolerance_exp as i32))
    }

    /// The same policy at twice the working precision.
    pub fn doubled(&self) -> Self {
        Self::with_bits(self.working_bits * 2)
    }

    /// Finite-difference step used by the `dd^c` check: `2^(-working_bits/6)`.
    pub fn default_fd_step_exp(&self) -> i32 {
        (self.working_bits / 6) as i32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_below_one_and_monotone() {
        let mut last = 1.0;
        for bits in [16, 32, 64, 128, 256, 512] {
            let p = PrecisionPolicy::with_bits(bits);
            assert!(p.tolerance() < 1.0);
            assert!(p.tolerance() < last);
            last = p.tolerance();
        }
    }

    #[test]
    fn default_is_128_bits() {
        let p = PrecisionPolicy::default();
        assert_eq!(p.working_bits, 128);
        assert_eq!(p.tolerance(), 2f64.powi(-64));
        assert_eq!(p.doubled().working_bits, 256);
    }
}
