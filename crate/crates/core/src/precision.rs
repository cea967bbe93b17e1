use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Extra bits carried internally on top of the requested precision.
pub const GUARD_BITS: u32 = 32;

/// Working precision for extended-precision computations.
///
/// Results are computed with `bits + GUARD_BITS` bits of mantissa and are
/// meant to be trusted to roughly `bits` bits, less whatever the problem's
/// conditioning consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionCtx {
    bits: u32,
}

impl PrecisionCtx {
    pub const MIN_BITS: u32 = 53;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(domain("precision", format!("{bits} bits requested, at least {} required", Self::MIN_BITS)));
        }
        Ok(Self { bits })
    }

    /// Default precision for degree-`n` Hankel computations: `max(256, 24 n)`.
    pub fn for_degree(n: usize) -> Self {
        Self { bits: (24 * n as u32).max(256) }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Mantissa length actually used for arithmetic.
    pub fn prec(&self) -> u32 {
        self.bits + GUARD_BITS
    }

    pub fn with_extra_bits(&self, extra: u32) -> Self {
        Self { bits: self.bits + extra }
    }

    pub fn real(&self, v: impl ToReal) -> Float {
        v.to_real(self.prec())
    }

    pub fn zero(&self) -> Float {
        Float::new(self.prec())
    }

    /// `2^-bits`.
    pub fn eps(&self) -> Float {
        Float::with_val(self.prec(), 1) >> self.bits
    }

    /// Number of significant decimal digits worth printing: `bits / 3.3`, capped at 30.
    pub fn print_digits(&self) -> usize {
        ((self.bits as f64 / 3.3) as usize).clamp(1, 30)
    }
}

impl Default for PrecisionCtx {
    fn default() -> Self {
        Self { bits: 256 }
    }
}

/// Anything that converts exactly to a `Float` of a given precision.
pub trait ToReal {
    fn to_real(self, prec: u32) -> Float;
}

impl ToReal for f64 {
    fn to_real(self, prec: u32) -> Float {
        Float::with_val(prec, self)
    }
}

impl ToReal for i32 {
    fn to_real(self, prec: u32) -> Float {
        Float::with_val(prec, self)
    }
}

impl ToReal for &Float {
    fn to_real(self, prec: u32) -> Float {
        Float::with_val(prec, self)
    }
}

impl ToReal for Float {
    fn to_real(self, prec: u32) -> Float {
        if self.prec() == prec {
            self
        } else {
            Float::with_val(prec, &self)
        }
    }
}
