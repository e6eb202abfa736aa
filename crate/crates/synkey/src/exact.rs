//! Exact nonnegative dyadic rationals.
//!
//! Every finite `f64` is a rational with a power-of-two denominator, so
//! probabilities derived from `f64` model parameters stay exactly
//! representable as `num / 2^exp` through products and sums. The secrecy
//! and uniformity audits rely on this to distinguish an exact zero from
//! numerical noise.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// A nonnegative rational `num / 2^exp`.
#[derive(Clone, Debug)]
pub struct Dyadic {
    num: BigUint,
    exp: u64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self {
            num: BigUint::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            num: BigUint::one(),
            exp: 0,
        }
    }

    pub fn from_u64(v: u64) -> Self {
        Self {
            num: BigUint::from(v),
            exp: 0,
        }
    }

    /// Exact conversion of a finite nonnegative `f64`.
    ///
    /// # Panics
    ///
    /// Panics on negative, infinite, or NaN input.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite() && v >= 0.0, "dyadic from {v}");
        if v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let mantissa = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (mantissa, -1074i64) // subnormal
        } else {
            (mantissa | (1u64 << 52), raw_exp - 1075)
        };
        let mut d = if e >= 0 {
            Self {
                num: BigUint::from(m) << (e as u64),
                exp: 0,
            }
        } else {
            Self {
                num: BigUint::from(m),
                exp: (-e) as u64,
            }
        };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.exp);
        if tz > 0 {
            self.num >>= tz;
            self.exp -= tz;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        let mut d = Dyadic { num: a + b, exp };
        d.normalize();
        d
    }

    /// `self - other`.
    ///
    /// # Panics
    ///
    /// Panics if the result would be negative.
    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        assert!(a >= b, "dyadic subtraction underflow");
        let mut d = Dyadic { num: a - b, exp };
        d.normalize();
        d
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        let mut d = Dyadic {
            num: &self.num * &other.num,
            exp: self.exp + other.exp,
        };
        d.normalize();
        d
    }

    pub fn mul_u64(&self, k: u64) -> Dyadic {
        let mut d = Dyadic {
            num: &self.num * BigUint::from(k),
            exp: self.exp,
        };
        d.normalize();
        d
    }

    pub fn pow(&self, k: u32) -> Dyadic {
        let mut d = Dyadic {
            num: self.num.pow(k),
            exp: self.exp * k as u64,
        };
        d.normalize();
        d
    }

    /// Rounded value; exact when the numerator fits a double.
    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let bits = self.num.bits();
        if bits <= 53 && self.exp <= 1023 {
            return self.num.to_f64().unwrap() / 2f64.powi(self.exp as i32);
        }
        let shift = bits.saturating_sub(54);
        let top = (&self.num >> shift).to_u64().unwrap() as f64;
        let scale = shift as i64 - self.exp as i64;
        if scale < -1200 {
            return 0.0;
        }
        top * 2f64.powi(scale as i32)
    }

    /// `self / denom` as a double, stable even when both operands are far
    /// outside the double range.
    pub fn ratio_f64(&self, denom: &Dyadic) -> f64 {
        assert!(!denom.is_zero(), "ratio with zero denominator");
        if self.num.is_zero() {
            return 0.0;
        }
        let (ab, bb) = (self.num.bits(), denom.num.bits());
        let a_shift = ab.saturating_sub(54);
        let b_shift = bb.saturating_sub(54);
        let a = (&self.num >> a_shift).to_u64().unwrap() as f64;
        let b = (&denom.num >> b_shift).to_u64().unwrap() as f64;
        let scale =
            (a_shift as i64 - b_shift as i64) + (denom.exp as i64 - self.exp as i64);
        if scale < -1200 {
            return 0.0;
        }
        (a / b) * 2f64.powi(scale as i32)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        a.cmp(&b)
    }
}
