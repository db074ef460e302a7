//! Arithmetic models for the elimination kernels.
//!
//! The factorization in [`crate::cholesky`] is written once, generic over an
//! [`Arithmetic`]. [`Exact`] is plain IEEE double arithmetic; [`Significant`]
//! rounds the result of every individual `+ - * /` to a fixed number of
//! significant decimal digits, which models a computation carried out by hand
//! with a fixed digit budget.

use alloc::format;

/// Smallest digit budget accepted by [`round_sig`].
pub const MIN_DIGITS: u32 = 2;
/// Largest digit budget accepted by [`round_sig`].
pub const MAX_DIGITS: u32 = 15;

/// Rounds `x` to `digits` significant decimal digits, ties to even.
///
/// The decision is taken on the exact binary value of `x`, and the result is
/// the double nearest to the rounded decimal. Zero and non-finite values are
/// returned unchanged.
///
/// # Panics
///
/// If `digits` is outside `2..=15`.
pub fn round_sig(x: f64, digits: u32) -> f64 {
    assert!(
        (MIN_DIGITS..=MAX_DIGITS).contains(&digits),
        "significant digits must be in 2..=15, got {digits}"
    );
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    // `{:e}` formatting is exact and rounds half to even.
    let text = format!("{:.*e}", (digits - 1) as usize, x);
    text.parse().expect("formatted float parses")
}

/// How the result of each scalar operation is stored.
pub trait Arithmetic {
    fn round(&self, x: f64) -> f64;

    #[inline]
    fn sub(&self, a: f64, b: f64) -> f64 {
        self.round(a - b)
    }

    #[inline]
    fn mul(&self, a: f64, b: f64) -> f64 {
        self.round(a * b)
    }

    #[inline]
    fn div(&self, a: f64, b: f64) -> f64 {
        self.round(a / b)
    }
}

/// Native double precision.
#[derive(Clone, Copy, Debug, Default)]
pub struct Exact;

impl Arithmetic for Exact {
    #[inline(always)]
    fn round(&self, x: f64) -> f64 {
        x
    }
}

/// Every operation result is rounded to a fixed count of significant digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Significant {
    digits: u32,
}

impl Significant {
    pub fn new(digits: u32) -> crate::Result<Self> {
        if (MIN_DIGITS..=MAX_DIGITS).contains(&digits) {
            Ok(Self { digits })
        } else {
            Err(crate::Error::InvalidArgument(
                "significant digits must be in 2..=15",
            ))
        }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }
}

impl Arithmetic for Significant {
    #[inline]
    fn round(&self, x: f64) -> f64 {
        round_sig(x, self.digits)
    }
}
