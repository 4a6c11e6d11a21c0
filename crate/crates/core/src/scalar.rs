//! Scalar abstraction for times, velocities and contrast values.
//!
//! Pixel data, bucket values and Gram coefficients are always exact
//! integers. Quantities that are naturally fractional (seconds, pixels per
//! second, contrast ratios) are generic over [`Scalar`] so the same code runs
//! in exact rational arithmetic ([`crate::Exact`]) or in `f64`/`f32` when an
//! approximate answer is enough.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// Number type usable for simulation time and contrast figures.
pub trait Scalar: Num + Copy + PartialOrd + Debug + Send + Sync + 'static {
    /// `num / den`; `den` must be nonzero.
    fn from_fraction(num: i64, den: i64) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_fraction(v, 1)
    }

    fn floor_to_i64(self) -> i64;
    fn ceil_to_i64(self) -> i64;
    /// Nearest integer, halves rounded away from zero.
    fn round_to_i64(self) -> i64;
    fn to_f64(self) -> f64;

    /// Parses `"3"`, `"-0.25"`, `"1/5"`. Rational scalars keep decimal input exact.
    fn parse_str(s: &str) -> Option<Self>;
}

impl Scalar for f64 {
    fn from_fraction(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn floor_to_i64(self) -> i64 {
        self.floor() as i64
    }
    fn ceil_to_i64(self) -> i64 {
        self.ceil() as i64
    }
    fn round_to_i64(self) -> i64 {
        self.round() as i64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn parse_str(s: &str) -> Option<Self> {
        parse_exact(s)
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .or_else(|| s.trim().parse().ok())
            .filter(|v: &f64| v.is_finite())
    }
}

impl Scalar for f32 {
    fn from_fraction(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn floor_to_i64(self) -> i64 {
        self.floor() as i64
    }
    fn ceil_to_i64(self) -> i64 {
        self.ceil() as i64
    }
    fn round_to_i64(self) -> i64 {
        self.round() as i64
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn parse_str(s: &str) -> Option<Self> {
        f64::parse_str(s).map(|v| v as f32)
    }
}

impl Scalar for Ratio<i64> {
    fn from_fraction(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
    fn floor_to_i64(self) -> i64 {
        *self.floor().numer()
    }
    fn ceil_to_i64(self) -> i64 {
        *self.ceil().numer()
    }
    fn round_to_i64(self) -> i64 {
        *self.round().numer()
    }
    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
    fn parse_str(s: &str) -> Option<Self> {
        parse_exact(s)
    }
}

/// Exact parse of an integer, a terminating decimal or a `num/den` fraction.
pub fn parse_exact(s: &str) -> Option<Ratio<i64>> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().ok()?;
        let den: i64 = den.trim().parse().ok()?;
        if den == 0 {
            return None;
        }
        return Some(Ratio::new(num, den));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    if frac_part.len() > 17 {
        return None;
    }
    let scale = 10i64.checked_pow(frac_part.len() as u32)?;
    let int_val: i64 = if int_part.is_empty() { 0 } else { int_part.parse().ok()? };
    let frac_val: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
    let num = int_val.checked_mul(scale)?.checked_add(frac_val)?;
    Some(Ratio::new(if negative { -num } else { num }, scale))
}

/// Formats an exact value as a terminating decimal when possible, else `num/den`.
pub fn format_exact(v: Ratio<i64>) -> String {
    let den = *v.denom();
    let mut d = den;
    while d % 2 == 0 {
        d /= 2;
    }
    while d % 5 == 0 {
        d /= 5;
    }
    if d != 1 {
        return format!("{}/{}", v.numer(), den);
    }
    // den = 2^a 5^b; scale to a power of ten
    let mut digits = 0u32;
    while 10i64.pow(digits) % den != 0 {
        digits += 1;
    }
    let scaled = v.numer() * (10i64.pow(digits) / den);
    if digits == 0 {
        return scaled.to_string();
    }
    let sign = if scaled < 0 { "-" } else { "" };
    let abs = scaled.unsigned_abs();
    let p = 10u64.pow(digits);
    format!("{sign}{}.{:0width$}", abs / p, abs % p, width = digits as usize)
}
