//! Exact dyadic rational arithmetic: values of the form `mantissa * 2^exponent`.
//!
//! Every value is kept in canonical form (odd mantissa, or zero with exponent
//! zero), so structural equality coincides with value equality and values can
//! be hashed for memo tables. The only rounding mode is truncation toward
//! zero, which has one-sided error at most `2^-n` when rounding to `n`
//! fractional bits.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Exponents are confined well inside the machine range so that sums and
/// products of in-range exponents can never wrap. Hitting the limit is a
/// resource error, never silent wraparound.
pub const EXPONENT_LIMIT: i64 = 1 << 48;

/// An exact dyadic rational `mantissa * 2^exponent`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    /// Builds a canonical dyadic from raw parts.
    pub fn new(mantissa: BigInt, exponent: i64) -> Result<Self> {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize()?;
        Ok(d)
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: 0,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0).expect("small integer is always in range")
    }

    /// `2^e` as an exact dyadic.
    pub fn power_of_two(e: i64) -> Result<Self> {
        Dyadic::new(BigInt::one(), e)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.sign() == Sign::Minus
    }

    /// True when the value is an integer.
    pub fn is_integer(&self) -> bool {
        self.is_zero() || self.exponent >= 0
    }

    /// Number of significant bits in the mantissa (0 for zero).
    pub fn mantissa_bits(&self) -> u64 {
        self.mantissa.bits()
    }

    fn normalize(&mut self) -> Result<()> {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return Ok(());
        }
        let shift = self.mantissa.trailing_zeros().unwrap_or(0);
        if shift > 0 {
            self.mantissa >>= shift;
            self.exponent = self
                .exponent
                .checked_add(shift as i64)
                .ok_or_else(|| Error::resource("dyadic exponent overflow"))?;
        }
        if self.exponent.abs() > EXPONENT_LIMIT {
            return Err(Error::resource(format!(
                "dyadic exponent {} exceeds limit",
                self.exponent
            )));
        }
        Ok(())
    }

    /// Exact sum.
    pub fn add(&self, other: &Dyadic) -> Result<Dyadic> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        Dyadic::new(a + b, e)
    }

    /// Exact difference.
    pub fn sub(&self, other: &Dyadic) -> Result<Dyadic> {
        self.add(&other.neg())
    }

    /// Exact product.
    pub fn mul(&self, other: &Dyadic) -> Result<Dyadic> {
        if self.is_zero() || other.is_zero() {
            return Ok(Dyadic::zero());
        }
        let e = (self.exponent as i128) + (other.exponent as i128);
        if e.unsigned_abs() > EXPONENT_LIMIT as u128 {
            return Err(Error::resource("dyadic exponent overflow in mul"));
        }
        Dyadic::new(&self.mantissa * &other.mantissa, e as i64)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: if self.mantissa.is_zero() {
                0
            } else {
                self.exponent
            },
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Exact multiplication by `2^shift`.
    pub fn shift(&self, shift: i64) -> Result<Dyadic> {
        if self.is_zero() {
            return Ok(Dyadic::zero());
        }
        let e = (self.exponent as i128) + (shift as i128);
        if e.unsigned_abs() > EXPONENT_LIMIT as u128 {
            return Err(Error::resource("dyadic exponent overflow in shift"));
        }
        Ok(Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: e as i64,
        })
    }

    /// Truncates toward zero so that the result is a multiple of `2^-n`.
    /// The error is at most `2^-n` and the result never grows in magnitude.
    pub fn round(&self, n: u32) -> Dyadic {
        self.round_to_exponent(-(n as i64))
    }

    /// Truncates toward zero to a multiple of `2^e`.
    pub fn round_to_exponent(&self, e: i64) -> Dyadic {
        if self.is_zero() || self.exponent >= e {
            return self.clone();
        }
        let shift = (e - self.exponent) as u64;
        if shift >= self.mantissa.bits() {
            return Dyadic::zero();
        }
        // BigInt >> rounds toward negative infinity; truncate the magnitude
        // instead so both signs round toward zero.
        let m = self.mantissa.abs() >> shift;
        let m = if self.is_negative() { -m } else { m };
        Dyadic::new(m, e).expect("rounding only raises the exponent")
    }

    /// Value comparison (canonical form makes equality structural, but
    /// ordering still needs alignment).
    pub fn cmp_value(&self, other: &Dyadic) -> Ordering {
        let sa = self.mantissa.sign();
        let sb = other.mantissa.sign();
        if sa != sb {
            return match (sa, sb) {
                (Sign::Minus, _) => Ordering::Less,
                (_, Sign::Minus) => Ordering::Greater,
                (Sign::NoSign, Sign::Plus) => Ordering::Less,
                (Sign::Plus, Sign::NoSign) => Ordering::Greater,
                _ => Ordering::Equal,
            };
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same nonzero sign: compare magnitudes via floor(log2) first to
        // avoid aligning wildly different exponents.
        let la = self.exponent + self.mantissa.bits() as i64;
        let lb = other.exponent + other.mantissa.bits() as i64;
        if la != lb {
            let mag = if la < lb {
                Ordering::Less
            } else {
                Ordering::Greater
            };
            return if sa == Sign::Minus { mag.reverse() } else { mag };
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        a.cmp(&b)
    }

    /// Largest `f` with `2^f <= |self|`. Requires a nonzero value.
    pub fn floor_log2_abs(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.exponent + self.mantissa.bits() as i64 - 1
    }

    /// Smallest `c` with `|self| <= 2^c`. Requires a nonzero value.
    pub fn ceil_log2_abs(&self) -> i64 {
        debug_assert!(!self.is_zero());
        let f = self.floor_log2_abs();
        if self.mantissa.magnitude().count_ones() == 1 {
            f
        } else {
            f + 1
        }
    }

    /// Parses a signed decimal numeral (optional fraction and exponent,
    /// e.g. `-1.25e-3`) into a dyadic within `2^-n` of its value.
    pub fn from_decimal(text: &str, n: u32) -> Result<Dyadic> {
        let t = text.trim();
        let (sign, rest) = match t.strip_prefix('-') {
            Some(r) => (-1, r),
            None => (1, t.strip_prefix('+').unwrap_or(t)),
        };
        let (mant_part, exp_part) = match rest.find(['e', 'E']) {
            Some(i) => (&rest[..i], Some(&rest[i + 1..])),
            None => (rest, None),
        };
        let dec_exp: i64 = match exp_part {
            Some(e) if !e.is_empty() => e
                .parse()
                .map_err(|_| Error::parse(format!("bad exponent in {text:?}")))?,
            Some(_) => return Err(Error::parse(format!("empty exponent in {text:?}"))),
            None => 0,
        };
        let (int_part, frac_part) = match mant_part.find('.') {
            Some(i) => (&mant_part[..i], &mant_part[i + 1..]),
            None => (mant_part, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::parse(format!("no digits in {text:?}")));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(Error::parse(format!("bad digit in {text:?}")));
        }
        let digits: String = format!("{int_part}{frac_part}");
        let num: BigInt = digits
            .parse()
            .map_err(|_| Error::parse(format!("bad numeral {text:?}")))?;
        let num: BigInt = num * sign;
        let ten_exp = dec_exp - frac_part.len() as i64;
        // value = num * 10^ten_exp; convert by scaled truncating division.
        if ten_exp.unsigned_abs() > 1 << 24 {
            return Err(Error::resource("decimal exponent out of range"));
        }
        if num.is_zero() {
            return Ok(Dyadic::zero());
        }
        if ten_exp >= 0 {
            let v = num * BigInt::from(10u32).pow(ten_exp as u32);
            Dyadic::new(v, 0)
        } else {
            let den = BigInt::from(10u32).pow(ten_exp.unsigned_abs() as u32);
            // trunc(num * 2^(n+1) / den) * 2^-(n+1): error < 2^-(n+1) <= 2^-n.
            let scaled = (num << (n as u64 + 1)) / den;
            Dyadic::new(scaled, -(n as i64) - 1)
        }
    }

    /// Decimal string with exactly `digits` fractional digits, truncated
    /// toward zero.
    pub fn to_decimal(&self, digits: u32) -> String {
        let neg = self.is_negative();
        let m = self.mantissa.abs();
        let scaled = if self.exponent >= 0 {
            (m << self.exponent as u64) * BigInt::from(10u32).pow(digits)
        } else {
            (m * BigInt::from(10u32).pow(digits)) >> self.exponent.unsigned_abs()
        };
        let s = scaled.to_string();
        let (int_str, frac_str) = if digits == 0 {
            (s.clone(), String::new())
        } else if s.len() <= digits as usize {
            (
                "0".to_string(),
                format!("{:0>width$}", s, width = digits as usize),
            )
        } else {
            let split = s.len() - digits as usize;
            (s[..split].to_string(), s[split..].to_string())
        };
        let sign = if neg && (int_str != "0" || frac_str.chars().any(|c| c != '0')) {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            format!("{sign}{int_str}")
        } else {
            format!("{sign}{int_str}.{frac_str}")
        }
    }

    /// Bit-exact debug format `±m p e` with the mantissa in hex and the
    /// exponent in decimal, e.g. `+d p -4`.
    pub fn to_hex_dyadic(&self) -> String {
        let sign = if self.is_negative() { "-" } else { "+" };
        format!("{}{:x} p {}", sign, self.mantissa.abs(), self.exponent)
    }

    /// Parses the `±m p e` format produced by [`Dyadic::to_hex_dyadic`].
    pub fn from_hex_dyadic(text: &str) -> Result<Dyadic> {
        let t = text.trim();
        let (sign, rest) = match t.strip_prefix('-') {
            Some(r) => (-1, r),
            None => (
                1,
                t.strip_prefix('+')
                    .ok_or_else(|| Error::parse(format!("missing sign in {text:?}")))?,
            ),
        };
        let mut parts = rest.split(" p ");
        let mant = parts
            .next()
            .ok_or_else(|| Error::parse("missing mantissa"))?;
        let exp = parts
            .next()
            .ok_or_else(|| Error::parse("missing exponent"))?;
        if parts.next().is_some() {
            return Err(Error::parse(format!("trailing input in {text:?}")));
        }
        let m = BigInt::parse_bytes(mant.trim().as_bytes(), 16)
            .ok_or_else(|| Error::parse(format!("bad hex mantissa {mant:?}")))?;
        let e: i64 = exp
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad exponent {exp:?}")))?;
        Dyadic::new(m * sign, e)
    }

    /// Nearest integer, ties away from zero (so negation is exact).
    pub fn nearest_i64(&self) -> Result<i64> {
        use num_traits::ToPrimitive;
        if self.is_zero() {
            return Ok(0);
        }
        if self.floor_log2_abs() > 52 {
            return Err(Error::resource("value too large for integer rounding"));
        }
        let m = self.mantissa.abs();
        let e = self.exponent;
        let mag = if e >= 0 {
            m << e as u64
        } else {
            let shift = (-e) as u64;
            (m + (BigInt::one() << (shift - 1))) >> shift
        };
        let v = mag
            .to_i64()
            .ok_or_else(|| Error::resource("integer rounding overflow"))?;
        Ok(if self.is_negative() { -v } else { v })
    }

    /// Smallest integer that is >= the value.
    pub fn ceil_i64(&self) -> Result<i64> {
        use num_traits::ToPrimitive;
        if self.is_zero() {
            return Ok(0);
        }
        if self.floor_log2_abs() > 52 {
            return Err(Error::resource("value too large for ceil"));
        }
        let e = self.exponent;
        if e >= 0 {
            return (self.mantissa.clone() << e as u64)
                .to_i64()
                .ok_or_else(|| Error::resource("ceil overflow"));
        }
        let shift = (-e) as u64;
        let floor = &self.mantissa >> shift;
        let exact = (&self.mantissa - (&floor << shift)).is_zero();
        let f = floor
            .to_i64()
            .ok_or_else(|| Error::resource("ceil overflow"))?;
        Ok(if exact { f } else { f + 1 })
    }

    /// Integer value when the dyadic is a small integer.
    pub fn to_i64(&self) -> Option<i64> {
        use num_traits::ToPrimitive;
        if self.is_zero() {
            return Some(0);
        }
        if self.exponent < 0 || self.exponent > 62 {
            return None;
        }
        let v = self.mantissa.to_i64()?;
        v.checked_shl(self.exponent as u32)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({} * 2^{})", self.mantissa, self.exponent)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_hex_dyadic())
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

/// Truncating division `a / b` onto the grid `2^-grid`; error is strictly
/// below `2^-grid` and directed toward zero. `b` must be nonzero.
pub fn div_trunc(a: &Dyadic, b: &Dyadic, grid: u32) -> Result<Dyadic> {
    debug_assert!(!b.is_zero());
    if a.is_zero() {
        return Ok(Dyadic::zero());
    }
    // a / b * 2^grid = ma * 2^(ea - eb + grid) / mb
    let shift = (a.exponent() as i128) - (b.exponent() as i128) + grid as i128;
    if shift.unsigned_abs() > (EXPONENT_LIMIT as u128) * 2 {
        return Err(Error::resource("dyadic exponent overflow in division"));
    }
    let (num, den) = if shift >= 0 {
        (a.mantissa() << shift as u64, b.mantissa().clone())
    } else {
        (a.mantissa().clone(), b.mantissa() << shift.unsigned_abs() as u64)
    };
    let q = num / den; // BigInt division truncates toward zero
    Dyadic::new(q, -(grid as i64))
}

/// Truncating division by a positive machine integer onto the grid `2^-grid`.
pub fn div_int_trunc(a: &Dyadic, k: u64, grid: u32) -> Result<Dyadic> {
    debug_assert!(k > 0);
    if a.is_zero() {
        return Ok(Dyadic::zero());
    }
    let e = -(grid as i64);
    if a.exponent() >= e {
        let num = a.mantissa() << (a.exponent() - e) as u64;
        Dyadic::new(num / BigInt::from(k), e)
    } else {
        let q = a.mantissa() / BigInt::from(k);
        Dyadic::new(q, a.exponent()).map(|d| d.round_to_exponent(e))
    }
}
