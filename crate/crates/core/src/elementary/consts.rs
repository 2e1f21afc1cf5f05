//! Certified constants: ln 2 and pi to any requested precision, cached per
//! process at the highest precision computed so far. The cache only grows;
//! every value served is within `2^-w` of the true constant regardless of
//! cache state.

use num_bigint::BigInt;
use num_traits::Zero;
use std::sync::Mutex;

use crate::dyadic::Dyadic;
use crate::error::Result;


static LN2_CACHE: Mutex<Option<(u32, Dyadic)>> = Mutex::new(None);
static PI_CACHE: Mutex<Option<(u32, Dyadic)>> = Mutex::new(None);

fn clog2(v: u64) -> u32 {
    64 - v.saturating_sub(1).leading_zeros()
}

/// ln 2 with `|result - ln 2| <= 2^-w`.
pub fn ln2(w: u32) -> Result<Dyadic> {
    cached(&LN2_CACHE, w, compute_ln2)
}

/// pi with `|result - pi| <= 2^-w`.
pub fn pi(w: u32) -> Result<Dyadic> {
    cached(&PI_CACHE, w, compute_pi)
}

fn cached(
    slot: &Mutex<Option<(u32, Dyadic)>>,
    w: u32,
    compute: fn(u32) -> Result<Dyadic>,
) -> Result<Dyadic> {
    let mut guard = slot.lock().expect("constant cache poisoned");
    if let Some((have, v)) = guard.as_ref() {
        if *have > w {
            // |round(v, w+1) - c| <= 2^-(w+1) + 2^-have <= 2^-w
            return Ok(v.round(w + 1));
        }
    }
    let target = w + 1;
    let v = compute(target)?;
    *guard = Some((target, v.clone()));
    Ok(v)
}

/// ln 2 = 2 * atanh(1/3) = 2 * sum_j (1/3)^(2j+1) / (2j+1).
///
/// Fixed-point at `2^-big` with per-term integer truncation; the running
/// power carries at most 2 ulps of error, each term at most 3 ulps, and the
/// geometric tail after the power underflows is below 4 ulps.
fn compute_ln2(w: u32) -> Result<Dyadic> {
    let big = w + clog2(w as u64 + 2) + 8;
    let one = BigInt::from(1u32) << big;
    let mut power = &one / BigInt::from(3u32); // (1/3)^(2j+1) scaled
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * j + 1);
        power /= BigInt::from(9u32);
        j += 1;
    }
    // total error <= (3j + 4) ulps of 2^-big, then doubled by the final shift
    let val = Dyadic::new(sum << 1, -(big as i64))?;
    debug_assert!((6 * j + 8) < 1u64 << (big - w));
    Ok(val)
}

/// pi = 16 atan(1/5) - 4 atan(1/239) with
/// atan(1/x) = sum_j (-1)^j / ((2j+1) x^(2j+1)).
fn compute_pi(w: u32) -> Result<Dyadic> {
    let big = w + clog2(w as u64 + 2) + 13;
    let a5 = atan_inv_scaled(5, big);
    let a239 = atan_inv_scaled(239, big);
    let total = (a5 << 4) - (a239 << 2);
    let val = Dyadic::new(total, -(big as i64))?;
    Ok(val)
}

fn atan_inv_scaled(x: u32, big: u32) -> BigInt {
    let one = BigInt::from(1u32) << big;
    let xx = BigInt::from(x) * BigInt::from(x);
    let mut power = one / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * j + 1);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &xx;
        j += 1;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln2_matches_reference_digits() {
        // ln 2 = 0.69314718055994530941723212145818...
        let v = ln2(100).unwrap();
        let lit = Dyadic::from_decimal("0.6931471805599453094172321214581766", 120).unwrap();
        let err = v.sub(&lit).unwrap().abs();
        assert!(err <= Dyadic::power_of_two(-99).unwrap(), "ln2 err {err}");
    }

    #[test]
    fn pi_matches_reference_digits() {
        // pi = 3.14159265358979323846264338327950...
        let v = pi(100).unwrap();
        let lit = Dyadic::from_decimal("3.1415926535897932384626433832795029", 120).unwrap();
        let err = v.sub(&lit).unwrap().abs();
        assert!(err <= Dyadic::power_of_two(-99).unwrap(), "pi err {err}");
    }

    #[test]
    fn cache_serves_lower_precisions() {
        let hi = ln2(300).unwrap();
        let lo = ln2(50).unwrap();
        let err = hi.sub(&lo).unwrap().abs();
        assert!(err <= Dyadic::power_of_two(-49).unwrap());
    }

    #[test]
    fn nearest_int_ties_away_and_symmetry() {
        let d = |m: i64, e: i64| Dyadic::new(BigInt::from(m), e).unwrap();
        assert_eq!(d(3, -1).nearest_i64().unwrap(), 2); // 1.5 -> 2
        assert_eq!(d(-3, -1).nearest_i64().unwrap(), -2);
        assert_eq!(d(5, -2).nearest_i64().unwrap(), 1); // 1.25 -> 1
        assert_eq!(Dyadic::zero().nearest_i64().unwrap(), 0);
        assert_eq!(d(5, -2).ceil_i64().unwrap(), 2);
        assert_eq!(d(-5, -2).ceil_i64().unwrap(), -1);
        assert_eq!(d(1, 2).ceil_i64().unwrap(), 4);
    }
}
