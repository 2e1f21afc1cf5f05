//! Self-contained approximation kit for the oracles.
//!
//! The oracles must not share code paths with the main pipeline, so this
//! module carries its own constants (ln 2 via the geometric series, pi via
//! Euler's two-term arctangent formula), its own exp/ln/sin/cos, and a small
//! value-plus-error-bound type. Everything is desk-scale: clarity over speed.

use num_bigint::BigInt;
use num_traits::Zero;
use std::sync::Mutex;

use crate::dyadic::{div_int_trunc, div_trunc, Dyadic};
use crate::error::{Error, Result};

fn pw2(e: i64) -> Dyadic {
    Dyadic::power_of_two(e).expect("exponent in range")
}

fn clog2(v: u64) -> u32 {
    64 - v.saturating_sub(1).leading_zeros()
}

/// A value with a certified absolute error bound: `|val - true| <= err`.
#[derive(Debug, Clone)]
pub struct Approx {
    pub val: Dyadic,
    pub err: Dyadic,
}

impl Approx {
    pub fn exact(val: Dyadic) -> Self {
        Approx {
            val,
            err: Dyadic::zero(),
        }
    }

    pub fn add(&self, other: &Approx) -> Result<Approx> {
        Ok(Approx {
            val: self.val.add(&other.val)?,
            err: self.err.add(&other.err)?,
        })
    }

    pub fn sub(&self, other: &Approx) -> Result<Approx> {
        Ok(Approx {
            val: self.val.sub(&other.val)?,
            err: self.err.add(&other.err)?,
        })
    }

    pub fn mul(&self, other: &Approx) -> Result<Approx> {
        let val = self.val.mul(&other.val)?;
        let err = self
            .val
            .abs()
            .mul(&other.err)?
            .add(&other.val.abs().mul(&self.err)?)?
            .add(&self.err.mul(&other.err)?)?;
        Ok(Approx { val, err })
    }

    pub fn neg(&self) -> Approx {
        Approx {
            val: self.val.neg(),
            err: self.err.clone(),
        }
    }

    pub fn shift(&self, s: i64) -> Result<Approx> {
        Ok(Approx {
            val: self.val.shift(s)?,
            err: self.err.shift(s)?,
        })
    }

    /// Truncates the value onto the `2^-grid` grid, widening the bound.
    pub fn round(&self, grid: u32) -> Result<Approx> {
        Ok(Approx {
            val: self.val.round(grid),
            err: self.err.add(&pw2(-(grid as i64)))?,
        })
    }

    /// Divides by an exact positive dyadic `d >= 2^floor_exp`.
    pub fn div_exact(&self, d: &Dyadic, floor_exp: i64, grid: u32) -> Result<Approx> {
        debug_assert!(!d.is_zero());
        let val = div_trunc(&self.val, d, grid)?;
        // |x/d - val| <= err/|d| + ulp <= err * 2^-floor_exp + ulp
        let err = self
            .err
            .shift(-floor_exp)?
            .add(&pw2(-(grid as i64)))?;
        Ok(Approx { val, err })
    }

    pub fn abs_upper(&self) -> Result<Dyadic> {
        self.val.abs().add(&self.err)
    }
}

static LN2_CACHE: Mutex<Option<(u32, Approx)>> = Mutex::new(None);
static PI_CACHE: Mutex<Option<(u32, Approx)>> = Mutex::new(None);

fn cached(
    slot: &Mutex<Option<(u32, Approx)>>,
    w: u32,
    compute: fn(u32) -> Result<Approx>,
) -> Result<Approx> {
    let mut guard = slot.lock().expect("oracle constant cache poisoned");
    if let Some((have, v)) = guard.as_ref() {
        if *have >= w {
            return Ok(v.clone());
        }
    }
    let v = compute(w)?;
    *guard = Some((w, v.clone()));
    Ok(v)
}

/// ln 2 = sum_{k>=1} 1 / (k 2^k), truncated once the scaled power underflows.
pub fn ok_ln2(w: u32) -> Result<Approx> {
    cached(&LN2_CACHE, w, |w| {
        let big = w + clog2(w as u64 + 2) + 6;
        let mut sum = BigInt::zero();
        let mut k: u64 = 1;
        while k <= big as u64 {
            sum += (BigInt::from(1u32) << (big as u64 - k)) / BigInt::from(k);
            k += 1;
        }
        // per-term truncations are below 1 ulp each, tail below 2 ulps
        let val = Dyadic::new(sum, -(big as i64))?;
        let err = Dyadic::from_int(big as i64 + 4).mul(&pw2(-(big as i64)))?;
        Ok(Approx { val, err })
    })
}

/// pi = 4 (atan(1/2) + atan(1/3)).
pub fn ok_pi(w: u32) -> Result<Approx> {
    cached(&PI_CACHE, w, |w| {
        let big = w + clog2(w as u64 + 2) + 8;
        let mut total = BigInt::zero();
        let mut terms: u64 = 0;
        for x in [2u32, 3] {
            let xx = BigInt::from(x * x);
            let mut power = (BigInt::from(1u32) << big) / BigInt::from(x);
            let mut j: u64 = 0;
            while !power.is_zero() {
                let term = &power / BigInt::from(2 * j + 1);
                if j % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
                power /= &xx;
                j += 1;
                terms += 1;
            }
        }
        let val = Dyadic::new(total << 2, -(big as i64))?;
        let err = Dyadic::from_int(4 * (terms as i64 + 4)).mul(&pw2(-(big as i64)))?;
        Ok(Approx { val, err })
    })
}

/// e^x for an exact dyadic x: reduce by multiples of ln 2, Taylor on the
/// remainder with a doubled-first-omitted-term tail bound.
pub fn ok_exp(x: &Dyadic, w: u32) -> Result<Approx> {
    if x.is_zero() {
        return Ok(Approx::exact(Dyadic::one()));
    }
    if x.floor_log2_abs() > 32 {
        return Err(Error::resource("oracle exp argument out of range"));
    }
    let l2_probe = ok_ln2(12)?;
    let q = div_trunc(x, &l2_probe.val, 6)?;
    let mut k = q.nearest_i64()?;
    let kabs0 = k.unsigned_abs().max(1);
    let w1 = w + clog2(kabs0 + 2) + k.max(0) as u32 + 8;
    let l2 = ok_ln2(w1)?;
    let mut r = x.sub(&l2.val.mul(&Dyadic::from_int(k))?)?;
    let three_quarters = Dyadic::new(3.into(), -2).unwrap();
    let mut guard = 0;
    while r.abs() > three_quarters {
        k += if r.is_negative() { -1 } else { 1 };
        r = x.sub(&l2.val.mul(&Dyadic::from_int(k))?)?;
        guard += 1;
        if guard > 4 {
            return Err(Error::contract("oracle exp reduction did not settle"));
        }
    }
    let kpos = k.max(0) as u32;
    let grid = w + kpos + 2 * clog2(w as u64 + 4) + 8;
    let ulp = pw2(-(grid as i64));
    let mut sum = Dyadic::one();
    let mut term = Dyadic::one();
    let mut err = Dyadic::zero();
    let mut j: u64 = 1;
    loop {
        term = term.mul(&r)?.round(grid);
        term = div_int_trunc(&term, j, grid)?;
        err = err.add(&ulp)?.add(&ulp)?.add(&ulp)?;
        sum = sum.add(&term)?.round(grid);
        if term.abs() <= ulp {
            err = err.add(&term.abs())?.add(&ulp)?;
            break;
        }
        j += 1;
        if j > 4 * (grid as u64 + 16) {
            return Err(Error::resource("oracle exp series diverged"));
        }
    }
    // account for accumulated per-term drift: each ulp triple above already
    // over-counts the propagated share since |r| <= 3/4 shrinks it
    let kabs = k.unsigned_abs();
    let delta = pw2(k + 3 + clog2(kabs + 1) as i64 - w1 as i64);
    let val = sum.shift(k)?;
    let total = err.shift(k)?.add(&delta)?;
    Ok(Approx { val, err: total })
}

/// ln k for an integer k >= 1: write k = m 2^a with m reduced into
/// [3/4, 3/2) and use atanh((z-1)/(z+1)).
pub fn ok_ln_int(k: u64, w: u32) -> Result<Approx> {
    debug_assert!(k >= 1);
    if k == 1 {
        return Ok(Approx::exact(Dyadic::zero()));
    }
    let kd = Dyadic::from_int(k as i64);
    ok_ln_pos(&kd, w)
}

/// ln y for an exact dyadic y > 0.
pub fn ok_ln_pos(y: &Dyadic, w: u32) -> Result<Approx> {
    debug_assert!(!y.is_zero() && !y.is_negative());
    let mut j = y.floor_log2_abs();
    let mut z = y.shift(-j)?;
    let three_halves = Dyadic::new(3.into(), -1).unwrap();
    if z >= three_halves {
        j += 1;
        z = z.shift(-1)?;
    }
    let grid = w + 2 * clog2(w as u64 + 4) + 10;
    let ulp = pw2(-(grid as i64));
    let u = div_trunc(&z.sub(&Dyadic::one())?, &z.add(&Dyadic::one())?, grid)?;
    let u2 = u.mul(&u)?.round(grid);
    let mut power = u.clone();
    let mut sum = u.clone();
    let mut err = Dyadic::zero();
    let mut i: u64 = 1;
    loop {
        power = power.mul(&u2)?.round(grid);
        let term = div_int_trunc(&power, 2 * i + 1, grid)?;
        sum = sum.add(&term)?.round(grid);
        err = err.add(&ulp)?.add(&ulp)?.add(&ulp)?.add(&ulp)?;
        if power.abs() <= ulp {
            err = err.add(&power.abs())?.add(&ulp)?;
            break;
        }
        i += 1;
        if i > 2 * (grid as u64 + 16) {
            return Err(Error::resource("oracle ln series diverged"));
        }
    }
    err = err.add(&ulp.shift(1)?)?; // u truncation through the 2-Lipschitz atanh
    let jabs = j.unsigned_abs();
    if j == 0 {
        return Ok(Approx {
            val: sum.shift(1)?,
            err: err.shift(1)?,
        });
    }
    let l2 = ok_ln2(w + clog2(jabs + 2) + 4)?;
    let val = Dyadic::from_int(j).mul(&l2.val)?.add(&sum.shift(1)?)?;
    let total = err
        .shift(1)?
        .add(&l2.err.mul(&Dyadic::from_int(jabs as i64))?)?;
    Ok(Approx { val, err: total })
}

/// cos and sin of an exact dyadic, reduced by the oracle's pi.
pub fn ok_sincos(y: &Dyadic, w: u32) -> Result<(Approx, Approx)> {
    if y.is_zero() {
        return Ok((Approx::exact(Dyadic::one()), Approx::exact(Dyadic::zero())));
    }
    if y.floor_log2_abs() > 32 {
        return Err(Error::resource("oracle sin/cos argument out of range"));
    }
    let pi_probe = ok_pi(12)?;
    let q = div_trunc(y, &pi_probe.val, 6)?;
    let mut k = q.nearest_i64()?;
    let w1 = w + clog2(k.unsigned_abs() + 2) + 8;
    let pi_full = ok_pi(w1)?;
    let bound = Dyadic::new(27.into(), -4).unwrap();
    let mut r = y.sub(&pi_full.val.mul(&Dyadic::from_int(k))?)?;
    let mut guard = 0;
    while r.abs() > bound {
        k += if r.is_negative() { -1 } else { 1 };
        r = y.sub(&pi_full.val.mul(&Dyadic::from_int(k))?)?;
        guard += 1;
        if guard > 4 {
            return Err(Error::contract("oracle sin/cos reduction did not settle"));
        }
    }
    let kabs = k.unsigned_abs();
    let delta = pi_full
        .err
        .add(&pw2(-(w1 as i64)))?
        .mul(&Dyadic::from_int(kabs as i64))?;
    let grid = w + 2 * clog2(w as u64 + 4) + 8;
    let ulp = pw2(-(grid as i64));
    let r2 = r.mul(&r)?.round(grid);
    let series = |start: Dyadic, odd: bool| -> Result<(Dyadic, Dyadic)> {
        let mut term = start.clone();
        let mut sum = start;
        let mut err = Dyadic::zero();
        let mut i: u64 = 0;
        loop {
            let div = if odd {
                (2 * i + 2) * (2 * i + 3)
            } else {
                (2 * i + 1) * (2 * i + 2)
            };
            term = term.mul(&r2)?.round(grid);
            term = div_int_trunc(&term, div, grid)?.neg();
            sum = sum.add(&term)?.round(grid);
            err = err.add(&ulp.shift(3)?)?;
            if i >= 1 && term.abs() <= ulp {
                err = err.add(&term.abs())?.add(&ulp)?;
                break;
            }
            i += 1;
            if i > 2 * (grid as u64 + 16) {
                return Err(Error::resource("oracle sin/cos series diverged"));
            }
        }
        Ok((sum, err))
    };
    let (cv, ce) = series(Dyadic::one(), false)?;
    let (sv, se) = series(r.clone(), true)?;
    let negate = k.rem_euclid(2) == 1;
    let fix = |v: Dyadic| if negate { v.neg() } else { v };
    Ok((
        Approx {
            val: fix(cv),
            err: ce.add(&delta)?,
        },
        Approx {
            val: fix(sv),
            err: se.add(&delta)?,
        },
    ))
}
