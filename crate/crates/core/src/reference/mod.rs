//! Independent brute-force oracles for tests and the CLI `--verify` mode.
//!
//! These deliberately use different algorithms from the main pipeline: a
//! Dirichlet sum with an integral tail bound, the alternating eta series
//! with the first-omitted-term bound, and an Euler-Maclaurin evaluation
//! with an explicit remainder. None of them call pipeline operations; they
//! share only the exact dyadic substrate.

mod bernoulli;
pub mod kit;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::approx::Ball;
use crate::dyadic::{div_trunc, Dyadic};
use crate::elementary::{ComplexBall, ComplexDyadic};
use crate::error::{Error, Result};

use kit::{ok_exp, ok_ln_int, ok_sincos, Approx};

fn pw2(e: i64) -> Dyadic {
    Dyadic::power_of_two(e).expect("exponent in range")
}

fn clog2(v: u64) -> u32 {
    64 - v.saturating_sub(1).leading_zeros()
}

#[derive(Debug, Clone)]
pub enum OracleValue {
    Real(Dyadic),
    Complex(ComplexDyadic),
}

/// An independently certified enclosure: `|value - truth| <= 2^radius_exp`.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: OracleValue,
    pub radius_exp: i64,
    pub method: &'static str,
}

impl OracleResult {
    fn from_real(value: Dyadic, err: &Dyadic, method: &'static str) -> Self {
        let radius_exp = if err.is_zero() { -(1 << 20) } else { err.ceil_log2_abs() };
        OracleResult {
            value: OracleValue::Real(value),
            radius_exp,
            method,
        }
    }

    fn from_complex(value: ComplexDyadic, err: &Dyadic, method: &'static str) -> Self {
        let radius_exp = if err.is_zero() { -(1 << 20) } else { err.ceil_log2_abs() };
        OracleResult {
            value: OracleValue::Complex(value),
            radius_exp,
            method,
        }
    }

    pub fn real_ball(&self) -> Option<Ball> {
        match &self.value {
            OracleValue::Real(v) => Some(Ball::new(v.clone(), self.radius_exp)),
            OracleValue::Complex(_) => None,
        }
    }

    pub fn complex_ball(&self) -> ComplexBall {
        let center = match &self.value {
            OracleValue::Real(v) => ComplexDyadic::from_real(v.clone()),
            OracleValue::Complex(z) => z.clone(),
        };
        ComplexBall {
            center,
            radius_exp: Some(self.radius_exp),
        }
    }
}

/// Exact binomial coefficient by the multiplicative formula.
pub fn oracle_binom_exact(k: u64, q: u64) -> Result<BigInt> {
    if q > k {
        return Err(Error::domain("binomial requires q <= k"));
    }
    if k > 4096 {
        return Err(Error::resource("binomial oracle capped at k <= 4096"));
    }
    let q = q.min(k - q);
    let mut acc = BigInt::one();
    for i in 0..q {
        acc = acc * BigInt::from(k - i) / BigInt::from(i + 1);
    }
    Ok(acc)
}

/// floor(x) for a dyadic, via floor(x) = -ceil(-x).
fn floor_i64(d: &Dyadic) -> Result<i64> {
    Ok(-d.neg().ceil_i64()?)
}

/// Picks `j` (so `K = 2^j`) such that `2^(-j * rate) / rate <= 2^-(need+2)`
/// certified in exact arithmetic; `rate` must be positive.
fn pick_scale(rate: &Dyadic, need: i64) -> Result<i64> {
    let lg = rate.floor_log2_abs(); // 2^lg <= rate, so 1/rate <= 2^-lg
    let target = need + 2 - lg.min(0);
    let quot = div_trunc(&Dyadic::from_int(target), rate, 8)?;
    let mut j = quot.ceil_i64()?.max(1) + 1;
    for _ in 0..256 {
        let achieved = floor_i64(&rate.mul(&Dyadic::from_int(j))?)?;
        if achieved >= target && j >= lg + 2 {
            return Ok(j);
        }
        j += 1;
    }
    Err(Error::resource("tail cutoff selection did not converge"))
}

/// `k^-s` for integer `k >= 1` and exact dyadic exponent parts
/// `(-sigma, -t)`; `t = 0` gives an exact-imaginary-zero result.
fn cpow_neg(k: u64, sigma: &Dyadic, t: &Dyadic, w: u32) -> Result<(Approx, Approx)> {
    if k == 1 {
        return Ok((Approx::exact(Dyadic::one()), Approx::exact(Dyadic::zero())));
    }
    // integer sigma with t = 0: exact power, single truncating division
    if t.is_zero() && sigma.is_integer() && !sigma.is_negative() {
        if let Some(si) = sigma.to_i64() {
            if si <= 256 {
                let kp = BigInt::from(k).pow(si as u32);
                let kd = Dyadic::new(kp, 0)?;
                let val = div_trunc(&Dyadic::one(), &kd, w + 4)?;
                return Ok((
                    Approx {
                        val,
                        err: pw2(-(w as i64) - 4),
                    },
                    Approx::exact(Dyadic::zero()),
                ));
            }
        }
    }
    let lnk = ok_ln_int(k, w + 12)?;
    let a_re = Approx {
        val: lnk.val.mul(&sigma.neg())?,
        err: lnk.err.mul(&sigma.abs())?,
    };
    let e = ok_exp(&a_re.val, w + 8)?;
    // |e^x - e^x*| <= 2 max(e^x, e^x*) |x - x*| for |x - x*| <= 1/2
    let e_err = e
        .err
        .add(&e.abs_upper()?.mul(&a_re.err)?.shift(1)?)?;
    if t.is_zero() {
        return Ok((
            Approx { val: e.val, err: e_err },
            Approx::exact(Dyadic::zero()),
        ));
    }
    let a_im = Approx {
        val: lnk.val.mul(&t.neg())?,
        err: lnk.err.mul(&t.abs())?,
    };
    let (c, s) = ok_sincos(&a_im.val, w + 8)?;
    let c = Approx {
        val: c.val,
        err: c.err.add(&a_im.err)?,
    };
    let s = Approx {
        val: s.val,
        err: s.err.add(&a_im.err)?,
    };
    let em = Approx { val: e.val, err: e_err };
    Ok((em.mul(&c)?, em.mul(&s)?))
}

/// Dirichlet sum with integral tail: `sum_{k=1}^K k^-s + K^(1-s)/(s-1)`.
/// The enclosure radius covers truncation, roundoff, and the gap between
/// the integral and the true tail (at most `K^-s`).
pub fn oracle_zeta_dirichlet(s: &Dyadic, n: u32) -> Result<OracleResult> {
    let one = Dyadic::one();
    let s1 = s.sub(&one)?;
    if s1 < pw2(-8) {
        return Err(Error::domain("dirichlet oracle requires s >= 1 + 2^-8"));
    }
    let j = pick_scale(&s1, n as i64 + 1)?;
    let int_s = s.is_integer().then(|| s.to_i64()).flatten().filter(|v| *v <= 64);
    let cap = if int_s.is_some() { 24 } else { 16 };
    if j > cap {
        return Err(Error::resource(format!(
            "dirichlet oracle needs K = 2^{j}, beyond the 2^{cap} cap"
        )));
    }
    let kmax = 1u64 << j;
    let w = n + clog2(kmax) + 12;
    let zero = Dyadic::zero();
    let mut acc = Approx::exact(one.clone());
    for k in 2..=kmax {
        let (re, _) = cpow_neg(k, s, &zero, w)?;
        acc = acc.add(&re)?.round(w)?;
    }
    // integral tail K^(1-s)/(s-1) = 2^(j(1-s))/(s-1)
    let expo = s1.neg().mul(&Dyadic::from_int(j))?; // j(1-s)
    let tail = if let Some(si) = int_s {
        let p = pw2(j * (1 - si));
        Approx {
            val: div_trunc(&p, &s1, w + 4)?,
            err: pw2(-(w as i64) - 4),
        }
    } else {
        let l2 = kit::ok_ln2(w + 8)?;
        let arg = Approx {
            val: expo.mul(&l2.val)?,
            err: l2.err.mul(&expo.abs())?,
        };
        let e = ok_exp(&arg.val, w + 8)?;
        let e = Approx {
            val: e.val.clone(),
            err: e.err.add(&e.abs_upper()?.mul(&arg.err)?.shift(1)?)?,
        };
        e.div_exact(&s1, s1.floor_log2_abs(), w + 4)?
    };
    let value = acc.val.add(&tail.val)?;
    // integral overestimates the true tail by at most K^-s <= 2^-(n+2)
    let err = acc
        .err
        .add(&tail.err)?
        .add(&pw2(-(n as i64) - 2))?;
    Ok(OracleResult::from_real(value, &err, "dirichlet"))
}

/// Alternating eta series with the first-omitted-term tail bound.
pub fn oracle_eta_alternating(s: &Dyadic, n: u32) -> Result<OracleResult> {
    if *s < pw2(-8) {
        return Err(Error::domain("eta oracle requires s >= 2^-8"));
    }
    let j = pick_scale(s, n as i64 + 1)?;
    let int_s = s.is_integer().then(|| s.to_i64()).flatten().filter(|v| *v <= 64);
    let cap = if int_s.is_some() { 24 } else { 16 };
    if j > cap {
        return Err(Error::resource(format!(
            "eta oracle needs K = 2^{j}, beyond the 2^{cap} cap"
        )));
    }
    let kmax = (1u64 << j) - 1;
    let w = n + clog2(kmax + 1) + 12;
    let zero = Dyadic::zero();
    let mut acc = Approx::exact(Dyadic::zero());
    for k in 1..=kmax {
        let (re, _) = cpow_neg(k, s, &zero, w)?;
        let signed = if k % 2 == 1 { re } else { re.neg() };
        acc = acc.add(&signed)?.round(w)?;
    }
    // first omitted term: (K+1)^-s = 2^(-j s) <= 2^-(n+2) by choice of j
    let err = acc.err.add(&pw2(-(n as i64) - 2))?;
    Ok(OracleResult::from_real(acc.val, &err, "eta-alternating"))
}

/// Euler-Maclaurin evaluation of `zeta(sigma + i t)` for `sigma > 0`,
/// `s != 1`, with an explicit certified remainder:
///
/// `sum_{k<N} k^-s + N^(1-s)/(s-1) + N^-s/2
///    + sum_{j=1}^r B_2j/(2j)! * s(s+1)...(s+2j-2) * N^(1-s-2j) + R`,
///
/// `|R| <= 2 |B_(2r+2)/(2r+2)!| * prod_{i=0}^{2r}(> |s+i|) * N^(-2r-1)
///        * (1 + |t|)`, using `N^-sigma <= 1`; the bound is evaluated in
/// exact arithmetic and the (N, r) pair grows until it fits the budget.
pub fn oracle_zeta_euler_maclaurin(sigma: &Dyadic, t: &Dyadic, n: u32) -> Result<OracleResult> {
    if sigma.is_zero() || sigma.is_negative() {
        return Err(Error::domain("euler-maclaurin oracle requires sigma > 0"));
    }
    if t.is_zero() && sigma == &Dyadic::one() {
        return Err(Error::domain("zeta has a pole at s = 1"));
    }
    if !t.is_zero() && t.abs() > Dyadic::from_int(1 << 10) {
        return Err(Error::resource("euler-maclaurin oracle capped at |t| <= 1024"));
    }
    let t_mag = t.abs().ceil_i64()?;
    let mut r = (n as i64 / 4 + 12) as usize;
    let mut nn = (2 * r as i64 + t_mag + 16) as u64;
    for _attempt in 0..4 {
        if remainder_fits(sigma, t, nn, r, n)? {
            return em_evaluate(sigma, t, nn, r, n);
        }
        r += r / 2 + 8;
        nn = nn * 3 / 2 + 16;
    }
    Err(Error::resource(
        "euler-maclaurin remainder does not fit the budget at the size cap",
    ))
}

/// Checks `|R|^2 <= 2^(-2n-6)` in exact arithmetic. The working grid grows
/// with `r` so the tiny Bernoulli coefficient and `N^-(2r+1)` stay
/// representable instead of saturating at one ulp.
fn remainder_fits(sigma: &Dyadic, t: &Dyadic, nn: u64, r: usize, n: u32) -> Result<bool> {
    let w = 2 * n + 24 * r as u32 + 96;
    let (bnum, bden) = bernoulli::bernoulli_2m(r + 1);
    let mut fact = BigInt::one();
    for i in 1..=(2 * r + 2) {
        fact *= BigInt::from(i as u64);
    }
    // coeff = |B_(2r+2)| / (2r+2)! upper
    let coeff = div_trunc(
        &Dyadic::new(bnum.abs(), 0)?,
        &Dyadic::new(bden * fact, 0)?,
        w,
    )?
    .add(&pw2(-(w as i64)))?;
    // P = prod |s+i|^2 exactly for i = 0..2r
    let tt = t.mul(t)?;
    let mut p = Dyadic::one();
    for i in 0..=(2 * r as i64) {
        let si = sigma.add(&Dyadic::from_int(i))?;
        p = p.mul(&si.mul(&si)?.add(&tt)?)?;
    }
    // scale = 2 * coeff * N^(-2r-1) * (1 + |t|) upper
    let npow = BigInt::from(nn).pow(2 * r as u32 + 1);
    let ninv = div_trunc(&Dyadic::one(), &Dyadic::new(npow, 0)?, w)?.add(&pw2(-(w as i64)))?;
    let scale = coeff
        .mul(&ninv)?
        .mul(&Dyadic::one().add(&t.abs())?)?
        .shift(1)?;
    // need scale^2 * P <= 2^(-2n-6)
    let lhs = scale.mul(&scale)?.mul(&p)?;
    Ok(lhs <= pw2(-2 * (n as i64) - 6))
}

fn em_evaluate(
    sigma: &Dyadic,
    t: &Dyadic,
    nn: u64,
    r: usize,
    n: u32,
) -> Result<OracleResult> {
    let w = n + 2 * clog2(nn + 2 * r as u64 + 4) + 26;
    let complex = !t.is_zero();
    // main sum over k < N
    let mut acc_re = Approx::exact(Dyadic::zero());
    let mut acc_im = Approx::exact(Dyadic::zero());
    for k in 1..nn {
        let (re, im) = cpow_neg(k, sigma, t, w)?;
        acc_re = acc_re.add(&re)?.round(w)?;
        if complex {
            acc_im = acc_im.add(&im)?.round(w)?;
        }
    }
    // N^-s
    let (np_re, np_im) = cpow_neg(nn, sigma, t, w)?;
    let nd = Dyadic::from_int(nn as i64);
    // A = N^(1-s)/(s-1) = N * N^-s / (s-1), divided by the exact complex s-1
    let s1_re = sigma.sub(&Dyadic::one())?;
    let s1_im = t.clone();
    let denom = s1_re.mul(&s1_re)?.add(&s1_im.mul(&s1_im)?)?; // |s-1|^2 exact, > 0
    let denom_floor = denom.floor_log2_abs();
    let n1_re = np_re.mul(&Approx::exact(nd.clone()))?;
    let n1_im = np_im.mul(&Approx::exact(nd))?;
    // (x + iy)/(s-1) = (x + iy)(conj(s-1))/|s-1|^2
    let a_re = n1_re
        .mul(&Approx::exact(s1_re.clone()))?
        .add(&n1_im.mul(&Approx::exact(s1_im.clone()))?)?
        .div_exact(&denom, denom_floor, w)?;
    let a_im = n1_im
        .mul(&Approx::exact(s1_re.clone()))?
        .sub(&n1_re.mul(&Approx::exact(s1_im.clone()))?)?
        .div_exact(&denom, denom_floor, w)?;
    acc_re = acc_re.add(&a_re)?;
    acc_im = acc_im.add(&a_im)?;
    // + N^-s / 2
    acc_re = acc_re.add(&np_re.shift(-1)?)?;
    acc_im = acc_im.add(&np_im.shift(-1)?)?;
    // Correction terms. Keep the product s(s+1)...(s+2j-2) * N^(1-s-2j) as
    // one running quantity: the per-step multiplier (s+2j-3)(s+2j-2)/N^2 is
    // O(1), so the carried error scales with the value instead of blowing
    // up against a huge exact cofactor.
    let nsq = Dyadic::from_int((nn * nn) as i64);
    let nsq_floor = nsq.floor_log2_abs();
    let mut run_re = Approx::exact(Dyadic::from_int(nn as i64)).mul(&np_re)?;
    let mut run_im = Approx::exact(Dyadic::from_int(nn as i64)).mul(&np_im)?;
    let mut fact = BigInt::from(2u32); // (2j)! at j = 1
    for j in 1..=r {
        if j == 1 {
            // multiply by s
            let new_re = run_re
                .mul(&Approx::exact(sigma.clone()))?
                .sub(&run_im.mul(&Approx::exact(t.clone()))?)?;
            let new_im = run_re
                .mul(&Approx::exact(t.clone()))?
                .add(&run_im.mul(&Approx::exact(sigma.clone()))?)?;
            run_re = new_re;
            run_im = new_im;
        } else {
            for add in [2 * j as i64 - 3, 2 * j as i64 - 2] {
                let f_re = sigma.add(&Dyadic::from_int(add))?;
                let new_re = run_re
                    .mul(&Approx::exact(f_re.clone()))?
                    .sub(&run_im.mul(&Approx::exact(t.clone()))?)?;
                let new_im = run_re
                    .mul(&Approx::exact(t.clone()))?
                    .add(&run_im.mul(&Approx::exact(f_re))?)?;
                run_re = new_re;
                run_im = new_im;
            }
            let f1 = 2 * j as u64 - 1;
            let f2 = 2 * j as u64;
            fact *= BigInt::from(f1 * f2);
        }
        run_re = run_re.div_exact(&nsq, nsq_floor, w)?.round(w)?;
        run_im = run_im.div_exact(&nsq, nsq_floor, w)?.round(w)?;
        let (bnum, bden) = bernoulli::bernoulli_2m(j);
        let coeff_num = Dyadic::new(bnum, 0)?;
        let coeff_den = Dyadic::new(bden * &fact, 0)?;
        let coeff = Approx {
            val: div_trunc(&coeff_num, &coeff_den, w + 8)?,
            err: pw2(-(w as i64) - 8),
        };
        let t_re = run_re.mul(&coeff)?;
        let t_im = run_im.mul(&coeff)?;
        acc_re = acc_re.add(&t_re)?.round(w)?;
        acc_im = acc_im.add(&t_im)?.round(w)?;
    }
    // total error: accumulated roundoff plus the certified remainder budget
    let remainder = pw2(-(n as i64) - 3); // remainder_fits guarantees |R| <= 2^(-n-3)
    let err = acc_re.err.add(&acc_im.err)?.add(&remainder)?;
    if complex {
        Ok(OracleResult::from_complex(
            ComplexDyadic::new(acc_re.val, acc_im.val),
            &err,
            "euler-maclaurin",
        ))
    } else {
        Ok(OracleResult::from_real(acc_re.val, &err, "euler-maclaurin"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dy(m: i64, e: i64) -> Dyadic {
        Dyadic::new(m.into(), e).unwrap()
    }

    fn lit(s: &str) -> Dyadic {
        Dyadic::from_decimal(s, 220).unwrap()
    }

    fn assert_encloses(r: &OracleResult, target: &Dyadic) {
        let b = r.real_ball().expect("real oracle value");
        assert!(
            b.contains_point(target),
            "{}: value {} radius 2^{} misses {}",
            r.method,
            b.center.to_decimal(25),
            r.radius_exp,
            target.to_decimal(25)
        );
    }

    #[test]
    fn binom_small_and_pascal() {
        assert_eq!(oracle_binom_exact(4, 2).unwrap(), BigInt::from(6));
        assert_eq!(oracle_binom_exact(7, 0).unwrap(), BigInt::one());
        for k in 1..=64u64 {
            for q in 1..=k {
                let lhs = oracle_binom_exact(k, q).unwrap();
                let rhs = oracle_binom_exact(k - 1, q - 1).unwrap()
                    + oracle_binom_exact(k - 1, q.min(k - 1)).unwrap()
                        * if q <= k - 1 { 1 } else { 0 };
                assert_eq!(lhs, rhs, "pascal at ({k},{q})");
            }
        }
    }

    #[test]
    fn dirichlet_encloses_zeta2() {
        // zeta(2) = pi^2/6 = 1.64493406684822643647241516664602...
        let r = oracle_zeta_dirichlet(&dy(2, 0), 16).unwrap();
        assert_encloses(&r, &lit("1.6449340668482264364724151666460252"));
        assert!(r.radius_exp <= -16);
    }

    #[test]
    fn dirichlet_large_s_converges_fast() {
        let r = oracle_zeta_dirichlet(&dy(30, 0), 40).unwrap();
        let expect = Dyadic::one().add(&pw2(-30)).unwrap();
        let b = r.real_ball().unwrap();
        let diff = b.center.sub(&expect).unwrap().abs();
        // zeta(30) - (1 + 2^-30) = 3^-30 + ... ~ 4.8e-15
        assert!(diff <= pw2(-47).add(&b.radius_dyadic()).unwrap());
    }

    #[test]
    fn dirichlet_monotone_on_grid() {
        let mut prev: Option<Dyadic> = None;
        for s in [3i64, 4, 5, 6] {
            let r = oracle_zeta_dirichlet(&dy(s, 0), 24).unwrap();
            let c = r.real_ball().unwrap().center;
            if let Some(p) = prev {
                assert!(c < p, "zeta should decrease in s");
            }
            prev = Some(c);
        }
    }

    #[test]
    fn eta_values() {
        // eta(1) = ln 2
        let r = oracle_eta_alternating(&Dyadic::one(), 12).unwrap();
        assert_encloses(&r, &lit("0.6931471805599453094172321214581766"));
        // eta(2) = pi^2/12
        let r = oracle_eta_alternating(&dy(2, 0), 18).unwrap();
        assert_encloses(&r, &lit("0.8224670334241132182362075833230126"));
    }

    #[test]
    fn eta_partial_sums_bracket() {
        // with s = 2 the partial sums alternate around the limit
        let target = lit("0.8224670334241132182362075833230126");
        let mut acc = Dyadic::zero();
        let mut below_after_even = true;
        for k in 1..=8u64 {
            let term = div_trunc(&Dyadic::one(), &dy((k * k) as i64, 0), 80).unwrap();
            acc = if k % 2 == 1 {
                acc.add(&term).unwrap()
            } else {
                acc.sub(&term).unwrap()
            };
            let above = acc > target;
            if k % 2 == 1 {
                below_after_even &= above;
            } else {
                below_after_even &= !above;
            }
        }
        assert!(below_after_even, "partial sums should bracket the limit");
    }

    #[test]
    fn euler_maclaurin_matches_dirichlet() {
        let em = oracle_zeta_euler_maclaurin(&dy(2, 0), &Dyadic::zero(), 40).unwrap();
        let di = oracle_zeta_dirichlet(&dy(2, 0), 14).unwrap();
        let be = em.real_ball().unwrap();
        let bd = di.real_ball().unwrap();
        assert!(be.intersects(&bd), "oracles disagree on zeta(2)");
        assert!(be.radius_dyadic() <= pw2(-40));
    }

    #[test]
    fn euler_maclaurin_critical_point() {
        // zeta(1/2) = -1.46035450880958681288949915251529...
        let em = oracle_zeta_euler_maclaurin(&dy(1, -1), &Dyadic::zero(), 64).unwrap();
        assert_encloses(&em, &lit("-1.4603545088095868128894991525152980"));
    }

    #[test]
    fn euler_maclaurin_eta_cross_check() {
        // zeta = eta / (1 - 2^(1-s)) at s = 3/2:
        // both routes must enclose the same number
        let s = dy(3, -1);
        let em = oracle_zeta_euler_maclaurin(&s, &Dyadic::zero(), 48).unwrap();
        let eta = oracle_eta_alternating(&s, 14).unwrap();
        // 1 - 2^(1-s) = 1 - 2^(-1/2); bound it between two dyadics
        // 2^(-1/2) = 0.70710678118654752440...
        let lo = lit("0.2928932188134524755");
        let hi = lit("0.2928932188134524756");
        let eb = eta.real_ball().unwrap();
        let zb = em.real_ball().unwrap();
        // zeta * lo <= eta + r and zeta * hi >= eta - r must both hold
        let zeta_lo = zb.center.sub(&zb.radius_dyadic()).unwrap();
        let zeta_hi = zb.center.add(&zb.radius_dyadic()).unwrap();
        let eta_lo = eb.center.sub(&eb.radius_dyadic()).unwrap();
        let eta_hi = eb.center.add(&eb.radius_dyadic()).unwrap();
        assert!(zeta_lo.mul(&lo).unwrap() <= eta_hi);
        assert!(zeta_hi.mul(&hi).unwrap() >= eta_lo);
    }

    #[test]
    fn euler_maclaurin_conjugation() {
        let sigma = dy(1, -1);
        let t = dy(29, -1);
        let plus = oracle_zeta_euler_maclaurin(&sigma, &t, 40).unwrap();
        let minus = oracle_zeta_euler_maclaurin(&sigma, &t.neg(), 40).unwrap();
        match (&plus.value, &minus.value) {
            (OracleValue::Complex(a), OracleValue::Complex(b)) => {
                assert_eq!(a.re, b.re);
                assert_eq!(a.im, b.im.neg());
            }
            _ => panic!("expected complex values"),
        }
    }

    #[test]
    fn euler_maclaurin_rejects_bad_domain() {
        assert!(matches!(
            oracle_zeta_euler_maclaurin(&Dyadic::one(), &Dyadic::zero(), 16),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            oracle_zeta_euler_maclaurin(&Dyadic::zero(), &Dyadic::one(), 16),
            Err(Error::Domain(_))
        ));
    }

}
