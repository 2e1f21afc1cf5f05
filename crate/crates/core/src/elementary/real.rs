//! Rigorous real elementary functions on dyadics: exp, ln, sin, cos, and
//! `(1+x)^h` via `exp(h * ln(1+x))`.
//!
//! Each kernel takes an exact dyadic argument and a target precision `w` and
//! returns `(value, err)` where `err` is an exact dyadic with
//! `|value - f(arg)| <= err <= 2^-w`. Error accounting is explicit: every
//! truncation and every series tail contributes a term to the accumulator,
//! so the returned bound certifies the value with no hidden slack.

use crate::approx::{ApproxReal, Ball, EvalContext};
use crate::dyadic::{div_int_trunc, div_trunc, Dyadic};
use crate::error::{Error, Result};

use super::consts::{ln2, pi};

fn clog2(v: u64) -> u32 {
    64 - v.saturating_sub(1).leading_zeros()
}

fn pw2(e: i64) -> Dyadic {
    Dyadic::power_of_two(e).expect("error-term exponent in range")
}

fn dy_int(v: i64) -> Dyadic {
    Dyadic::from_int(v)
}

/// Taylor sum of `e^r` for `|r| <= 3/4`.
fn exp_taylor(r: &Dyadic, w: u32, ctx: &mut EvalContext) -> Result<(Dyadic, Dyadic)> {
    debug_assert!(r.abs() <= Dyadic::new(3.into(), -2).unwrap());
    let grid = w + 2 * clog2(w as u64 + 4) + 6;
    let ulp = pw2(-(grid as i64));
    let mut sum = Dyadic::one();
    let mut term = Dyadic::one();
    let mut term_err = Dyadic::zero();
    let mut err = Dyadic::zero();
    let mut j: u64 = 1;
    loop {
        ctx.count_op();
        term = term.mul(r)?.round(grid);
        term = div_int_trunc(&term, j, grid)?;
        // propagated error shrinks by |r|/j < 1; two truncations add 2 ulps
        term_err = term_err.add(&ulp)?.add(&ulp)?;
        sum = sum.add(&term)?.round(grid);
        err = err.add(&term_err)?.add(&ulp)?;
        if j % 16 == 0 {
            ctx.observe_live_bits(sum.mantissa_bits() + term.mantissa_bits() + err.mantissa_bits())?;
        }
        if term.abs() <= ulp {
            // next true term is at most (|term|+term_err)*3/8; geometric tail
            // with ratio <= 3/8 stays below |term| + term_err
            err = err.add(&term.abs())?.add(&term_err)?;
            break;
        }
        j += 1;
        if j > 4 * (grid as u64 + 16) {
            return Err(Error::resource("exp series failed to converge"));
        }
    }
    Ok((sum, err))
}

/// `e^x` for an exact dyadic `x`, via `x = k ln2 + r` with `|r| <= 3/4`.
pub(crate) fn exp_dyadic(x: &Dyadic, w: u32, ctx: &mut EvalContext) -> Result<(Dyadic, Dyadic)> {
    if x.is_zero() {
        return Ok((Dyadic::one(), Dyadic::zero()));
    }
    if x.floor_log2_abs() > 44 {
        return Err(Error::resource("exp argument magnitude beyond exponent range"));
    }
    // crude quotient just to pick k; correctness only needs |r| <= 3/4
    let q = div_trunc(x, &ln2(8)?, 8)?;
    let mut k = q.nearest_i64()?;
    let three_quarters = Dyadic::new(3.into(), -2).unwrap();
    let mut tries = 0;
    loop {
        let kpos = k.max(0) as u64;
        let kabs = k.unsigned_abs();
        let w1 = w as u64 + kpos + clog2(kabs + 2) as u64 + 6;
        ctx.note_precision(w1)?;
        let ln2_w1 = ln2(w1 as u32)?;
        let r = x.sub(&ln2_w1.mul(&dy_int(k))?)?;
        if r.abs() <= three_quarters {
            let w2 = (w as u64 + 2 + kpos) as u32;
            ctx.note_precision(w2 as u64)?;
            let (s, es) = exp_taylor(&r, w2, ctx)?;
            let value = s.shift(k)?.round(w + 2);
            // e^x = 2^k e^r e^(k delta), |delta| <= 2^-w1, e^r < 2.2:
            // |2^k e^r (e^(k delta) - 1)| <= 2^(k+3) * |k| * 2^-w1
            let err_delta = pw2(k + 3 + clog2(kabs + 1) as i64 - w1 as i64);
            let err = es.shift(k)?.add(&err_delta)?.add(&pw2(-(w as i64) - 2))?;
            return Ok((value, err));
        }
        k += if r.is_negative() { -1 } else { 1 };
        tries += 1;
        if tries > 4 {
            return Err(Error::contract("argument reduction for exp did not settle"));
        }
    }
}

/// `ln y` for an exact dyadic `y > 0`: reduce into `[3/4, 3/2)` by a power
/// of two, then `ln z = 2 atanh((z-1)/(z+1))`.
pub(crate) fn ln_dyadic(y: &Dyadic, w: u32, ctx: &mut EvalContext) -> Result<(Dyadic, Dyadic)> {
    debug_assert!(!y.is_zero() && !y.is_negative());
    let mut j = y.floor_log2_abs();
    let mut z = y.shift(-j)?;
    let three_halves = Dyadic::new(3.into(), -1).unwrap();
    if z >= three_halves {
        j += 1;
        z = z.shift(-1)?;
    }
    let grid = w + 2 * clog2(w as u64 + 4) + 8;
    ctx.note_precision(grid as u64)?;
    let ulp = pw2(-(grid as i64));
    let num = z.sub(&Dyadic::one())?;
    let den = z.add(&Dyadic::one())?;
    let u = div_trunc(&num, &den, grid)?; // |u| <= 1/5 + ulp
    let u2 = u.mul(&u)?.round(grid);
    let mut power = u.clone();
    let mut power_err = Dyadic::zero();
    let mut sum = u.clone();
    let mut err = Dyadic::zero();
    let mut i: u64 = 1;
    loop {
        ctx.count_op();
        power = power.mul(&u2)?.round(grid);
        power_err = power_err.add(&ulp)?.add(&ulp)?;
        let term = div_int_trunc(&power, 2 * i + 1, grid)?;
        sum = sum.add(&term)?.round(grid);
        err = err.add(&power_err)?.add(&ulp)?.add(&ulp)?;
        if power.abs() <= ulp {
            // ratio u^2 <= 1/16: tail below |power| + power_err
            err = err.add(&power.abs())?.add(&power_err)?;
            break;
        }
        i += 1;
        if i > 2 * (grid as u64 + 16) {
            return Err(Error::resource("ln series failed to converge"));
        }
    }
    // atanh is 2-Lipschitz on |u| <= 1/4: the truncated u costs 2 ulps
    err = err.add(&pw2(-(grid as i64) + 1))?;
    // ln y = j*ln2 + 2*atanh(u)
    let jabs = j.unsigned_abs();
    let w1 = w + clog2(jabs + 2) + 4;
    let value;
    let mut total;
    if j == 0 {
        value = sum.shift(1)?.round(w + 2);
        total = err.shift(1)?;
    } else {
        let l2 = ln2(w1)?;
        value = dy_int(j).mul(&l2)?.add(&sum.shift(1)?)?.round(w + 2);
        total = err.shift(1)?.add(&pw2(clog2(jabs) as i64 - w1 as i64))?;
    }
    total = total.add(&pw2(-(w as i64) - 2))?;
    Ok((value, total))
}

/// cos and sin of an exact dyadic: reduce by the nearest multiple of pi,
/// then alternating Taylor sums on `|r| <= 1.6875`.
pub(crate) fn sincos_dyadic(
    y: &Dyadic,
    w: u32,
    ctx: &mut EvalContext,
) -> Result<(Dyadic, Dyadic, Dyadic, Dyadic)> {
    if !y.is_zero() && y.floor_log2_abs() > 44 {
        return Err(Error::resource("trigonometric argument beyond reduction range"));
    }
    let q = div_trunc(y, &pi(16)?, 8)?;
    let mut k = q.nearest_i64()?;
    let bound = Dyadic::new(27.into(), -4).unwrap(); // 1.6875 > pi/2 + slack
    let mut tries = 0;
    let (r, err_delta) = loop {
        let kabs = k.unsigned_abs();
        let w1 = w as u64 + clog2(kabs + 2) as u64 + 6;
        ctx.note_precision(w1)?;
        let pi_w1 = pi(w1 as u32)?;
        let r = y.sub(&pi_w1.mul(&dy_int(k))?)?;
        if r.abs() <= bound {
            // y = r + k pi + k delta with |delta| <= 2^-w1; sin and cos are
            // 1-Lipschitz, so folding k delta into the error costs |k| 2^-w1
            break (r, pw2(clog2(kabs + 1) as i64 - w1 as i64));
        }
        k += if r.is_negative() { -1 } else { 1 };
        tries += 1;
        if tries > 4 {
            return Err(Error::contract("argument reduction for sin/cos did not settle"));
        }
    };
    let grid = w + 2 * clog2(w as u64 + 4) + 6;
    ctx.note_precision(grid as u64)?;
    let ulp = pw2(-(grid as i64));
    let r2 = r.mul(&r)?.round(grid);
    let r2_err = ulp.clone();

    let mut run = |start: Dyadic, odd: bool| -> Result<(Dyadic, Dyadic)> {
        let mut term = start.clone();
        let mut term_err = Dyadic::zero();
        let mut sum = start;
        let mut err = Dyadic::zero();
        let mut i: u64 = 0;
        loop {
            ctx.count_op();
            let div = if odd {
                (2 * i + 2) * (2 * i + 3)
            } else {
                (2 * i + 1) * (2 * i + 2)
            };
            term = term.mul(&r2)?.round(grid);
            term = div_int_trunc(&term, div, grid)?.neg();
            // |term| <= 1.45 throughout, so the r2 truncation contributes
            // at most 2*r2_err; two more truncations add 2 ulps
            term_err = term_err.add(&r2_err)?.add(&r2_err)?.add(&ulp)?.add(&ulp)?;
            sum = sum.add(&term)?.round(grid);
            err = err.add(&term_err)?.add(&ulp)?;
            if i >= 1 && term.abs() <= ulp {
                // terms decrease from i >= 1 on; alternating tail is below
                // the first omitted term
                err = err.add(&term.abs())?.add(&term_err)?;
                break;
            }
            i += 1;
            if i > 2 * (grid as u64 + 16) {
                return Err(Error::resource("sin/cos series failed to converge"));
            }
        }
        Ok((sum, err))
    };

    let (cos_sum, cos_err) = run(Dyadic::one(), false)?;
    let (sin_sum, sin_err) = run(r.clone(), true)?;
    let negate = k.rem_euclid(2) == 1;
    let fix = |v: Dyadic| if negate { v.neg() } else { v };
    let round_err = pw2(-(w as i64) - 2);
    Ok((
        fix(cos_sum).round(w + 2),
        cos_err.add(&err_delta)?.add(&round_err)?,
        fix(sin_sum).round(w + 2),
        sin_err.add(&err_delta)?.add(&round_err)?,
    ))
}

/// Exponent `E` with `e^upper <= 2^E`, from a dyadic upper bound on the
/// argument. Nonpositive upper bounds give `E = 0`.
fn exp_magnitude_exp(upper: &Dyadic) -> Result<i64> {
    if upper.is_zero() || upper.is_negative() {
        return Ok(0);
    }
    let u = upper.ceil_i64()?;
    Ok((3 * u + 1) / 2 + 2)
}

/// `e^x` to `2^-n` for `|x| <= 2^p`.
pub fn exp_real(x: &ApproxReal, n: u32, p: i64, ctx: &mut EvalContext) -> Result<Ball> {
    let probe = x.query_checked(ctx, 4, p)?;
    let upper = probe.add(&pw2(-3))?; // covers probe error plus query slack
    let e_mag = exp_magnitude_exp(&upper)?;
    let m = (n as u64 + e_mag.max(0) as u64 + 3) as u32;
    let xq = x.query_checked(ctx, m, p)?;
    let (v, err) = exp_dyadic(&xq, n + 2, ctx)?;
    let input_err = pw2(e_mag - m as i64);
    let total = err.add(&input_err)?;
    Ok(Ball::from_center_err(v, &total))
}

/// `ln(1+x)` to `2^-n` for `1+x` certifiably in `[2^-p, 2^p]`.
pub fn log1p_real(x: &ApproxReal, n: u32, p: u32, ctx: &mut EvalContext) -> Result<Ball> {
    let m = n + p + 4;
    let xq = x.query(ctx, m)?;
    let y = Dyadic::one().add(&xq)?;
    let floor = pw2(-(p as i64));
    if y.is_zero() || y.is_negative() || y.add(&pw2(-(m as i64)))? < floor {
        return Err(Error::domain(format!(
            "1+x is not certifiably at least 2^-{p}"
        )));
    }
    let (v, err) = ln_dyadic(&y, n + 3, ctx)?;
    // 1/(1+x) <= 2^(p+1) on the certified interval
    let total = err.add(&pw2(p as i64 + 1 - m as i64))?;
    Ok(Ball::from_center_err(v, &total))
}

/// `(1+x)^h = exp(h * ln(1+x))` to `2^-n`, for `1+x` in `[2^-p1, 2^p1]` and
/// `|h| < p2`.
pub fn pow1p_real(
    x: &ApproxReal,
    h: &ApproxReal,
    n: u32,
    p1: u32,
    p2: u32,
    ctx: &mut EvalContext,
) -> Result<Ball> {
    if let Some(hv) = h.as_exact() {
        if hv.is_zero() {
            return Ok(Ball::exact(Dyadic::one()));
        }
    }
    let bh = clog2(p2 as u64 + 1) as i64;
    // Probe both factors to bound the exponent h*ln(1+x) from above; the
    // interval endpoints are exact dyadics so the bound is certified.
    let l_probe = log1p_real(x, 8, p1, ctx)?;
    let h_probe = h.query_checked(ctx, 8, bh)?;
    let lr = l_probe.radius_dyadic();
    let l_lo = l_probe.center.sub(&lr)?;
    let l_hi = l_probe.center.add(&lr)?;
    let h_lo = h_probe.sub(&pw2(-8))?;
    let h_hi = h_probe.add(&pw2(-8))?;
    let mut upper = h_lo.mul(&l_lo)?;
    for cand in [h_lo.mul(&l_hi)?, h_hi.mul(&l_lo)?, h_hi.mul(&l_hi)?] {
        if cand > upper {
            upper = cand;
        }
    }
    let e_mag = exp_magnitude_exp(&upper.add(&pw2(-4))?)?;

    let l_mag_exp = if l_hi.is_zero() && l_lo.is_zero() {
        0
    } else {
        l_lo.abs().max(l_hi.abs()).ceil_log2_abs().max(0)
    };
    let m_l = (n as u64 + e_mag.max(0) as u64 + clog2(p2 as u64 + 2) as u64 + 5) as u32;
    let m_h = (n as u64 + e_mag.max(0) as u64 + l_mag_exp as u64 + 5) as u32;
    let l_ball = log1p_real(x, m_l, p1, ctx)?;
    let hq = h.query_checked(ctx, m_h, bh)?;
    ctx.count_op();
    let a = hq.mul(&l_ball.center)?;
    let err_a = hq
        .abs()
        .mul(&l_ball.radius_dyadic())?
        .add(&l_ball.magnitude_upper().mul(&pw2(-(m_h as i64)))?)?;
    let (v, err_exp) = exp_dyadic(&a, n + 2, ctx)?;
    let total = err_exp.add(&err_a.shift(e_mag)?)?;
    Ok(Ball::from_center_err(v, &total))
}

/// `e^a` for an exact dyadic whose true exponent is nonpositive up to the
/// input uncertainty `err_in` (so the value is bounded by `e^err_in <= 2`).
/// Used for `(q+1)^-s` terms where no magnitude probing is needed.
pub fn exp_for_nonpositive(
    a: &Dyadic,
    err_in: &Dyadic,
    n: u32,
    ctx: &mut EvalContext,
) -> Result<Ball> {
    if *err_in > Dyadic::new(1.into(), -1).unwrap() {
        return Err(Error::contract("input uncertainty too large for exp"));
    }
    let (v, err) = exp_dyadic(a, n + 1, ctx)?;
    let total = err.add(&err_in.shift(1)?)?;
    Ok(Ball::from_center_err(v, &total))
}

/// cos and sin of `y` to `2^-n` for `|y| <= 2^p`, argument reduced by a
/// certified multiple of pi.
pub fn sincos_real(
    y: &ApproxReal,
    n: u32,
    p: i64,
    ctx: &mut EvalContext,
) -> Result<(Ball, Ball)> {
    let m = n + 3;
    let yq = y.query_checked(ctx, m, p)?;
    let (c, ce, s, se) = sincos_dyadic(&yq, n + 3, ctx)?;
    let input = pw2(-(m as i64)); // both functions are 1-Lipschitz
    Ok((
        Ball::from_center_err(c, &ce.add(&input)?),
        Ball::from_center_err(s, &se.add(&input)?),
    ))
}

pub fn cos_real(y: &ApproxReal, n: u32, p: i64, ctx: &mut EvalContext) -> Result<Ball> {
    Ok(sincos_real(y, n, p, ctx)?.0)
}

pub fn sin_real(y: &ApproxReal, n: u32, p: i64, ctx: &mut EvalContext) -> Result<Ball> {
    Ok(sincos_real(y, n, p, ctx)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{ball_mul, Caps};

    fn ctx() -> EvalContext {
        EvalContext::new(Caps::default())
    }

    fn lit(s: &str) -> Dyadic {
        Dyadic::from_decimal(s, 220).unwrap()
    }

    fn assert_ball_near(b: &Ball, target: &Dyadic, slack_exp: i64) {
        let err = b.center.sub(target).unwrap().abs();
        let bound = b.radius_dyadic().add(&pw2(slack_exp)).unwrap();
        assert!(
            err <= bound,
            "center {} vs target {}: err {} > bound {}",
            b.center.to_decimal(20),
            target.to_decimal(20),
            err.to_hex_dyadic(),
            bound.to_hex_dyadic()
        );
    }

    #[test]
    fn exp_at_zero_and_one() {
        let mut c = ctx();
        let zero = ApproxReal::constant(Dyadic::zero());
        let b = exp_real(&zero, 30, 1, &mut c).unwrap();
        assert_eq!(b.center, Dyadic::one());
        // e = 2.71828182845904523536028747135266...
        let one = ApproxReal::constant(Dyadic::one());
        let b = exp_real(&one, 50, 1, &mut c).unwrap();
        assert!(b.radius_dyadic() <= pw2(-50));
        assert_ball_near(&b, &lit("2.7182818284590452353602874713526625"), -60);
    }

    #[test]
    fn exp_product_identity() {
        let mut c = ctx();
        for (m, e) in [(5i64, -2i64), (-3, -1), (13, -3), (-1, 2)] {
            let x = Dyadic::new(m.into(), e).unwrap();
            let a = exp_real(&ApproxReal::constant(x.clone()), 48, 3, &mut c).unwrap();
            let b = exp_real(&ApproxReal::constant(x.neg()), 48, 3, &mut c).unwrap();
            let prod = ball_mul(&a, &b).unwrap();
            assert!(prod.contains_point(&Dyadic::one()), "exp(x)exp(-x) missed 1");
        }
    }

    #[test]
    fn exp_large_negative_is_tiny() {
        let mut c = ctx();
        let x = ApproxReal::constant(Dyadic::from_int(-200));
        let b = exp_real(&x, 40, 8, &mut c).unwrap();
        assert!(b.center.abs() <= pw2(-250));
        assert!(b.radius_dyadic() <= pw2(-40));
    }

    #[test]
    fn log1p_values() {
        let mut c = ctx();
        let zero = ApproxReal::constant(Dyadic::zero());
        let b = log1p_real(&zero, 30, 1, &mut c).unwrap();
        assert!(b.contains_point(&Dyadic::zero()));
        // ln 2 at x = 1
        let one = ApproxReal::constant(Dyadic::one());
        let b = log1p_real(&one, 50, 1, &mut c).unwrap();
        assert!(b.radius_dyadic() <= pw2(-50));
        assert_ball_near(&b, &lit("0.6931471805599453094172321214581766"), -60);
    }

    #[test]
    fn log1p_rejects_nonpositive() {
        let mut c = ctx();
        let minus_one = ApproxReal::constant(Dyadic::from_int(-1));
        assert!(matches!(
            log1p_real(&minus_one, 20, 2, &mut c),
            Err(Error::Domain(_))
        ));
        let below = ApproxReal::constant(Dyadic::from_int(-2));
        assert!(matches!(
            log1p_real(&below, 20, 2, &mut c),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn exp_log_inverse_identity() {
        let mut c = ctx();
        for (m, e) in [(1i64, 0i64), (3, -2), (7, 0), (-3, -3)] {
            let x = Dyadic::new(m.into(), e).unwrap();
            let lx = log1p_real(&ApproxReal::constant(x.clone()), 60, 4, &mut c).unwrap();
            let back = exp_real(&ApproxReal::constant(lx.center.clone()), 52, 4, &mut c).unwrap();
            // |exp(center) - (1+x)| <= radius(back) + Lipschitz * radius(lx)
            let target = Dyadic::one().add(&x).unwrap();
            let slack = lx.radius_dyadic().shift(4).unwrap(); // e^ln(1+x) <= 8 here
            let err = back.center.sub(&target).unwrap().abs();
            assert!(err <= back.radius_dyadic().add(&slack).unwrap());
        }
    }

    #[test]
    fn pow1p_cases() {
        let mut c = ctx();
        // (1+3)^2 = 16
        let x = ApproxReal::constant(Dyadic::from_int(3));
        let h = ApproxReal::constant(Dyadic::from_int(2));
        let b = pow1p_real(&x, &h, 40, 3, 3, &mut c).unwrap();
        assert_ball_near(&b, &Dyadic::from_int(16), -40);
        // h = 0 -> exactly 1
        let b = pow1p_real(&x, &ApproxReal::constant(Dyadic::zero()), 40, 3, 1, &mut c).unwrap();
        assert_eq!(b.center, Dyadic::one());
        assert_eq!(b.radius_exp, None);
        // (1+1)^(1/2) = sqrt(2) = 1.41421356237309504880168872420970
        let half = ApproxReal::constant(Dyadic::new(1.into(), -1).unwrap());
        let one = ApproxReal::constant(Dyadic::one());
        let b = pow1p_real(&one, &half, 40, 2, 1, &mut c).unwrap();
        assert!(b.radius_dyadic() <= pw2(-40));
        assert_ball_near(&b, &lit("1.4142135623730950488016887242096981"), -50);
    }

    #[test]
    fn sincos_values_and_identity() {
        let mut c = ctx();
        let zero = ApproxReal::constant(Dyadic::zero());
        let (cb, sb) = sincos_real(&zero, 30, 1, &mut c).unwrap();
        assert!(cb.contains_point(&Dyadic::one()));
        assert!(sb.contains_point(&Dyadic::zero()));
        // pythagorean identity on a spread of arguments, including ones that
        // need multi-pi reduction
        for (m, e) in [(1i64, 0i64), (-7, -2), (25, -3), (13, 0), (-11, 1)] {
            let y = ApproxReal::constant(Dyadic::new(m.into(), e).unwrap());
            let (cb, sb) = sincos_real(&y, 48, 5, &mut c).unwrap();
            let cc = ball_mul(&cb, &cb).unwrap();
            let ss = ball_mul(&sb, &sb).unwrap();
            let total = crate::approx::ball_add(&cc, &ss).unwrap();
            assert!(total.contains_point(&Dyadic::one()), "sin^2+cos^2 missed 1");
        }
    }

    #[test]
    fn cos_near_half_pi_is_small() {
        let mut c = ctx();
        // 1.5707963267948966 is within ~6e-17 of pi/2
        let y = ApproxReal::from_decimal("1.5707963267948966", 80).unwrap();
        let b = cos_real(&y, 40, 1, &mut c).unwrap();
        let bound = pw2(-40).add(&pw2(-50)).unwrap();
        assert!(b.center.abs() <= bound, "cos near pi/2: {}", b.center.to_decimal(20));
    }

    #[test]
    fn scheduled_precision_is_linear_in_n() {
        // the largest working precision requested grows at most linearly in n
        // for fixed p; coefficients here are generous
        for n in [16u32, 32, 64, 128] {
            let mut c = ctx();
            let x = ApproxReal::constant(Dyadic::new(5.into(), -1).unwrap());
            exp_real(&x, n, 2, &mut c).unwrap();
            let m = c.stats().max_working_precision;
            assert!(m <= 4 * n as u64 + 96, "n={n} m={m}");
        }
    }
}
