//! Complex zeta on lines `s = sigma + i t` with `sigma > 0`, `sigma != 1`,
//! away from the exceptional points `s = 1 + 2 pi i k / ln 2` where the
//! prefactor `1/(1 - 2^(1-s))` is undefined.
//!
//! The pipeline mirrors the real one with complex accumulators; the
//! prefactor's magnitude is certified at runtime by `exceptional_guard`
//! instead of an a-priori strip formula.
//!
//! The inner sums grow with |t|: from the integral representation of
//! `(q+1)^-s` and the product formula `|Gamma(sigma+it)|^2 =
//! Gamma(sigma)^2 / prod_j (1 + t^2/(sigma+j)^2)` one gets the
//! k-independent bound `|h(k,s)| <= H = (1 + |t|/sigma) e^(pi |t| / 2)`
//! for `sigma > 0` (reducing to `|h| <= 1` on the real line). `H` sets the
//! `|u|` magnitude, a floor for the truncation index, and the series tail
//! `H 2^-(iota+1)`; every computed term is checked against it at runtime
//! and the evaluation retries once with doubled truncation if anything
//! overruns.

use crate::approx::{ApproxReal, Ball, EvalContext};
use crate::dyadic::{div_int_trunc, div_trunc, Dyadic};
use crate::elementary::{exp_complex_parts, ln2, log1p_real, ComplexBall, ComplexDyadic};
use crate::error::{Error, Result};
use crate::zeta_real::PrecisionPlan;

use std::collections::HashMap;

fn pw2(e: i64) -> Dyadic {
    Dyadic::power_of_two(e).expect("error exponent in range")
}

fn clog2(v: u64) -> u32 {
    64 - v.saturating_sub(1).leading_zeros()
}

/// The real cascade plus the complex-specific parameters: the t-range
/// exponent, the certified lower bound for `|1 - 2^(1-s)|`, and the
/// magnitude bounds driven by `H = (1 + |t|/sigma) e^(pi |t|/2)`.
#[derive(Debug, Clone)]
pub struct ComplexPlan {
    pub base: PrecisionPlan,
    pub p_sigma: u32,
    pub p_t: u32,
    /// Certified: `|1 - 2^(1-s)| >= 2^guard_exp`.
    pub guard_exp: i64,
    /// `|h(k, s)| <= 2^h_mag_exp` for every k.
    pub h_mag_exp: i64,
    /// `|u(s)| <= 2^u_mag_exp`.
    pub u_mag_exp: i64,
}

/// Exponent bound for `H = (1 + t_up/sigma_lo) e^(pi t_up / 2)`:
/// `pi/(2 ln 2) = 2.26618... < 37134 * 2^-14`.
fn h_mag_exponent(sigma_lo: &Dyadic, t_up: &Dyadic) -> Result<i64> {
    if t_up.is_zero() {
        return Ok(1);
    }
    let factor = Dyadic::new(37134.into(), -14)?;
    let e1 = t_up.mul(&factor)?.ceil_i64()?;
    let ratio = div_trunc(t_up, sigma_lo, 16)?.add(&pw2(-16))?;
    let e2 = Dyadic::one().add(&ratio)?.ceil_log2_abs();
    Ok(e1 + e2 + 1)
}

/// Certifies a lower bound `|1 - 2^(1-s)| >= 2^e` by enclosing `2^(1-s)` at
/// the working precision and taking the distance of the ball from 1.
///
/// The guard is deliberately single-pass: a request whose distance from the
/// exceptional set cannot be certified at resolution `2^-working_n` is a
/// domain error naming the nearest exceptional point, rather than an
/// invitation to escalate indefinitely (the prefactor magnitude, and with
/// it every downstream precision, grows like the reciprocal of that
/// distance).
pub fn exceptional_guard(
    sigma: &ApproxReal,
    t: &ApproxReal,
    working_n: u32,
    ctx: &mut EvalContext,
) -> Result<i64> {
    let wn = working_n.max(16);
    let w = two_pow_one_minus_s(sigma, t, wn, ctx)?;
    let y = ComplexDyadic::one().sub(&w.center)?;
    let mu = y.modulus_lower();
    let rad = w.radius_dyadic();
    if !mu.is_zero() && mu > rad.shift(1)? {
        let margin = mu.sub(&rad)?;
        return Ok(margin.floor_log2_abs());
    }
    let k_near = nearest_exceptional_index(t, ctx)?;
    Err(Error::domain(format!(
        "s is within 2^-{wn} of the exceptional point s = 1 + 2*pi*i*{k_near}/ln 2 \
         where 2^(1-s) = 1"
    )))
}

fn nearest_exceptional_index(t: &ApproxReal, ctx: &mut EvalContext) -> Result<i64> {
    // k = round(t ln2 / (2 pi))
    let tq = t.query(ctx, 16)?;
    let l2 = ln2(24)?;
    let two_pi = crate::elementary::pi(24)?.shift(1)?;
    let q = div_trunc(&tq.mul(&l2)?, &two_pi, 16)?;
    q.nearest_i64()
}

/// Enclosure of `2^(1-s) = exp((1-sigma) ln2 - i t ln2)`.
fn two_pow_one_minus_s(
    sigma: &ApproxReal,
    t: &ApproxReal,
    n: u32,
    ctx: &mut EvalContext,
) -> Result<ComplexBall> {
    // magnitude probe for the real part of the exponent
    let s_probe = sigma.query(ctx, 8)?;
    let re_upper = Dyadic::one()
        .sub(&s_probe)?
        .add(&pw2(-7))?
        .mul(&Dyadic::one())?; // (1 - sigma) upper
    let e_mag = if re_upper.is_zero() || re_upper.is_negative() {
        0
    } else {
        re_upper.ceil_i64()? + 1 // (1-sigma) ln2 < (1-sigma)
    };
    let m = n as u64 + e_mag.max(0) as u64 + 8;
    let mq = m as u32;
    let sq = sigma.query(ctx, mq)?;
    let tq = t.query(ctx, mq)?;
    let l2 = ln2(mq + 4)?;
    ctx.count_op();
    let a_re = Dyadic::one().sub(&sq)?.mul(&l2)?;
    let a_im = tq.neg().mul(&l2)?;
    // |d a_re| <= ln2 * 2^-m + |1-sigma| 2^-(m+4),同 for im
    let one_minus_up = Dyadic::one().sub(&sq)?.abs().add(&pw2(-(mq as i64)))?;
    let err_re = pw2(-(mq as i64))
        .add(&one_minus_up.mul(&pw2(-(mq as i64) - 4))?)?;
    let t_up = tq.abs().add(&pw2(-(mq as i64)))?;
    let err_im = pw2(-(mq as i64)).add(&t_up.mul(&pw2(-(mq as i64) - 4))?)?;
    exp_complex_parts(&a_re, &err_re, &a_im, &err_im, n + 1, ctx)
}

/// Derives the complex plan: positive sigma separated from 1, t-range, the
/// guard bound, and the widened `n1` covering `|v| <= 2^-guard_exp` and
/// `|u| <= 2^u_mag_exp`.
pub fn plan_complex(
    n: u32,
    sigma: &ApproxReal,
    t: &ApproxReal,
    p_override: Option<u32>,
    ctx: &mut EvalContext,
) -> Result<ComplexPlan> {
    // The guard runs first so requests at (or indistinguishably near) an
    // exceptional point fail with a message naming that point, even when
    // sigma = 1 would also fail the separation check below.
    let guard_exp = exceptional_guard(sigma, t, n + 24, ctx)?;
    let one = Dyadic::one();
    let cap = (2 * n).max(64);
    let exact_sigma = sigma.as_exact();
    let mut probe = 16u32;
    let (p_sigma, sigma_lo) = loop {
        let (lower, upper) = match &exact_sigma {
            Some(d) => (d.clone(), d.clone()),
            None => {
                let v = sigma.query(ctx, probe)?;
                let eps = pw2(-(probe as i64));
                (v.sub(&eps)?, v.add(&eps)?)
            }
        };
        if upper.is_zero() || upper.is_negative() {
            return Err(Error::domain(
                "sigma <= 0: the series tail bound requires sigma > 0",
            ));
        }
        if !lower.is_negative() && !lower.is_zero() && (upper < one || lower > one) {
            // distance of the interval from 1 and its span around zero
            let gap = if upper < one {
                one.sub(&upper)?
            } else {
                lower.sub(&one)?
            };
            let p_sep = (1 - gap.floor_log2_abs()).max(1);
            let p_low = (-lower.floor_log2_abs()).max(0);
            let p_high = upper.ceil_log2_abs().max(0);
            break (p_sep.max(p_low).max(p_high).max(1) as u32, lower);
        }
        if probe >= cap {
            return Err(Error::domain(format!(
                "sigma is not separable from 1 (or from 0) at precision 2^-{cap}"
            )));
        }
        probe = (probe * 2).min(cap);
    };
    // t range
    let t_probe = t.query(ctx, 8)?;
    let t_up = t_probe.abs().add(&pw2(-7))?;
    let p_t = if t_up.is_zero() {
        0
    } else {
        t_up.ceil_log2_abs().max(0) as u32
    };
    if p_sigma > 24 || p_t > 40 {
        return Err(Error::resource("range parameters beyond supported size"));
    }
    let p = match p_override {
        None => p_sigma.max(p_t).max(1),
        Some(po) => po.max(1),
    };
    let h_mag_exp = h_mag_exponent(&sigma_lo, &t_up)?;
    let u_mag_exp = h_mag_exp + 1;
    // product budget: |v| u_err + |u| v_err <= 2^-(n+2) needs
    // n1 >= n + max(-guard, u_mag) + 4
    let widen = ((-guard_exp).max(0).max(u_mag_exp) as u32).saturating_add(4);
    let c2 = 2 * p + 2;
    let extra = widen.saturating_sub(c2);
    let mut base = PrecisionPlan::build(n, p, extra);
    // the tail H 2^-(iota+1) must clear the 2^-(n2+3) budget
    let iota_floor = base.n2 as u64 + 4 + h_mag_exp.max(0) as u64;
    if base.iota < iota_floor {
        base.iota = iota_floor;
    }
    Ok(ComplexPlan {
        base,
        p_sigma,
        p_t,
        guard_exp,
        h_mag_exp,
        u_mag_exp,
    })
}

/// `v(s) = 1/(1 - 2^(1-s))` with the reciprocal scheduled by the certified
/// guard bound.
pub fn v_eval_complex(
    sigma: &ApproxReal,
    t: &ApproxReal,
    n1: u32,
    plan: &ComplexPlan,
    ctx: &mut EvalContext,
) -> Result<ComplexBall> {
    let e = plan.guard_exp;
    let n_w = (n1 as i64 + 2 * (-e).max(0) + 8) as u32;
    let w = two_pow_one_minus_s(sigma, t, n_w, ctx)?;
    let y = ComplexDyadic::one().sub(&w.center)?;
    let mu = y.modulus_lower();
    let rad = w.radius_dyadic();
    if mu.is_zero() || mu <= rad.shift(1)? {
        return Err(Error::domain(
            "the guard bound for 1 - 2^(1-s) failed at evaluation precision",
        ));
    }
    // 1/y = conj(y)/|y|^2, divisions truncated onto the n1+4 grid
    let d = y.modulus_sq()?;
    ctx.count_op();
    ctx.count_op();
    let re = div_trunc(&y.re, &d, n1 + 4)?;
    let im = div_trunc(&y.im.neg(), &d, n1 + 4)?;
    // |1/y_true - 1/y| <= |y_true - y| / (|y_true| |y|) <= rad 2^(1-2e)
    let err = rad
        .shift(1 - 2 * e)?
        .add(&pw2(-(n1 as i64) - 3))? // the two truncations, with sqrt(2) slack
        ;
    Ok(ComplexBall::from_center_err(ComplexDyadic::new(re, im), &err))
}

/// Enclosures of ln(q+1), shared across the evaluation.
struct LnCache {
    prec: u32,
    map: HashMap<u64, Ball>,
    bits: u64,
}

impl LnCache {
    fn new(prec: u32) -> Self {
        LnCache {
            prec,
            map: HashMap::new(),
            bits: 0,
        }
    }

    fn get(&mut self, q: u64, ctx: &mut EvalContext) -> Result<Ball> {
        if let Some(b) = self.map.get(&q) {
            return Ok(b.clone());
        }
        let x = ApproxReal::constant(Dyadic::from_int(q as i64));
        let b = log1p_real(&x, self.prec, clog2(q + 2), ctx)?;
        self.bits += b.center.mantissa_bits();
        self.map.insert(q, b.clone());
        Ok(b)
    }
}

/// `f(q, s) = (q+1)^(-sigma - i t) = exp(-s ln(q+1))`; the real part of the
/// exponent is nonpositive so `|f| <= 1`.
fn f_complex(
    q: u64,
    sigma: &ApproxReal,
    t: &ApproxReal,
    n4: u32,
    plan: &ComplexPlan,
    lns: &mut LnCache,
    ctx: &mut EvalContext,
) -> Result<ComplexBall> {
    if q == 0 {
        return Ok(ComplexBall::exact(ComplexDyadic::one()));
    }
    let l = lns.get(q, ctx)?;
    let l_mag_exp = if l.center.is_zero() {
        0
    } else {
        l.center.ceil_log2_abs().max(0)
    };
    let m_s = n4 + l_mag_exp as u32 + 6;
    let sq = sigma.query_checked(ctx, m_s, plan.p_sigma as i64 + 1)?;
    let tq = t.query_checked(ctx, m_s, plan.p_t as i64 + 1)?;
    ctx.count_op();
    ctx.count_op();
    let a_re = sq.mul(&l.center)?.neg();
    let a_im = tq.mul(&l.center)?.neg();
    let l_err = l.radius_dyadic();
    let l_up = l.magnitude_upper();
    let err_re = sq.abs().mul(&l_err)?.add(&l_up.mul(&pw2(-(m_s as i64)))?)?;
    let err_im = tq.abs().mul(&l_err)?.add(&l_up.mul(&pw2(-(m_s as i64)))?)?;
    exp_complex_parts(&a_re, &err_re, &a_im, &err_im, n4 + 2, ctx)
}

/// `h(k, s)` streamed over q with the running-binomial recurrence; also
/// reports whether the magnitude assumption `|h| <= 4(k+1)` held.
fn h_complex(
    k: u64,
    sigma: &ApproxReal,
    t: &ApproxReal,
    plan: &ComplexPlan,
    lns: &mut LnCache,
    ctx: &mut EvalContext,
) -> Result<(ComplexBall, bool)> {
    if k == 0 {
        return Ok((ComplexBall::exact(ComplexDyadic::one()), true));
    }
    let n4 = plan.base.n4(k);
    let grid_g = n4 + 2 * k as u32 + 2 * clog2(k + 2) + 4;
    let grid_h = n4 + clog2(k + 2) + 4;
    ctx.note_precision(grid_g as u64)?;
    let ulp_g = pw2(-(grid_g as i64));
    let ulp_h = pw2(-(grid_h as i64));
    let mut g = Dyadic::one();
    let mut g_err = Dyadic::zero();
    let mut acc = ComplexDyadic::one();
    let mut h_err = Dyadic::zero();
    for q in 1..=k {
        ctx.count_op();
        g = g.mul(&Dyadic::from_int((k - q + 1) as i64))?;
        g = div_int_trunc(&g, q, grid_g)?;
        let shift = clog2(k - q + 1) as i64 - Dyadic::from_int(q as i64).floor_log2_abs();
        g_err = g_err.shift(shift.max(-(grid_g as i64)))?.add(&ulp_g)?;
        let f = f_complex(q, sigma, t, n4, plan, lns, ctx)?;
        ctx.count_op();
        let term = f.center.mul_real(&g)?;
        // |g* f* - g f| <= |g*| f_err + |f| g_err with |f| <= 1
        let term_err = g.abs().mul(&f.radius_dyadic())?.add(&g_err)?;
        acc = if q % 2 == 1 {
            acc.sub(&term)?
        } else {
            acc.add(&term)?
        };
        acc = acc.round(grid_h);
        h_err = h_err
            .add(&term_err)?
            .add(&ulp_h)?
            .add(&ulp_h)?;
        if q % 16 == 0 {
            ctx.observe_live_bits(
                acc.re.mantissa_bits()
                    + acc.im.mantissa_bits()
                    + g.mantissa_bits()
                    + h_err.mantissa_bits()
                    + lns.bits,
            )?;
        }
    }
    // runtime corroboration of the magnitude bound behind the tail
    let bound = pw2(plan.h_mag_exp);
    let ok = match acc.modulus_sq() {
        Ok(m2) => m2 <= bound.mul(&bound)?,
        Err(_) => false,
    };
    Ok((ComplexBall::from_center_err(acc, &h_err), ok))
}

/// `u(s)` as the truncated outer series with complex accumulators. The
/// boolean reports whether every computed term satisfied the magnitude
/// assumption backing the tail bound.
pub fn u_eval_complex(
    sigma: &ApproxReal,
    t: &ApproxReal,
    plan: &ComplexPlan,
    ctx: &mut EvalContext,
) -> Result<(ComplexBall, bool)> {
    let mut lns = LnCache::new(
        plan.base.n4(plan.base.iota) + plan.p_sigma.max(plan.p_t) + 8,
    );
    let grid_u = plan.base.n2 + clog2(plan.base.iota + 2) + 4;
    ctx.note_precision(grid_u as u64)?;
    let ulp = pw2(-(grid_u as i64));
    let mut acc = ComplexDyadic::zero();
    let mut err = Dyadic::zero();
    let mut assumption_ok = true;
    for k in 0..=plan.base.iota {
        ctx.count_term()?;
        let (hb, ok) = h_complex(k, sigma, t, plan, &mut lns, ctx)?;
        assumption_ok &= ok;
        let shift = -(k as i64) - 1;
        acc = acc.add(&hb.center.shift(shift)?)?.round(grid_u);
        err = err
            .add(&hb.radius_dyadic().shift(shift)?)?
            .add(&ulp)?
            .add(&ulp)?;
        if k % 8 == 0 {
            ctx.observe_live_bits(
                acc.re.mantissa_bits() + acc.im.mantissa_bits() + err.mantissa_bits() + lns.bits,
            )?;
        }
    }
    // tail: |h(k,s)| <= 2^h_mag_exp gives sum_{k>iota} 2^-(k+1) |h| below
    // 2^(h_mag_exp - iota - 1)
    let tail = pw2(plan.h_mag_exp - plan.base.iota as i64 - 1);
    err = err.add(&tail)?;
    Ok((ComplexBall::from_center_err(acc, &err), assumption_ok))
}

/// `zeta(sigma + i t)` to modulus error `2^-n`.
pub fn zeta_complex(
    sigma: &ApproxReal,
    t: &ApproxReal,
    n: u32,
    ctx: &mut EvalContext,
) -> Result<ComplexBall> {
    Ok(zeta_complex_planned(sigma, t, n, None, ctx)?.0)
}

pub fn zeta_complex_planned(
    sigma: &ApproxReal,
    t: &ApproxReal,
    n: u32,
    p_override: Option<u32>,
    ctx: &mut EvalContext,
) -> Result<(ComplexBall, ComplexPlan)> {
    let mut plan = plan_complex(n, sigma, t, p_override, ctx)?;
    for attempt in 0..2 {
        let v = v_eval_complex(sigma, t, plan.base.n1, &plan, ctx)?;
        let (u, assumption_ok) = u_eval_complex(sigma, t, &plan, ctx)?;
        ctx.count_op();
        let center = v.center.mul(&u.center)?;
        let err = v
            .center
            .modulus_upper()?
            .mul(&u.radius_dyadic())?
            .add(&u.center.modulus_upper()?.mul(&v.radius_dyadic())?)?
            .add(&v.radius_dyadic().mul(&u.radius_dyadic())?)?
            .add(&pw2(-(n as i64) - 2))?;
        let target = pw2(-(n as i64));
        if assumption_ok && err <= target {
            let ball = ComplexBall::from_center_err(center.round(n + 3), &err);
            return Ok((ball, plan));
        }
        if attempt == 0 {
            ctx.count_retry();
            let extra = plan.base.extra + plan.base.n1;
            let mut widened = PrecisionPlan::build(n, plan.base.p, extra);
            widened.iota = plan.base.iota * 2;
            plan.base = widened;
        }
    }
    Err(Error::contract(
        "certified complex radius exceeded the target even after the widened retry",
    ))
}
