//! Real zeta for s > 1 via the globally convergent alternating-binomial
//! series
//!
//! `zeta(s) = 1/(1 - 2^(1-s)) * sum_k 2^-(k+1) sum_q (-1)^q C(k,q) (q+1)^-s`
//!
//! evaluated under an explicit precision cascade: a target of `2^-n` fixes
//! `n1` for the two factors, `n2`/`n3` for the outer and inner sums, a
//! per-term `n4(k)`, and the truncation index `iota = 4p + 2 n2 + C6`. The
//! inner sums run as streaming accumulators with certified error carried
//! alongside, so the working set stays linear in `n` while the returned
//! ball is certified by the actually accumulated error, not just the
//! schedule.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::approx::{ApproxReal, Ball, EvalContext};
use crate::dyadic::{div_int_trunc, div_trunc, Dyadic};
use crate::elementary::{exp_for_nonpositive, log1p_real, pow1p_real};
use crate::error::{Error, Result};

fn pw2(e: i64) -> Dyadic {
    Dyadic::power_of_two(e).expect("error exponent in range")
}

fn clog2(v: u64) -> u32 {
    64 - v.saturating_sub(1).leading_zeros()
}

/// The resolved precision cascade for one evaluation at target `2^-n`.
///
/// Invariants: `n1 = n + C2(p)` with `C2(p) = 2p + 2`, `n2 = n1 + 1`,
/// `n3 = n2 + 1`, `n4(k) = n3 + C3 k + C4(k)` with `C3 = 1` and
/// `C4(k) = ceil(log2(k+2)) + 3`, and `iota = 4p + 2 n2 + C6` with
/// `C6 = 8`. `extra` widens `n1` when a retry fires and is zero otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionPlan {
    pub n: u32,
    pub p: u32,
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub iota: u64,
    /// Input precision for s: an upper bound on every query the cascade
    /// makes against the argument.
    pub m: u32,
    /// log2 bound used for |u|: u(s) lies in (1/2, 1] for real s > 1.
    pub c1_exp: i64,
    pub c2: u32,
    pub c3: u32,
    pub c5: u32,
    pub c6: u32,
    pub extra: u32,
}

impl PrecisionPlan {
    pub fn build(n: u32, p: u32, extra: u32) -> Self {
        let c2 = 2 * p + 2;
        let n1 = n + c2 + extra;
        let n2 = n1 + 1;
        let n3 = n2 + 1;
        let iota = 4 * p as u64 + 2 * n2 as u64 + 8;
        let m = n3 + iota as u32 + clog2(iota + 2) + 3 + 2 * p + 40;
        PrecisionPlan {
            n,
            p,
            n1,
            n2,
            n3,
            iota,
            m,
            c1_exp: 0,
            c2,
            c3: 1,
            c5: 2,
            c6: 8,
            extra,
        }
    }

    /// Inner-term precision for the k-th outer term.
    pub fn n4(&self, k: u64) -> u32 {
        self.n3 + self.c3 * k as u32 + clog2(k + 2) + 3
    }
}

/// Derives the range parameter and builds the plan. `p` is the smallest
/// value such that the certified interval of `s` fits inside
/// `[1 + 2^-(p-1), 2^p]`; since `log2(1 + 2^-p) < 2^-(p-1)` this certifies
/// the required `s >= 1 + lambda(p)`.
pub fn plan(
    n: u32,
    s: &ApproxReal,
    p_override: Option<u32>,
    ctx: &mut EvalContext,
) -> Result<PrecisionPlan> {
    let one = Dyadic::one();
    let cap = (2 * n).max(64);
    let exact = s.as_exact();
    let mut probe = 16u32;
    loop {
        // an exact argument certifies a point interval; otherwise widen the
        // query by its precision
        let (lower, upper) = match &exact {
            Some(d) => (d.clone(), d.clone()),
            None => {
                let v = s.query(ctx, probe)?;
                let eps = pw2(-(probe as i64));
                (v.sub(&eps)?, v.add(&eps)?)
            }
        };
        if upper <= one {
            return Err(Error::domain(
                "s <= 1 in real mode: zeta(s) has its pole at s = 1",
            ));
        }
        if lower > one {
            let frac = lower.sub(&one)?;
            let p_low = (1 - frac.floor_log2_abs()).max(1);
            let p_high = upper.ceil_log2_abs().max(1);
            let p_min = p_low.max(p_high) as u32;
            let p = match p_override {
                None => p_min,
                Some(po) => {
                    let fits = po >= 1
                        && pw2(-(po as i64) + 1) <= frac
                        && upper <= pw2(po as i64);
                    if !fits {
                        return Err(Error::domain(format!(
                            "cannot certify s inside [1 + 2^-{}, 2^{}] for the requested p",
                            po as i64 - 1,
                            po
                        )));
                    }
                    po
                }
            };
            if p > 24 {
                return Err(Error::resource("range parameter p exceeds the supported 24"));
            }
            return Ok(PrecisionPlan::build(n, p, 0));
        }
        if probe >= cap {
            return Err(Error::domain(format!(
                "s is not separable from 1 at precision 2^-{cap}: zeta(s) has its pole at s = 1"
            )));
        }
        probe = (probe * 2).min(cap);
    }
}

/// The exact small integer represented by `s`, when there is one.
fn exact_int(s: &ApproxReal) -> Option<i64> {
    s.as_exact()
        .filter(|d| d.is_integer())
        .and_then(|d| d.to_i64())
        .filter(|v| (2..=64).contains(v))
}

/// `v(s) = 1/(1 - 2^(1-s))` to `2^-n1` for `s` in `[1 + lambda, 2^p]`.
///
/// `2^(1-s)` is computed as `(1+1)^(1-s)`; the certified chain
/// `1 - 2^(1-s) >= 1 - 2^-lambda >= 2^-(p+1)` justifies the inversion floor.
pub fn v_eval(s: &ApproxReal, n1: u32, p: u32, ctx: &mut EvalContext) -> Result<Ball> {
    if let Some(si) = exact_int(s) {
        // 2^(1-s) is an exact power of two
        let w = pw2(1 - si);
        let y = Dyadic::one().sub(&w)?;
        ctx.count_op();
        let val = div_trunc(&Dyadic::one(), &y, n1 + 3)?;
        return Ok(Ball::from_center_err(val, &pw2(-(n1 as i64) - 3)));
    }
    let n_w = n1 + 2 * p + 6;
    let one_minus_s = ApproxReal::affine(Dyadic::one(), Dyadic::from_int(-1), s);
    let p2 = (1u32 << p) + 1;
    let w_ball = pow1p_real(
        &ApproxReal::constant(Dyadic::one()),
        &one_minus_s,
        n_w,
        2,
        p2,
        ctx,
    )?;
    let y = Dyadic::one().sub(&w_ball.center)?;
    let floor = pw2(-(p as i64) - 2);
    if y.sub(&w_ball.radius_dyadic())? < floor {
        return Err(Error::domain(
            "cannot certify the lower bound 1 - 2^(1-s) >= 2^-(p+2)",
        ));
    }
    ctx.count_op();
    let val = div_trunc(&Dyadic::one(), &y, n1 + 3)?;
    // |1/(1-2^(1-s)) - 1/y| <= w_err / ((1-2^(1-s)) * y) <= w_err * 2^(2p+3)
    let err = w_ball
        .radius_dyadic()
        .shift(2 * p as i64 + 3)?
        .add(&pw2(-(n1 as i64) - 3))?;
    Ok(Ball::from_center_err(val, &err))
}

/// Enclosures of `ln(q+1)` at one fixed precision, filled lazily during an
/// evaluation so each q is reduced through the log kernel only once.
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

fn clamp_unit(ball: Ball) -> Ball {
    // (q+1)^-s lies in [0, 1]; pulling the center into the range can only
    // shrink its distance to the true value
    let mut center = ball.center;
    if center.is_negative() {
        center = Dyadic::zero();
    } else if center > Dyadic::one() {
        center = Dyadic::one();
    }
    Ball {
        center,
        radius_exp: ball.radius_exp,
    }
}

fn f_eval_inner(
    q: u64,
    s: &ApproxReal,
    n4: u32,
    p: u32,
    lns: &mut LnCache,
    ctx: &mut EvalContext,
) -> Result<Ball> {
    if q == 0 {
        return Ok(Ball::exact(Dyadic::one()));
    }
    if let Some(si) = exact_int(s) {
        let denom = BigInt::from(q + 1).pow(si as u32);
        ctx.count_op();
        let val = div_trunc(&Dyadic::one(), &Dyadic::new(denom, 0)?, n4 + 2)?;
        return Ok(Ball::from_center_err(val, &pw2(-(n4 as i64) - 2)));
    }
    // f = exp(-s ln(q+1)); the exponent is nonpositive so |f| <= 1 and no
    // magnitude probing is needed
    let l = lns.get(q, ctx)?;
    let l_mag_exp = if l.center.is_zero() {
        0
    } else {
        l.center.ceil_log2_abs().max(0)
    };
    let m_s = n4 + l_mag_exp as u32 + 5;
    let sq = s.query_checked(ctx, m_s, p as i64 + 1)?;
    ctx.count_op();
    let a = sq.mul(&l.center)?.neg();
    let err_in = sq
        .abs()
        .mul(&l.radius_dyadic())?
        .add(&l.magnitude_upper().mul(&pw2(-(m_s as i64)))?)?;
    let ball = exp_for_nonpositive(&a, &err_in, n4 + 2, ctx)?;
    Ok(clamp_unit(ball))
}

/// `f(q, s) = (q+1)^-s` to `2^-n4`, clamped into `[0, 1]`.
pub fn f_eval(q: u64, s: &ApproxReal, n4: u32, p: u32, ctx: &mut EvalContext) -> Result<Ball> {
    let mut lns = LnCache::new(n4 + p + 6);
    f_eval_inner(q, s, n4, p, &mut lns, ctx)
}

/// One step of the certified error trace of the reciprocal-binomial loop.
#[derive(Debug, Clone)]
pub struct EpsStep {
    pub tau: u64,
    /// Certified bound on the error of the partial product after this step.
    pub err_bound: Dyadic,
}

/// `1/C(k,q)` to `2^-n_omega` by the space-bounded running product
/// `omega(k,q) = prod_tau (q-tau+1)/(k-tau+1)`.
///
/// Each partial product is truncated onto a grid that starts at
/// `3q + max(0, n_omega - q)` fractional bits and loses two bits per step,
/// so the accumulated error after step tau stays below `2^(-3q+2tau)` while
/// the working width never exceeds `3q + max(0, n_omega - q) + O(1)` bits.
pub fn binom_recip(k: u64, q: u64, n_omega: u32, ctx: &mut EvalContext) -> Result<Ball> {
    Ok(binom_recip_traced(k, q, n_omega, ctx)?.0)
}

pub fn binom_recip_traced(
    k: u64,
    q: u64,
    n_omega: u32,
    ctx: &mut EvalContext,
) -> Result<(Ball, Vec<EpsStep>)> {
    if q > k {
        return Err(Error::domain("binomial reciprocal requires q <= k"));
    }
    if q == 0 || q == k {
        return Ok((Ball::exact(Dyadic::one()), Vec::new()));
    }
    let delta = (n_omega as u64).saturating_sub(q);
    let base = 3 * q + delta;
    ctx.note_precision(base)?;
    let mut grid = base as u32;
    let ulp = |g: u32| pw2(-(g as i64));
    // b_1 = q/k
    let mut omega = div_trunc(&Dyadic::from_int(q as i64), &Dyadic::from_int(k as i64), grid)?;
    let mut err = ulp(grid);
    let mut trace = Vec::with_capacity(q as usize);
    trace.push(EpsStep {
        tau: 1,
        err_bound: err.clone(),
    });
    for tau in 1..q {
        // multiply by b_(tau+1) = (q-tau)/(k-tau) exactly, then truncate
        grid = (base - 2 * tau).max(q + 2) as u32;
        ctx.count_op();
        omega = omega.mul(&Dyadic::from_int((q - tau) as i64))?;
        omega = div_int_trunc(&omega, k - tau, grid)?;
        // omega <= 1 and b <= 1: the propagated error does not grow, the
        // truncation adds one ulp of the current grid
        err = err.add(&ulp(grid))?;
        trace.push(EpsStep {
            tau: tau + 1,
            err_bound: err.clone(),
        });
        if tau % 32 == 0 {
            ctx.observe_live_bits(omega.mantissa_bits() + err.mantissa_bits())?;
        }
    }
    Ok((Ball::from_center_err(omega, &err), trace))
}

/// `g(k, q) = C(k, q)` to `2^-n4`, inverting the reciprocal loop with the
/// lower bound `omega >= 2^-k`; the input precision is the inversion
/// schedule `n_omega = n4 + 2k + 2`.
pub fn g_eval(k: u64, q: u64, n4: u32, ctx: &mut EvalContext) -> Result<Ball> {
    let n_omega = n4 + 2 * k as u32 + 2;
    let om = binom_recip(k, q, n_omega, ctx)?;
    if om.radius_exp.is_none() {
        // exact 1 for q = 0 or q = k
        return Ok(Ball::exact(Dyadic::one()));
    }
    let lower = om.center.sub(&om.radius_dyadic())?;
    if lower.is_zero() || lower.is_negative() {
        return Err(Error::contract(
            "reciprocal binomial is not certifiably positive",
        ));
    }
    ctx.count_op();
    let val = div_trunc(&Dyadic::one(), &om.center, n4 + 2)?;
    // |1/omega* - C| <= om_err / (omega omega*) <= om_err 2^(2k+1)
    let err = om
        .radius_dyadic()
        .shift(2 * k as i64 + 1)?
        .add(&pw2(-(n4 as i64) - 2))?;
    Ok(Ball::from_center_err(val, &err))
}

/// `h(k, s) = sum_q (-1)^q C(k,q) (q+1)^-s` to `2^-n3`, streamed over q
/// with a single accumulator and no term storage.
///
/// For exact integer `s` the signed term itself is carried through the
/// rational recurrence `t_q = t_(q-1) * (k-q+1) q^s / (q (q+1)^s)`; the
/// amplification of earlier truncations through later steps is bounded by
/// power-of-two overestimates of the ratios, all folded into the grid.
pub fn h_eval(
    k: u64,
    s: &ApproxReal,
    plan: &PrecisionPlan,
    ctx: &mut EvalContext,
) -> Result<Ball> {
    let mut lns = LnCache::new(plan.n4(k) + plan.p + 6);
    h_eval_inner(k, s, plan, &mut lns, ctx)
}

fn h_eval_inner(
    k: u64,
    s: &ApproxReal,
    plan: &PrecisionPlan,
    lns: &mut LnCache,
    ctx: &mut EvalContext,
) -> Result<Ball> {
    if k == 0 {
        return Ok(Ball::exact(Dyadic::one()));
    }
    let n4 = plan.n4(k);
    if let Some(si) = exact_int(s) {
        return h_eval_int(k, si as u32, n4, ctx);
    }
    // generic s: running binomial by its rational recurrence, fresh f per q
    let grid_g = n4 + 2 * k as u32 + 2 * clog2(k + 2) + 4;
    let grid_h = n4 + clog2(k + 2) + 4;
    ctx.note_precision(grid_g as u64)?;
    let ulp_g = pw2(-(grid_g as i64));
    let ulp_h = pw2(-(grid_h as i64));
    let mut g = Dyadic::one();
    let mut g_err = Dyadic::zero();
    let mut acc = Dyadic::one(); // q = 0 term: g = f = 1 exactly
    let mut h_err = Dyadic::zero();
    for q in 1..=k {
        ctx.count_op();
        g = g.mul(&Dyadic::from_int((k - q + 1) as i64))?;
        g = div_int_trunc(&g, q, grid_g)?;
        // ratio bound: (k-q+1)/q <= 2^(clog2(k-q+1) - flog2(q))
        let shift = clog2(k - q + 1) as i64 - Dyadic::from_int(q as i64).floor_log2_abs();
        g_err = g_err.shift(shift.max(-(grid_g as i64)))?.add(&ulp_g)?;
        let f = f_eval_inner(q, s, n4, plan.p, lns, ctx)?;
        ctx.count_op();
        let term = g.mul(&f.center)?;
        // |g* f* - g f| <= |g*| f_err + |f| g_err with |f| <= 1
        let term_err = g.abs().mul(&f.radius_dyadic())?.add(&g_err)?;
        acc = if q % 2 == 1 {
            acc.sub(&term)?
        } else {
            acc.add(&term)?
        };
        acc = acc.round(grid_h);
        h_err = h_err.add(&term_err)?.add(&ulp_h)?;
        if q % 16 == 0 {
            ctx.observe_live_bits(
                acc.mantissa_bits() + g.mantissa_bits() + h_err.mantissa_bits() + lns.bits,
            )?;
        }
    }
    Ok(Ball::from_center_err(acc, &h_err))
}

fn h_eval_int(k: u64, si: u32, n4: u32, ctx: &mut EvalContext) -> Result<Ball> {
    let grid = n4 + 2 * k as u32 + 2 * clog2(k + 2) + 4;
    ctx.note_precision(grid as u64)?;
    let ulp = pw2(-(grid as i64));
    let mut term = Dyadic::one();
    let mut term_err = Dyadic::zero();
    let mut acc = Dyadic::one();
    let mut h_err = Dyadic::zero();
    for q in 1..=k {
        ctx.count_op();
        // t_q = t_(q-1) * (k-q+1) q^s / (q (q+1)^s)
        let num = BigInt::from(k - q + 1) * BigInt::from(q).pow(si);
        let den = BigInt::from(q) * BigInt::from(q + 1).pow(si);
        term = term.mul(&Dyadic::new(num, 0)?)?;
        term = div_trunc(&term, &Dyadic::new(den, 0)?, grid)?;
        // ratio <= (k-q+1)/q since (q/(q+1))^s <= 1
        let shift = clog2(k - q + 1) as i64 - Dyadic::from_int(q as i64).floor_log2_abs();
        term_err = term_err.shift(shift.max(-(grid as i64)))?.add(&ulp)?;
        acc = if q % 2 == 1 {
            acc.sub(&term)?
        } else {
            acc.add(&term)?
        };
        acc = acc.round(grid);
        h_err = h_err.add(&term_err)?.add(&ulp)?;
        if q % 64 == 0 {
            ctx.observe_live_bits(
                acc.mantissa_bits() + term.mantissa_bits() + h_err.mantissa_bits(),
            )?;
        }
    }
    Ok(Ball::from_center_err(acc, &h_err))
}

/// `u(s) = sum_k 2^-(k+1) h(k, s)` truncated at `iota`, as a streaming
/// accumulator; the certified radius covers every inner error plus the
/// series tail `(iota+3) 2^-iota`.
pub fn u_eval(s: &ApproxReal, plan: &PrecisionPlan, ctx: &mut EvalContext) -> Result<Ball> {
    let mut lns = LnCache::new(plan.n4(plan.iota) + plan.p + 6);
    let grid_u = plan.n2 + clog2(plan.iota + 2) + 4;
    ctx.note_precision(grid_u as u64)?;
    let ulp = pw2(-(grid_u as i64));
    let mut acc = Dyadic::zero();
    let mut err = Dyadic::zero();
    for k in 0..=plan.iota {
        ctx.count_term()?;
        let hb = h_eval_inner(k, s, plan, &mut lns, ctx)?;
        let shift = -(k as i64) - 1;
        acc = acc.add(&hb.center.shift(shift)?)?.round(grid_u);
        err = err
            .add(&hb.radius_dyadic().shift(shift)?)?
            .add(&ulp)?;
        if k % 8 == 0 {
            ctx.observe_live_bits(acc.mantissa_bits() + err.mantissa_bits() + lns.bits)?;
        }
    }
    // tail: |h(k,s)| <= 2(k+1) for s > 1, so the dropped part is below
    // (iota+3) 2^-iota, far inside the 2^-(n2+3) budget
    let tail = Dyadic::from_int(plan.iota as i64 + 3).mul(&pw2(-(plan.iota as i64)))?;
    err = err.add(&tail)?;
    Ok(Ball::from_center_err(acc, &err))
}

/// `zeta(s)` for real `s > 1` to `2^-n`: the certified product of `v` and
/// `u`. If the runtime ball overruns the target (the schedule constants
/// were too tight), the evaluation reruns once with a widened cascade and
/// the retry is counted in the stats.
pub fn zeta_real(s: &ApproxReal, n: u32, ctx: &mut EvalContext) -> Result<Ball> {
    Ok(zeta_real_planned(s, n, None, ctx)?.0)
}

pub fn zeta_real_planned(
    s: &ApproxReal,
    n: u32,
    p_override: Option<u32>,
    ctx: &mut EvalContext,
) -> Result<(Ball, PrecisionPlan)> {
    let mut plan_now = plan(n, s, p_override, ctx)?;
    for attempt in 0..2 {
        let v = v_eval(s, plan_now.n1, plan_now.p, ctx)?;
        let u = u_eval(s, &plan_now, ctx)?;
        ctx.count_op();
        let center = v.center.mul(&u.center)?;
        let err = v
            .center
            .abs()
            .mul(&u.radius_dyadic())?
            .add(&u.center.abs().mul(&v.radius_dyadic())?)?
            .add(&v.radius_dyadic().mul(&u.radius_dyadic())?)?
            .add(&pw2(-(n as i64) - 2))?;
        let target = pw2(-(n as i64));
        if err <= target {
            let ball = Ball::from_center_err(center.round(n + 2), &err);
            return Ok((ball, plan_now));
        }
        if attempt == 0 {
            ctx.count_retry();
            plan_now = PrecisionPlan::build(n, plan_now.p, plan_now.n1);
        }
    }
    Err(Error::contract(
        "certified radius exceeded the target even after the widened retry",
    ))
}

/// Wraps the pipeline as a queryable real, honoring the oracle model:
/// `query(n)` runs a fresh cascade at target `2^-n`.
pub fn zeta_real_approx(s: ApproxReal) -> ApproxReal {
    ApproxReal::from_fn(
        move |ctx, n| zeta_real(&s, n, ctx).map(|b| b.center),
        None,
    )
}
