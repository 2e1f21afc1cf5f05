//! Queryable binary-converging reals, ball arithmetic for runtime
//! certification, affine precision schedules, and resource metering.
//!
//! An [`ApproxReal`] answers queries at precision `2^-n`: the returned dyadic
//! differs from the represented real by at most `2^-n`. Precision choices are
//! made a priori through affine schedules ([`LinearForm`]); every evaluation
//! additionally carries a runtime [`Ball`] whose radius certifies the error
//! actually accumulated, so a schedule that is too tight fails loudly instead
//! of silently returning wrong bits.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;
use std::time::Instant;

use crate::dyadic::{div_trunc, Dyadic};
use crate::error::{Error, Result};

/// Evaluation caps. Exceeding a cap is a resource error.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    /// Upper bound on any single requested working precision and on the
    /// observed total of live mantissa bits.
    pub max_working_bits: u64,
    /// Upper bound on the number of series terms summed.
    pub max_terms: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_working_bits: 1 << 20,
            max_terms: 1 << 20,
        }
    }
}

/// Resource counters for one evaluation. All counters are monotone while the
/// evaluation runs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResourceStats {
    /// High-water mark of live mantissa bits observed at instrumented points.
    pub peak_bits: u64,
    /// Largest working precision requested anywhere.
    pub max_working_precision: u64,
    /// Series terms summed by the outer series loop.
    pub term_count: u64,
    /// Big-integer multiplications performed at instrumented sites.
    pub op_count: u64,
    /// Wall-clock time of the evaluation.
    pub elapsed_ms: u64,
    /// Times the runtime ball exceeded its budget and the evaluation was
    /// rerun with a widened schedule.
    pub schedule_retries: u64,
}

/// Single-owner evaluation context: query memo plus resource accounting.
/// One context must never be shared by two concurrent evaluations.
pub struct EvalContext {
    memo: HashMap<(u64, u32), Dyadic>,
    best: HashMap<u64, (u32, Dyadic)>,
    pub caps: Caps,
    stats: ResourceStats,
    started: Instant,
}

impl EvalContext {
    pub fn new(caps: Caps) -> Self {
        EvalContext {
            memo: HashMap::new(),
            best: HashMap::new(),
            caps,
            stats: ResourceStats::default(),
            started: Instant::now(),
        }
    }

    pub fn note_precision(&mut self, m: u64) -> Result<()> {
        if m > self.caps.max_working_bits {
            return Err(Error::resource(format!(
                "working precision {m} exceeds cap {}",
                self.caps.max_working_bits
            )));
        }
        if m > self.stats.max_working_precision {
            self.stats.max_working_precision = m;
        }
        Ok(())
    }

    pub fn count_op(&mut self) {
        self.stats.op_count += 1;
    }

    pub fn count_term(&mut self) -> Result<()> {
        self.stats.term_count += 1;
        if self.stats.term_count > self.caps.max_terms {
            return Err(Error::resource(format!(
                "term count exceeds cap {}",
                self.caps.max_terms
            )));
        }
        Ok(())
    }

    pub fn count_retry(&mut self) {
        self.stats.schedule_retries += 1;
    }

    /// Registers the total mantissa bits of the values live at an
    /// instrumentation point.
    pub fn observe_live_bits(&mut self, bits: u64) -> Result<()> {
        if bits > self.stats.peak_bits {
            self.stats.peak_bits = bits;
        }
        if bits > self.caps.max_working_bits * 64 {
            return Err(Error::resource("live mantissa bits exceed cap"));
        }
        Ok(())
    }

    pub fn stats(&self) -> &ResourceStats {
        &self.stats
    }

    /// Stops the clock and returns the final counters.
    pub fn finish(mut self) -> ResourceStats {
        self.stats.elapsed_ms = self.started.elapsed().as_millis() as u64;
        self.stats
    }
}

/// Runs `action` under a fresh metered context and returns its result
/// together with the final counters.
pub fn run_metered<R>(
    caps: Caps,
    action: impl FnOnce(&mut EvalContext) -> Result<R>,
) -> (Result<R>, ResourceStats) {
    let mut ctx = EvalContext::new(caps);
    let out = action(&mut ctx);
    (out, ctx.finish())
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

enum Node {
    Const(Dyadic),
    /// `a + b * inner`, exact dyadic coefficients.
    Affine {
        a: Dyadic,
        b: Dyadic,
        inner: ApproxReal,
    },
    Opaque(#[allow(clippy::type_complexity)] Arc<dyn Fn(&mut EvalContext, u32) -> Result<Dyadic> + Send + Sync>),
}

/// A queryable real: `query(ctx, n)` returns a dyadic within `2^-n` of the
/// represented value. Descriptions are immutable and freely shareable; all
/// mutable state lives in the [`EvalContext`].
#[derive(Clone)]
pub struct ApproxReal {
    id: u64,
    hint_exp: Option<i64>,
    node: Arc<Node>,
}

impl ApproxReal {
    fn wrap(node: Node, hint_exp: Option<i64>) -> Self {
        ApproxReal {
            id: NEXT_ID.fetch_add(1, AtomicOrdering::Relaxed),
            hint_exp,
            node: Arc::new(node),
        }
    }

    /// A constant: every query returns the constant truncated to the grid.
    pub fn constant(d: Dyadic) -> Self {
        let hint = if d.is_zero() {
            Some(i64::MIN / 2)
        } else {
            Some(d.ceil_log2_abs())
        };
        Self::wrap(Node::Const(d), hint)
    }

    pub fn from_decimal(text: &str, n: u32) -> Result<Self> {
        Ok(Self::constant(Dyadic::from_decimal(text, n)?))
    }

    /// `a + b * x` with exact dyadic `a`, `b`.
    pub fn affine(a: Dyadic, b: Dyadic, x: &ApproxReal) -> Self {
        let hint = match (x.hint_exp, b.is_zero()) {
            (_, true) => {
                if a.is_zero() {
                    Some(i64::MIN / 2)
                } else {
                    Some(a.ceil_log2_abs())
                }
            }
            (Some(hx), false) => {
                let bx = b.ceil_log2_abs() + hx;
                let ax = if a.is_zero() { i64::MIN / 2 } else { a.ceil_log2_abs() };
                Some(ax.max(bx) + 1)
            }
            (None, false) => None,
        };
        Self::wrap(
            Node::Affine {
                a,
                b,
                inner: x.clone(),
            },
            hint,
        )
    }

    /// An opaque generator; `f(ctx, n)` must return a dyadic within `2^-n`
    /// of the represented real, deterministically in `n`.
    pub fn from_fn(
        f: impl Fn(&mut EvalContext, u32) -> Result<Dyadic> + Send + Sync + 'static,
        hint_exp: Option<i64>,
    ) -> Self {
        Self::wrap(Node::Opaque(Arc::new(f)), hint_exp)
    }

    /// Magnitude hint: `|x| <= 2^hint` when present.
    pub fn magnitude_hint(&self) -> Option<i64> {
        self.hint_exp
    }

    pub fn with_hint(mut self, hint_exp: i64) -> Self {
        self.hint_exp = Some(hint_exp);
        self
    }

    /// The exact represented value when the description is closed-form.
    pub fn as_exact(&self) -> Option<Dyadic> {
        match &*self.node {
            Node::Const(d) => Some(d.clone()),
            Node::Affine { a, b, inner } => {
                let x = inner.as_exact()?;
                a.add(&b.mul(&x).ok()?).ok()
            }
            Node::Opaque(_) => None,
        }
    }

    /// Queries the real at precision `2^-n`.
    ///
    /// Answers are memoized per `(value, n)` inside the context; a query
    /// below the best precision already cached is served by truncating the
    /// cached value to `n + 1` fractional bits, which keeps the combined
    /// error within `2^-(n+1) + 2^-(n+1) <= 2^-n`.
    pub fn query(&self, ctx: &mut EvalContext, n: u32) -> Result<Dyadic> {
        ctx.note_precision(n as u64)?;
        if let Node::Const(d) = &*self.node {
            return Ok(d.round(n));
        }
        if let Some(v) = ctx.memo.get(&(self.id, n)) {
            return Ok(v.clone());
        }
        if let Some((m, c)) = ctx.best.get(&self.id) {
            if *m > n {
                let v = c.round(n + 1);
                ctx.memo.insert((self.id, n), v.clone());
                return Ok(v);
            }
        }
        let v = match &*self.node {
            Node::Const(_) => unreachable!("handled above"),
            Node::Affine { a, b, inner } => {
                if b.is_zero() {
                    a.round(n)
                } else {
                    let shift = b.ceil_log2_abs().max(0) as u32;
                    let inner_n = n
                        .checked_add(shift)
                        .ok_or_else(|| Error::resource("precision overflow"))?;
                    let x = inner.query(ctx, inner_n)?;
                    a.add(&b.mul(&x)?)?
                }
            }
            Node::Opaque(f) => f(ctx, n)?,
        };
        ctx.memo.insert((self.id, n), v.clone());
        let improves = match ctx.best.get(&self.id) {
            None => true,
            Some((m, _)) => n > *m,
        };
        if improves {
            ctx.best.insert(self.id, (n, v.clone()));
        }
        Ok(v)
    }

    /// Queries and verifies the caller's magnitude hint `|x| <= 2^p`; a
    /// contradiction is a contract error.
    pub fn query_checked(&self, ctx: &mut EvalContext, n: u32, p: i64) -> Result<Dyadic> {
        let v = self.query(ctx, n)?;
        if !v.is_zero() {
            let slack = Dyadic::power_of_two(-(n as i64))?;
            let bound = Dyadic::power_of_two(p)?.add(&slack)?;
            if v.abs() > bound {
                return Err(Error::contract(format!(
                    "magnitude hint |x| <= 2^{p} contradicted by query at 2^-{n}"
                )));
            }
        }
        Ok(v)
    }
}

/// An affine precision schedule `L(args) = c + sum(coeff_i * args_i)` with
/// nonnegative integer coefficients; monotone in every argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    constant: u64,
    coeffs: Vec<u64>,
}

impl LinearForm {
    pub fn new(constant: u64, coeffs: Vec<u64>) -> Self {
        LinearForm { constant, coeffs }
    }

    pub fn eval(&self, args: &[u64]) -> Result<u64> {
        if args.len() != self.coeffs.len() {
            return Err(Error::contract(format!(
                "linear form arity {} applied to {} arguments",
                self.coeffs.len(),
                args.len()
            )));
        }
        let mut acc = self.constant;
        for (c, a) in self.coeffs.iter().zip(args) {
            acc = c
                .checked_mul(*a)
                .and_then(|t| acc.checked_add(t))
                .ok_or_else(|| Error::resource("linear form overflow"))?;
        }
        Ok(acc)
    }
}

/// Input precision sufficient to multiply two reals bounded by `2^p` to
/// `2^-n`: querying both at `m = n + p + 2` and truncating the exact product
/// to `n + 2` fractional bits leaves total error below `2^-n`.
pub fn schedule_mul() -> LinearForm {
    LinearForm::new(2, vec![1, 1])
}

/// Input precision sufficient to invert a real with `|x| >= 2^-p` to `2^-n`:
/// `m = n + 2p + 2`.
pub fn schedule_inv() -> LinearForm {
    LinearForm::new(2, vec![1, 2])
}

/// `a * b` to precision `2^-n` given `|a| <= 2^p`, `|b| <= 2^p`.
pub fn mul_to_prec(
    a: &ApproxReal,
    b: &ApproxReal,
    n: u32,
    p: u32,
    ctx: &mut EvalContext,
) -> Result<Dyadic> {
    let m = schedule_mul().eval(&[n as u64, p as u64])? as u32;
    let va = a.query_checked(ctx, m, p as i64)?;
    let vb = b.query_checked(ctx, m, p as i64)?;
    ctx.count_op();
    Ok(va.mul(&vb)?.round(n + 2))
}

/// `1 / a` to precision `2^-n` given `|a| >= 2^-p`.
pub fn inv_to_prec(a: &ApproxReal, n: u32, p: u32, ctx: &mut EvalContext) -> Result<Dyadic> {
    let m = schedule_inv().eval(&[n as u64, p as u64])? as u32;
    let va = a.query(ctx, m)?;
    let floor = Dyadic::power_of_two(-(p as i64))?;
    let slack = Dyadic::power_of_two(-(m as i64))?;
    if va.abs().add(&slack)? < floor {
        return Err(Error::domain(format!(
            "value is certifiably below the inversion floor 2^-{p}"
        )));
    }
    if va.is_zero() {
        return Err(Error::domain("cannot invert a value indistinguishable from zero"));
    }
    ctx.count_op();
    div_trunc(&Dyadic::one(), &va, n + 2)
}

/// A certified enclosure: the represented real `x` satisfies
/// `|x - center| <= 2^radius_exp`; `radius_exp = None` encodes radius zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub center: Dyadic,
    pub radius_exp: Option<i64>,
}

impl Ball {
    pub fn exact(center: Dyadic) -> Self {
        Ball {
            center,
            radius_exp: None,
        }
    }

    pub fn new(center: Dyadic, radius_exp: i64) -> Self {
        Ball {
            center,
            radius_exp: Some(radius_exp),
        }
    }

    /// Encloses `center` with any error bound `|x - center| <= err`.
    pub fn from_center_err(center: Dyadic, err: &Dyadic) -> Self {
        if err.is_zero() {
            Ball::exact(center)
        } else {
            Ball::new(center, err.ceil_log2_abs())
        }
    }

    pub fn radius_dyadic(&self) -> Dyadic {
        match self.radius_exp {
            None => Dyadic::zero(),
            Some(e) => Dyadic::power_of_two(e).expect("radius exponent in range"),
        }
    }

    /// `|center| + radius`, an upper bound for the enclosed magnitude.
    pub fn magnitude_upper(&self) -> Dyadic {
        self.center
            .abs()
            .add(&self.radius_dyadic())
            .expect("magnitude bound")
    }

    pub fn contains_point(&self, v: &Dyadic) -> bool {
        match self.center.sub(v) {
            Ok(d) => d.abs() <= self.radius_dyadic(),
            Err(_) => false,
        }
    }

    pub fn intersects(&self, other: &Ball) -> bool {
        match self.center.sub(&other.center) {
            Ok(d) => {
                let reach = self
                    .radius_dyadic()
                    .add(&other.radius_dyadic())
                    .expect("radius sum");
                d.abs() <= reach
            }
            Err(_) => false,
        }
    }
}

/// Containment-preserving sum: the result ball contains `x + y` for every
/// `x`, `y` in the input balls.
pub fn ball_add(a: &Ball, b: &Ball) -> Result<Ball> {
    let center = a.center.add(&b.center)?;
    let radius_exp = match (a.radius_exp, b.radius_exp) {
        (None, None) => None,
        (Some(r), None) | (None, Some(r)) => Some(r),
        (Some(ra), Some(rb)) => Some(ra.max(rb) + 1),
    };
    Ok(Ball { center, radius_exp })
}

/// Containment-preserving product.
pub fn ball_mul(a: &Ball, b: &Ball) -> Result<Ball> {
    let center = a.center.mul(&b.center)?;
    // |xy - ca*cb| <= |ca|*rb + |cb|*ra + ra*rb
    let ra = a.radius_dyadic();
    let rb = b.radius_dyadic();
    let err = a
        .center
        .abs()
        .mul(&rb)?
        .add(&b.center.abs().mul(&ra)?)?
        .add(&ra.mul(&rb)?)?;
    Ok(Ball::from_center_err(center, &err))
}

/// Re-centers on the `2^-n` grid, inflating the radius by the truncation.
pub fn ball_round(a: &Ball, n: u32) -> Ball {
    let center = a.center.round(n);
    let radius_exp = match a.radius_exp {
        None => Some(-(n as i64)),
        Some(r) => Some(r.max(-(n as i64)) + 1),
    };
    Ball { center, radius_exp }
}
