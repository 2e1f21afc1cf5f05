//! Complex dyadics, complex balls (modulus-bounded error), and the complex
//! elementary functions the zeta pipeline needs: `e^z` and `(1+x)^s` for
//! real `x > -1` and complex `s`.

use crate::approx::{ApproxReal, Ball, EvalContext};
use crate::dyadic::Dyadic;
use crate::error::Result;

use super::real::{exp_dyadic, log1p_real, sincos_dyadic};

fn pw2(e: i64) -> Dyadic {
    Dyadic::power_of_two(e).expect("error-term exponent in range")
}

/// An exact complex dyadic, componentwise canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexDyadic {
    pub re: Dyadic,
    pub im: Dyadic,
}

impl ComplexDyadic {
    pub fn new(re: Dyadic, im: Dyadic) -> Self {
        ComplexDyadic { re, im }
    }

    pub fn zero() -> Self {
        ComplexDyadic::new(Dyadic::zero(), Dyadic::zero())
    }

    pub fn one() -> Self {
        ComplexDyadic::new(Dyadic::one(), Dyadic::zero())
    }

    pub fn from_real(re: Dyadic) -> Self {
        ComplexDyadic::new(re, Dyadic::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(ComplexDyadic::new(
            self.re.add(&other.re)?,
            self.im.add(&other.im)?,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(ComplexDyadic::new(
            self.re.sub(&other.re)?,
            self.im.sub(&other.im)?,
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let re = self.re.mul(&other.re)?.sub(&self.im.mul(&other.im)?)?;
        let im = self.re.mul(&other.im)?.add(&self.im.mul(&other.re)?)?;
        Ok(ComplexDyadic::new(re, im))
    }

    pub fn mul_real(&self, k: &Dyadic) -> Result<Self> {
        Ok(ComplexDyadic::new(self.re.mul(k)?, self.im.mul(k)?))
    }

    pub fn neg(&self) -> Self {
        ComplexDyadic::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        ComplexDyadic::new(self.re.clone(), self.im.neg())
    }

    pub fn shift(&self, s: i64) -> Result<Self> {
        Ok(ComplexDyadic::new(self.re.shift(s)?, self.im.shift(s)?))
    }

    pub fn round(&self, n: u32) -> Self {
        ComplexDyadic::new(self.re.round(n), self.im.round(n))
    }

    /// Exact squared modulus.
    pub fn modulus_sq(&self) -> Result<Dyadic> {
        self.re.mul(&self.re)?.add(&self.im.mul(&self.im)?)
    }

    /// Upper bound on the modulus: `|re| + |im| >= |z|`.
    pub fn modulus_upper(&self) -> Result<Dyadic> {
        self.re.abs().add(&self.im.abs())
    }

    /// Lower bound on the modulus: `max(|re|, |im|) <= |z|`.
    pub fn modulus_lower(&self) -> Dyadic {
        self.re.abs().max(self.im.abs())
    }
}

/// An enclosure in the complex plane: the represented value `z` satisfies
/// `|z - center| <= 2^radius_exp` in complex modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexBall {
    pub center: ComplexDyadic,
    pub radius_exp: Option<i64>,
}

impl ComplexBall {
    pub fn exact(center: ComplexDyadic) -> Self {
        ComplexBall {
            center,
            radius_exp: None,
        }
    }

    pub fn from_center_err(center: ComplexDyadic, err: &Dyadic) -> Self {
        if err.is_zero() {
            ComplexBall::exact(center)
        } else {
            ComplexBall {
                center,
                radius_exp: Some(err.ceil_log2_abs()),
            }
        }
    }

    /// Combines independent component enclosures; the modulus error is at
    /// most `sqrt(2)` times the larger component error.
    pub fn from_parts(re: &Ball, im: &Ball) -> Self {
        let center = ComplexDyadic::new(re.center.clone(), im.center.clone());
        let radius_exp = match (re.radius_exp, im.radius_exp) {
            (None, None) => None,
            (Some(r), None) | (None, Some(r)) => Some(r),
            (Some(a), Some(b)) => Some(a.max(b) + 1),
        };
        ComplexBall { center, radius_exp }
    }

    pub fn radius_dyadic(&self) -> Dyadic {
        match self.radius_exp {
            None => Dyadic::zero(),
            Some(e) => pw2(e),
        }
    }

    /// `|center| + radius`, an upper bound for the enclosed modulus.
    pub fn magnitude_upper(&self) -> Result<Dyadic> {
        self.center.modulus_upper()?.add(&self.radius_dyadic())
    }

    /// True when the enclosures can represent the same value:
    /// `|c1 - c2| <= r1 + r2`, decided exactly on squared moduli.
    pub fn intersects(&self, other: &ComplexBall) -> bool {
        let delta = match self.center.sub(&other.center) {
            Ok(d) => d,
            Err(_) => return false,
        };
        let reach = self
            .radius_dyadic()
            .add(&other.radius_dyadic())
            .expect("radius sum");
        match (delta.modulus_sq(), reach.mul(&reach)) {
            (Ok(d2), Ok(r2)) => d2 <= r2,
            _ => false,
        }
    }

    pub fn contains_point(&self, v: &ComplexDyadic) -> bool {
        self.intersects(&ComplexBall::exact(v.clone()))
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall {
            center: self.center.conj(),
            radius_exp: self.radius_exp,
        }
    }
}

/// Containment-preserving complex sum.
pub fn cball_add(a: &ComplexBall, b: &ComplexBall) -> Result<ComplexBall> {
    let center = a.center.add(&b.center)?;
    let radius_exp = match (a.radius_exp, b.radius_exp) {
        (None, None) => None,
        (Some(r), None) | (None, Some(r)) => Some(r),
        (Some(x), Some(y)) => Some(x.max(y) + 1),
    };
    Ok(ComplexBall { center, radius_exp })
}

/// Containment-preserving complex product.
pub fn cball_mul(a: &ComplexBall, b: &ComplexBall) -> Result<ComplexBall> {
    let center = a.center.mul(&b.center)?;
    let ra = a.radius_dyadic();
    let rb = b.radius_dyadic();
    let err = a
        .center
        .modulus_upper()?
        .mul(&rb)?
        .add(&b.center.modulus_upper()?.mul(&ra)?)?
        .add(&ra.mul(&rb)?)?;
    Ok(ComplexBall::from_center_err(center, &err))
}

/// Re-centers componentwise on the `2^-n` grid; the modulus radius grows by
/// at most `sqrt(2) * 2^-n`.
pub fn cball_round(a: &ComplexBall, n: u32) -> ComplexBall {
    let center = a.center.round(n);
    let grid = -(n as i64) + 1;
    let radius_exp = match a.radius_exp {
        None => Some(grid),
        Some(r) => Some(r.max(grid) + 1),
    };
    ComplexBall { center, radius_exp }
}

/// `e^(ar + i ai)` for exact dyadic parts carrying input error bounds
/// `err_ar`, `err_ai`; the result radius covers both the kernel error and
/// the input uncertainty.
pub(crate) fn exp_complex_parts(
    ar: &Dyadic,
    err_ar: &Dyadic,
    ai: &Dyadic,
    err_ai: &Dyadic,
    n: u32,
    ctx: &mut EvalContext,
) -> Result<ComplexBall> {
    let upper = ar.add(err_ar)?;
    let e_mag = if upper.is_zero() || upper.is_negative() {
        0
    } else {
        (3 * upper.ceil_i64()? + 1) / 2 + 2
    };
    let w = (n as u64 + e_mag.max(0) as u64 + 4) as u32;
    ctx.note_precision(w as u64)?;
    let (ev, ee) = exp_dyadic(ar, w, ctx)?;
    let (cv, ce, sv, se) = sincos_dyadic(ai, w, ctx)?;
    ctx.count_op();
    ctx.count_op();
    let re = ev.mul(&cv)?;
    let im = ev.mul(&sv)?;
    // |ev*cv - e^ar cos(ai)| <= |ev| ce + |cos| ee <= |ev| ce + ee (1 + ce)
    let err_re = ev.abs().mul(&ce)?.add(&ee.mul(&Dyadic::one().add(&ce)?)?)?;
    let err_im = ev.abs().mul(&se)?.add(&ee.mul(&Dyadic::one().add(&se)?)?)?;
    // modulus error of the components plus the input uncertainty:
    // |e^z - e^z*| <= |e^z*| * 2|z - z*| for |z - z*| <= 1/2
    let m_bound = ev.abs().add(&ee)?;
    let input = m_bound.mul(&err_ar.add(err_ai)?.shift(1)?)?;
    let total = err_re.add(&err_im)?.add(&input)?;
    let center = ComplexDyadic::new(re, im).round(n + 4);
    let total = total.add(&pw2(-(n as i64) - 3))?;
    Ok(ComplexBall::from_center_err(center, &total))
}

/// `e^z` to modulus error `2^-n` for `|Re z| <= 2^p`, `|Im z| <= 2^p`.
pub fn exp_complex(
    zr: &ApproxReal,
    zi: &ApproxReal,
    n: u32,
    p: i64,
    ctx: &mut EvalContext,
) -> Result<ComplexBall> {
    let probe = zr.query_checked(ctx, 4, p)?;
    let upper = probe.add(&pw2(-3))?;
    let e_mag = if upper.is_zero() || upper.is_negative() {
        0
    } else {
        (3 * upper.ceil_i64()? + 1) / 2 + 2
    };
    let m = (n as u64 + e_mag.max(0) as u64 + 4) as u32;
    let ar = zr.query_checked(ctx, m, p)?;
    let ai = zi.query_checked(ctx, m, p)?;
    let input = pw2(-(m as i64));
    exp_complex_parts(&ar, &input, &ai, &input, n + 1, ctx)
}

/// `(1+x)^s = exp(s * ln(1+x))` to modulus error `2^-n` for real `x` with
/// `1+x` certifiably in `[2^-p, 2^p]` and `|Re s|, |Im s| <= 2^ps`.
pub fn pow1p_complex(
    x: &ApproxReal,
    s_re: &ApproxReal,
    s_im: &ApproxReal,
    n: u32,
    p: u32,
    ps: i64,
    ctx: &mut EvalContext,
) -> Result<ComplexBall> {
    let exact_zero = |a: &ApproxReal| a.as_exact().map(|d| d.is_zero()).unwrap_or(false);
    if exact_zero(s_re) && exact_zero(s_im) {
        return Ok(ComplexBall::exact(ComplexDyadic::one()));
    }
    // Probe the real-part product to bound |e^(Re s * L)|.
    let l_probe = log1p_real(x, 8, p, ctx)?;
    let sr_probe = s_re.query_checked(ctx, 8, ps)?;
    let lr = l_probe.radius_dyadic();
    let l_lo = l_probe.center.sub(&lr)?;
    let l_hi = l_probe.center.add(&lr)?;
    let sr_lo = sr_probe.sub(&pw2(-8))?;
    let sr_hi = sr_probe.add(&pw2(-8))?;
    let mut upper = sr_lo.mul(&l_lo)?;
    for cand in [sr_lo.mul(&l_hi)?, sr_hi.mul(&l_lo)?, sr_hi.mul(&l_hi)?] {
        if cand > upper {
            upper = cand;
        }
    }
    let e_mag = if upper.is_zero() || upper.is_negative() {
        0
    } else {
        (3 * upper.ceil_i64()? + 1) / 2 + 2
    };
    let l_mag_exp = {
        let m = l_lo.abs().max(l_hi.abs());
        if m.is_zero() {
            0
        } else {
            m.ceil_log2_abs().max(0)
        }
    };
    let m_l = (n as u64 + e_mag.max(0) as u64 + ps.max(0) as u64 + 6) as u32;
    let m_s = (n as u64 + e_mag.max(0) as u64 + l_mag_exp as u64 + 6) as u32;
    let l_ball = log1p_real(x, m_l, p, ctx)?;
    let sr = s_re.query_checked(ctx, m_s, ps)?;
    let si = s_im.query_checked(ctx, m_s, ps)?;
    ctx.count_op();
    ctx.count_op();
    let a_re = sr.mul(&l_ball.center)?;
    let a_im = si.mul(&l_ball.center)?;
    let l_mag = l_ball.magnitude_upper();
    let q_err = pw2(-(m_s as i64));
    let err_re = sr.abs().mul(&l_ball.radius_dyadic())?.add(&l_mag.mul(&q_err)?)?;
    let err_im = si.abs().mul(&l_ball.radius_dyadic())?.add(&l_mag.mul(&q_err)?)?;
    exp_complex_parts(&a_re, &err_re, &a_im, &err_im, n + 1, ctx)
}
