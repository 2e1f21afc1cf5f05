//! Acceptance suite: one line of output per criterion, every tolerance
//! pinned in code. Run with `cargo test --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use rzeta::approx::{Caps, EvalContext, ResourceStats};
use rzeta::dyadic::Dyadic;
use rzeta::elementary::ComplexBall;
use rzeta::reference::{
    oracle_binom_exact, oracle_eta_alternating, oracle_zeta_dirichlet,
    oracle_zeta_euler_maclaurin, OracleResult,
};
use rzeta::zeta_complex::zeta_complex_planned;
use rzeta::zeta_real::{binom_recip_traced, plan, u_eval, zeta_real_planned};
use rzeta::{ApproxReal, Ball};

fn pw2(e: i64) -> Dyadic {
    Dyadic::power_of_two(e).unwrap()
}

fn dy(m: i64, e: i64) -> Dyadic {
    Dyadic::new(m.into(), e).unwrap()
}

fn big_caps() -> Caps {
    Caps {
        max_working_bits: 1 << 24,
        max_terms: 1 << 24,
    }
}

/// Deterministic generator for reproducible random sweeps.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 11
    }
}

/// Independent enclosure of real zeta at precision `n`: the Dirichlet sum
/// when its term count is feasible, Euler-Maclaurin otherwise.
fn real_oracle(s: &Dyadic, n: u32) -> OracleResult {
    match oracle_zeta_dirichlet(s, n) {
        Ok(o) => o,
        Err(_) => oracle_zeta_euler_maclaurin(s, &Dyadic::zero(), n)
            .expect("euler-maclaurin covers every real case here"),
    }
}

fn report(failures: &mut Vec<String>, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {name}: {verdict} ({detail})");
    if !pass {
        failures.push(format!("{name}: {detail}"));
    }
}

/// 1. Known-constant regression over (s, n) in {2,3,4,5} x {64,256,1024}:
/// the pipeline ball and the oracle ball at n+8 must intersect and the
/// centers must agree within 2^-n + 2^-(n+8).
fn criterion_known_constants(failures: &mut Vec<String>) {
    let t0 = std::time::Instant::now();
    let mut checked = 0usize;
    let mut ok = true;
    let mut detail = String::new();
    for s_int in [2i64, 3, 4, 5] {
        for n in [64u32, 256, 1024] {
            let s = ApproxReal::constant(Dyadic::from_int(s_int));
            let mut ctx = EvalContext::new(big_caps());
            let (ball, _plan) = zeta_real_planned(&s, n, None, &mut ctx).unwrap();
            let stats = ctx.finish();
            let oracle = real_oracle(&Dyadic::from_int(s_int), n + 8);
            let ob = oracle.real_ball().unwrap();
            let tol = pw2(-(n as i64)).add(&pw2(-(n as i64) - 8)).unwrap();
            let gap = ball.center.sub(&ob.center).unwrap().abs();
            let pass = ball.intersects(&ob) && gap <= tol && stats.schedule_retries == 0;
            if !pass {
                ok = false;
                detail = format!("s={s_int} n={n} gap={} oracle={}", gap, oracle.method);
                break;
            }
            checked += 1;
        }
    }
    if detail.is_empty() {
        detail = format!("{checked} cases in {:?}", t0.elapsed());
    }
    report(failures, "1 known-constant regression", ok, detail);
}

/// 2. Eta-factorization identity: 200 random dyadic s in (1.125, 8) at
/// n = 48; the u_eval enclosure must intersect the alternating-eta oracle.
fn criterion_eta_factorization(failures: &mut Vec<String>) {
    let t0 = std::time::Instant::now();
    let mut lcg = Lcg(0x5eed_0002);
    let mut violations = 0usize;
    for _ in 0..200 {
        // s = (1152 + r) / 1024 with r in [1, 7039]: s in (1.125, 8)
        let r = 1 + (lcg.next() % 7039) as i64;
        let s = dy(1152 + r, -10);
        let sr = ApproxReal::constant(s.clone());
        let mut ctx = EvalContext::new(big_caps());
        let pl = plan(48, &sr, None, &mut ctx).unwrap();
        let ub = u_eval(&sr, &pl, &mut ctx).unwrap();
        let stats = ctx.finish();
        let oracle = oracle_eta_alternating(&s, 8).unwrap();
        let ob = oracle.real_ball().unwrap();
        if !ub.intersects(&ob) || stats.schedule_retries != 0 {
            violations += 1;
        }
    }
    report(
        failures,
        "2 eta-factorization identity",
        violations == 0,
        format!("200 samples, {violations} violations, {:?}", t0.elapsed()),
    );
}

/// 3. Binomial-reciprocal oracle equivalence at n_omega = 80 for all
/// k <= 64, plus the per-step error trace against 2^(-3q+2tau).
fn criterion_binomial_reciprocal(failures: &mut Vec<String>) {
    let t0 = std::time::Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    let mut pairs = 0usize;
    'outer: for k in 0..=64u64 {
        for q in 0..=k {
            let mut ctx = EvalContext::new(big_caps());
            let (om, trace) = binom_recip_traced(k, q, 80, &mut ctx).unwrap();
            let c = Dyadic::new(oracle_binom_exact(k, q).unwrap(), 0).unwrap();
            // |omega - 1/C| <= 2^-80 checked exactly: |omega C - 1| <= C 2^-80
            let resid = om.center.mul(&c).unwrap().sub(&Dyadic::one()).unwrap().abs();
            if resid > c.mul(&pw2(-80)).unwrap() {
                ok = false;
                detail = format!("value off at ({k},{q})");
                break 'outer;
            }
            for step in &trace {
                if step.err_bound >= pw2(-3 * q as i64 + 2 * step.tau as i64) {
                    ok = false;
                    detail = format!("eps trace violated at ({k},{q}) tau={}", step.tau);
                    break 'outer;
                }
            }
            pairs += 1;
        }
    }
    if detail.is_empty() {
        detail = format!("{pairs} (k,q) pairs in {:?}", t0.elapsed());
    }
    report(failures, "3 binomial-reciprocal equivalence", ok, detail);
}

/// 4. Truncation-schedule exactness: the outer term count equals the
/// planned series length (iota + 1 terms for k = 0..=iota) with zero
/// adaptive retries, and iota matches its formula.
fn criterion_truncation_schedule(failures: &mut Vec<String>) {
    let t0 = std::time::Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    let mut cases = 0usize;
    let mut lcg = Lcg(0x5eed_0004);
    let mut inputs: Vec<(Dyadic, u32)> = Vec::new();
    for s_int in [2i64, 3, 5] {
        for n in [16u32, 48, 96] {
            inputs.push((Dyadic::from_int(s_int), n));
        }
    }
    for _ in 0..20 {
        let r = 1 + (lcg.next() % 7039) as i64;
        inputs.push((dy(1152 + r, -10), 32));
    }
    for (s, n) in inputs {
        let sr = ApproxReal::constant(s.clone());
        let mut ctx = EvalContext::new(big_caps());
        let (_, pl) = zeta_real_planned(&sr, n, None, &mut ctx).unwrap();
        let stats = ctx.finish();
        let formula = 4 * pl.p as u64 + 2 * pl.n2 as u64 + pl.c6 as u64;
        let pass = pl.iota == formula
            && stats.term_count == pl.iota + 1
            && stats.schedule_retries == 0;
        if !pass {
            ok = false;
            detail = format!(
                "s={} n={n}: iota={} formula={formula} terms={} retries={}",
                s.to_decimal(4),
                pl.iota,
                stats.term_count,
                stats.schedule_retries
            );
            break;
        }
        cases += 1;
    }
    if detail.is_empty() {
        detail = format!("{cases} plans in {:?}", t0.elapsed());
    }
    report(failures, "4 truncation-schedule exactness", ok, detail);
}

fn ladder() -> Vec<(u32, ResourceStats)> {
    let s = ApproxReal::constant(Dyadic::from_int(2));
    [256u32, 512, 1024, 2048]
        .into_iter()
        .map(|n| {
            let mut ctx = EvalContext::new(big_caps());
            zeta_real_planned(&s, n, None, &mut ctx).unwrap();
            (n, ctx.finish())
        })
        .collect()
}

/// 5. Linear-space behavior: peak_bits(2n) <= 2.5 peak_bits(n) + 10^4 and
/// max_working_precision fits an affine model in n with R^2 >= 0.99.
/// 6. Polynomial-time behavior: elapsed(2n)/elapsed(n) <= 9.
fn criterion_ladder(failures: &mut Vec<String>) {
    let t0 = std::time::Instant::now();
    let data = ladder();
    let mut space_ok = true;
    let mut time_ok = true;
    let mut space_detail = String::new();
    let mut time_detail = String::new();
    for w in data.windows(2) {
        let (n0, a) = (&w[0].0, &w[0].1);
        let (n1, b) = (&w[1].0, &w[1].1);
        if b.peak_bits * 10 > a.peak_bits * 25 + 100_000 {
            space_ok = false;
            space_detail = format!(
                "peak_bits({n1})={} vs 2.5*peak_bits({n0})+1e4={}",
                b.peak_bits,
                a.peak_bits * 25 / 10 + 10_000
            );
        }
        let e0 = a.elapsed_ms.max(1);
        let e1 = b.elapsed_ms;
        if e1 > 9 * e0 {
            time_ok = false;
            time_detail = format!("elapsed({n1})={e1}ms vs 9*elapsed({n0})={}ms", 9 * e0);
        }
    }
    // affine fit of max_working_precision against n
    let xs: Vec<f64> = data.iter().map(|(n, _)| *n as f64).collect();
    let ys: Vec<f64> = data.iter().map(|(_, s)| s.max_working_precision as f64).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let p = slope * x + intercept;
            (y - p) * (y - p)
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    if r2 < 0.99 {
        space_ok = false;
        space_detail = format!("R^2 of max_working_precision fit = {r2:.5}");
    }
    if space_detail.is_empty() {
        let peaks: Vec<u64> = data.iter().map(|(_, s)| s.peak_bits).collect();
        space_detail = format!("peaks {peaks:?}, R^2={r2:.6}, total {:?}", t0.elapsed());
    }
    if time_detail.is_empty() {
        let times: Vec<u64> = data.iter().map(|(_, s)| s.elapsed_ms).collect();
        time_detail = format!("elapsed ms {times:?}");
    }
    report(failures, "5 linear-space behavior", space_ok, space_detail);
    report(failures, "6 polynomial-time behavior", time_ok, time_detail);
}

/// 7. Complex line: the first-zero ordinate gives |zeta| < 1e-6 at n = 64;
/// zeta(1/2) at n = 48 encloses the known value; conjugate-symmetry and
/// real-line-consistency hold on 100 random points.
fn criterion_complex_line(failures: &mut Vec<String>) {
    let t0 = std::time::Instant::now();
    let mut ok = true;
    let mut detail = String::new();

    // zeta(1/2 + i t1) with t1 to 20 digits
    let sigma = ApproxReal::constant(dy(1, -1));
    let t1 = ApproxReal::from_decimal("14.134725141734693790", 160).unwrap();
    let mut ctx = EvalContext::new(big_caps());
    let (zb, _) = zeta_complex_planned(&sigma, &t1, 64, None, &mut ctx).unwrap();
    let rad = zb.radius_dyadic();
    let micro = Dyadic::from_decimal("0.000001", 80).unwrap(); // <= 1e-6
    let msq = zb.center.modulus_sq().unwrap();
    let margin = micro.sub(&rad).unwrap();
    if rad >= micro || msq > margin.mul(&margin).unwrap() {
        ok = false;
        detail = format!(
            "|zeta(1/2+i t1)| not < 1e-6: |c|^2={} rad=2^{:?}",
            msq.to_decimal(16),
            zb.radius_exp
        );
    }
    let em1 = oracle_zeta_euler_maclaurin(&dy(1, -1), &Dyadic::from_decimal("14.134725141734693790", 160).unwrap(), 72)
        .unwrap();
    if !zb.intersects(&em1.complex_ball()) {
        ok = false;
        detail = "first-zero enclosure misses the oracle".into();
    }

    // zeta(1/2) at n = 48 encloses -1.46035450880958...
    let zero = ApproxReal::constant(Dyadic::zero());
    let mut ctx = EvalContext::new(big_caps());
    let (half, _) = zeta_complex_planned(&sigma, &zero, 48, None, &mut ctx).unwrap();
    let em2 = oracle_zeta_euler_maclaurin(&dy(1, -1), &Dyadic::zero(), 64).unwrap();
    let lit = Dyadic::from_decimal("-1.46035450880958681288949915", 120).unwrap();
    let gap = half.center.re.sub(&lit).unwrap().abs();
    let allow = half.radius_dyadic().add(&pw2(-80)).unwrap();
    if !half.intersects(&em2.complex_ball()) || gap > allow || half.center.im.abs() > half.radius_dyadic() {
        ok = false;
        detail = format!("zeta(1/2) enclosure wrong: re={}", half.center.re.to_decimal(16));
    }

    // property suites on 100 random points
    let mut lcg = Lcg(0x5eed_0007);
    let mut conj_checked = 0;
    let mut line_checked = 0;
    for i in 0..100 {
        if !ok {
            break;
        }
        if i < 60 {
            // conjugate symmetry: sigma in [1/4, 3] with |sigma-1| >= 1/8, t in [1/4, 8]
            let sig = loop {
                let v = dy(64 + (lcg.next() % 705) as i64, -8); // [0.25, 3]
                let gap = v.sub(&Dyadic::one()).unwrap().abs();
                if gap >= dy(1, -3) {
                    break v;
                }
            };
            let tv = dy(64 + (lcg.next() % 1984) as i64, -8); // [0.25, 8]
            let sr = ApproxReal::constant(sig.clone());
            let tp = ApproxReal::constant(tv.clone());
            let tm = ApproxReal::constant(tv.neg());
            let mut c1 = EvalContext::new(big_caps());
            let mut c2 = EvalContext::new(big_caps());
            let plus = zeta_complex_planned(&sr, &tp, 24, None, &mut c1).unwrap().0;
            let minus = zeta_complex_planned(&sr, &tm, 24, None, &mut c2).unwrap().0;
            let conj: ComplexBall = plus.conj();
            if !conj.intersects(&minus) {
                ok = false;
                detail = format!("conjugate symmetry failed at sigma={} t={}", sig.to_decimal(4), tv.to_decimal(4));
            }
            conj_checked += 1;
        } else {
            // real-line consistency: sigma in (1.2, 3), t = 0
            let sig = dy(308 + (lcg.next() % 460) as i64, -8); // (1.2, 3)
            let sr = ApproxReal::constant(sig.clone());
            let mut c1 = EvalContext::new(big_caps());
            let mut c2 = EvalContext::new(big_caps());
            let zc = zeta_complex_planned(&sr, &zero, 24, None, &mut c1).unwrap().0;
            let zr: Ball = rzeta::zeta_real::zeta_real(&sr, 24, &mut c2).unwrap();
            let gap = zc.center.re.sub(&zr.center).unwrap().abs();
            let allow = zc.radius_dyadic().add(&zr.radius_dyadic()).unwrap();
            if gap > allow || zc.center.im.abs() > zc.radius_dyadic() {
                ok = false;
                detail = format!("real-line consistency failed at sigma={}", sig.to_decimal(4));
            }
            line_checked += 1;
        }
    }
    if detail.is_empty() {
        detail = format!(
            "first zero + zeta(1/2) + {conj_checked} conjugate + {line_checked} real-line points in {:?}",
            t0.elapsed()
        );
    }
    report(failures, "7 complex line", ok, detail);
}

/// 8. Soundness sweep: 500 random real-mode cases; the ball radius meets
/// the target and the oracle value lies inside the ball.
fn criterion_soundness_sweep(failures: &mut Vec<String>) {
    let t0 = std::time::Instant::now();
    let mut lcg = Lcg(0x5eed_0008);
    let mut violations = 0usize;
    let ns = [16u32, 24, 32, 40, 48];
    for i in 0..500 {
        let r = 1 + (lcg.next() % 7039) as i64;
        let s = dy(1152 + r, -10);
        let n = ns[i % ns.len()];
        let sr = ApproxReal::constant(s.clone());
        let mut ctx = EvalContext::new(big_caps());
        let (ball, _) = zeta_real_planned(&sr, n, None, &mut ctx).unwrap();
        let oracle = real_oracle(&s, n + 8);
        let ob = oracle.real_ball().unwrap();
        let radius_ok = ball.radius_exp.map(|e| e <= -(n as i64)).unwrap_or(true);
        // the oracle's true value lies within its own ball; containment up
        // to the oracle radius is the testable statement
        let gap = ball.center.sub(&ob.center).unwrap().abs();
        let inside = gap <= ball.radius_dyadic().add(&ob.radius_dyadic()).unwrap();
        if !radius_ok || !inside {
            violations += 1;
        }
    }
    report(
        failures,
        "8 soundness sweep",
        violations == 0,
        format!("500 cases, {violations} violations, {:?}", t0.elapsed()),
    );
}

/// 9. Domain-error contract through the CLI: the pole, the exceptional
/// point, and real s <= 1 all exit with code 3 and a named point.
fn criterion_domain_errors(failures: &mut Vec<String>) {
    let run = |args: &[&str]| -> (i32, String) {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = rzeta::cli::run(&args, &mut out, &mut err);
        (code, String::from_utf8(err).unwrap())
    };
    let mut ok = true;
    let mut detail = String::new();
    let (code, err) = run(&["--real", "1", "--bits", "32"]);
    if code != 3 || !err.contains("pole") {
        ok = false;
        detail = format!("s=1: code {code}, err {err:?}");
    }
    let (code, err) = run(&[
        "--complex",
        "1",
        "9.06472028365438761925536589143",
        "--bits",
        "64",
    ]);
    if code != 3 || !err.contains("exceptional point") {
        ok = false;
        detail = format!("exceptional: code {code}, err {err:?}");
    }
    for s in ["0.5", "-2", "1.0"] {
        let (code, _) = run(&["--real", s, "--bits", "32"]);
        if code != 3 {
            ok = false;
            detail = format!("s={s}: code {code}");
        }
    }
    if detail.is_empty() {
        detail = "pole, exceptional point, and s <= 1 all exit 3".to_string();
    }
    report(failures, "9 domain-error contract", ok, detail);
}

#[test]
fn acceptance() {
    let mut failures = Vec::new();
    criterion_known_constants(&mut failures);
    criterion_eta_factorization(&mut failures);
    criterion_binomial_reciprocal(&mut failures);
    criterion_truncation_schedule(&mut failures);
    criterion_ladder(&mut failures);
    criterion_complex_line(&mut failures);
    criterion_soundness_sweep(&mut failures);
    criterion_domain_errors(&mut failures);
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
