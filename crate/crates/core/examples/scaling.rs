//! Prints the resource-scaling ladder for zeta(2): peak live bits, largest
//! working precision, and wall time as the target precision doubles.

use rzeta::approx::{Caps, EvalContext};
use rzeta::zeta_real::zeta_real_planned;
use rzeta::{ApproxReal, Dyadic};

fn main() {
    let s = ApproxReal::constant(Dyadic::from_int(2));
    println!("{:>6} {:>7} {:>9} {:>12} {:>10} {:>8}", "n", "iota", "ms", "peak_bits", "max_prec", "ops");
    for n in [128u32, 256, 512, 1024, 2048] {
        let mut ctx = EvalContext::new(Caps {
            max_working_bits: 1 << 24,
            max_terms: 1 << 24,
        });
        let (ball, plan) = zeta_real_planned(&s, n, None, &mut ctx).expect("zeta(2)");
        let stats = ctx.finish();
        assert!(ball.radius_exp.unwrap() <= -(n as i64));
        println!(
            "{:>6} {:>7} {:>9} {:>12} {:>10} {:>8}",
            n, plan.iota, stats.elapsed_ms, stats.peak_bits, stats.max_working_precision, stats.op_count
        );
    }
}
