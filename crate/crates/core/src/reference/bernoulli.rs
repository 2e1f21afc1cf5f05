//! Exact Bernoulli numbers `B_2m` via tangent numbers.
//!
//! Tangent numbers come from an integer-only triangle recurrence, which
//! avoids the denominator blowup of the naive rational recurrence; the
//! conversion is `B_2m = (-1)^(m-1) * T_m * 2m / (4^m (4^m - 1))`.

use num_bigint::BigInt;
use num_traits::One;
use std::sync::Mutex;

/// `B_2m` as an exact fraction `(numerator, positive denominator)`,
/// not necessarily reduced.
pub fn bernoulli_2m(m: usize) -> (BigInt, BigInt) {
    assert!(m >= 1, "B_0 is trivial and unused here");
    static CACHE: Mutex<Vec<BigInt>> = Mutex::new(Vec::new());
    let mut tangents = CACHE.lock().expect("bernoulli cache poisoned");
    if tangents.len() < m {
        *tangents = tangent_numbers(m.max(tangents.len() * 2).max(8));
    }
    let t = &tangents[m - 1];
    let four_m = BigInt::one() << (2 * m);
    let den = &four_m * (&four_m - BigInt::one());
    let num = t * BigInt::from(2 * m as u64);
    let num = if m % 2 == 1 { num } else { -num };
    (num, den)
}

/// Tangent numbers `T_1..T_n` (1, 2, 16, 272, 7936, ...).
fn tangent_numbers(n: usize) -> Vec<BigInt> {
    let mut t: Vec<BigInt> = Vec::with_capacity(n);
    t.push(BigInt::one());
    for k in 2..=n {
        let prev = t[k - 2].clone();
        t.push(prev * BigInt::from((k - 1) as u64));
    }
    for k in 2..=n {
        for j in k..=n {
            let a = &t[j - 2] * BigInt::from((j - k) as u64);
            let b = &t[j - 1] * BigInt::from((j - k + 2) as u64);
            t[j - 1] = a + b;
        }
    }
    t
}
