//! Digamma function on the positive reals.
//!
//! The estimator formula evaluates psi at small positive integers almost
//! exclusively, so integer arguments get a memoized fast path. The general
//! path uses the upward recurrence psi(x+1) = psi(x) + 1/x to push the
//! argument above 10, then the asymptotic series
//! psi(z) ~ ln z - 1/(2z) - sum B_{2n} / (2n z^{2n}).
//! Absolute error is below 1e-12 for x >= 1e-2 and stays within 1e-10 over
//! the ranges the estimators touch.

use std::sync::OnceLock;

/// Euler-Mascheroni constant; psi(1) = -EULER_GAMMA.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const RECURRENCE_CUTOFF: f64 = 10.0;
const INT_TABLE_LEN: usize = 65;

/// psi(x) for x > 0. Returns NaN for x <= 0 or non-finite input; negative
/// arguments are out of scope (no reflection formula).
pub fn digamma(x: f64) -> f64 {
    if !x.is_finite() || x <= 0.0 {
        return f64::NAN;
    }
    let mut acc = 0.0;
    let mut z = x;
    while z < RECURRENCE_CUTOFF {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let t = inv * inv;
    // Bernoulli-number coefficients B2/2, B4/4, ... through B14/14.
    let tail = t * (1.0 / 12.0
        - t * (1.0 / 120.0
            - t * (1.0 / 252.0
                - t * (1.0 / 240.0
                    - t * (1.0 / 132.0 - t * (691.0 / 32760.0 - t * (1.0 / 12.0)))))));
    acc + z.ln() - 0.5 * inv - tail
}

/// psi(n) for positive integer n, memoized for n <= 64 (the estimator's
/// effective neighbor counts are small except on heavy atoms).
pub(crate) fn digamma_int(n: usize) -> f64 {
    static TABLE: OnceLock<[f64; INT_TABLE_LEN]> = OnceLock::new();
    debug_assert!(n >= 1);
    if n < INT_TABLE_LEN {
        let table = TABLE.get_or_init(|| {
            let mut t = [0.0; INT_TABLE_LEN];
            for (i, slot) in t.iter_mut().enumerate().skip(1) {
                *slot = digamma(i as f64);
            }
            t
        });
        table[n]
    } else {
        digamma(n as f64)
    }
}
