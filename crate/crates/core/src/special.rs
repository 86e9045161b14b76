//! Log-space combinatorics shared by the Poisson and binomial families.

use libm::lgamma as ln_gamma;

/// Largest `n` for which `n!` is finite in `f64`.
const MAX_FINITE_FACTORIAL: u64 = 170;

/// Largest `n` for which every `C(n, k)` is computed as an exact integer.
const EXACT_BINOMIAL_MAX_N: u64 = 60;

/// `ln(n!)`.
///
/// Products are accumulated directly while `n!` stays finite, which keeps
/// small arguments exact to rounding; larger arguments go through `ln_gamma`.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= MAX_FINITE_FACTORIAL {
        let mut acc = 1.0_f64;
        for k in 2..=n {
            acc *= k as f64;
        }
        acc.ln()
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// Exact `C(n, k)` for `n <= 60`.
pub fn binomial_exact(n: u64, k: u64) -> Option<u64> {
    if k > n || n > EXACT_BINOMIAL_MAX_N {
        return None;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    u64::try_from(acc).ok()
}

/// `C(n, k)` as a float: exact for `n <= 60`, log-gamma beyond.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    match binomial_exact(n, k) {
        Some(c) => c as f64,
        None => ln_binomial(n, k).exp(),
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n, "ln_binomial requires k <= n");
    match binomial_exact(n, k) {
        Some(c) => (c as f64).ln(),
        None => ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k),
    }
}

/// `k * ln(x)` with the convention `0 * ln(0) = 0`.
pub fn xlny(k: f64, x: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * x.ln()
    }
}

/// `e^{-λ} λ^n / n!`, evaluated in log space.
pub fn poisson_mass(lambda: f64, n: u64) -> f64 {
    if lambda == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-lambda + xlny(n as f64, lambda) - ln_factorial(n)).exp()
}

/// `C(n, k) p^k (1-p)^{n-k}`.
pub fn binomial_mass(n: u64, k: u64, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let log = ln_binomial(n, k) + xlny(k as f64, p) + xlny((n - k) as f64, 1.0 - p);
    log.exp()
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
