//! Special functions used across the crate.

use statrs::function::gamma as sgamma;

pub fn ln_gamma(x: f64) -> f64 {
    sgamma::ln_gamma(x)
}

pub fn gamma(x: f64) -> f64 {
    sgamma::gamma(x)
}

/// Exact binomial coefficient; `None` on overflow of `u128`.
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if let Some(c) = binomial_exact(n, k).filter(|&c| c < (1u128 << 100)) {
        return (c as f64).ln();
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `C(n, k) / 2^n`, the Binomial(n, 1/2) probability mass at `k`.
pub fn half_binomial_pmf(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= 1000 {
        if let Some(c) = binomial_exact(n, k).filter(|&c| c < (1u128 << 100)) {
            return c as f64 * 0.5f64.powi(n as i32);
        }
    }
    (ln_binomial(n, k) - n as f64 * std::f64::consts::LN_2).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_binomials() {
        assert_eq!(binomial_exact(5, 2), Some(10));
        assert_eq!(binomial_exact(63, 31), Some(916_312_070_471_295_267));
        assert_eq!(binomial_exact(3, 5), Some(0));
    }

    #[test]
    fn half_pmf_sums_to_one() {
        for n in [0u64, 1, 7, 64, 150, 2000] {
            let s: f64 = (0..=n).map(|k| half_binomial_pmf(n, k)).sum();
            assert!((s - 1.0).abs() < 1e-10, "n={n} sum={s}");
        }
    }
}
