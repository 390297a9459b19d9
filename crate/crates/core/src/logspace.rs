//! Log-space arithmetic and binomial coefficients.
//!
//! Binomials are exact `u128` integers while they fit and fall back to
//! `ln` values beyond that. Every log-domain sum goes through
//! [`log_sum_exp`] (max-shifted, summed in the caller's order) so repeated
//! runs reproduce the same bits.

/// `ln Σ exp(x_i)`, shifted by the maximum. Returns `-inf` for an empty
/// input or when every term is `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

/// `ln Σ w_i exp(x_i)` for nonnegative integer multiplicities `w_i`.
pub fn log_sum_exp_weighted(terms: &[(f64, u64)]) -> f64 {
    let max = terms
        .iter()
        .filter(|(_, w)| *w > 0)
        .map(|(x, _)| *x)
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = terms
        .iter()
        .filter(|(_, w)| *w > 0)
        .map(|&(x, w)| w as f64 * (x - max).exp())
        .sum();
    max + sum.ln()
}

/// Exact `C(n, k)` or `None` when it does not fit in a `u128`.
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1); split by gcd to delay overflow.
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        let (a, d) = (acc / g, den / g);
        acc = a.checked_mul(num / d)?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if let Some(v) = binomial_exact(n, k) {
        if v < (1u128 << 100) {
            return (v as f64).ln();
        }
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// `C(n, k)` as a float (may be `inf` for astronomically large values).
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    match binomial_exact(n, k) {
        Some(v) => v as f64,
        None => ln_binomial(n, k).exp(),
    }
}

/// `C(a, k) / C(n, k)` for `a ≤ n`, computed as a product of ratios so it
/// never overflows.
pub fn binomial_ratio(a: u64, n: u64, k: u64) -> f64 {
    debug_assert!(a <= n);
    if k > a {
        return 0.0;
    }
    (0..k).map(|i| (a - i) as f64 / (n - i) as f64).product()
}

/// Table of `ln i!` for `0 ≤ i ≤ n`.
#[derive(Debug, Clone)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        table.push(0.0);
        let mut acc = 0.0f64;
        for i in 1..=n {
            acc += (i as f64).ln();
            table.push(acc);
        }
        LnFactorials { table }
    }

    pub fn ln_factorial(&self, i: usize) -> f64 {
        self.table[i]
    }

    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        self.table[n] - self.table[k] - self.table[n - k]
    }

    /// Log multinomial coefficient `n! / Π parts_i!` with `n = Σ parts_i`.
    pub fn ln_multinomial(&self, parts: &[usize]) -> f64 {
        let n: usize = parts.iter().sum();
        parts
            .iter()
            .fold(self.table[n], |acc, &p| acc - self.table[p])
    }
}

/// `ln(1 + x) - x`, accurate also when `|x|` is tiny.
pub fn ln1p_minus_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // -x^2/2 + x^3/3 - x^4/4 + x^5/5
        let x2 = x * x;
        x2 * (-0.5 + x * (1.0 / 3.0 + x * (-0.25 + x * 0.2)))
    } else {
        x.ln_1p() - x
    }
}
