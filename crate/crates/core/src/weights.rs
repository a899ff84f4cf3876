//! Rising-factorial weights `s_k^{(r)} = Γ(k + r) / (n^r Γ(k))`.

use statrs::function::gamma::ln_gamma;

use crate::error::{ChainError, Result};

/// `s_k^{(r)}` for integer `k ≥ 0` and real `r > -1`.
///
/// Nonnegative integer exponents use the exact product `k (k+1) ... (k+r-1) / n^r`;
/// other exponents go through log-gamma so large `k + r` cannot overflow.
/// `k = 0` gives `0` for `r ≠ 0` (Γ has a pole at 0) and `1` for `r = 0`.
pub fn rising_weight(k: i64, r: f64, n: usize) -> Result<f64> {
    if !(r > -1.0) || !r.is_finite() {
        return Err(ChainError::Domain(format!("weight exponent r = {r} must exceed -1")));
    }
    if k < 0 {
        return Err(ChainError::Domain(format!("weight index k = {k} must be nonnegative")));
    }
    if n == 0 {
        return Err(ChainError::Domain("resolution n must be positive".into()));
    }
    Ok(rising_weight_unchecked(k, r, n))
}

pub(crate) fn rising_weight_unchecked(k: i64, r: f64, n: usize) -> f64 {
    if r == 0.0 {
        return 1.0;
    }
    if k == 0 {
        return 0.0;
    }
    let nf = n as f64;
    if r.fract() == 0.0 && r > 0.0 && r <= 64.0 {
        let mut w = 1.0;
        for i in 0..r as i64 {
            w *= (k + i) as f64 / nf;
        }
        w
    } else {
        let kf = k as f64;
        (ln_gamma(kf + r) - ln_gamma(kf) - r * nf.ln()).exp()
    }
}

/// Table of `s_k^{(r)}` for `k = 0 ..= kmax`.
pub fn weight_table(r: f64, n: usize, kmax: usize) -> Result<Vec<f64>> {
    rising_weight(1, r, n)?;
    Ok((0..=kmax as i64).map(|k| rising_weight_unchecked(k, r, n)).collect())
}

/// `Γ(a + b + 1) / (Γ(a + 1) Γ(b + 1))`, the generalized binomial coefficient.
pub fn binomial_ratio(a: f64, b: f64) -> f64 {
    (ln_gamma(a + b + 1.0) - ln_gamma(a + 1.0) - ln_gamma(b + 1.0)).exp()
}
