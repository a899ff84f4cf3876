//! Discrete weighted Sobolev and supremum seminorms.
//!
//! `‖f‖²_{r,m} = (1/n) Σ_k s_k^{(r)} |∇₊^m f_k|²` and
//! `⟦f⟧²_{r,m} = max_k s_k^{(r)} |∇₊^m f_k|²`, with the summation range
//! selected by [`SumRange`]. Squared values are the primitive.

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::seq::{forward_diff_pow, Seq};
use crate::weights::{rising_weight, rising_weight_unchecked};

/// Which index range the sum or maximum runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumRange {
    /// `k = 1 ..= n - m`, for a sequence `f_1 .. f_n`.
    Standard,
    /// `k = 1 ..= n - m + 1`, for positions carrying the fixed end `η_{n+1}`.
    Eta,
    /// `k = 0 ..= n - m`, for tensions carrying `σ_0 = 0`.
    Sigma,
}

impl SumRange {
    pub fn bounds(self, n: usize, m: usize) -> (i64, i64) {
        let (n, m) = (n as i64, m as i64);
        match self {
            SumRange::Standard => (1, n - m),
            SumRange::Eta => (1, n - m + 1),
            SumRange::Sigma => (0, n - m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSeminorm {
    pub r: f64,
    pub m: usize,
    /// Squared seminorm.
    pub value: f64,
}

impl WeightedSeminorm {
    pub fn norm(&self) -> f64 {
        self.value.sqrt()
    }
}

fn weighted_terms(f: &Seq, r: f64, m: usize, n: usize, range: SumRange) -> Result<Vec<f64>> {
    rising_weight(1, r, n)?;
    let (lo, hi) = range.bounds(n, m);
    if hi < lo {
        return Ok(Vec::new());
    }
    let d = forward_diff_pow(f, n, m)?;
    if !d.contains(lo) || !d.contains(hi) {
        return Err(ChainError::Size(format!(
            "order-{m} differences available on {}..{}, need {lo}..={hi}",
            d.start(),
            d.end()
        )));
    }
    Ok((lo..=hi)
        .map(|k| rising_weight_unchecked(k, r, n) * d.norm_sq(k))
        .collect())
}

/// Squared weighted Sobolev seminorm `‖f‖²_{r,m}`.
pub fn weighted_seminorm_sq(f: &Seq, r: f64, m: usize, n: usize, range: SumRange) -> Result<f64> {
    Ok(weighted_terms(f, r, m, n, range)?.iter().sum::<f64>() / n as f64)
}

/// Squared weighted supremum seminorm `⟦f⟧²_{r,m}`.
pub fn weighted_supnorm_sq(f: &Seq, r: f64, m: usize, n: usize, range: SumRange) -> Result<f64> {
    Ok(weighted_terms(f, r, m, n, range)?
        .into_iter()
        .fold(0.0, f64::max))
}

pub fn weighted_seminorm(f: &Seq, r: f64, m: usize, n: usize, range: SumRange) -> Result<WeightedSeminorm> {
    Ok(WeightedSeminorm {
        r,
        m,
        value: weighted_seminorm_sq(f, r, m, n, range)?,
    })
}
