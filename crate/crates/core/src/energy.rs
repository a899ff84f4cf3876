//! Weighted discrete energies of a chain state.

use crate::error::{ChainError, Result};
use crate::seq::{forward_diff_pow, Seq};
use crate::state::{odd_extend, ChainState, ExtendedChain};
use crate::tension::TensionSolution;
use crate::weights::rising_weight_unchecked;

fn check_order(ext: &ExtendedChain, m_max: usize) -> Result<()> {
    let n = ext.base.n();
    // ∇₊^{ℓ+1}η_k at k = n - ⌊ℓ/2⌋ reaches η_{n + ℓ + 1 - ⌊ℓ/2⌋}, which must lie in 1..=2n+1.
    if m_max - m_max / 2 > n {
        return Err(ChainError::Size(format!(
            "energy order {m_max} needs more links than n = {n} provides"
        )));
    }
    Ok(())
}

/// Energies `e_0 ..= e_{m_max}` with a caller-supplied weight `w(k, r)` in place of `s_k^{(r)}`:
///
/// `e_m = (1/n) Σ_{ℓ≤m} Σ_{k=1}^{n-⌊ℓ/2⌋} ( w(k,ℓ) |∇₊^ℓ η̇_k|² + w(k,ℓ+1) |∇₊^{ℓ+1} η_k|² )`,
/// where differences run over the odd extension.
pub fn energy_with_weights<W>(ext: &ExtendedChain, m_max: usize, weight: W) -> Result<Vec<f64>>
where
    W: Fn(i64, usize) -> f64,
{
    check_order(ext, m_max)?;
    let n = ext.base.n();
    let nf = n as f64;
    let mut out = Vec::with_capacity(m_max + 1);
    let mut acc = 0.0;
    let mut dv = ext.eta_dot_ext.clone();
    let mut dx = forward_diff_pow(&ext.eta_ext, n, 1)?;
    for l in 0..=m_max {
        let hi = n as i64 - (l / 2) as i64;
        if hi < 1 {
            out.push(acc);
            continue;
        }
        if l > 0 {
            dv = forward_diff_pow(&dv, n, 1)?;
            dx = forward_diff_pow(&dx, n, 1)?;
        }
        let mut level = 0.0;
        for k in 1..=hi {
            level += weight(k, l) * dv.norm_sq(k) + weight(k, l + 1) * dx.norm_sq(k);
        }
        acc += level / nf;
        out.push(acc);
    }
    Ok(out)
}

/// `e_0 ..= e_{m_max}` with rising-factorial weights.
pub fn discrete_energy(chain: &ChainState, m_max: usize) -> Result<Vec<f64>> {
    let ext = odd_extend(chain, None)?;
    let n = chain.n();
    energy_with_weights(&ext, m_max, |k, r| rising_weight_unchecked(k, r as f64, n))
}

/// `σ_k^{(r)} = σ_k σ_{k+1} ... σ_{k+r-1}` on an (extended) tension sequence.
pub fn sigma_product(sigma: &Seq, k: i64, r: usize) -> f64 {
    (k..k + r as i64).map(|j| sigma.value(j)).product()
}

/// `ẽ_0 ..= ẽ_{m_max}`, weighted by products of the evenly extended tension.
pub fn sigma_weighted_energy(chain: &ChainState, sigma: Option<&TensionSolution>, m_max: usize) -> Result<Vec<f64>> {
    let sigma = sigma.ok_or_else(|| ChainError::Dependency("σ-weighted energy needs a tension solution".into()))?;
    let ext = odd_extend(chain, Some(sigma))?;
    let s = ext.sigma_ext.clone().expect("tension attached");
    energy_with_weights(&ext, m_max, |k, r| sigma_product(&s, k, r))
}

/// `u₀ = (1/n) Σ_{k=1}^n |η̇_k|²`
pub fn u0(chain: &ChainState) -> f64 {
    let v = chain.eta_dot();
    (1..=chain.n() as i64).map(|k| v.norm_sq(k)).sum::<f64>() / chain.n() as f64
}

/// `v₀ = (1/n) Σ_{k=1}^n s_k |∇₊η_k|²`, equal to `1/2 + 1/(2n)` on the constraint manifold.
pub fn v0(chain: &ChainState) -> f64 {
    let links = chain.links();
    let n = chain.n();
    (1..=n as i64).map(|k| chain.s(k) * links.norm_sq(k)).sum::<f64>() / n as f64
}
