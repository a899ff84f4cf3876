//! Link tensions from the tridiagonal constraint system.
//!
//! Differentiating `|∇₊η_k|² = 1` twice and substituting
//! `η̈_k = n (σ_k ∇₊η_k - σ_{k-1} ∇₊η_{k-1})` gives, for `1 ≤ k ≤ n-1`,
//!
//! `n² (α_k σ_{k+1} - 2σ_k + α_{k-1} σ_{k-1}) = -|∇₊η̇_k|²`
//!
//! and at the free end (`η̈_{n+1} = 0`) `n² (α_{n-1} σ_{n-1} - σ_n) = -|∇₊η̇_n|²`,
//! with `σ_0 = 0`. Dividing by `-n²` gives `A σ = w / n²` where `A` has
//! diagonal `(2, ..., 2, 1)` and off-diagonals `-α_k`. Then `A⁻¹ = n G`.

mod green;
mod rates;

pub use green::{
    certify_bounds, compute_alpha_beta, green_matrix, upsilon_admissible, AlphaBeta, GreenCertificate, GreenMatrix,
};
pub use rates::{
    diagnostics_abc, sigma_sobolev_norms, solve_sigma_dot, tension_consistency, Abc,
};

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::seq::Seq;
use crate::state::ChainState;
use crate::tridiag::{apply_symmetric, solve_symmetric};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensionMethod {
    Green,
    #[default]
    Direct,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensionSolution {
    /// `σ_0 ..= σ_n`, `σ_0 = 0`.
    pub sigma: Seq,
    pub min_sigma: f64,
    /// `min_{1≤k≤n} σ_k > 0`
    pub positivity: bool,
    pub method: TensionMethod,
    /// `max_k |n² (A σ)_k - w_k|`
    pub residual: f64,
}

impl TensionSolution {
    /// Wrap `σ_0 ..= σ_n` (no solve, residual unknown).
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(ChainError::Size("tension needs σ_0 and at least σ_1".into()));
        }
        if values[0] != 0.0 {
            return Err(ChainError::Constraint("σ_0 must be zero".into()));
        }
        let min_sigma = values[1..].iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            sigma: Seq::scalars(0, values),
            min_sigma,
            positivity: min_sigma > 0.0,
            method: TensionMethod::Direct,
            residual: f64::NAN,
        })
    }

    pub fn n(&self) -> usize {
        self.sigma.len() - 1
    }

    /// `σ_k`, `0 ≤ k ≤ n`.
    pub fn at(&self, k: usize) -> f64 {
        self.sigma.value(k as i64)
    }

    pub fn values(&self) -> &[f64] {
        self.sigma.as_slice()
    }

    pub fn max_sigma(&self) -> f64 {
        self.values().iter().copied().fold(0.0, f64::max)
    }
}

/// `w_k = |∇₊η̇_k|²`, `k = 1 ..= n`.
pub fn source_terms(chain: &ChainState) -> Vec<f64> {
    let rates = chain.link_rates();
    rates.indices().map(|k| rates.norm_sq(k)).collect()
}

pub(crate) fn operator(ab: &AlphaBeta) -> (Vec<f64>, Vec<f64>) {
    let n = ab.n();
    let mut diag = vec![2.0; n];
    diag[n - 1] = 1.0;
    let off = ab.alphas().iter().map(|a| -a).collect();
    (diag, off)
}

/// Solve `A x = rhs / n²` for the tension operator of `ab`.
pub(crate) fn solve_operator(ab: &AlphaBeta, rhs: &[f64]) -> Result<Vec<f64>> {
    let (diag, off) = operator(ab);
    let n2 = (ab.n() * ab.n()) as f64;
    let scaled: Vec<f64> = rhs.iter().map(|r| r / n2).collect();
    solve_symmetric(&diag, &off, &scaled)
}

fn assemble(ab: &AlphaBeta, w: &[f64], inner: Vec<f64>, method: TensionMethod) -> Result<TensionSolution> {
    let (diag, off) = operator(ab);
    let n2 = (ab.n() * ab.n()) as f64;
    let residual = apply_symmetric(&diag, &off, &inner)
        .iter()
        .zip(w)
        .map(|(a, w)| (n2 * a - w).abs())
        .fold(0.0, f64::max);
    if inner.iter().any(|x| !x.is_finite()) {
        return Err(ChainError::Numeric("non-finite tension".into()));
    }
    let mut values = Vec::with_capacity(inner.len() + 1);
    values.push(0.0);
    values.extend(inner);
    let mut sol = TensionSolution::from_values(values)?;
    sol.method = method;
    sol.residual = residual;
    Ok(sol)
}

pub fn solve_tension(chain: &ChainState, method: TensionMethod) -> Result<TensionSolution> {
    let ab = compute_alpha_beta(chain);
    solve_tension_with(chain, &ab, method)
}

pub fn solve_tension_with(chain: &ChainState, ab: &AlphaBeta, method: TensionMethod) -> Result<TensionSolution> {
    let w = source_terms(chain);
    let inner = match method {
        TensionMethod::Direct => solve_operator(ab, &w)?,
        TensionMethod::Green => green_matrix(ab).apply(&w),
    };
    assemble(ab, &w, inner, method)
}

/// Tension for a state that may sit slightly off the constraint manifold, as at
/// intermediate integrator stages.
///
/// Uses `|∇₊η_k|²` in place of 1 in the diagonal (`2|∇₊η_k|²` for `k < n`,
/// `|∇₊η_n|²` at the free end), so `⟨∇₊η_k, ∇₊η̈_k⟩ + |∇₊η̇_k|² = 0` holds exactly
/// and link lengths evolve without a stiff restoring mode. On the manifold this is
/// the same system as [`solve_tension`].
pub fn solve_tension_stage(chain: &ChainState) -> Result<TensionSolution> {
    let ab = compute_alpha_beta(chain);
    let links = chain.links();
    let n = chain.n();
    let mut diag: Vec<f64> = links.indices().map(|k| 2.0 * links.norm_sq(k)).collect();
    diag[n - 1] *= 0.5;
    let off: Vec<f64> = ab.alphas().iter().map(|a| -a).collect();
    let w = source_terms(chain);
    let n2 = (n * n) as f64;
    let scaled: Vec<f64> = w.iter().map(|x| x / n2).collect();
    let inner = solve_symmetric(&diag, &off, &scaled)?;
    let residual = apply_symmetric(&diag, &off, &inner)
        .iter()
        .zip(&w)
        .map(|(a, w)| (n2 * a - w).abs())
        .fold(0.0, f64::max);
    if inner.iter().any(|x| !x.is_finite()) {
        return Err(ChainError::Numeric("non-finite tension".into()));
    }
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    values.extend(inner);
    let mut sol = TensionSolution::from_values(values)?;
    sol.residual = residual;
    Ok(sol)
}
