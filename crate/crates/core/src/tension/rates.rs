//! `σ̇`, the `a, b, c` diagnostics and tension Sobolev norms.

use serde::{Deserialize, Serialize};

use super::{compute_alpha_beta, solve_operator, TensionSolution};
use crate::error::{ChainError, Result};
use crate::seminorm::{weighted_seminorm_sq, SumRange};
use crate::seq::{dot, Seq};
use crate::state::ChainState;

/// `n² (P_{k+1} - 2P_k + P_{k-1})` for `k = 1 ..= n`, with `P_0 = 0` and `P_{n+1} = P_n`.
///
/// `P_k = σ_k X_k` where `X` is a link quantity indexed `1 ..= n`; the free-end
/// rule comes from the odd extension (`σ_{n+1} = σ_n`, `X_{n+1} = X_n`).
fn second_diff_of_product(sigma: &TensionSolution, x: &Seq) -> Vec<Vec<f64>> {
    let n = sigma.n();
    let dim = x.dim();
    let n2 = (n * n) as f64;
    let p = |k: usize| -> Vec<f64> {
        let kk = k.min(n);
        if kk == 0 {
            return vec![0.0; dim];
        }
        x.get(kk as i64).iter().map(|v| sigma.at(kk) * v).collect()
    };
    (1..=n)
        .map(|k| {
            let (a, b, c) = (p(k + 1), p(k), p(k - 1));
            (0..dim).map(|i| n2 * (a[i] - 2.0 * b[i] + c[i])).collect()
        })
        .collect()
}

/// `⟨∇₊η_k, ∇₊∇₋(σ∇₊η)_k⟩ + |∇₊η̇_k|²`, `k = 1 ..= n`; zero when `σ` solves the constraint system.
pub fn tension_consistency(chain: &ChainState, sigma: &TensionSolution) -> Result<Vec<f64>> {
    if sigma.n() != chain.n() {
        return Err(ChainError::Size("tension and chain resolutions differ".into()));
    }
    let links = chain.links();
    let rates = chain.link_rates();
    let d2 = second_diff_of_product(sigma, &links);
    Ok((1..=chain.n())
        .map(|k| dot(links.get(k as i64), &d2[k - 1]) + rates.norm_sq(k as i64))
        .collect())
}

/// `σ̇_0 ..= σ̇_n` from `A σ̇ = R / n²`,
/// `R_k = 3⟨∇₊η̇_k, ∇₊∇₋(σ∇₊η)_k⟩ + ⟨∇₊η_k, ∇₊∇₋(σ∇₊η̇)_k⟩`.
pub fn solve_sigma_dot(chain: &ChainState, sigma: &TensionSolution) -> Result<Seq> {
    if sigma.n() != chain.n() {
        return Err(ChainError::Size("tension and chain resolutions differ".into()));
    }
    let links = chain.links();
    let rates = chain.link_rates();
    let pl = second_diff_of_product(sigma, &links);
    let pv = second_diff_of_product(sigma, &rates);
    let rhs: Vec<f64> = (1..=chain.n())
        .map(|k| 3.0 * dot(rates.get(k as i64), &pl[k - 1]) + dot(links.get(k as i64), &pv[k - 1]))
        .collect();
    let ab = compute_alpha_beta(chain);
    let inner = solve_operator(&ab, &rhs)?;
    let mut values = vec![0.0];
    values.extend(inner);
    Ok(Seq::scalars(0, values))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Abc {
    /// `max |∇₋σ_k|`
    pub a: f64,
    /// `max s_k / σ_k`, infinite if some `σ_k ≤ 0`.
    pub b: f64,
    /// `max |∇₋σ̇_k|`
    pub c: f64,
    /// `max σ_k / s_k`, bounded by `a`.
    pub sigma_over_s: f64,
    /// `max |σ̇_k| / s_k`, bounded by `c`.
    pub sigma_dot_over_s: f64,
}

impl Abc {
    /// The consequences `max σ/s ≤ a` and `max |σ̇|/s ≤ c`, up to round-off.
    pub fn consequences_hold(&self) -> bool {
        let tol = |x: f64| 1e-12 * (1.0 + x.abs());
        self.sigma_over_s <= self.a + tol(self.a) && self.sigma_dot_over_s <= self.c + tol(self.c)
    }
}

pub fn diagnostics_abc(sigma: &TensionSolution, sigma_dot: &Seq) -> Result<Abc> {
    let n = sigma.n();
    if sigma_dot.start() != 0 || sigma_dot.len() != n + 1 {
        return Err(ChainError::Size("σ̇ must index 0..=n".into()));
    }
    let nf = n as f64;
    let mut out = Abc {
        a: 0.0,
        b: 0.0,
        c: 0.0,
        sigma_over_s: 0.0,
        sigma_dot_over_s: 0.0,
    };
    for k in 1..=n {
        let s = k as f64 / nf;
        let (sk, sd) = (sigma.at(k), sigma_dot.value(k as i64));
        out.a = out.a.max((nf * (sk - sigma.at(k - 1))).abs());
        out.c = out.c.max((nf * (sd - sigma_dot.value(k as i64 - 1))).abs());
        out.b = if sk <= 0.0 { f64::INFINITY } else { out.b.max(s / sk) };
        out.sigma_over_s = out.sigma_over_s.max(sk / s);
        out.sigma_dot_over_s = out.sigma_dot_over_s.max(sd.abs() / s);
    }
    Ok(out)
}

/// `d_1 ..= d_{m_max}`, `d_m = Σ_{ℓ<m} ‖σ‖²_{ℓ+3/2, ℓ+2}` summed over `k = 0 ..= n-ℓ-2`.
///
/// Orders whose differences do not fit in `σ_0 ..= σ_n` contribute nothing.
pub fn sigma_sobolev_norms(sigma: &TensionSolution, m_max: usize) -> Result<Vec<f64>> {
    let n = sigma.n();
    let mut out = Vec::with_capacity(m_max);
    let mut acc = 0.0;
    for l in 0..m_max {
        if n >= l + 2 {
            acc += weighted_seminorm_sq(&sigma.sigma, l as f64 + 1.5, l + 2, n, SumRange::Sigma)?;
        }
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tension::{solve_tension, TensionMethod};

    fn rotating(n: usize, omega: f64) -> ChainState {
        let links = vec![vec![0.0, -1.0]; n];
        let rates = vec![vec![omega, 0.0]; n];
        ChainState::from_links(&links, &rates, 0.0).unwrap()
    }

    #[test]
    fn rigid_rotation_consistent_and_steady() {
        let c = rotating(12, 1.3);
        let s = solve_tension(&c, TensionMethod::Direct).unwrap();
        for r in tension_consistency(&c, &s).unwrap() {
            assert!(r.abs() < 1e-11);
        }
        let sd = solve_sigma_dot(&c, &s).unwrap();
        assert!(sd.as_slice().iter().all(|x| x.abs() < 1e-12));
        let abc = diagnostics_abc(&s, &sd).unwrap();
        assert!((abc.a - 1.69).abs() < 1e-12);
        assert!(abc.consequences_hold());
    }

    #[test]
    fn zero_velocity_diagnostics() {
        let c = ChainState::from_links(&vec![vec![1.0, 0.0]; 4], &vec![vec![0.0; 2]; 4], 0.0).unwrap();
        let s = solve_tension(&c, TensionMethod::Direct).unwrap();
        let sd = solve_sigma_dot(&c, &s).unwrap();
        let abc = diagnostics_abc(&s, &sd).unwrap();
        assert_eq!(abc.a, 0.0);
        assert_eq!(abc.c, 0.0);
        assert!(abc.b.is_infinite());
    }

    #[test]
    fn sobolev_norms_accumulate() {
        let c = rotating(16, 1.0);
        let s = solve_tension(&c, TensionMethod::Direct).unwrap();
        let d = sigma_sobolev_norms(&s, 3).unwrap();
        assert_eq!(d.len(), 3);
        assert!(d.windows(2).all(|w| w[1] >= w[0]));
        // σ is quadratic in k: second differences are -ω², third vanish
        let expected = (1..=14)
            .map(|k| crate::weights::rising_weight(k, 1.5, 16).unwrap())
            .sum::<f64>()
            / 16.0;
        assert!((d[0] - expected).abs() < 1e-10);
        assert!((d[2] - d[0]).abs() < 1e-10);
    }
}
