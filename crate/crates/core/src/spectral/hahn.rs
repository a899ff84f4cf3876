//! Discrete basis `q_m(k/n)`, `k = 1 ..= 2n`, even under `k ↦ 2n + 1 - k`.
//!
//! The `q_m` are the even-degree (`2m - 2`) orthonormal polynomials on the nodes
//! `k = 1 ..= 2n` for the weight `ρ_k = k (2n + 1 - k) / n²`; up to normalization these
//! are first differences of Hahn polynomials `h^{(0,0)}_{2m-1}(·, 2n + 1)`.
//! They are built by a Stieltjes process with full reorthogonalization, which is stable
//! at every degree the node set supports.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{ChainError, Result};

/// `ρ_k = k (2n + 1 - k) / n²`.
pub fn rho(k: i64, n: usize) -> f64 {
    let nf = n as f64;
    k as f64 * (2.0 * nf + 1.0 - k as f64) / (nf * nf)
}

/// `ρ_k^{(j+1)} = ρ_k ρ_{k+1} ... ρ_{k+j}`.
pub fn rho_product(k: i64, j: usize, n: usize) -> f64 {
    (0..=j as i64).map(|i| rho(k + i, n)).product()
}

#[derive(Debug)]
pub struct HahnBasis {
    n: usize,
    /// `values[m - 1][k - 1] = q_m(k/n)`.
    values: Vec<Vec<f64>>,
}

impl HahnBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(ChainError::Size("basis needs n ≥ 1".into()));
        }
        let len = 2 * n;
        let nf = n as f64;
        let t: Vec<f64> = (1..=len).map(|k| (2.0 * k as f64 - 2.0 * nf - 1.0) / (2.0 * nf)).collect();
        let w: Vec<f64> = (1..=len as i64).map(|k| rho(k, n)).collect();
        let ip = |a: &[f64], b: &[f64]| -> f64 {
            a.iter().zip(b).zip(&w).map(|((x, y), w)| x * y * w).sum::<f64>() / len as f64
        };
        let top = 2 * n - 2;
        let mut polys: Vec<Vec<f64>> = Vec::with_capacity(top + 1);
        let mut p = vec![1.0; len];
        let norm = ip(&p, &p).sqrt();
        p.iter_mut().for_each(|x| *x /= norm);
        polys.push(p);
        for _ in 0..top {
            let last = polys.last().expect("nonempty");
            let mut v: Vec<f64> = last.iter().zip(&t).map(|(p, t)| p * t).collect();
            for _ in 0..2 {
                for q in &polys {
                    let c = ip(&v, q);
                    v.iter_mut().zip(q).for_each(|(v, q)| *v -= c * q);
                }
            }
            let norm = ip(&v, &v).sqrt();
            if !(norm > 0.0) {
                return Err(ChainError::Numeric(format!("basis construction broke down at n = {n}")));
            }
            v.iter_mut().for_each(|x| *x /= norm);
            polys.push(v);
        }
        let values = polys
            .into_iter()
            .step_by(2)
            .map(|q| (0..len).map(|i| 0.5 * (q[i] + q[len - 1 - i])).collect())
            .collect();
        Ok(Self { n, values })
    }

    /// Shared basis for resolution `n`, built once per process.
    pub fn cached(n: usize) -> Result<Arc<HahnBasis>> {
        static CACHE: OnceLock<RwLock<HashMap<usize, Arc<HahnBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.read().expect("basis cache poisoned").get(&n) {
            return Ok(b.clone());
        }
        let built = Arc::new(HahnBasis::new(n)?);
        let mut guard = cache.write().expect("basis cache poisoned");
        Ok(guard.entry(n).or_insert(built).clone())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `q_m(k/n)` for `k = 1 ..= 2n`.
    pub fn mode(&self, m: usize) -> Result<&[f64]> {
        if m < 1 || m > self.n {
            return Err(ChainError::Domain(format!("mode m = {m} outside 1..={}", self.n)));
        }
        Ok(&self.values[m - 1])
    }

    /// `q_m(k/n)`, `1 ≤ k ≤ 2n`.
    pub fn value(&self, m: usize, k: usize) -> f64 {
        self.values[m - 1][k - 1]
    }

    /// `a_m = (1/n) Σ_{k=1}^n ρ_k θ_k q_m(k/n)` for `m = 1 ..= n`.
    pub fn analyze(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if theta.len() != n {
            return Err(ChainError::Size(format!("expected {n} values, got {}", theta.len())));
        }
        Ok(self
            .values
            .iter()
            .map(|q| (0..n).map(|i| rho(i as i64 + 1, n) * theta[i] * q[i]).sum::<f64>() / n as f64)
            .collect())
    }

    /// `θ_k = Σ_{m ≤ min(M, n)} a_m q_m(k/n)` for `k = 1 ..= n`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| coeffs.iter().zip(&self.values).map(|(a, q)| a * q[i]).sum())
            .collect()
    }
}

/// `q_m(k/n)`, `k = 1 ..= 2n`.
pub fn basis_q(m: usize, n: usize) -> Result<Vec<f64>> {
    if m < 1 || m > n {
        return Err(ChainError::Domain(format!("mode m = {m} requires 1 ≤ m ≤ n = {n}")));
    }
    Ok(HahnBasis::cached(n)?.mode(m)?.to_vec())
}

/// `θ_1 .. θ_{2n}` with `θ_{2n+1-k} = θ_k`.
pub fn even_extend(theta: &[f64]) -> Vec<f64> {
    let mut out = theta.to_vec();
    out.extend(theta.iter().rev());
    out
}

fn forward_diffs(x: &[f64], j: usize, n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut d = x.to_vec();
    for _ in 0..j {
        d = d.windows(2).map(|w| nf * (w[1] - w[0])).collect();
    }
    d
}

/// `⟨⟨f, g⟩⟩_{ρ,j} = (1/n) Σ_{k=1}^{n-⌊j/2⌋} ρ_k^{(j+1)} ∇₊^j f_k ∇₊^j g_k`
/// for even sequences given on `k = 1 ..= 2n` (or `1 ..= n`, then extended).
pub fn discrete_inner(f: &[f64], g: &[f64], j: usize, n: usize) -> Result<f64> {
    let full = |x: &[f64]| -> Result<Vec<f64>> {
        if x.len() == n {
            Ok(even_extend(x))
        } else if x.len() == 2 * n {
            Ok(x.to_vec())
        } else {
            Err(ChainError::Size(format!("expected {n} or {} values, got {}", 2 * n, x.len())))
        }
    };
    if j.div_ceil(2) > n {
        return Err(ChainError::Size(format!("order j = {j} too high for n = {n}")));
    }
    let (df, dg) = (forward_diffs(&full(f)?, j, n), forward_diffs(&full(g)?, j, n));
    let hi = n - j / 2;
    let sum: f64 = (1..=hi).map(|k| rho_product(k as i64, j, n) * df[k - 1] * dg[k - 1]).sum();
    Ok(sum / n as f64)
}

/// `⟨⟨θ, θ⟩⟩_{ρ,j}` for `θ_1 .. θ_n`.
pub fn discrete_seminorm_sq(theta: &[f64], j: usize) -> Result<f64> {
    discrete_inner(theta, theta, j, theta.len())
}

/// `G_{lm} = ⟨⟨q_l, q_m⟩⟩_{ρ,j}` for `l, m = 1 ..= m_max`.
pub fn gram(n: usize, j: usize, m_max: usize) -> Result<Vec<Vec<f64>>> {
    let basis = HahnBasis::cached(n)?;
    let modes: Vec<&[f64]> = (1..=m_max).map(|m| basis.mode(m)).collect::<Result<_>>()?;
    modes
        .iter()
        .map(|a| modes.iter().map(|b| discrete_inner(a, b, j, n)).collect())
        .collect()
}
