//! The `α`/`β` recursion, the explicit Green matrix and its bound certificates.

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::seq::{dot, forward_diff_pow};
use crate::state::ChainState;

/// Link-angle cosines `α_1 ..= α_{n-1}` and the recursion `β_1 ..= β_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaBeta {
    n: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// `|∇₊²η_k|²`, `k = 1 ..= n-1`, when built from a chain.
    curvature: Option<Vec<f64>>,
}

impl AlphaBeta {
    /// `β_n = 1`, `β_i = 2 - α_i² / β_{i+1}`.
    pub fn from_alpha(alpha: Vec<f64>) -> Result<Self> {
        if let Some(a) = alpha.iter().find(|a| !(a.abs() <= 1.0 + 1e-12)) {
            return Err(ChainError::Domain(format!("|α| = {} exceeds 1", a.abs())));
        }
        Ok(Self::build(alpha))
    }

    /// No range check: intermediate integrator stages carry links slightly off unit length.
    fn build(alpha: Vec<f64>) -> Self {
        let n = alpha.len() + 1;
        let mut beta = vec![1.0; n];
        for i in (0..n - 1).rev() {
            beta[i] = 2.0 - alpha[i] * alpha[i] / beta[i + 1];
        }
        Self {
            n,
            alpha,
            beta,
            curvature: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `α_i`, `1 ≤ i ≤ n-1`.
    pub fn alpha(&self, i: usize) -> f64 {
        self.alpha[i - 1]
    }

    /// `β_i`, `1 ≤ i ≤ n`.
    pub fn beta(&self, i: usize) -> f64 {
        self.beta[i - 1]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn betas(&self) -> &[f64] {
        &self.beta
    }

    pub fn curvature(&self) -> Option<&[f64]> {
        self.curvature.as_deref()
    }

    pub fn all_alpha_positive(&self) -> bool {
        self.alpha.iter().all(|&a| a > 0.0)
    }

    pub fn all_alpha_nonnegative(&self) -> bool {
        self.alpha.iter().all(|&a| a >= 0.0)
    }

    /// `p_ij = Π_{m=i}^{j-1} α_m / β_{m+1}` for `i ≤ j`; the empty product is 1.
    pub fn p(&self, i: usize, j: usize) -> f64 {
        assert!(i <= j, "p_ij is only used for i ≤ j");
        (i..j).map(|m| self.alpha(m) / self.beta(m + 1)).product()
    }

    /// Smallest `υ` with `(k/n)^{3/2} |∇₊²η_k|² ≤ υ` for `1 ≤ k ≤ n-1`.
    pub fn upsilon(&self) -> Option<f64> {
        let nf = self.n as f64;
        self.curvature.as_ref().map(|c| {
            c.iter()
                .enumerate()
                .map(|(i, &q)| ((i + 1) as f64 / nf).powf(1.5) * q)
                .fold(0.0, f64::max)
        })
    }
}

pub fn compute_alpha_beta(chain: &ChainState) -> AlphaBeta {
    let links = chain.links();
    let n = chain.n();
    let alpha = (1..n as i64).map(|i| dot(links.get(i + 1), links.get(i))).collect();
    let mut ab = AlphaBeta::build(alpha);
    if n >= 2 {
        let d2 = forward_diff_pow(chain.eta(), n, 2).expect("n ≥ 2");
        ab.curvature = Some((1..n as i64).map(|k| d2.norm_sq(k)).collect());
    } else {
        ab.curvature = Some(Vec::new());
    }
    ab
}

/// `υ ≤ 2√n / 5`
pub fn upsilon_admissible(upsilon: f64, n: usize) -> bool {
    upsilon <= 2.0 * (n as f64).sqrt() / 5.0
}

/// `G_kj = (1/n) Σ_{i=1}^{min(j,k)} p_ij p_ik / β_i`, the inverse of the tension operator up to the factor `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenMatrix {
    n: usize,
    g: Vec<f64>,
    pub all_alpha_positive: bool,
    /// Smallest `υ` satisfying the curvature condition, if it is admissible.
    pub upsilon: Option<f64>,
}

impl GreenMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `G_kj`, `1 ≤ k, j ≤ n`.
    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.g[(k - 1) * self.n + (j - 1)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.g.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// `σ_k = (1/n) Σ_j G_kj w_j`, `k = 1 ..= n`.
    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        let nf = self.n as f64;
        self.g
            .chunks(self.n)
            .map(|row| row.iter().zip(w).map(|(g, w)| g * w).sum::<f64>() / nf)
            .collect()
    }
}

/// Build `G` in `O(n²)`.
///
/// For `k ≤ j`, `p_ij = p_ik p_kj`, so `G_kj = p_kj G_kk` with
/// `G_kk = (α_{k-1}/β_k)² G_{k-1,k-1} + 1/(n β_k)`.
pub fn green_matrix(ab: &AlphaBeta) -> GreenMatrix {
    let n = ab.n();
    let nf = n as f64;
    let mut g = vec![0.0; n * n];
    let mut diag = 0.0;
    for k in 1..=n {
        if k > 1 {
            let r = ab.alpha(k - 1) / ab.beta(k);
            diag *= r * r;
        }
        diag += 1.0 / (nf * ab.beta(k));
        g[(k - 1) * n + (k - 1)] = diag;
        let mut p = 1.0;
        for j in k + 1..=n {
            p *= ab.alpha(j - 1) / ab.beta(j);
            let v = p * diag;
            g[(k - 1) * n + (j - 1)] = v;
            g[(j - 1) * n + (k - 1)] = v;
        }
    }
    let upsilon = ab.upsilon().filter(|&u| upsilon_admissible(u, n));
    GreenMatrix {
        n,
        g,
        all_alpha_positive: ab.all_alpha_positive(),
        upsilon,
    }
}

/// Measured extremes of `G` and pass/fail of each bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenCertificate {
    pub n: usize,
    /// `max |n (G_kj - G_{k-1,j})|` with `G_0j = 0`.
    pub max_grad: f64,
    /// `max n G_kj / k`
    pub max_ng_over_k: f64,
    /// `max |G_kj| / (min(j,k)/n)`
    pub max_min_ratio: f64,
    /// `min n² G_kj / (jk)`
    pub min_lower_ratio: f64,
    pub all_alpha_positive: bool,
    pub all_alpha_nonnegative: bool,
    /// Smallest `υ` from the curvature condition, admissible or not.
    pub upsilon: Option<f64>,
    pub upsilon_admissible: bool,
    pub curvature_zero: bool,
    /// `|G_kj| ≤ min(j,k)/n`, valid for any sign pattern of `α`.
    pub min_bound_pass: bool,
    /// Gradient and `nG/k` bounds; `None` unless every `α_i > 0`.
    pub upper_bounds_pass: Option<bool>,
    /// `e^{-2υ}` and whether `n²G/(jk)` stays above it; `None` without an admissible `υ`.
    pub lower_bound: Option<f64>,
    pub lower_bound_pass: Option<bool>,
    /// `F_1n` from the matrix and from `(1/β_1) Π α_m/β_{m+1}`; `None` unless every `α_i ≥ 0`.
    pub corner_value: Option<f64>,
    pub corner_formula: Option<f64>,
    pub corner_pass: Option<bool>,
}

impl GreenCertificate {
    /// True when every applicable bound holds.
    pub fn all_pass(&self) -> bool {
        self.min_bound_pass
            && self.upper_bounds_pass.unwrap_or(true)
            && self.lower_bound_pass.unwrap_or(true)
            && self.corner_pass.unwrap_or(true)
    }
}

const BOUND_SLACK: f64 = 1e-12;

pub fn certify_bounds(g: &GreenMatrix, ab: &AlphaBeta) -> Result<GreenCertificate> {
    let n = g.n();
    if ab.n() != n {
        return Err(ChainError::Size(format!("Green matrix has n = {n}, α/β has n = {}", ab.n())));
    }
    let nf = n as f64;
    let mut max_grad: f64 = 0.0;
    let mut max_ngk = f64::NEG_INFINITY;
    let mut max_min_ratio: f64 = 0.0;
    let mut min_lower = f64::INFINITY;
    for k in 1..=n {
        for j in 1..=n {
            let gkj = g.get(k, j);
            let prev = if k > 1 { g.get(k - 1, j) } else { 0.0 };
            max_grad = max_grad.max((nf * (gkj - prev)).abs());
            max_ngk = max_ngk.max(nf * gkj / k as f64);
            max_min_ratio = max_min_ratio.max(gkj.abs() * nf / k.min(j) as f64);
            min_lower = min_lower.min(nf * nf * gkj / (j * k) as f64);
        }
    }
    let upsilon = ab.upsilon();
    let admissible = upsilon.is_some_and(|u| upsilon_admissible(u, n));
    let curvature_zero = ab.curvature().is_some_and(|c| c.iter().all(|&q| q == 0.0));
    let upper = ab
        .all_alpha_positive()
        .then(|| max_grad <= 1.0 + BOUND_SLACK && max_ngk <= 1.0 + BOUND_SLACK);
    let lower_bound = upsilon.filter(|_| admissible).map(|u| (-2.0 * u).exp());
    let lower_pass = lower_bound.map(|lb| min_lower >= lb);
    let (corner_value, corner_formula, corner_pass) = if ab.all_alpha_nonnegative() {
        let value = nf * g.get(1, n);
        let formula = ab.p(1, n) / ab.beta(1);
        let tol = BOUND_SLACK * (1.0 + formula.abs());
        let pass = (min_lower - value).abs() <= tol && (value - formula).abs() <= tol;
        (Some(value), Some(formula), Some(pass))
    } else {
        (None, None, None)
    };
    Ok(GreenCertificate {
        n,
        max_grad,
        max_ng_over_k: max_ngk,
        max_min_ratio,
        min_lower_ratio: min_lower,
        all_alpha_positive: ab.all_alpha_positive(),
        all_alpha_nonnegative: ab.all_alpha_nonnegative(),
        upsilon,
        upsilon_admissible: admissible,
        curvature_zero,
        min_bound_pass: max_min_ratio <= 1.0 + BOUND_SLACK,
        upper_bounds_pass: upper,
        lower_bound,
        lower_bound_pass: lower_pass,
        corner_value,
        corner_formula,
        corner_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tridiag::solve_symmetric;

    #[test]
    fn straight_recursion() {
        let ab = AlphaBeta::from_alpha(vec![1.0; 5]).unwrap();
        assert!(ab.betas().iter().all(|&b| b == 1.0));
    }

    #[test]
    fn half_alpha_recursion() {
        let ab = AlphaBeta::from_alpha(vec![0.5, 0.5]).unwrap();
        assert!((ab.beta(1) - 13.0 / 7.0).abs() < 1e-15);
        assert!((ab.beta(2) - 7.0 / 4.0).abs() < 1e-15);
        assert_eq!(ab.beta(3), 1.0);
    }

    #[test]
    fn right_angle_gives_two() {
        let ab = AlphaBeta::from_alpha(vec![0.3, 0.0, 0.8]).unwrap();
        assert_eq!(ab.beta(2), 2.0);
    }

    #[test]
    fn straight_green_is_min() {
        for n in [1usize, 2, 4, 9] {
            let g = green_matrix(&AlphaBeta::from_alpha(vec![1.0; n - 1]).unwrap());
            for k in 1..=n {
                for j in 1..=n {
                    assert!((g.get(k, j) - k.min(j) as f64 / n as f64).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn kink_decouples() {
        let g = green_matrix(&AlphaBeta::from_alpha(vec![0.9, 0.0, -0.4, 0.7]).unwrap());
        for k in 1..=2 {
            for j in 3..=5 {
                assert_eq!(g.get(k, j), 0.0);
            }
        }
    }

    #[test]
    fn green_inverts_operator() {
        let alpha = vec![0.9, -0.3, 0.5, 1.0, -1.0, 0.2];
        let n = alpha.len() + 1;
        let g = green_matrix(&AlphaBeta::from_alpha(alpha.clone()).unwrap());
        let mut diag = vec![2.0; n];
        diag[n - 1] = 1.0;
        let off: Vec<f64> = alpha.iter().map(|a| -a).collect();
        for j in 1..=n {
            let mut e = vec![0.0; n];
            e[j - 1] = 1.0;
            let col = solve_symmetric(&diag, &off, &e).unwrap();
            for k in 1..=n {
                assert!((col[k - 1] - n as f64 * g.get(k, j)).abs() < 1e-12);
            }
        }
    }
}
