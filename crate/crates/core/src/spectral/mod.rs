//! Planar chains as link angles, and the maps between chains and smooth whips.
//!
//! A planar chain is fixed by `θ_k` with `∇₊η_k = (cos θ_k, sin θ_k)`. Expanding
//! `θ_k = Σ a_m q_m(k/n)` in the discrete basis and reading the same coefficients
//! against the continuous basis `Q_m` identifies chains with polynomial whips; this
//! gives an exact round trip at fixed `n` and a way to move data between resolutions.

pub mod hahn;
pub mod legendre;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::seminorm::{weighted_seminorm_sq, SumRange};
use crate::seq::Seq;
use crate::state::ChainState;

pub use hahn::{basis_q, discrete_inner, discrete_seminorm_sq, gram, rho, rho_product, HahnBasis};
pub use legendre::{basis_big_q, basis_q_derivative, r_coefficient};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleState {
    pub n: usize,
    /// `θ_1 .. θ_n`
    pub theta: Vec<f64>,
    /// `θ̇_1 .. θ̇_n`
    pub theta_dot: Vec<f64>,
    pub time: f64,
}

impl AngleState {
    pub fn new(theta: Vec<f64>, theta_dot: Vec<f64>, time: f64) -> Result<Self> {
        if theta.is_empty() || theta.len() != theta_dot.len() {
            return Err(ChainError::Size(format!(
                "angle sequences have lengths {} and {}",
                theta.len(),
                theta_dot.len()
            )));
        }
        Ok(Self {
            n: theta.len(),
            theta,
            theta_dot,
            time,
        })
    }

    /// `θ_1 .. θ_{2n}` with `θ_{2n+1-k} = θ_k`.
    pub fn even_extension(&self) -> Vec<f64> {
        hahn::even_extend(&self.theta)
    }
}

fn require_planar(chain: &ChainState) -> Result<()> {
    if chain.dim() != 2 {
        return Err(ChainError::UnsupportedDimension {
            dim: chain.dim(),
            expected: 2,
        });
    }
    Ok(())
}

/// `x` shifted by a multiple of `2π` into `(-π, π]`.
fn wrap(x: f64) -> f64 {
    let y = x - 2.0 * PI * (x / (2.0 * PI)).round();
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

/// Link angles, unwrapped so that `|θ_{k+1} - θ_k| ≤ π`, and angular rates.
pub fn eta_to_theta(chain: &ChainState) -> Result<AngleState> {
    require_planar(chain)?;
    let links = chain.links();
    let rates = chain.link_rates();
    let mut theta = Vec::with_capacity(chain.n());
    let mut theta_dot = Vec::with_capacity(chain.n());
    for k in links.indices() {
        let l = links.get(k);
        let raw = l[1].atan2(l[0]);
        let th = match theta.last() {
            None => raw,
            Some(&prev) => prev + wrap(raw - prev),
        };
        let v = rates.get(k);
        theta_dot.push(-th.sin() * v[0] + th.cos() * v[1]);
        theta.push(th);
    }
    AngleState::new(theta, theta_dot, chain.time)
}

/// Chain with `∇₊η_k = (cos θ_k, sin θ_k)`, `∇₊η̇_k = θ̇_k (-sin θ_k, cos θ_k)`, `η_{n+1} = 0`.
pub fn theta_to_eta(angles: &AngleState) -> Result<ChainState> {
    let links: Vec<Vec<f64>> = angles.theta.iter().map(|t| vec![t.cos(), t.sin()]).collect();
    let rates: Vec<Vec<f64>> = angles
        .theta
        .iter()
        .zip(&angles.theta_dot)
        .map(|(t, w)| vec![-w * t.sin(), w * t.cos()])
        .collect();
    ChainState::from_links(&links, &rates, angles.time)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Coefficients against `q_m(k/n)`.
    HahnDerived,
    /// Coefficients against `Q_m(s)`.
    LegendreDerived,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoeffs {
    /// `a_1 ..` or `A_1 ..`
    pub coeffs: Vec<f64>,
    pub basis: Basis,
    /// Source resolution for discrete coefficients.
    pub n: Option<usize>,
}

impl SpectralCoeffs {
    /// `Σ_m r_mj c_m²`.
    pub fn seminorm_sq(&self, j: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| r_coefficient(i + 1, j) * c * c)
            .sum()
    }

    /// `Σ_m c_m Q_m^{(j)}(s)`.
    pub fn evaluate(&self, j: usize, s: f64) -> f64 {
        legendre::evaluate(&self.coeffs, j, s)
    }
}

/// Coefficients of `θ_1 .. θ_n` in the discrete basis.
pub fn discrete_coefficients(theta: &[f64]) -> Result<SpectralCoeffs> {
    let n = theta.len();
    let basis = HahnBasis::cached(n)?;
    Ok(SpectralCoeffs {
        coeffs: basis.analyze(theta)?,
        basis: Basis::HahnDerived,
        n: Some(n),
    })
}

/// Coefficients `A_m` of a continuous `θ(s)` by `points`-node quadrature.
pub fn continuous_coefficients<F>(theta: F, m_max: usize, points: usize) -> SpectralCoeffs
where
    F: Fn(f64) -> f64,
{
    SpectralCoeffs {
        coeffs: legendre::project_function(theta, m_max, points),
        basis: Basis::LegendreDerived,
        n: None,
    }
}

/// A whip given by angle and angular-rate expansions in `Q_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhipCoeffs {
    pub theta: SpectralCoeffs,
    pub theta_dot: SpectralCoeffs,
    pub time: f64,
}

/// `G_n`: the whip `Σ a_m Q_m` carrying the chain's discrete coefficients.
pub fn continuize_gn(angles: &AngleState) -> Result<WhipCoeffs> {
    let lift = |x: &[f64]| -> Result<SpectralCoeffs> {
        let mut c = discrete_coefficients(x)?;
        c.basis = Basis::LegendreDerived;
        Ok(c)
    };
    Ok(WhipCoeffs {
        theta: lift(&angles.theta)?,
        theta_dot: lift(&angles.theta_dot)?,
        time: angles.time,
    })
}

/// `Σ_{m ≤ min(M, n)} c_m q_m(k/n)` for `k = 1 ..= n`.
pub fn synthesize(coeffs: &SpectralCoeffs, n: usize) -> Result<Vec<f64>> {
    Ok(HahnBasis::cached(n)?.synthesize(&coeffs.coeffs))
}

/// `F_n`: truncate to `n` modes and evaluate in the discrete basis.
pub fn discretize_fn(whip: &WhipCoeffs, n: usize) -> Result<AngleState> {
    AngleState::new(synthesize(&whip.theta, n)?, synthesize(&whip.theta_dot, n)?, whip.time)
}

/// Re-sample a planar chain at `n_target` links through its whip expansion.
pub fn transfer_resolution(chain: &ChainState, n_target: usize) -> Result<ChainState> {
    if n_target == 0 {
        return Err(ChainError::Size("target resolution must be positive".into()));
    }
    let whip = continuize_gn(&eta_to_theta(chain)?)?;
    theta_to_eta(&discretize_fn(&whip, n_target)?)
}

/// Largest position gap between `coarse`, transferred to the resolution of `fine`, and `fine`.
pub fn resolution_error(coarse: &ChainState, fine: &ChainState) -> Result<f64> {
    let moved = transfer_resolution(coarse, fine.n())?;
    let mut worst: f64 = 0.0;
    for k in 1..=fine.n() as i64 {
        let d: f64 = moved
            .eta()
            .get(k)
            .iter()
            .zip(fine.eta().get(k))
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        worst = worst.max(d.sqrt());
    }
    Ok(worst)
}

/// Discrete analogues of the third-order angle and position norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEquivalence {
    /// `(1/n) Σ_{j=1}^{3} Σ_k s_k^{(j+1)} |∇₊^j θ_k|²`
    pub a: f64,
    /// `(1/n) Σ_{j=2}^{4} Σ_k s_k^{(j)} |∇₊^j η_k|²`
    pub b: f64,
    /// `b ≤ c (a + a² + a³)`
    pub b_bounded: bool,
    /// `a ≤ c (b + b²)`
    pub a_bounded: bool,
}

impl NormEquivalence {
    pub fn holds(&self) -> bool {
        self.a_bounded && self.b_bounded
    }
}

/// Compare the angle and position norms of a planar chain with constant `c`.
pub fn norm_equivalence(chain: &ChainState, c: f64) -> Result<NormEquivalence> {
    let n = chain.n();
    if n < 4 {
        return Err(ChainError::Size(format!("norm comparison needs n ≥ 4, got {n}")));
    }
    let angles = eta_to_theta(chain)?;
    let theta = Seq::scalars(1, angles.theta);
    let mut a = 0.0;
    let mut b = 0.0;
    for j in 1..=3 {
        a += weighted_seminorm_sq(&theta, (j + 1) as f64, j, n, SumRange::Standard)?;
        b += weighted_seminorm_sq(chain.eta(), (j + 1) as f64, j + 1, n, SumRange::Eta)?;
    }
    Ok(NormEquivalence {
        a,
        b,
        b_bounded: b <= c * (a + a * a + a * a * a),
        a_bounded: a <= c * (b + b * b),
    })
}
