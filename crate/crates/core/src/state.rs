//! The chain state and its odd extension through the fixed end.

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::seq::{dot, forward_diff, Seq};
use crate::tension::TensionSolution;

/// Tolerances for the two constraint invariants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed `| |∇₊η_k| - 1 |`.
    pub length: f64,
    /// Allowed `|⟨∇₊η_k, ∇₊η̇_k⟩|`.
    pub orthogonality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            length: 1e-10,
            orthogonality: 1e-8,
        }
    }
}

/// Positions `η_1 .. η_{n+1}` and velocities `η̇_1 .. η̇_{n+1}` of an `n`-link chain.
///
/// Particle `n + 1` is pinned at the origin. Links have length `1/n`, so
/// `|∇₊η_k| = 1` on the constraint manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    n: usize,
    dim: usize,
    eta: Seq,
    eta_dot: Seq,
    pub time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// `max_k | |∇₊η_k| - 1 |`
    pub length_drift: f64,
    /// `max_k |⟨∇₊η_k, ∇₊η̇_k⟩|`
    pub orthogonality_drift: f64,
}

impl ConstraintReport {
    pub fn within(&self, tol: &Tolerances) -> bool {
        self.length_drift <= tol.length && self.orthogonality_drift <= tol.orthogonality
    }
}

impl ChainState {
    /// Build from positions and velocities of particles `1 ..= n+1`.
    ///
    /// The last entry of each must be exactly zero.
    pub fn new(eta: Vec<Vec<f64>>, eta_dot: Vec<Vec<f64>>, time: f64) -> Result<Self> {
        if eta.len() < 2 {
            return Err(ChainError::Size("a chain needs at least one link".into()));
        }
        if eta.len() != eta_dot.len() {
            return Err(ChainError::Size(format!(
                "{} positions but {} velocities",
                eta.len(),
                eta_dot.len()
            )));
        }
        let eta = Seq::from_points(1, &eta)?;
        let eta_dot = Seq::from_points(1, &eta_dot)?;
        Self::from_seqs(eta, eta_dot, time)
    }

    pub fn from_seqs(eta: Seq, eta_dot: Seq, time: f64) -> Result<Self> {
        let dim = eta.dim();
        if dim < 2 {
            return Err(ChainError::UnsupportedDimension { dim, expected: 2 });
        }
        if eta_dot.dim() != dim || eta.len() != eta_dot.len() || eta.start() != 1 || eta_dot.start() != 1 {
            return Err(ChainError::Size("positions and velocities must both index 1..=n+1".into()));
        }
        if eta.len() < 2 {
            return Err(ChainError::Size("a chain needs at least one link".into()));
        }
        let n = eta.len() - 1;
        let last = n as i64 + 1;
        if eta.get(last).iter().any(|&x| x != 0.0) || eta_dot.get(last).iter().any(|&x| x != 0.0) {
            return Err(ChainError::Constraint("fixed end η_{n+1} and η̇_{n+1} must be zero".into()));
        }
        if !eta.all_finite() || !eta_dot.all_finite() || !time.is_finite() {
            return Err(ChainError::Numeric("non-finite entry in chain state".into()));
        }
        Ok(Self {
            n,
            dim,
            eta,
            eta_dot,
            time,
        })
    }

    /// Rebuild positions from link directions `∇₊η_k` and velocities from
    /// `∇₊η̇_k`, by cumulative sums anchored at `η_{n+1} = 0`:
    /// `η_k = η_{k+1} - (1/n) ∇₊η_k`.
    pub fn from_links(links: &[Vec<f64>], link_rates: &[Vec<f64>], time: f64) -> Result<Self> {
        let n = links.len();
        if n == 0 || link_rates.len() != n {
            return Err(ChainError::Size("link and link-rate counts must match and be positive".into()));
        }
        let dim = links[0].len();
        let nf = n as f64;
        let mut eta = vec![vec![0.0; dim]; n + 1];
        let mut eta_dot = vec![vec![0.0; dim]; n + 1];
        for k in (0..n).rev() {
            if links[k].len() != dim || link_rates[k].len() != dim {
                return Err(ChainError::Size("links have mixed dimensions".into()));
            }
            for c in 0..dim {
                eta[k][c] = eta[k + 1][c] - links[k][c] / nf;
                eta_dot[k][c] = eta_dot[k + 1][c] - link_rates[k][c] / nf;
            }
        }
        Self::new(eta, eta_dot, time)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Positions `η_1 ..= η_{n+1}`.
    pub fn eta(&self) -> &Seq {
        &self.eta
    }

    /// Velocities `η̇_1 ..= η̇_{n+1}`.
    pub fn eta_dot(&self) -> &Seq {
        &self.eta_dot
    }

    /// `∇₊η_k`, `k = 1 ..= n`.
    pub fn links(&self) -> Seq {
        forward_diff(&self.eta, self.n).expect("chain has at least two particles")
    }

    /// `∇₊η̇_k`, `k = 1 ..= n`.
    pub fn link_rates(&self) -> Seq {
        forward_diff(&self.eta_dot, self.n).expect("chain has at least two particles")
    }

    /// `s_k = k / n`
    pub fn s(&self, k: i64) -> f64 {
        k as f64 / self.n as f64
    }

    pub fn constraint_report(&self) -> ConstraintReport {
        let links = self.links();
        let rates = self.link_rates();
        let mut report = ConstraintReport {
            length_drift: 0.0,
            orthogonality_drift: 0.0,
        };
        for k in links.indices() {
            report.length_drift = report.length_drift.max((links.norm_sq(k).sqrt() - 1.0).abs());
            report.orthogonality_drift = report
                .orthogonality_drift
                .max(dot(links.get(k), rates.get(k)).abs());
        }
        report
    }

    pub fn check_constraints(&self, tol: &Tolerances) -> Result<ConstraintReport> {
        let report = self.constraint_report();
        if report.within(tol) {
            Ok(report)
        } else {
            Err(ChainError::Constraint(format!(
                "length drift {:.3e} (tol {:.1e}), orthogonality drift {:.3e} (tol {:.1e})",
                report.length_drift, tol.length, report.orthogonality_drift, tol.orthogonality
            )))
        }
    }

    /// True when every link rate `∇₊η̇_k` vanishes.
    pub fn is_stationary(&self) -> bool {
        let rates = self.link_rates();
        rates.as_slice().iter().all(|&x| x == 0.0)
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }
}

/// The chain reflected oddly through the fixed end, `η_k = -η_{2n+2-k}`,
/// with optional even tension `σ_k = σ_{2n+1-k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedChain {
    pub base: ChainState,
    /// `η_1 ..= η_{2n+1}`
    pub eta_ext: Seq,
    /// `η̇_1 ..= η̇_{2n+1}`
    pub eta_dot_ext: Seq,
    /// `σ_0 ..= σ_{2n}`
    pub sigma_ext: Option<Seq>,
}

fn odd_reflect(x: &Seq, n: usize) -> Seq {
    let dim = x.dim();
    let mut out = Seq::zeros(1, dim, 2 * n + 1);
    for k in 1..=(2 * n as i64 + 1) {
        if k <= n as i64 + 1 {
            out.set(k, x.get(k));
        } else {
            let mirrored: Vec<f64> = x.get(2 * n as i64 + 2 - k).iter().map(|v| -v).collect();
            out.set(k, &mirrored);
        }
    }
    out
}

/// Extend `σ_0 ..= σ_n` evenly to `σ_0 ..= σ_{2n}`.
pub fn even_extend_sigma(sigma: &Seq, n: usize) -> Result<Seq> {
    if sigma.start() != 0 || sigma.len() != n + 1 || sigma.dim() != 1 {
        return Err(ChainError::Size("tension must be scalar and index 0..=n".into()));
    }
    let n = n as i64;
    Ok(Seq::scalars(
        0,
        (0..=2 * n)
            .map(|k| if k <= n { sigma.value(k) } else { sigma.value(2 * n + 1 - k) })
            .collect(),
    ))
}

pub fn odd_extend(chain: &ChainState, sigma: Option<&TensionSolution>) -> Result<ExtendedChain> {
    let n = chain.n();
    let sigma_ext = match sigma {
        Some(s) => {
            if s.n() != n {
                return Err(ChainError::Size(format!("tension has n = {}, chain has n = {n}", s.n())));
            }
            Some(even_extend_sigma(&s.sigma, n)?)
        }
        None => None,
    };
    Ok(ExtendedChain {
        base: chain.clone(),
        eta_ext: odd_reflect(chain.eta(), n),
        eta_dot_ext: odd_reflect(chain.eta_dot(), n),
        sigma_ext,
    })
}
