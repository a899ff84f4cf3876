//! Per-instant diagnostics: energies, tension measures and constraint drift.

use serde::{Deserialize, Serialize};

use crate::energy::{discrete_energy, sigma_weighted_energy, u0, v0};
use crate::error::Result;
use crate::seq::forward_diff_pow;
use crate::state::ChainState;
use crate::tension::{diagnostics_abc, sigma_sobolev_norms, solve_sigma_dot, TensionSolution};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub time: f64,
    /// `e_0 ..= e_M`
    pub e: Vec<f64>,
    /// `ẽ_0 ..= ẽ_M`
    pub e_tilde: Vec<f64>,
    pub u0: f64,
    pub v0: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `d_1 ..= d_D`
    pub d: Vec<f64>,
    /// `max_k | |∇₊η_k| - 1 |`
    pub constraint_drift: f64,
    /// `max_k |⟨∇₊η_k, ∇₊η̇_k⟩|`
    pub orthogonality_drift: f64,
    pub min_sigma: f64,
    /// `max_k |∇₊η̇_k|`
    pub max_link_rate: f64,
    /// `max_k |∇₊²η_k|`, `k = 1 ..= n-1`
    pub max_curvature: f64,
}

impl EnergyReport {
    /// `e_m`, or NaN when not computed.
    pub fn e_at(&self, m: usize) -> f64 {
        self.e.get(m).copied().unwrap_or(f64::NAN)
    }

    pub fn e_tilde_at(&self, m: usize) -> f64 {
        self.e_tilde.get(m).copied().unwrap_or(f64::NAN)
    }

    /// `d_m`, `m ≥ 1`, or NaN when not computed.
    pub fn d_at(&self, m: usize) -> f64 {
        m.checked_sub(1).and_then(|i| self.d.get(i)).copied().unwrap_or(f64::NAN)
    }

    /// `a / e_2`
    pub fn a_ratio(&self) -> f64 {
        self.a / self.e_at(2)
    }

    /// `c / (e_2^{3/2} e_3^{1/2})`
    pub fn c_ratio(&self) -> f64 {
        self.c / (self.e_at(2).powf(1.5) * self.e_at(3).sqrt())
    }

    /// `d_1 / e_3⁴`
    pub fn d1_ratio(&self) -> f64 {
        self.d_at(1) / self.e_at(3).powi(4)
    }
}

pub fn max_link_rate(chain: &ChainState) -> f64 {
    let r = chain.link_rates();
    r.indices().map(|k| r.norm_sq(k)).fold(0.0, f64::max).sqrt()
}

pub fn max_curvature(chain: &ChainState) -> f64 {
    if chain.n() < 2 {
        return 0.0;
    }
    let d2 = forward_diff_pow(chain.eta(), chain.n(), 2).expect("n ≥ 2");
    d2.indices().map(|k| d2.norm_sq(k)).fold(0.0, f64::max).sqrt()
}

/// Full report with energies up to order `m_max` and tension norms `d_1 ..= d_{d_max}`.
pub fn energy_report(chain: &ChainState, sigma: &TensionSolution, m_max: usize, d_max: usize) -> Result<EnergyReport> {
    let sigma_dot = solve_sigma_dot(chain, sigma)?;
    let abc = diagnostics_abc(sigma, &sigma_dot)?;
    let drift = chain.constraint_report();
    Ok(EnergyReport {
        time: chain.time,
        e: discrete_energy(chain, m_max)?,
        e_tilde: sigma_weighted_energy(chain, Some(sigma), m_max)?,
        u0: u0(chain),
        v0: v0(chain),
        a: abc.a,
        b: abc.b,
        c: abc.c,
        d: sigma_sobolev_norms(sigma, d_max)?,
        constraint_drift: drift.length_drift,
        orthogonality_drift: drift.orthogonality_drift,
        min_sigma: sigma.min_sigma,
        max_link_rate: max_link_rate(chain),
        max_curvature: max_curvature(chain),
    })
}
