//! Explicit stepping of `η̈_k = ∇₋(σ∇₊η)_k` with tension re-solved at every stage.

use crate::error::{ChainError, Result};
use crate::sampling::remove_component;
use crate::seq::Seq;
use crate::state::ChainState;
use crate::tension::{solve_tension, solve_tension_stage, TensionSolution};

use super::{IntegratorConfig, Scheme};

/// `η̈_k = n² [σ_k (η_{k+1} - η_k) - σ_{k-1} (η_k - η_{k-1})]` for `1 ≤ k ≤ n`, `η̈_{n+1} = 0`.
pub fn acceleration(chain: &ChainState, sigma: &TensionSolution) -> Result<Seq> {
    let n = chain.n();
    if sigma.n() != n {
        return Err(ChainError::Size(format!("tension has n = {}, chain has n = {n}", sigma.n())));
    }
    let eta = chain.eta();
    let dim = chain.dim();
    let n2 = (n * n) as f64;
    let mut out = Seq::zeros(1, dim, n + 1);
    for k in 1..=n as i64 {
        let here = eta.get(k);
        let next = eta.get(k + 1);
        let sk = sigma.at(k as usize);
        let sp = sigma.at(k as usize - 1);
        let acc = out.get_mut(k);
        for c in 0..dim {
            let back = if k > 1 { here[c] - eta.get(k - 1)[c] } else { 0.0 };
            acc[c] = n2 * (sk * (next[c] - here[c]) - sp * back);
        }
    }
    Ok(out)
}

/// Time derivative of `(η, η̇)` as a pair of sequences.
fn rhs(chain: &ChainState) -> Result<(Seq, Seq)> {
    let sigma = solve_tension_stage(chain)?;
    Ok((chain.eta_dot().clone(), acceleration(chain, &sigma)?))
}

fn axpy(x: &Seq, a: f64, y: &Seq) -> Seq {
    let data = x.as_slice().iter().zip(y.as_slice()).map(|(x, y)| x + a * y).collect();
    Seq::new(x.start(), x.dim(), data).expect("same layout")
}

fn stage(base: &ChainState, h: f64, k: &(Seq, Seq)) -> Result<ChainState> {
    ChainState::from_seqs(axpy(base.eta(), h, &k.0), axpy(base.eta_dot(), h, &k.1), base.time + h)
}

fn combine(base: &Seq, dt: f64, weights: &[f64], ks: &[&Seq]) -> Seq {
    let mut data = base.as_slice().to_vec();
    for (w, k) in weights.iter().zip(ks) {
        for (d, v) in data.iter_mut().zip(k.as_slice()) {
            *d += dt * w * v;
        }
    }
    Seq::new(base.start(), base.dim(), data).expect("same layout")
}

/// Result of one step: the new state and how far projection moved it.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: ChainState,
    /// `max_k max(|Δη_k|, |Δη̇_k|)` caused by projection.
    pub projection: f64,
}

/// One explicit step of size `dt` (negative allowed), projected if `cfg.project`.
pub fn step_with_dt(chain: &ChainState, dt: f64, cfg: &IntegratorConfig) -> Result<StepOutcome> {
    let k1 = rhs(chain)?;
    let (eta, eta_dot) = match cfg.scheme {
        Scheme::Rk4 => {
            let k2 = rhs(&stage(chain, dt / 2.0, &k1)?)?;
            let k3 = rhs(&stage(chain, dt / 2.0, &k2)?)?;
            let k4 = rhs(&stage(chain, dt, &k3)?)?;
            let w = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
            (
                combine(chain.eta(), dt, &w, &[&k1.0, &k2.0, &k3.0, &k4.0]),
                combine(chain.eta_dot(), dt, &w, &[&k1.1, &k2.1, &k3.1, &k4.1]),
            )
        }
        Scheme::Heun => {
            let k2 = rhs(&stage(chain, dt, &k1)?)?;
            let w = [0.5, 0.5];
            (
                combine(chain.eta(), dt, &w, &[&k1.0, &k2.0]),
                combine(chain.eta_dot(), dt, &w, &[&k1.1, &k2.1]),
            )
        }
    };
    if !eta.all_finite() || !eta_dot.all_finite() {
        return Err(ChainError::Numeric(format!("non-finite state after step at t = {}", chain.time)));
    }
    let raw = ChainState::from_seqs(eta, eta_dot, chain.time + dt)?;
    if !cfg.project {
        return Ok(StepOutcome {
            state: raw,
            projection: 0.0,
        });
    }
    let state = project(&raw)?;
    let projection = max_point_distance(raw.eta(), state.eta()).max(max_point_distance(raw.eta_dot(), state.eta_dot()));
    Ok(StepOutcome { state, projection })
}

/// Adaptive step: `step_with_dt` with `dt` from [`adaptive_dt`].
pub fn step(chain: &ChainState, cfg: &IntegratorConfig) -> Result<StepOutcome> {
    let sigma = solve_tension(chain, cfg.tension_method)?;
    step_with_dt(chain, adaptive_dt(chain.n(), &sigma, cfg), cfg)
}

fn max_point_distance(a: &Seq, b: &Seq) -> f64 {
    a.indices()
        .map(|k| {
            a.get(k)
                .iter()
                .zip(b.get(k))
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Return to the constraint manifold: unit links, then link rates orthogonal to links,
/// then positions and velocities rebuilt from the fixed end.
pub fn project(chain: &ChainState) -> Result<ChainState> {
    let links = chain.links();
    let rates = chain.link_rates();
    let mut units = Vec::with_capacity(chain.n());
    let mut tangential = Vec::with_capacity(chain.n());
    for k in links.indices() {
        let l = links.get(k);
        let norm = l.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(ChainError::Numeric(format!("degenerate link {k} during projection")));
        }
        let u: Vec<f64> = l.iter().map(|x| x / norm).collect();
        tangential.push(remove_component(rates.get(k), &u));
        units.push(u);
    }
    ChainState::from_links(&units, &tangential, chain.time)
}

/// `clamp(cfl / (n √max σ + ε), dt_min, dt_max)`, `ε = 1e-12`.
pub fn adaptive_dt(n: usize, sigma: &TensionSolution, cfg: &IntegratorConfig) -> f64 {
    raw_dt(n, sigma, cfg).clamp(cfg.dt_min, cfg.dt_max)
}

pub(crate) fn raw_dt(n: usize, sigma: &TensionSolution, cfg: &IntegratorConfig) -> f64 {
    cfg.cfl / (n as f64 * sigma.max_sigma().max(0.0).sqrt() + 1e-12)
}
