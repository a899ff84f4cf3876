//! Time integration, snapshots and blowup detection.

mod blowup;
pub mod initial;
mod integrator;

pub use blowup::{detect_blowup, growth_phase, BlowupFit, BlowupSample, FitRejection};
pub use integrator::{acceleration, adaptive_dt, project, step, step_with_dt, StepOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::report::{energy_report, max_curvature, EnergyReport};
use crate::state::ChainState;
use crate::tension::{solve_tension, TensionMethod, TensionSolution};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Rk4,
    Heun,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    pub cfl: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    pub project: bool,
    pub halt_on_negative_tension: bool,
    pub t_end: f64,
    /// Snapshot every this many steps (plus the first and last state).
    pub report_stride: usize,
    pub tension_method: TensionMethod,
    /// Highest energy order in reports.
    pub m_max: usize,
    /// Highest tension norm `d_m` in reports.
    pub d_max: usize,
    /// Stop as suspected blowup once `max |∇₊²η|` exceeds this fraction of its ceiling `2n`.
    pub blowup_curvature_fraction: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Rk4,
            cfl: 0.5,
            dt_max: 0.1,
            dt_min: 1e-12,
            project: true,
            halt_on_negative_tension: true,
            t_end: 1.0,
            report_stride: 1,
            tension_method: TensionMethod::Direct,
            m_max: 3,
            d_max: 3,
            blowup_curvature_fraction: 0.5,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(ChainError::Domain(format!("cfl = {} must lie in (0, 1]", self.cfl)));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_max) {
            return Err(ChainError::Domain(format!(
                "need 0 < dt_min ≤ dt_max, got {} and {}",
                self.dt_min, self.dt_max
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(ChainError::Domain(format!("t_end = {} must be finite and nonnegative", self.t_end)));
        }
        if self.report_stride == 0 {
            return Err(ChainError::Domain("report_stride must be positive".into()));
        }
        if !(self.blowup_curvature_fraction > 0.0) {
            return Err(ChainError::Domain("blowup_curvature_fraction must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    TEndReached,
    NegativeTension,
    BlowupSuspected,
    DtUnderflow,
    MaxSteps,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::TEndReached => "t_end_reached",
            Termination::NegativeTension => "negative_tension",
            Termination::BlowupSuspected => "blowup_suspected",
            Termination::DtUnderflow => "dt_underflow",
            Termination::MaxSteps => "max_steps",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub state: ChainState,
    pub tension: TensionSolution,
    pub report: EnergyReport,
    /// Largest projection correction since the previous snapshot.
    pub projection: f64,
    /// `(ẽ_3(t) - ẽ_3(t_prev)) / ((t - t_prev) e_3(t_prev)⁷)`, against the previous snapshot.
    pub gronwall_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    pub steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("a trajectory holds at least its initial snapshot")
    }

    /// `(t, max |∇₊η̇|, max |∇₊²η|)` per snapshot, for the blowup detector.
    pub fn blowup_series(&self) -> Vec<BlowupSample> {
        self.snapshots
            .iter()
            .map(|s| BlowupSample {
                t: s.state.time,
                angular: s.report.max_link_rate,
                curvature: s.report.max_curvature,
            })
            .collect()
    }
}

fn snapshot(
    step: usize,
    state: &ChainState,
    tension: &TensionSolution,
    cfg: &IntegratorConfig,
    projection: f64,
    prev: Option<&Snapshot>,
) -> Result<Snapshot> {
    let report = energy_report(state, tension, cfg.m_max, cfg.d_max)?;
    let gronwall_ratio = prev.filter(|_| cfg.m_max >= 3).map(|p| {
        let h = state.time - p.state.time;
        (report.e_tilde_at(3) - p.report.e_tilde_at(3)) / (h * p.report.e_at(3).powi(7))
    });
    Ok(Snapshot {
        step,
        state: state.clone(),
        tension: tension.clone(),
        report,
        projection,
        gronwall_ratio,
    })
}

fn halts_on_tension(state: &ChainState, tension: &TensionSolution, cfg: &IntegratorConfig) -> bool {
    // a chain with no link rates has σ ≡ 0 and sits at a fixed point
    cfg.halt_on_negative_tension && !tension.positivity && !state.is_stationary()
}

/// Integrate from `initial` until `cfg.t_end` or a termination condition.
pub fn run(initial: &ChainState, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let n = initial.n();
    let curvature_cap = cfg.blowup_curvature_fraction * 2.0 * n as f64;
    let mut state = initial.clone();
    let mut tension = solve_tension(&state, cfg.tension_method)?;
    let mut snapshots = vec![snapshot(0, &state, &tension, cfg, 0.0, None)?];
    let mut steps = 0;
    let mut projection: f64 = 0.0;
    let t_end = initial.time + cfg.t_end;
    let termination = loop {
        if halts_on_tension(&state, &tension, cfg) {
            break Termination::NegativeTension;
        }
        let remaining = t_end - state.time;
        if remaining <= 1e-14 * t_end.abs().max(1.0) {
            break Termination::TEndReached;
        }
        if steps >= cfg.max_steps {
            break Termination::MaxSteps;
        }
        let raw = integrator::raw_dt(n, &tension, cfg);
        if raw < cfg.dt_min {
            break Termination::DtUnderflow;
        }
        let dt = raw.min(cfg.dt_max).min(remaining);
        let outcome = step_with_dt(&state, dt, cfg)?;
        let last_step = dt == remaining;
        state = outcome.state;
        if last_step {
            state.time = t_end;
        }
        projection = projection.max(outcome.projection);
        tension = solve_tension(&state, cfg.tension_method)?;
        steps += 1;
        let blowup = max_curvature(&state) > curvature_cap;
        if steps % cfg.report_stride == 0 || last_step || blowup || halts_on_tension(&state, &tension, cfg) {
            let snap = snapshot(steps, &state, &tension, cfg, projection, snapshots.last())?;
            snapshots.push(snap);
            projection = 0.0;
        }
        if blowup {
            break Termination::BlowupSuspected;
        }
    };
    if snapshots.last().map(|s| s.step) != Some(steps) {
        let snap = snapshot(steps, &state, &tension, cfg, projection, snapshots.last())?;
        snapshots.push(snap);
    }
    Ok(Trajectory {
        snapshots,
        termination,
        steps,
    })
}
