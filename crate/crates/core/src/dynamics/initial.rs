//! Initial-data library.
//!
//! Planar profiles are given as a link angle `θ(s)` and angular rate `θ̇(s)`
//! in arclength `s ∈ [0, 1]` from the free end; link `k` spans
//! `[(k-1)/n, k/n]` and samples both at its midpoint.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};
use crate::state::ChainState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum InitialData {
    /// At rest along direction `angle`.
    Straight { angle: f64 },
    /// Straight and turning rigidly about the fixed end at rate `omega`.
    RigidRotation { omega: f64, angle: f64 },
    /// Two antiparallel runs meeting at `fold` (fraction of the length from the free end).
    /// The run nearer the fixed end turns at rate `omega`; the outer run translates with it.
    Folded { fold: f64, omega: f64 },
    /// Hanging straight down with transverse link rates `amplitude · sin((mode - 1/2) π s)`,
    /// which stay smooth under even reflection about `s = 1`.
    PerturbedVertical { amplitude: f64, mode: u32 },
    /// Logarithmic spiral `θ = (2/3) ln s + atan2(2, 3) + π` with rate `rate_scale · s^{rate_exponent}`.
    LogSpiral { rate_scale: f64, rate_exponent: f64 },
    /// `θ = scale · s^q` with rate `rate_scale · s^{rate_exponent}`.
    PowerAngle {
        q: f64,
        scale: f64,
        rate_scale: f64,
        rate_exponent: f64,
    },
    /// A nearly closed loop of total turn `turn` centred at `center` with width `width`,
    /// on a chain turning at rate `omega`.
    NearLoop {
        center: f64,
        width: f64,
        turn: f64,
        omega: f64,
    },
}

impl InitialData {
    pub fn name(&self) -> &'static str {
        match self {
            InitialData::Straight { .. } => "straight",
            InitialData::RigidRotation { .. } => "rigid_rotation",
            InitialData::Folded { .. } => "folded",
            InitialData::PerturbedVertical { .. } => "perturbed_vertical",
            InitialData::LogSpiral { .. } => "log_spiral",
            InitialData::PowerAngle { .. } => "power_angle",
            InitialData::NearLoop { .. } => "near_loop",
        }
    }

    pub const NAMES: [&'static str; 7] = [
        "straight",
        "rigid_rotation",
        "folded",
        "perturbed_vertical",
        "log_spiral",
        "power_angle",
        "near_loop",
    ];

    /// Default parameters for a named generator.
    pub fn by_name(name: &str) -> Option<Self> {
        Some(match name {
            "straight" => InitialData::Straight { angle: -PI / 2.0 },
            "rigid_rotation" => InitialData::RigidRotation { omega: 1.0, angle: 0.0 },
            "folded" => InitialData::Folded { fold: 0.5, omega: 1.0 },
            "perturbed_vertical" => InitialData::PerturbedVertical {
                amplitude: 0.1,
                mode: 1,
            },
            "log_spiral" => InitialData::LogSpiral {
                rate_scale: 1.0,
                rate_exponent: 0.0,
            },
            "power_angle" => InitialData::PowerAngle {
                q: 0.75,
                scale: 1.0,
                rate_scale: 1.0,
                rate_exponent: 0.0,
            },
            "near_loop" => InitialData::NearLoop {
                center: 0.3,
                width: 0.08,
                turn: 1.9 * PI,
                omega: 1.0,
            },
            _ => return None,
        })
    }

    pub fn generate(&self, n: usize) -> Result<ChainState> {
        if n == 0 {
            return Err(ChainError::Size("n must be positive".into()));
        }
        match *self {
            InitialData::Straight { angle } => from_profile(n, |_| angle, |_| 0.0),
            InitialData::RigidRotation { omega, angle } => from_profile(n, |_| angle, |_| omega),
            InitialData::Folded { fold, omega } => {
                if !(0.0..=1.0).contains(&fold) {
                    return Err(ChainError::Domain(format!("fold = {fold} must lie in [0, 1]")));
                }
                let cut = (fold * n as f64).round() as usize;
                let links: Vec<Vec<f64>> = (1..=n).map(|k| if k <= cut { vec![-1.0, 0.0] } else { vec![1.0, 0.0] }).collect();
                let rates: Vec<Vec<f64>> = (1..=n)
                    .map(|k| if k <= cut { vec![0.0, 0.0] } else { vec![0.0, omega] })
                    .collect();
                ChainState::from_links(&links, &rates, 0.0)
            }
            InitialData::PerturbedVertical { amplitude, mode } => {
                from_profile(n, |_| -PI / 2.0, |s| amplitude * ((mode as f64 - 0.5) * PI * s).sin())
            }
            InitialData::LogSpiral {
                rate_scale,
                rate_exponent,
            } => {
                let phase = 2f64.atan2(3.0) + PI;
                from_profile(
                    n,
                    |s| 2.0 / 3.0 * s.ln() + phase,
                    |s| rate_scale * s.powf(rate_exponent),
                )
            }
            InitialData::PowerAngle {
                q,
                scale,
                rate_scale,
                rate_exponent,
            } => from_profile(n, |s| scale * s.powf(q), |s| rate_scale * s.powf(rate_exponent)),
            InitialData::NearLoop {
                center,
                width,
                turn,
                omega,
            } => {
                if !(width > 0.0) {
                    return Err(ChainError::Domain("loop width must be positive".into()));
                }
                from_profile(
                    n,
                    |s| -PI / 2.0 + turn * 0.5 * (1.0 + ((s - center) / width).tanh()),
                    |_| omega,
                )
            }
        }
    }
}

/// Chain with link `k` at angle `θ((k-½)/n)` turning at rate `θ̇((k-½)/n)`.
pub fn from_profile<F, G>(n: usize, theta: F, theta_dot: G) -> Result<ChainState>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut links = Vec::with_capacity(n);
    let mut rates = Vec::with_capacity(n);
    for k in 1..=n {
        let s = (k as f64 - 0.5) / n as f64;
        let (th, w) = (theta(s), theta_dot(s));
        if !th.is_finite() || !w.is_finite() {
            return Err(ChainError::Numeric(format!("profile not finite at s = {s}")));
        }
        links.push(vec![th.cos(), th.sin()]);
        rates.push(vec![-w * th.sin(), w * th.cos()]);
    }
    ChainState::from_links(&links, &rates, 0.0)
}
